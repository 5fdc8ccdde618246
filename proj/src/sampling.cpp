#include "labgauge/sampling.hpp"

namespace labgauge {

std::vector<double> Sampler::point(const Chart& chart) {
  std::vector<double> p(chart.dim);
  for (int i = 0; i < chart.dim; ++i) {
    double lo = -1.0, hi = 1.0;
    if (chart.domain_hint) {
      lo = (*chart.domain_hint)[i].first;
      hi = (*chart.domain_hint)[i].second;
    }
    p[i] = uniform(lo, hi);
  }
  return p;
}

SmoothField Sampler::polynomial(const Chart& chart, int degree, int terms) {
  SmoothField sum(0.0);
  for (int t = 0; t < terms; ++t) {
    SmoothField mono(static_cast<double>(small_nonzero(3)));
    int total = below(degree + 1);
    for (int d = 0; d < total; ++d) mono *= SmoothField::coordinate(below(chart.dim));
    sum += mono;
  }
  return sum;
}

std::vector<double> Sampler::tangent(int dim) {
  std::vector<double> v(dim);
  for (int i = 0; i < dim; ++i) v[i] = uniform(-1.0, 1.0);
  return v;
}

}  // namespace labgauge
