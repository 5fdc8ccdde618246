#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "labgauge/expr.hpp"
#include "labgauge/sampling.hpp"

using labgauge::Chart;
using labgauge::SmoothField;
using labgauge::Sampler;
using labgauge::parse_expr;
using labgauge::fd_oracle;

namespace {

/// expressions safe to evaluate anywhere on [-1, 1]^3 (denominators bounded
/// away from zero), used for the derivative and printer batteries
const std::vector<std::string>& battery() {
  static const std::vector<std::string> list = {
      "1",
      "x1",
      "x1 + 2*x2 - 3*x3",
      "x1*x2*x3",
      "x1^2 - x2^2",
      "x1^3*x2 + x3",
      "(x1 + x2)^4",
      "sin(x1)",
      "cos(x1*x2)",
      "exp(x3)",
      "sin(x1)*cos(x2) + exp(x3)",
      "exp(sin(x1) + x2^2)",
      "x1 / (3 + x2)",
      "(x1^2 + x2^2 + x3^2) / (2 + cos(x1))",
      "sin(exp(x1*x2) - x3^2)",
      "1 / (4 + x1^2)",
      "x1^2^2",
      "-x1^2 + (-x2)^2",
      "cos(sin(cos(x1)))",
      "0.5*x1 - 1.25e-1*x2 + 3.75",
  };
  return list;
}

}  // namespace

TEST_CASE("arithmetic parsing follows the usual precedence and associativity") {
  Chart chart(3);
  const std::vector<double> p = {2.0, 3.0, 5.0};

  CHECK(parse_expr("x1 + x2*x3", chart).eval(p) == 17.0);
  CHECK(parse_expr("(x1 + x2)*x3", chart).eval(p) == 25.0);
  CHECK(parse_expr("x1 - x2 - x3", chart).eval(p) == -6.0);        // left associative
  CHECK(parse_expr("x1 - (x2 - x3)", chart).eval(p) == 4.0);
  CHECK(parse_expr("24 / x1 / x2", chart).eval(p) == 4.0);         // left associative
  CHECK(parse_expr("-x1^2", chart).eval(p) == -4.0);               // pow binds tighter
  CHECK(parse_expr("(-x1)^2", chart).eval(p) == 4.0);
  CHECK(parse_expr("x1^2^2", chart).eval(p) == 16.0);              // (x1^2)^2
  CHECK(parse_expr("2*x1^3", chart).eval(p) == 16.0);
  CHECK(parse_expr("x1^-1", chart).eval(p) == 0.5);
  CHECK(parse_expr("x1^(-2)", chart).eval(p) == 0.25);
  CHECK(parse_expr("1.5e2 + .5", chart).eval(p) == 150.5);
  CHECK(parse_expr("sin(0) + cos(0) + exp(0)", chart).eval(p) == 2.0);
}

TEST_CASE("parse errors carry the byte offset of the offending token") {
  Chart chart(2);

  CHECK_THROWS_AS((void)parse_expr("x1 + * x2", chart), labgauge::ParseError);
  try {
    (void)parse_expr("x1 + * x2", chart);
  } catch (const labgauge::ParseError& e) {
    CHECK(e.offset == 5);
    CHECK(!e.expected.empty());
  }

  try {
    (void)parse_expr("x1 + x2)", chart);
  } catch (const labgauge::ParseError& e) {
    CHECK(e.offset == 7);
  }

  try {
    (void)parse_expr("sin x1", chart);  // a call needs parentheses
  } catch (const labgauge::ParseError& e) {
    CHECK(e.offset == 4);
  }

  try {
    (void)parse_expr("x1^x2", chart);  // exponents must be integer literals
  } catch (const labgauge::ParseError& e) {
    CHECK(e.offset == 3);
  }
}

TEST_CASE("unknown identifiers are reported with their name and position") {
  Chart chart(2);
  try {
    (void)parse_expr("x1 + foo*x2", chart);
    FAIL("expected UnknownIdentifier");
  } catch (const labgauge::UnknownIdentifier& e) {
    CHECK(e.name == "foo");
    CHECK(e.offset == 5);
  }
}

TEST_CASE("coordinate aliases x y z t work exactly on default-named small charts") {
  const std::vector<double> p = {2.0, 3.0, 5.0, 7.0};

  Chart c4(4);
  CHECK(parse_expr("x + y + z + t", c4).eval(p) == 17.0);
  CHECK(parse_expr("t", c4).eval(p) == 7.0);
  CHECK(parse_expr("x4", c4).eval(p) == 7.0);  // canonical names stay valid

  Chart c2(2);
  CHECK(parse_expr("x*y", c2).eval(p) == 6.0);
  CHECK_THROWS_AS((void)parse_expr("z", c2), labgauge::UnknownIdentifier);

  // custom names disable the aliases
  Chart named(2, {"u", "v"});
  CHECK(parse_expr("u + v", named).eval(p) == 5.0);
  CHECK_THROWS_AS((void)parse_expr("x + v", named), labgauge::UnknownIdentifier);

  // charts above dimension four never expose aliases
  Chart c5(5);
  CHECK_THROWS_AS((void)parse_expr("x", c5), labgauge::UnknownIdentifier);
  CHECK(parse_expr("x5", c5).eval({1, 1, 1, 1, 9}) == 9.0);
}

TEST_CASE("evaluation faults are reported as domain and dimension errors") {
  Chart chart(2);
  CHECK_THROWS_AS((void)parse_expr("1/x1", chart).eval({0.0, 1.0}), labgauge::DomainError);
  CHECK_THROWS_AS((void)parse_expr("x1^(-2)", chart).eval({0.0, 1.0}), labgauge::DomainError);
  CHECK_THROWS_AS((void)parse_expr("x2", chart).eval({1.0}), labgauge::DimensionMismatch);
}

TEST_CASE("exact derivatives agree with the finite-difference oracle on a thousand samples") {
  Chart chart(3);
  Sampler sampler(2026);
  int samples = 0;
  for (const std::string& text : battery()) {
    SmoothField f = parse_expr(text, chart);
    std::vector<SmoothField> grad = {f.derivative(0), f.derivative(1), f.derivative(2)};
    for (int rep = 0; rep < 17 && samples < 1000; ++rep) {
      std::vector<double> p = sampler.point(chart);
      for (int i = 0; i < 3 && samples < 1000; ++i, ++samples) {
        const double exact = grad[i].eval(p);
        const double fd = fd_oracle(f, i, p);
        CHECK(std::abs(exact - fd) <= 1e-6 * (1.0 + std::abs(exact)));
      }
    }
  }
  CHECK(samples == 1000);
}

TEST_CASE("differentiation satisfies the product rule and mixed partials commute") {
  Chart chart(3);
  Sampler sampler(7);
  SmoothField f = parse_expr("sin(x1*x2) + x3^3", chart);
  SmoothField g = parse_expr("exp(x2) - x1*x3", chart);

  SmoothField lhs = (f * g).derivative(0);
  SmoothField rhs = f.derivative(0) * g + f * g.derivative(0);
  SmoothField fxy = f.derivative(0).derivative(1);
  SmoothField fyx = f.derivative(1).derivative(0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> p = sampler.point(chart);
    CHECK(std::abs(lhs.eval(p) - rhs.eval(p)) <= 1e-12 * (1.0 + std::abs(lhs.eval(p))));
    CHECK(std::abs(fxy.eval(p) - fyx.eval(p)) <= 1e-12 * (1.0 + std::abs(fxy.eval(p))));
  }
}

TEST_CASE("printing then reparsing reproduces every battery expression exactly") {
  Chart chart(3);
  Sampler sampler(11);
  for (const std::string& text : battery()) {
    SmoothField f = parse_expr(text, chart);
    SmoothField g = parse_expr(f.to_string(chart), chart);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> p = sampler.point(chart);
      CHECK(f.eval(p) == g.eval(p));
    }
  }
  // derivatives stay printable and reparseable too
  SmoothField h = parse_expr("exp(sin(x1) + x2^2) / (4 + x1^2)", chart).derivative(0);
  SmoothField h2 = parse_expr(h.to_string(chart), chart);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> p = sampler.point(chart);
    CHECK(h.eval(p) == h2.eval(p));
  }
}

TEST_CASE("substitution composes fields and coordinate scaling is substitution by t x") {
  Chart chart2(2);
  SmoothField f = parse_expr("x1^2 + x2", chart2);
  // x1 -> u + v, x2 -> u*v on a two-dimensional chart
  std::vector<SmoothField> repl = {parse_expr("x1 + x2", chart2), parse_expr("x1*x2", chart2)};
  SmoothField composed = f.substitute(repl);
  CHECK(composed.eval({2.0, 3.0}) == 31.0);  // (2+3)^2 + 6

  SmoothField g = parse_expr("sin(x1) + x1*x2^2", chart2);
  SmoothField scaled = g.scale_coordinates(0.5, 2);
  Sampler sampler(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> p = sampler.point(chart2);
    CHECK(scaled.eval(p) == doctest::Approx(g.eval({0.5 * p[0], 0.5 * p[1]})).epsilon(1e-15));
  }
}

TEST_CASE("light normalization collapses the obvious algebraic identities") {
  SmoothField x = SmoothField::coordinate(0);
  SmoothField zero(0.0), one(1.0);

  CHECK((x - x).is_zero());
  CHECK((zero * x).is_zero());
  CHECK((x * zero).is_zero());
  CHECK((zero + zero).is_zero());
  CHECK(x.pow(0).is_constant());
  double c = 0.0;
  CHECK(SmoothField::sin(zero).is_constant(&c));
  CHECK(c == 0.0);
  CHECK(SmoothField::exp(zero).is_constant(&c));
  CHECK(c == 1.0);
  CHECK((SmoothField(2.0) + SmoothField(3.0)).is_constant(&c));
  CHECK(c == 5.0);

  // x*1, x/1 and double negation keep the operand itself
  Chart chart(1);
  CHECK((x * one).to_string(chart) == "x1");
  CHECK((x / one).to_string(chart) == "x1");
  CHECK((-(-x)).to_string(chart) == "x1");
}

TEST_CASE("min_dim reports how many leading coordinates an expression needs") {
  Chart chart(4);
  CHECK(parse_expr("3.5", chart).min_dim() == 0);
  CHECK(parse_expr("x1", chart).min_dim() == 1);
  CHECK(parse_expr("x3 + x1", chart).min_dim() == 3);
  CHECK(parse_expr("sin(x4)", chart).min_dim() == 4);
}

TEST_CASE("charts know their domain box and star-shapedness about the origin") {
  Chart plain(2);
  CHECK(plain.star_shaped_about_origin());  // default box [-1,1]^2

  Chart shifted(2);
  shifted.domain_hint = {{{0.5, 2.0}, {-1.0, 1.0}}};
  CHECK(!shifted.star_shaped_about_origin());

  Chart containing(2);
  containing.domain_hint = {{{-1.0, 2.0}, {-3.0, 0.5}}};
  CHECK(containing.star_shaped_about_origin());

  CHECK(plain.coordinate_index("x2") == 1);
  CHECK(plain.coordinate_index("y") == 1);
  CHECK(plain.coordinate_index("nope") == -1);
}
