#include "labgauge/scenario_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>

#include "labgauge/errors.hpp"

namespace labgauge {

using nlohmann::json;

namespace {

[[noreturn]] void bad_schema(const std::string& msg, const std::string& path) {
  throw SchemaError(msg + " (at '" + path + "')", path);
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad_schema("expected an object", path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) bad_schema("unknown key '" + it.key() + "'", path + "/" + it.key());
  }
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad_schema("expected an integer", path);
  return j.get<int>();
}

double get_double(const json& j, const std::string& path) {
  if (!j.is_number()) bad_schema("expected a number", path);
  return j.get<double>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad_schema("expected a string", path);
  return j.get<std::string>();
}

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

SmoothField parse_field(const json& j, const std::string& path, const Chart& chart) {
  const std::string text = get_string(j, path);
  try {
    return parse_expr(text, chart);
  } catch (const Error& e) {
    throw ValidationError(std::string(e.what()) + " in expression at '" + path + "'", path);
  }
}

Chart parse_chart(const json& j, const std::string& path, std::vector<int>& signs_out) {
  check_keys(j, path, {"dim", "metric_signs", "coordinates", "domain_hint"});
  if (!j.contains("dim")) bad_schema("missing required key 'dim'", path);
  const int dim = get_int(j.at("dim"), path + "/dim");
  if (dim < 1 || dim > 16)
    throw ValidationError("chart dimension must be between 1 and 16", path + "/dim");

  Chart chart(dim);
  if (j.contains("coordinates")) {
    const json& names = j.at("coordinates");
    if (!names.is_array() || static_cast<int>(names.size()) != dim)
      bad_schema("'coordinates' must list one name per dimension", path + "/coordinates");
    std::vector<std::string> list;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::string nm = get_string(names[i], path + "/coordinates/" + std::to_string(i));
      if (!valid_identifier(nm) || !seen.insert(nm).second)
        throw ValidationError("coordinate names must be distinct identifiers",
                              path + "/coordinates/" + std::to_string(i));
      list.push_back(std::move(nm));
    }
    chart = Chart(dim, std::move(list));
  }
  if (j.contains("domain_hint")) {
    const json& box = j.at("domain_hint");
    if (!box.is_array() || static_cast<int>(box.size()) != dim)
      bad_schema("'domain_hint' must list one [lo, hi] pair per dimension",
                 path + "/domain_hint");
    std::vector<std::pair<double, double>> hint;
    for (std::size_t i = 0; i < box.size(); ++i) {
      const std::string p = path + "/domain_hint/" + std::to_string(i);
      if (!box[i].is_array() || box[i].size() != 2) bad_schema("expected [lo, hi]", p);
      const double lo = get_double(box[i][0], p + "/0"), hi = get_double(box[i][1], p + "/1");
      if (!(lo < hi)) throw ValidationError("domain interval must satisfy lo < hi", p);
      hint.emplace_back(lo, hi);
    }
    chart.domain_hint = std::move(hint);
  }

  signs_out.assign(dim, 1);
  if (j.contains("metric_signs")) {
    const json& signs = j.at("metric_signs");
    if (!signs.is_array() || static_cast<int>(signs.size()) != dim)
      bad_schema("'metric_signs' must list one sign per dimension", path + "/metric_signs");
    for (std::size_t i = 0; i < signs.size(); ++i)
      signs_out[i] = get_int(signs[i], path + "/metric_signs/" + std::to_string(i));
  }
  return chart;
}

int parse_fibre_index(const std::string& key, int fibre_dim, const std::string& path) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(key, &pos);
  } catch (...) {
    bad_schema("fibre index key must be a 1-based integer", path + "/" + key);
  }
  if (pos != key.size() || v < 1 || v > fibre_dim)
    throw ValidationError("fibre index '" + key + "' is outside 1.." +
                              std::to_string(fibre_dim),
                          path + "/" + key);
  return v - 1;
}

KForm parse_kform(const json& j, const std::string& path, const Chart& chart, int fibre_dim,
                  int degree) {
  if (!j.is_object()) bad_schema("expected an object mapping fibre indices to components", path);
  KForm out(chart, fibre_dim, degree);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const int a = parse_fibre_index(it.key(), fibre_dim, path);
    const std::string fibre_path = path + "/" + it.key();
    if (!it.value().is_object())
      bad_schema("expected an object mapping multi-indices to expressions", fibre_path);
    for (auto c = it.value().begin(); c != it.value().end(); ++c) {
      const std::string comp_path = fibre_path + "/" + c.key();
      std::vector<int> I;
      try {
        I = multiindex::parse(c.key(), chart);
      } catch (const Error& e) {
        throw ValidationError(std::string(e.what()) + " (at '" + comp_path + "')", comp_path);
      }
      if (static_cast<int>(I.size()) != degree)
        throw ValidationError("multi-index '" + c.key() + "' has degree " +
                                  std::to_string(I.size()) + ", expected " +
                                  std::to_string(degree),
                              comp_path);
      const int sign = multiindex::sort_sign(I);
      if (sign == 0)
        throw ValidationError("multi-index '" + c.key() + "' repeats a coordinate", comp_path);
      SmoothField f = parse_field(c.value(), comp_path, chart);
      const int r = multiindex::rank(chart.dim, I);
      out.comp[a][r] = sign > 0 ? out.comp[a][r] + f : out.comp[a][r] - f;
    }
  }
  return out;
}

Connection parse_connection(const json& j, const std::string& path, const Chart& chart,
                            int fibre_dim) {
  if (!j.is_object()) bad_schema("expected an object keyed by 'b,a' index pairs", path);
  Connection out(chart, fibre_dim);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = it.key();
    const std::string entry_path = path + "/" + key;
    const std::size_t comma = key.find(',');
    if (comma == std::string::npos)
      bad_schema("connection key must look like 'b,a' (1-based)", entry_path);
    const int b = parse_fibre_index(key.substr(0, comma), fibre_dim, path);
    const int a = parse_fibre_index(key.substr(comma + 1), fibre_dim, path);
    if (!it.value().is_object())
      bad_schema("expected an object mapping 'd<coordinate>' to expressions", entry_path);
    for (auto c = it.value().begin(); c != it.value().end(); ++c) {
      const std::string dir_path = entry_path + "/" + c.key();
      const std::string& dk = c.key();
      if (dk.size() < 2 || dk[0] != 'd')
        bad_schema("direction key must look like 'd<coordinate>'", dir_path);
      const int i = chart.coordinate_index(dk.substr(1));
      if (i < 0)
        throw ValidationError("direction '" + dk + "' names no coordinate of the chart",
                              dir_path);
      out.gamma[b][a][i] = out.gamma[b][a][i] + parse_field(c.value(), dir_path, chart);
    }
  }
  return out;
}

json chart_to_json(const Chart& chart, const std::vector<int>& signs) {
  json out;
  out["dim"] = chart.dim;
  out["metric_signs"] = signs;
  if (!chart.has_default_names()) out["coordinates"] = chart.coordinate_names;
  if (chart.domain_hint) {
    json box = json::array();
    for (const auto& [lo, hi] : *chart.domain_hint) box.push_back({lo, hi});
    out["domain_hint"] = std::move(box);
  }
  return out;
}

json kform_to_json(const KForm& w) {
  json out = json::object();
  const auto& tuples = multiindex::all(w.chart.dim, w.degree);
  for (int a = 0; a < w.fibre_dim; ++a) {
    json fibre = json::object();
    for (int r = 0; r < w.ranks(); ++r)
      if (!w.comp[a][r].is_zero())
        fibre[multiindex::to_string(tuples[r], w.chart)] = w.comp[a][r].to_string(w.chart);
    if (!fibre.empty()) out[std::to_string(a + 1)] = std::move(fibre);
  }
  return out;
}

json connection_to_json(const Connection& nb) {
  json out = json::object();
  for (int b = 0; b < nb.fibre_dim; ++b)
    for (int a = 0; a < nb.fibre_dim; ++a) {
      json entry = json::object();
      for (int i = 0; i < nb.chart.dim; ++i)
        if (!nb.gamma[b][a][i].is_zero())
          entry["d" + nb.chart.coordinate_names[i]] = nb.gamma[b][a][i].to_string(nb.chart);
      if (!entry.empty())
        out[std::to_string(b + 1) + "," + std::to_string(a + 1)] = std::move(entry);
    }
  return out;
}

}  // namespace

Scenario scenario_from_json(const json& j, const std::string& fallback_name) {
  check_keys(j, "", {"name", "algebra", "structure_constants", "kappa", "chart_M", "chart_N",
                     "nabla", "zeta", "V", "X", "A", "seed", "tolerances"});
  for (const char* req : {"chart_M", "chart_N", "X", "kappa"})
    if (!j.contains(req)) bad_schema(std::string("missing required key '") + req + "'", "");
  const bool has_tag = j.contains("algebra"), has_raw = j.contains("structure_constants");
  if (has_tag == has_raw)
    throw ValidationError("exactly one of 'algebra' and 'structure_constants' is required",
                          "/algebra");

  Scenario s;
  s.name = j.contains("name") ? get_string(j.at("name"), "/name") : fallback_name;
  s.chart_M = parse_chart(j.at("chart_M"), "/chart_M", s.eta);
  s.chart_N = parse_chart(j.at("chart_N"), "/chart_N", s.gN);

  if (has_tag) {
    try {
      s.alg = make_algebra(get_string(j.at("algebra"), "/algebra"));
    } catch (const UnknownAlgebraTag& e) {
      throw ValidationError(e.what(), "/algebra");
    }
  } else {
    const json& raw = j.at("structure_constants");
    if (!raw.is_array() || raw.empty())
      bad_schema("expected a non-empty [a][b][c] array", "/structure_constants");
    std::vector<std::vector<std::vector<double>>> C;
    const std::size_t n = raw.size();
    for (std::size_t a = 0; a < n; ++a) {
      const std::string pa = "/structure_constants/" + std::to_string(a);
      if (!raw[a].is_array() || raw[a].size() != n) bad_schema("expected a square slice", pa);
      std::vector<std::vector<double>> slice;
      for (std::size_t b = 0; b < n; ++b) {
        const std::string pb = pa + "/" + std::to_string(b);
        if (!raw[a][b].is_array() || raw[a][b].size() != n) bad_schema("expected a row", pb);
        std::vector<double> row;
        for (std::size_t c = 0; c < n; ++c)
          row.push_back(get_double(raw[a][b][c], pb + "/" + std::to_string(c)));
        slice.push_back(std::move(row));
      }
      C.push_back(std::move(slice));
    }
    s.alg = make_algebra(C);
  }
  const int n = s.alg.dim;

  const json& km = j.at("kappa");
  if (!km.is_array() || static_cast<int>(km.size()) != n)
    bad_schema("'kappa' must be a " + std::to_string(n) + "x" + std::to_string(n) + " matrix",
               "/kappa");
  Eigen::MatrixXd kmat(n, n);
  for (int r = 0; r < n; ++r) {
    const std::string pr = "/kappa/" + std::to_string(r);
    if (!km[r].is_array() || static_cast<int>(km[r].size()) != n) bad_schema("expected a row", pr);
    for (int c = 0; c < n; ++c) kmat(r, c) = get_double(km[r][c], pr + "/" + std::to_string(c));
  }
  s.kappa = FibreMetric(std::move(kmat));

  s.nabla = j.contains("nabla") ? parse_connection(j.at("nabla"), "/nabla", s.chart_N, n)
                                : Connection::flat(s.chart_N, n);
  s.zeta = j.contains("zeta") ? parse_kform(j.at("zeta"), "/zeta", s.chart_N, n, 2)
                              : KForm(s.chart_N, n, 2);
  s.V = j.contains("V") ? parse_field(j.at("V"), "/V", s.chart_N) : SmoothField(0.0);

  const json& xj = j.at("X");
  if (!xj.is_array() || static_cast<int>(xj.size()) != s.chart_N.dim)
    bad_schema("'X' must list one expression per target coordinate", "/X");
  std::vector<SmoothField> xcomp;
  for (int i = 0; i < s.chart_N.dim; ++i)
    xcomp.push_back(parse_field(xj[i], "/X/" + std::to_string(i), s.chart_M));
  s.X = SmoothMap(s.chart_M, s.chart_N, std::move(xcomp));

  s.A = j.contains("A") ? parse_kform(j.at("A"), "/A", s.chart_M, n, 1)
                        : KForm(s.chart_M, n, 1);

  if (j.contains("seed")) {
    const json& sd = j.at("seed");
    if (!sd.is_number_unsigned() && !(sd.is_number_integer() && sd.get<long long>() >= 0))
      bad_schema("'seed' must be a non-negative integer", "/seed");
    s.seed = sd.get<std::uint64_t>();
  }
  if (j.contains("tolerances")) {
    const json& tj = j.at("tolerances");
    if (!tj.is_object()) bad_schema("'tolerances' must map check ids to numbers", "/tolerances");
    for (auto it = tj.begin(); it != tj.end(); ++it) {
      const double v = get_double(it.value(), "/tolerances/" + it.key());
      if (!(v > 0))
        throw ValidationError("tolerances must be positive", "/tolerances/" + it.key());
      s.tolerances[it.key()] = v;
    }
  }

  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open scenario file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("scenario file is not valid JSON: ") + e.what(), "");
  }
  std::string stem = path;
  if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
    stem = stem.substr(slash + 1);
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return scenario_from_json(j, stem);
}

json scenario_to_json(const Scenario& s) {
  json out;
  out["name"] = s.name;

  bool tagged = false;
  try {
    LieAlgebra named = make_algebra(s.alg.name);
    tagged = named.dim == s.alg.dim;
    for (int a = 0; tagged && a < s.alg.dim; ++a)
      tagged = (named.C[a] - s.alg.C[a]).cwiseAbs().maxCoeff() == 0.0;
  } catch (const Error&) {
    tagged = false;
  }
  if (tagged) {
    out["algebra"] = s.alg.name;
  } else {
    json C = json::array();
    for (int a = 0; a < s.alg.dim; ++a) {
      json slice = json::array();
      for (int b = 0; b < s.alg.dim; ++b) {
        json row = json::array();
        for (int c = 0; c < s.alg.dim; ++c) row.push_back(s.alg.C[a](b, c));
        slice.push_back(std::move(row));
      }
      C.push_back(std::move(slice));
    }
    out["structure_constants"] = std::move(C);
  }

  json km = json::array();
  for (int r = 0; r < s.kappa.kappa.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < s.kappa.kappa.cols(); ++c) row.push_back(s.kappa.kappa(r, c));
    km.push_back(std::move(row));
  }
  out["kappa"] = std::move(km);

  out["chart_M"] = chart_to_json(s.chart_M, s.eta);
  out["chart_N"] = chart_to_json(s.chart_N, s.gN);

  json xj = json::array();
  for (int i = 0; i < s.chart_N.dim; ++i) xj.push_back(s.X.comp[i].to_string(s.chart_M));
  out["X"] = std::move(xj);

  if (!s.nabla.is_flat()) out["nabla"] = connection_to_json(s.nabla);
  if (!s.zeta.is_zero()) out["zeta"] = kform_to_json(s.zeta);
  if (!s.A.is_zero()) out["A"] = kform_to_json(s.A);
  if (!s.V.is_zero()) out["V"] = s.V.to_string(s.chart_N);
  if (s.seed != 0) out["seed"] = s.seed;
  if (!s.tolerances.empty()) {
    json tj = json::object();
    for (const auto& [k, v] : s.tolerances) tj[k] = v;
    out["tolerances"] = std::move(tj);
  }
  return out;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw FileNotFound("cannot open '" + path + "' for writing");
  outf << scenario_to_json(s).dump(2) << "\n";
}

std::string scenario_digest(const Scenario& s) {
  const std::string text = scenario_to_json(s).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace labgauge
