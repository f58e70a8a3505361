#include "specgeo/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "specgeo/error.hpp"

namespace specgeo {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, v] : j.items())
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

void read_budgets(const json& j, Budgets& b) {
  if (!j.is_object()) throw ConfigError("budgets must be an object");
  reject_unknown(j, {"n_grassmann", "stab_budget", "crofton_samples", "crofton_frames", "projection_samples",
                     "projection_resolution", "covering_radii", "max_centers", "growth_radii", "min_jacobian"},
                 "budgets");
  read(j, "n_grassmann", b.n_grassmann);
  read(j, "stab_budget", b.stab_budget);
  read(j, "crofton_samples", b.crofton_samples);
  read(j, "crofton_frames", b.crofton_frames);
  read(j, "projection_samples", b.projection_samples);
  read(j, "projection_resolution", b.projection_resolution);
  read(j, "covering_radii", b.covering_radii);
  read(j, "max_centers", b.max_centers);
  read(j, "growth_radii", b.growth_radii);
  read(j, "min_jacobian", b.min_jacobian);
}

std::uint64_t read_seed(const json& j) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw ConfigError("seed must be a nonnegative integer");
  return j.get<std::uint64_t>();
}

Complex read_coefficient(const json& c) {
  if (c.is_number()) return c.get<double>();
  if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number())
    return {c[0].get<double>(), c[1].get<double>()};
  throw ConfigError("curve coefficient must be a number or a [re, im] pair");
}

}  // namespace

Metric parse_metric(const std::string& name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "graph-geodesic" || name == "graph_geodesic") return Metric::graph_geodesic;
  throw ConfigError("unknown metric '" + name + "' (expected euclidean or graph-geodesic)");
}

void validate(const ExperimentConfig& e) {
  const auto& b = e.budgets;
  if (b.n_grassmann < 1 || b.stab_budget < 1 || b.crofton_samples < 1 || b.crofton_frames < 1 ||
      b.projection_samples < 1 || b.projection_resolution < 1 || b.covering_radii < 1 || b.max_centers < 1 ||
      b.growth_radii < 1 || !(b.min_jacobian > 0.0))
    throw ConfigError("all budgets must be positive in experiment '" + e.name + "'");
  if (e.k_max < 1) throw ConfigError("k_max must be at least 1");
  if (!(e.eps >= 0.0 && e.eps < 1.0)) throw ConfigError("eps must lie in [0, 1)");
  if (e.r && !(*e.r > 0.0)) throw ConfigError("r must be positive");
  if (e.kind == ExperimentConfig::Kind::euclidean && e.shape.empty())
    throw ConfigError("euclidean experiment needs a shape");
  if (e.kind == ExperimentConfig::Kind::cpn) {
    if (e.curve.empty()) throw ConfigError("cpn experiment needs a curve");
    if (e.subdiv < 0) throw ConfigError("subdiv must be nonnegative");
  }
}

SuiteConfig parse_suite_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"seed", "output", "format", "budgets", "experiments"}, "config");
  if (!j.contains("seed")) throw ConfigError("config needs a seed");
  SuiteConfig suite;
  suite.seed = read_seed(j.at("seed"));
  read(j, "output", suite.output);
  if (j.contains("format")) suite.format = parse_report_format(j.at("format").get<std::string>());
  Budgets defaults;
  if (j.contains("budgets")) read_budgets(j.at("budgets"), defaults);
  if (!j.contains("experiments") || !j.at("experiments").is_array() || j.at("experiments").empty())
    throw ConfigError("config needs a nonempty experiments list");

  for (const auto& x : j.at("experiments")) {
    if (!x.is_object()) throw ConfigError("experiment must be an object");
    reject_unknown(x, {"name", "kind", "shape", "curve", "subdiv", "k_max", "eps", "r", "strategy", "metric",
                       "budgets", "seed"},
                   "experiment");
    ExperimentConfig e;
    e.seed = suite.seed;
    e.budgets = defaults;
    const std::string kind = x.value("kind", "euclidean");
    if (kind == "euclidean") e.kind = ExperimentConfig::Kind::euclidean;
    else if (kind == "cpn") e.kind = ExperimentConfig::Kind::cpn;
    else throw ConfigError("unknown experiment kind '" + kind + "'");
    read(x, "shape", e.shape);
    if (x.contains("curve")) e.curve = x.at("curve").is_string() ? x.at("curve").get<std::string>() : x.at("curve").dump();
    read(x, "subdiv", e.subdiv);
    read(x, "k_max", e.k_max);
    read(x, "eps", e.eps);
    if (x.contains("r")) {
      double r = 0.0;
      read(x, "r", r);
      e.r = r;
    }
    if (x.contains("strategy")) e.strategy = parse_region_strategy(x.at("strategy").get<std::string>());
    if (x.contains("metric")) e.metric = parse_metric(x.at("metric").get<std::string>());
    if (x.contains("budgets")) read_budgets(x.at("budgets"), e.budgets);
    if (x.contains("seed")) e.seed = read_seed(x.at("seed"));
    e.name = x.value("name", e.kind == ExperimentConfig::Kind::euclidean ? e.shape : e.curve);
    validate(e);
    suite.experiments.push_back(std::move(e));
  }
  std::set<std::string> names;
  for (const auto& e : suite.experiments)
    if (!names.insert(e.name).second) throw ConfigError("duplicate experiment name '" + e.name + "'");
  return suite;
}

SuiteConfig load_suite_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_suite_config(j);
}

HolomorphicCurve parse_curve_spec(const json& j) {
  if (j.is_string()) return parse_curve_spec(j.get<std::string>());
  if (!j.is_array()) throw ConfigError("curve must be a name or a list of coefficient lists");
  std::vector<std::vector<Complex>> coeffs;
  for (const auto& p : j) {
    if (!p.is_array()) throw ConfigError("each curve polynomial must be a coefficient list");
    std::vector<Complex> poly;
    for (const auto& c : p) poly.push_back(read_coefficient(c));
    coeffs.push_back(std::move(poly));
  }
  return make_curve(std::move(coeffs));
}

HolomorphicCurve parse_curve_spec(const std::string& text) {
  if (text == "identity") return rational_normal_curve(1);
  if (text == "veronese") return rational_normal_curve(2);
  if (text.rfind("rnc(", 0) == 0 && text.back() == ')') {
    const std::string inner = text.substr(4, text.size() - 5);
    std::size_t used = 0;
    int d = 0;
    try {
      d = std::stoi(inner, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad rational normal curve degree in '" + text + "'");
    }
    if (used != inner.size()) throw ConfigError("bad rational normal curve degree in '" + text + "'");
    return rational_normal_curve(d);
  }
  if (!text.empty() && text.front() == '[') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error&) {
      throw ConfigError("curve coefficient list is not valid JSON");
    }
    return parse_curve_spec(j);
  }
  throw ConfigError("unknown curve '" + text + "'");
}

}  // namespace specgeo
