#include "specgeo/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "specgeo/error.hpp"

namespace specgeo {

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

// JSON has no infinity; an infinite radius is written as the string "inf".
nlohmann::ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return number(v);
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error("expected a number in report JSON");
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
    case Verdict::ratio_only: return "ratio-only";
  }
  return "?";
}

const std::vector<std::string>& inequality_ids() {
  static const std::vector<std::string> ids = {
      "reilly",    "ehi-ratio", "cde-ratio", "thm-a3-mean", "thm-a3-local",   "cor-2.6",       "vol-lemma",
      "ball-growth", "thm-1.2", "universal", "cheng-yang",  "degree-volume", "normalized-cpn"};
  return ids;
}

bool is_ratio_only(const std::string& id) {
  return id == "cde-ratio" || id == "normalized-cpn" || id == "ehi-ratio";
}

BoundReport asserted(std::string fixture, std::string id, int k, double lhs, double rhs, double tolerance,
                     std::vector<std::pair<std::string, double>> constants, Provenance prov) {
  const auto& ids = inequality_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw Error("unknown inequality id " + id);
  if (is_ratio_only(id)) throw Error(id + " is ratio-only and cannot assert");
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) throw Error("non-finite side in report " + id);
  BoundReport r;
  r.fixture = std::move(fixture);
  r.inequality_id = std::move(id);
  r.k = k;
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tolerance;
  r.constants = std::move(constants);
  r.slack = rhs - lhs;
  r.verdict = lhs <= rhs + tolerance * std::abs(rhs) ? Verdict::holds : Verdict::violated;
  r.provenance = std::move(prov);
  return r;
}

BoundReport ratio(std::string fixture, std::string id, int k, double value,
                  std::vector<std::pair<std::string, double>> constants, Provenance prov) {
  if (!is_ratio_only(id)) throw Error(id + " is not a ratio-only report");
  BoundReport r;
  r.fixture = std::move(fixture);
  r.inequality_id = std::move(id);
  r.k = k;
  r.lhs = value;
  r.slack = value;
  r.verdict = Verdict::ratio_only;
  r.constants = std::move(constants);
  r.provenance = std::move(prov);
  return r;
}

std::vector<ChengYangStep> cheng_yang_bound(const std::vector<double>& mu, int n) {
  if (n < 1) throw Error("Cheng-Yang recursion needs n >= 1");
  if (mu.empty() || !(mu.front() > 0.0)) throw Error("Cheng-Yang recursion needs mu_1 > 0");
  for (std::size_t i = 1; i < mu.size(); ++i)
    if (!(mu[i] >= mu[i - 1])) throw Error("Cheng-Yang recursion needs a nondecreasing sequence");
  std::vector<ChengYangStep> out;
  for (std::size_t k = 1; k < mu.size(); ++k) {
    ChengYangStep st;
    st.k = static_cast<int>(k);
    st.mu_next = mu[k];
    for (std::size_t i = 0; i < k; ++i) {
      const double gap = mu[k] - mu[i];
      st.hypothesis_lhs += gap * gap;
      st.hypothesis_rhs += mu[i] * gap;
    }
    st.hypothesis_rhs *= 4.0 / n;
    st.hypothesis_holds = st.hypothesis_lhs <= st.hypothesis_rhs * (1.0 + 1e-12) + 1e-300;
    st.bound = (1.0 + 4.0 / n) * std::pow(static_cast<double>(k), 2.0 / n) * mu.front();
    out.push_back(st);
  }
  return out;
}

std::pair<double, double> universal_inequality_sides(const std::vector<double>& spectrum, int m, int k) {
  if (m < 1) throw Error("universal inequality needs m >= 1");
  if (k < 1 || static_cast<std::size_t>(k) + 1 > spectrum.size())
    throw Error("universal inequality needs 1 <= k < spectrum length");
  for (std::size_t i = 1; i < spectrum.size(); ++i)
    if (!(spectrum[i] >= spectrum[i - 1])) throw Error("universal inequality needs a nondecreasing spectrum");
  const double cm = 2.0 * m * (m + 1);
  const double next = spectrum[static_cast<std::size_t>(k)];
  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < k; ++i) {
    const double gap = next - spectrum[static_cast<std::size_t>(i)];
    lhs += gap * gap;
    rhs += gap * (spectrum[static_cast<std::size_t>(i)] + cm);
  }
  return {lhs, 2.0 / m * rhs};
}

double universal_inequality_residual(const std::vector<double>& spectrum, int m, int k) {
  const auto [lhs, rhs] = universal_inequality_sides(spectrum, m, k);
  return rhs - lhs;
}

nlohmann::ordered_json to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["fixture"] = r.fixture;
  j["inequality_id"] = r.inequality_id;
  j["k"] = r.k;
  j["lhs"] = json_number(r.lhs);
  j["rhs"] = r.rhs ? json_number(*r.rhs) : nlohmann::ordered_json("ratio-only");
  j["tolerance"] = r.tolerance;
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (const auto& [key, v] : r.constants) c[key] = json_number(v);
  j["constants_used"] = c;
  j["slack"] = json_number(r.slack);
  j["verdict"] = to_string(r.verdict);
  nlohmann::ordered_json p;
  p["seed"] = r.provenance.seed;
  p["mesh"] = r.provenance.mesh;
  p["vertices"] = r.provenance.vertices;
  p["simplices"] = r.provenance.simplices;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [key, v] : r.provenance.samples) s[key] = json_number(v);
  p["samples"] = s;
  j["provenance"] = p;
  return j;
}

BoundReport report_from_json(const nlohmann::json& j) {
  try {
    BoundReport r;
    r.fixture = j.at("fixture").get<std::string>();
    r.inequality_id = j.at("inequality_id").get<std::string>();
    r.k = j.at("k").get<int>();
    r.lhs = number_from_json(j.at("lhs"));
    const auto& rhs = j.at("rhs");
    if (!(rhs.is_string() && rhs.get<std::string>() == "ratio-only")) r.rhs = number_from_json(rhs);
    r.tolerance = j.at("tolerance").get<double>();
    for (const auto& [key, v] : j.at("constants_used").items()) r.constants.emplace_back(key, number_from_json(v));
    r.slack = number_from_json(j.at("slack"));
    const auto verdict = j.at("verdict").get<std::string>();
    if (verdict == "holds") r.verdict = Verdict::holds;
    else if (verdict == "violated") r.verdict = Verdict::violated;
    else if (verdict == "ratio-only") r.verdict = Verdict::ratio_only;
    else throw Error("unknown verdict " + verdict);
    const auto& p = j.at("provenance");
    r.provenance.seed = p.at("seed").get<std::uint64_t>();
    r.provenance.mesh = p.at("mesh").get<std::string>();
    r.provenance.vertices = p.at("vertices").get<std::size_t>();
    r.provenance.simplices = p.at("simplices").get<std::size_t>();
    for (const auto& [key, v] : p.at("samples").items()) r.provenance.samples.emplace_back(key, number_from_json(v));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "jsonl" || name == "json" || name == "json-lines") return ReportFormat::json_lines;
  if (name == "csv") return ReportFormat::csv;
  throw ConfigError("unknown report format '" + name + "' (expected jsonl or csv)");
}

std::string serialize(const std::vector<BoundReport>& reports, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::json_lines) {
    for (const auto& r : reports) out << to_json(r).dump() << '\n';
    return out.str();
  }
  out << "fixture,inequality_id,k,lhs,rhs,tolerance,slack,verdict,seed,mesh\n";
  for (const auto& r : reports) {
    out << csv_field(r.fixture) << ',' << r.inequality_id << ',' << r.k << ',' << number(r.lhs) << ','
        << (r.rhs ? number(*r.rhs) : std::string("ratio-only")) << ',' << number(r.tolerance) << ','
        << number(r.slack) << ',' << to_string(r.verdict) << ',' << r.provenance.seed << ','
        << csv_field(r.provenance.mesh) << '\n';
  }
  return out.str();
}

}  // namespace specgeo
