#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace specgeo {

enum class Verdict { holds, violated, ratio_only };
std::string to_string(Verdict v);

/// Where a number came from: enough to rerun it.
struct Provenance {
  std::uint64_t seed = 0;
  std::string mesh;  // shape or curve spec plus resolution
  std::size_t vertices = 0;
  std::size_t simplices = 0;
  std::vector<std::pair<std::string, double>> samples;  // budget name -> count
};

struct BoundReport {
  std::string fixture;
  std::string inequality_id;
  int k = 0;  // 0 for reports not indexed by an eigenvalue
  double lhs = 0.0;
  std::optional<double> rhs;  // empty: ratio-only, lhs is the ratio
  double tolerance = 0.0;     // relative; holds iff lhs <= rhs * (1 + tolerance)
  std::vector<std::pair<std::string, double>> constants;
  double slack = 0.0;  // rhs - lhs, or the ratio itself
  Verdict verdict = Verdict::ratio_only;
  Provenance provenance;
};

/// The ids a report may carry, in emission order.
const std::vector<std::string>& inequality_ids();
/// Ids that never assert.
bool is_ratio_only(const std::string& id);

/// Asserted report; fills slack and verdict. Throws Error on an unknown or
/// ratio-only id, or a non-finite side.
BoundReport asserted(std::string fixture, std::string id, int k, double lhs, double rhs, double tolerance,
                     std::vector<std::pair<std::string, double>> constants, Provenance prov);
/// Ratio-only report; throws Error unless the id is ratio-only.
BoundReport ratio(std::string fixture, std::string id, int k, double value,
                  std::vector<std::pair<std::string, double>> constants, Provenance prov);

/// One step of the Cheng-Yang recursion at index k (1-based).
struct ChengYangStep {
  int k = 0;
  double hypothesis_lhs = 0.0;  // sum_{i<=k} (mu_{k+1} - mu_i)^2
  double hypothesis_rhs = 0.0;  // (4/n) sum_{i<=k} mu_i (mu_{k+1} - mu_i)
  bool hypothesis_holds = false;
  double mu_next = 0.0;  // mu_{k+1}
  double bound = 0.0;    // (1 + 4/n) k^(2/n) mu_1
};

/// Steps k = 1 .. mu.size() - 1. Throws Error unless mu is positive and
/// nondecreasing, or n < 1. The hypothesis test allows 1e-12 relative.
std::vector<ChengYangStep> cheng_yang_bound(const std::vector<double>& mu, int n);

/// rhs - lhs of sum_{i<=k} (l_{k+1} - l_i)^2 <= (2/m) sum_{i<=k} (l_{k+1} - l_i)(l_i + c_m)
/// with c_m = 2m(m+1). Throws Error on k < 1, k + 1 > size, or a decreasing list.
double universal_inequality_residual(const std::vector<double>& spectrum, int m, int k);
/// Both sides of the same inequality.
std::pair<double, double> universal_inequality_sides(const std::vector<double>& spectrum, int m, int k);

nlohmann::ordered_json to_json(const BoundReport& r);
BoundReport report_from_json(const nlohmann::json& j);

enum class ReportFormat { json_lines, csv };
ReportFormat parse_report_format(const std::string& name);

/// Full serialized file content; byte-identical for identical reports.
std::string serialize(const std::vector<BoundReport>& reports, ReportFormat format);

}  // namespace specgeo
