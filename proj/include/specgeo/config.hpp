#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specgeo/cpn.hpp"
#include "specgeo/geom.hpp"
#include "specgeo/grassmann.hpp"
#include "specgeo/reports.hpp"

namespace specgeo {

/// Monte Carlo and search budgets. All must be positive.
struct Budgets {
  int n_grassmann = 64;
  int stab_budget = 256;
  long crofton_samples = 20000;
  int crofton_frames = 4;
  int projection_samples = 64;
  int projection_resolution = 128;
  int covering_radii = 12;
  long max_centers = 256;
  int growth_radii = 12;
  double min_jacobian = 0.05;
};

struct ExperimentConfig {
  enum class Kind { euclidean, cpn } kind = Kind::euclidean;
  std::string name;   // fixture label in reports; defaults to the shape or curve text
  std::string shape;  // euclidean: shape spec such as "torus(2,0.5,32)"
  std::string curve;  // cpn: "identity", "veronese", "rnc(d)" or a JSON coefficient list
  int subdiv = 4;     // cpn: icosphere level of the parameter sphere
  int k_max = 20;
  double eps = 0.05;
  std::optional<double> r;  // local radius; default a quarter of the bounding-box diagonal
  RegionStrategy strategy = RegionStrategy::greedy_multiplicity;
  Metric metric = Metric::euclidean;
  Budgets budgets;
  std::uint64_t seed = 0;
};

struct SuiteConfig {
  std::uint64_t seed = 0;
  std::string output;
  ReportFormat format = ReportFormat::json_lines;
  std::vector<ExperimentConfig> experiments;
};

/// Throws ConfigError on missing seed, unknown keys or kinds, non-positive
/// budgets, eps outside [0, 1) or k_max < 1. Each experiment inherits the
/// top-level seed and budgets unless it sets its own.
SuiteConfig parse_suite_config(const nlohmann::json& j);
SuiteConfig load_suite_config(const std::string& path);
void validate(const ExperimentConfig& e);

Metric parse_metric(const std::string& name);

/// Named curves ("identity", "veronese", "rnc(d)") or a JSON array of
/// polynomials, each an array of coefficients in ascending powers; a
/// coefficient is a number or a [re, im] pair.
HolomorphicCurve parse_curve_spec(const std::string& text);
HolomorphicCurve parse_curve_spec(const nlohmann::json& j);
inline HolomorphicCurve parse_curve_spec(const char* text) { return parse_curve_spec(std::string(text)); }

}  // namespace specgeo
