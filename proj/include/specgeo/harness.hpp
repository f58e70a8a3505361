#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specgeo/capacitor.hpp"
#include "specgeo/config.hpp"
#include "specgeo/cpn.hpp"
#include "specgeo/grassmann.hpp"
#include "specgeo/reports.hpp"
#include "specgeo/spectrum.hpp"

namespace specgeo {

/// Everything a Euclidean run measured, next to the reports built from it.
struct EuclideanRun {
  std::vector<BoundReport> reports;
  double volume = 0.0;
  double r = 0.0;
  SpectrumResult spectrum;
  IndexEstimate mean;
  int sup = 0;
  IndexEstimate eps_mean;
  IndexEstimate eps_local;
  CroftonEstimate crofton;
  double max_projected = 0.0;
  CoveringEstimate covering;    // rho = infinity
  CoveringEstimate covering_r;  // rho = r
  BallGrowth growth;
  std::optional<CurvatureNorms> curvature;  // hypersurfaces only
};

struct CpnRun {
  std::vector<BoundReport> reports;
  int degree = 0;
  double area = 0.0;
  SpectrumResult spectrum;
};

/// Spectrum, indices, Crofton constant, coverings and ball growth of one
/// shape, then every Euclidean report: cde-ratio, cor-2.6, thm-a3-mean,
/// thm-a3-local, vol-lemma, ball-growth, and reilly / ehi-ratio for
/// hypersurfaces.
EuclideanRun verify_euclidean_run(const ExperimentConfig& e);
std::vector<BoundReport> verify_euclidean(const ExperimentConfig& e);

/// Curve spectrum, area and degree, then thm-1.2, universal, cheng-yang,
/// degree-volume and normalized-cpn reports.
CpnRun verify_cpn_run(const ExperimentConfig& e);
std::vector<BoundReport> verify_cpn(const ExperimentConfig& e);

std::vector<BoundReport> run_experiment(const ExperimentConfig& e);

/// Builds every shape and curve first so a bad fixture fails before any
/// heavy work, then runs the experiments in order.
std::vector<BoundReport> run_suite(const SuiteConfig& suite, std::ostream* log = nullptr);

/// Writes via a temporary file in the same directory and a rename, so the
/// target is either absent, untouched, or complete.
void emit(const std::vector<BoundReport>& reports, ReportFormat format, const std::string& path);

// JSON views of module results, for the CLI.
nlohmann::ordered_json to_json(const SpectrumResult& s);
nlohmann::ordered_json to_json(const IndexEstimate& e);
nlohmann::ordered_json to_json(const CroftonEstimate& e);
nlohmann::ordered_json to_json(const CoveringEstimate& e);
nlohmann::ordered_json to_json(const CapacitorFamily& f);
nlohmann::ordered_json to_json(const CapacitorBound& b);
nlohmann::ordered_json to_json(const ExplicitBound& b);

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolation = 3;

/// Loads a config, runs it and emits to `out` (or the config's output).
/// Returns kExitOk, kExitViolation when an asserted report is violated, or
/// kExitError on config, geometry or IO errors, in which case nothing is
/// written.
int run(const std::string& config_path, const std::optional<std::string>& out, std::ostream& log);

}  // namespace specgeo
