#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "specgeo/geom.hpp"
#include "specgeo/grassmann.hpp"
#include "specgeo/kernels.hpp"

namespace specgeo {

struct CoveringEstimate {
  double kappa = 4.0;
  int N_hat = 1;
  double rho = 0.0;
  std::vector<double> radii_tested;
  std::size_t centers_tested = 0;
};

/// Greedy (kappa = 4) covering number. Radii come from a fixed log grid
/// diameter * 2^(-i/2), i < radii_count, cut at rho, so larger rho only adds
/// radii. Every point is a center unless `max_centers` > 0, which takes an
/// evenly strided subset. Throws Error on an empty space.
CoveringEstimate covering_number(const MetricMeasureSpace& x, double rho, int radii_count = 12,
                                 std::size_t max_centers = 0, Exec exec = Exec::parallel);

/// n capacitors (A_i, A_i^r) with A_i = B(x_i, r) and A_i^r its
/// r-neighbourhood.
struct CapacitorFamily {
  int n = 0;
  double r = 0.0;
  std::vector<std::size_t> centers;
  std::vector<std::vector<std::size_t>> cores;
  std::vector<std::vector<std::size_t>> halos;
  std::vector<double> core_masses;
  std::vector<double> halo_masses;
  std::vector<std::vector<double>> test_functions;  // per point, filled by build_test_functions
  // Mass bound mu(A_i) >= mu(X) / (2 N n), reported only when N was given.
  std::optional<double> mass_bound;
  std::vector<std::uint8_t> mass_bound_holds;
};

/// Greedy densest-ball packing: points in order of decreasing ball mass
/// (ties by index), accepting x when every point of B(x, r) is farther than
/// 2r from all earlier cores. Throws PackingInfeasible when fewer than n
/// cores fit. `N_hat` > 0 fills the mass-bound report.
CapacitorFamily build_capacitors(const MetricMeasureSpace& x, int n, double r, int N_hat = 0,
                                 Exec exec = Exec::parallel);

/// f_i = clamp(1 - d(., A_i) / r, 0, 1) on every point of x.
CapacitorFamily build_test_functions(CapacitorFamily fam, const MetricMeasureSpace& x);

bool halos_disjoint(const CapacitorFamily& fam);

/// max over i and point pairs with d <= 2r of |f_i(a) - f_i(b)| / d(a, b).
double max_dilatation(const CapacitorFamily& fam, const MetricMeasureSpace& x);

struct CapacitorBound {
  double bound = 0.0;           // min-max certificate for lambda_n
  double spectrum_check = 0.0;  // lambda_n of the discrete operator
  int built = 0;                // capacitors packed (2n, or n as fallback)
  bool stiffness_coupled = false;  // true: bound is the Ritz max over the span
  CapacitorFamily family;       // the kept n capacitors
  std::vector<double> rayleigh;  // per kept test function
  Eigen::MatrixXd vertex_functions;  // mesh vertices x n, the functions actually tested
};

/// Packs 2n capacitors on to_mm_space(c, metric), keeps the n halos of least
/// mass (ties by index) and moves their test functions to the mesh
/// vertices, using Euclidean distance from each vertex to the core points.
/// The bound is max R(f_i); if two supports share a mesh edge the functions
/// are no longer stiffness-orthogonal and the largest Ritz value over their
/// span is used, which still dominates lambda_n. When 2n cores do not fit,
/// n are packed instead.
CapacitorBound capacitor_upper_bound(const ImmersedComplex& c, int n, double r,
                                     Metric metric = Metric::euclidean, Exec exec = Exec::parallel);

struct ExplicitBound {
  int k = 0;
  double rho = std::numeric_limits<double>::infinity();
  double N = 0.0;
  double L = 0.0;
  double p = 0.0;
  double mu_total = 0.0;
  double nu_total = 0.0;
  double rhs_value = 0.0;
  double term_rho = 0.0;
  double term_main = 0.0;
};

/// term_rho = (16N / rho^2)(mu/nu), zero for infinite rho;
/// term_main = 16N (8 N^2 L)^(2/p) (mu/nu)^(1+2/p) (k/mu)^(2/p).
ExplicitBound explicit_bound(int k, double rho, double N, double L, double p, double mu, double nu);

enum class LSource { measured, crofton_mean, crofton_local };

struct CorollaryOptions {
  LSource L_source = LSource::measured;
  int covering_radii = 12;
  std::size_t max_centers = 512;
  int growth_radii = 16;
  /// Precomputed inputs; required for the crofton sources.
  std::optional<int> N;
  std::optional<double> crofton;
  std::optional<double> index;
  Exec exec = Exec::parallel;
};

struct CorollaryResult {
  ExplicitBound bound;
  CoveringEstimate covering;
  std::optional<BallGrowth> growth;
};

/// Assembles the explicit eigenvalue bound on (M, d_eu, nu) with nu the
/// volume of the complement of `region`. N is measured with kappa = 4
/// unless given; L is the measured ball growth of the complement or
/// (2 Vol(B^m) / I(G)) times the supplied index.
CorollaryResult corollary_bound(const ImmersedComplex& c, const Region* region, int k, double rho,
                                const CorollaryOptions& opts = {});

/// Log-spaced radii from the shortest edge up to the diameter bound of the
/// vertex set.
std::vector<double> growth_radii(const ImmersedComplex& c, int count);

}  // namespace specgeo
