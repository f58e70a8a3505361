#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "specgeo/geom.hpp"
#include "specgeo/kernels.hpp"

namespace specgeo {

/// An m-plane H in R^{m+p}, reproducible from `seed_id`.
struct GrassmannSample {
  Eigen::MatrixXd basis;  // (m+p) x m, orthonormal columns
  std::uint64_t seed_id = 0;
};

/// Haar-distributed m-plane: thin Q of an (m+p) x m standard Gaussian matrix.
GrassmannSample sample_haar(int m, int p, std::uint64_t seed);

/// |det(frame^T H.basis)|, the Jacobian of the orthogonal projection onto H
/// restricted to span(frame). Throws Error if the frame is not orthonormal.
double jacobian_factor(const Eigen::MatrixXd& frame, const GrassmannSample& h);

struct CroftonEstimate {
  int m = 0;
  int p = 0;
  double value = 0.0;                 // mean over all frames and samples
  double standard_error = 0.0;        // of `value`
  long samples = 0;                   // per frame
  double anisotropy_spread = 0.0;     // std of the per-frame means
  double frame_standard_error = 0.0;  // typical standard error of one frame's mean
  std::vector<double> per_frame;
  std::uint64_t seed = 0;
};

/// Monte Carlo I(G): the Haar mean of the projection Jacobian, evaluated at
/// `n_frames` random tangent frames with independent plane samples each.
CroftonEstimate crofton_constant(int m, int p, long n_samples, int n_frames,
                                 std::uint64_t seed = 1, Exec exec = Exec::parallel);

enum class IndexKind { fiber, sup_index, mean_index, local, eps_mean, eps_local };
std::string to_string(IndexKind k);

struct IndexEstimate {
  IndexKind kind = IndexKind::fiber;
  double value = 0.0;
  long samples_grassmann = 0;
  long samples_stabbing = 0;  // stabbing candidates per plane
  std::optional<double> radius_r;
  std::optional<double> epsilon;
  std::optional<Region> chosen_region;
  double standard_error = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> fiber_values;  // i_H per plane, where meaningful
};

struct IndexOptions {
  int n_grassmann = 64;
  int stab_budget = 256;
  std::uint64_t seed = 1;
  Exec exec = Exec::parallel;
  /// Fibres meeting a simplex with a smaller projection Jacobian are
  /// re-jittered. Raising it above the tangency floor screens out grazing
  /// fibres that zigzag across a coarse mesh.
  double min_jacobian = 0.05;
  /// Local indices take the max over an evenly strided subset of this many
  /// vertices; 0 uses every vertex.
  std::size_t max_centers = 0;
};

/// Lower bound on i_H: the largest crossing count over fibres through the
/// projected barycenter of every simplex plus `stab_budget` random points.
/// Degenerate fibres (facet or tangential hits) are re-jittered within the
/// same simplex; the random points come from seeds keyed by H.seed_id.
IndexEstimate fiber_index(const ImmersedComplex& c, const GrassmannSample& h, int stab_budget,
                          Exec exec = Exec::parallel, double min_jacobian = 1e-9);

IndexEstimate sup_index(const ImmersedComplex& c, const IndexOptions& opts = {});
IndexEstimate mean_index(const ImmersedComplex& c, const IndexOptions& opts = {});

/// max over vertices x of the mean over H of the largest number of
/// crossings of one fibre inside B(x, r). Never exceeds mean_index with the
/// same options.
IndexEstimate local_index(const ImmersedComplex& c, double r, const IndexOptions& opts = {});

enum class RegionStrategy { greedy_multiplicity, cap_removal, none };
std::string to_string(RegionStrategy s);
RegionStrategy parse_region_strategy(const std::string& name);

/// Upper bound on the epsilon-mean (or, with r, the (r, epsilon)-local)
/// index: the best value found over candidate regions of measure at most
/// eps * Vol, including the empty region, so eps = 0 reproduces mean_index.
///
/// greedy_multiplicity removes fixed batches of the simplices most often
/// crossed by maximal fibres; since batches do not depend on eps the result
/// is nonincreasing in eps. cap_removal tries Euclidean caps around the 16
/// most crossed barycenters.
IndexEstimate eps_index(const ImmersedComplex& c, double eps, std::optional<double> r,
                        RegionStrategy strategy, const IndexOptions& opts = {});

/// Measure of the shadow pi_H(c), from the cells of a `resolution`-per-axis
/// grid over the projected bounding box whose centers are covered.
double projected_volume(const ImmersedComplex& c, const GrassmannSample& h, int resolution = 256);

/// max of projected_volume over `n_samples` Haar planes.
double max_projected_volume(const ImmersedComplex& c, int n_samples, int resolution,
                            std::uint64_t seed = 1, Exec exec = Exec::parallel);

/// Volume of the unit m-ball.
double unit_ball_volume(int m);

/// Measure of c inside the closed ball B(x, s). Segments are clipped
/// exactly; straddling triangles are refined adaptively.
double ball_measure(const ImmersedComplex& c, const Eigen::VectorXd& x, double s);

struct BallGrowth {
  double L_hat = 0.0;
  std::size_t worst_center = 0;
  double worst_radius = 0.0;
};

/// max over centers and radii of Vol(c ∩ B(x, s)) / s^m. Centers are the
/// columns of `centers` when given, else the vertices of c; `max_centers` > 0
/// takes an evenly strided subset. worst_center indexes the center list.
BallGrowth ball_growth_constant(const ImmersedComplex& c, const std::vector<double>& radii,
                                std::size_t max_centers = 0, Exec exec = Exec::parallel,
                                const Eigen::MatrixXd* centers = nullptr);

/// (2 Vol(B^m) / I(G)) * index, the growth constant implied by the
/// integral-geometric estimate.
double theoretical_ball_growth(int m, double crofton, double index);

}  // namespace specgeo
