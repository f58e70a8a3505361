#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP driver; both call the same per-item body and reduce in index order,
// so their outputs are bitwise identical for any thread count.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "specgeo/geom.hpp"
#include "specgeo/stabbing.hpp"

namespace specgeo {

enum class Exec { serial, parallel };

namespace kernels {

/// Per-simplex element data for P1 finite elements.
/// m = 2: `weights` holds, per triangle, the half-cotangent weights of the
///        edges (v1,v2), (v2,v0), (v0,v1); m = 1: one weight 1/length.
/// `measures` repeats the simplex measures for the lumped mass.
struct ElementData {
  std::vector<double> weights;
  std::vector<double> measures;
};

/// Throws GeometryError when a cotangent exceeds `max_cot` in magnitude.
ElementData element_data(const ImmersedComplex& c, Exec exec, double max_cot = 1e8);

/// mu(B(x_i, r)) for every point i (closed balls).
std::vector<double> ball_masses(const MetricMeasureSpace& x, double r, Exec exec);

/// For each center, the size of a greedy cover of B(center, r) by balls of
/// radius r / kappa centred at points of the ball (farthest-first net).
std::vector<int> cover_sizes(const MetricMeasureSpace& x, std::span<const std::size_t> centers,
                             double r, double kappa, Exec exec);

/// Crossing counts for fibres over the given H-coordinates (columns of
/// `points`); -1 marks a degenerate query.
std::vector<int> stab_counts(const ProjectedComplex& pc, const Eigen::MatrixXd& points, Exec exec);

/// Projection Jacobian |det(frame^T H)| for `n_samples` Haar planes drawn
/// from seeds derive_seed(seed, i).
std::vector<double> crofton_samples(const Eigen::MatrixXd& frame, int p, long n_samples,
                                    std::uint64_t seed, Exec exec);

}  // namespace kernels
}  // namespace specgeo
