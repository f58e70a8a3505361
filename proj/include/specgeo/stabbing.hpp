#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "specgeo/geom.hpp"

namespace specgeo {

/// Projection of a complex onto an m-plane H, bucketed on a uniform grid in
/// H-coordinates. An affine p-plane orthogonal to H is the fibre over a
/// point y of H, and it crosses simplex s exactly when y lies in the
/// projection of s, so counting crossings reduces to point location in R^m.
class ProjectedComplex {
 public:
  /// Projection Jacobians below this are treated as tangential.
  static constexpr double kTangentialJacobian = 1e-9;
  /// Barycentric coordinates within this of 0 put the query on a facet.
  static constexpr double kFacetTolerance = 1e-10;

  struct Hit {
    int simplex;
    double bary[3];
  };

  struct StabResult {
    int count = 0;
    bool degenerate = false;  // facet or tangential hit: caller must re-jitter
  };

  /// `basis` is ambient x m with orthonormal columns. `active` (optional)
  /// masks the simplices that take part; empty means all. A fibre crossing
  /// a simplex whose Jacobian is below `min_jacobian` counts as tangential.
  ProjectedComplex(const ImmersedComplex& c, const Eigen::MatrixXd& basis,
                   std::span<const std::uint8_t> active = {},
                   double min_jacobian = kTangentialJacobian);

  int dim() const { return dim_; }
  const ImmersedComplex& complex() const { return *complex_; }
  const Eigen::MatrixXd& basis() const { return basis_; }

  Eigen::VectorXd project(const Eigen::Ref<const Eigen::VectorXd>& ambient) const {
    return basis_.transpose() * ambient;
  }

  /// Counts crossings (with multiplicity) of the fibre over `y`. Appends
  /// the crossed simplices to `hits` when non-null. Stops early and flags
  /// degeneracy if the fibre touches a facet or a tangential simplex.
  StabResult stab(const Eigen::Ref<const Eigen::VectorXd>& y, std::vector<Hit>* hits = nullptr) const;

  /// |det| of the projection restricted to the simplex's tangent plane.
  double jacobian(std::size_t s) const { return jacobian_[s]; }
  bool is_active(std::size_t s) const { return active_.empty() || active_[s] != 0; }

 private:
  void build_grid();
  bool barycentric(std::size_t s, const Eigen::Ref<const Eigen::VectorXd>& y, double* out) const;
  std::size_t cell_of(const Eigen::Ref<const Eigen::VectorXd>& y, bool& inside) const;

  const ImmersedComplex* complex_;
  Eigen::MatrixXd basis_;
  std::vector<std::uint8_t> active_;
  int dim_;
  double min_jacobian_;
  Eigen::MatrixXd proj_;           // m x n_vertices
  std::vector<double> inverse_;    // per simplex: 1 (m=1) or 4 (m=2) entries
  std::vector<double> jacobian_;
  // uniform grid
  Eigen::VectorXd lo_, cell_size_;
  std::vector<int> cells_per_axis_;
  std::vector<std::size_t> cell_start_;
  std::vector<int> cell_items_;
};

}  // namespace specgeo
