#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "specgeo/eigensolver.hpp"
#include "specgeo/geom.hpp"
#include "specgeo/kernels.hpp"

namespace specgeo {

/// Stiffness (Dirichlet form) and lumped mass (L2 form) of the P1 element
/// space on a complex.
struct DiscreteOperatorPair {
  SparseMatrix stiffness;
  SparseMatrix mass;
  std::vector<double> vertex_weights;  // conformal density, empty if none
};

/// m = 2: cotangent stiffness, one-third-area lumped mass (times density).
/// m = 1: 1/length stiffness, half-length lumped mass.
/// Throws GeometryError on non-positive density or a degenerate triangle.
DiscreteOperatorPair assemble(const ImmersedComplex& c,
                              std::span<const double> density = {}, Exec exec = Exec::parallel);

/// Eigenvalues lambda_1 <= lambda_2 <= ... with lambda_1 = 0 counted.
struct SpectrumResult {
  std::vector<double> eigenvalues;
  std::vector<double> residual_norms;
  int k_requested = 0;
  int iterations = 0;
  Eigen::MatrixXd eigenvectors;  // mass-orthonormal, one column per eigenvalue
};

SpectrumResult solve_spectrum(const DiscreteOperatorPair& ops, int k, double tol = 1e-8,
                              std::uint64_t seed = 0x5EEDu);

/// Exact spectra with multiplicity, for oracle checks.
struct ClosedFormShape {
  enum class Kind { circle, sphere, flat_torus, cpm } kind;
  double a = 1.0;  // radius, or first torus side
  double b = 1.0;  // second torus side
  int m = 1;       // complex dimension for cpm
};
std::vector<double> closed_form_spectrum(const ClosedFormShape& shape, int k);
/// Multiplicity of the j-th eigenspace 4j(j+m) of CP^m.
long cpm_multiplicity(int m, int j);

/// (f^T K f) / (f^T M f); throws Error if the denominator is zero.
double rayleigh_quotient(const DiscreteOperatorPair& ops, const Eigen::VectorXd& f);

/// Mean curvature H taken as the mean of the principal curvatures.
struct CurvatureNorms {
  double l2_norm_sq = 0.0;  // sum_v |H_v|^2 area_v
  double linf_norm = 0.0;
  std::vector<double> per_vertex;  // |H_v|
};

/// m = 2 (p = 1 only): |cotangent Laplacian of position| / (2 * vertex area).
/// m = 1: turning angle / dual length. Boundary vertices get 0.
CurvatureNorms mean_curvature_norms(const ImmersedComplex& c);

}  // namespace specgeo
