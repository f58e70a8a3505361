#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace specgeo {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct EigenSolverOptions {
  double tol = 1e-8;
  int max_iterations = 2000;
  std::uint64_t seed = 0x5EEDu;
  /// Subspace width; 0 picks max(2k, k + 8).
  int block_size = 0;
  /// Problems up to this size go to a dense solver.
  int dense_threshold = 300;
};

struct EigenPairs {
  Eigen::VectorXd values;     // ascending
  Eigen::MatrixXd vectors;    // mass-orthonormal columns
  Eigen::VectorXd residuals;  // relative, see smallest_generalized_eigenpairs
  int iterations = 0;
};

/// Smallest k eigenpairs of K x = lambda M x for symmetric positive
/// semidefinite K and diagonal positive M, by shift-and-invert subspace
/// iteration with Rayleigh-Ritz projection. The shift sits slightly below
/// zero so K - sigma M is positive definite even with a kernel.
///
/// Residual of pair i: ||K x - lambda M x||_{M^-1} / max(|lambda_i|, |lambda_k|, |sigma|)
/// with ||x||_M = 1. Deterministic for a fixed seed. Throws SolverError
/// carrying the last iterate if the residuals do not reach `tol`.
EigenPairs smallest_generalized_eigenpairs(const SparseMatrix& K, const SparseMatrix& M, int k,
                                           const EigenSolverOptions& opts = {});

}  // namespace specgeo
