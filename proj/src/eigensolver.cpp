#include "specgeo/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SparseCholesky>

#include "specgeo/error.hpp"
#include "specgeo/rng.hpp"

namespace specgeo {

namespace {

Eigen::VectorXd mass_diagonal(const SparseMatrix& M) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(M.rows());
  for (Eigen::Index c = 0; c < M.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(M, c); it; ++it) {
      if (it.row() != it.col()) {
        if (it.value() != 0.0) throw Error("eigensolver expects a diagonal (lumped) mass matrix");
        continue;
      }
      d(it.row()) = it.value();
    }
  if (!(d.minCoeff() > 0.0)) throw Error("mass matrix must be positive definite");
  return d;
}

Eigen::VectorXd relative_residuals(const SparseMatrix& K, const Eigen::VectorXd& mass,
                                   const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors,
                                   int k, double sigma) {
  Eigen::VectorXd res(k);
  const double scale_k = std::abs(values(k - 1));
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXd x = vectors.col(i);
    const Eigen::VectorXd r = K * x - values(i) * mass.cwiseProduct(x);
    const double xm = std::sqrt(x.cwiseAbs2().dot(mass));
    const double rn = std::sqrt(r.cwiseAbs2().cwiseQuotient(mass).sum());
    res(i) = rn / (xm * std::max({std::abs(values(i)), scale_k, std::abs(sigma)}));
  }
  return res;
}

[[noreturn]] void fail(const std::string& why, const Eigen::VectorXd& values, const Eigen::VectorXd& res, int k) {
  std::vector<double> v(values.data(), values.data() + std::min<Eigen::Index>(k, values.size()));
  std::vector<double> r(res.data(), res.data() + res.size());
  throw SolverError(why, std::move(v), std::move(r));
}

EigenPairs dense_solve(const SparseMatrix& K, const Eigen::VectorXd& mass, int k, double tol) {
  const Eigen::MatrixXd Kd(K);
  // Symmetric scaling by M^{-1/2} reduces to a standard problem.
  const Eigen::VectorXd isq = mass.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd S = isq.asDiagonal() * Kd * isq.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed", {}, {});
  EigenPairs out;
  out.values = es.eigenvalues().head(k);
  out.vectors = isq.asDiagonal() * es.eigenvectors().leftCols(k);
  // Same residual floor as the iterative path, so a lone zero eigenvalue is judged against the spectral scale.
  const double floor = 1e-6 * (Kd.diagonal().cwiseQuotient(mass)).mean();
  out.residuals = relative_residuals(K, mass, out.values, out.vectors, k, floor);
  out.iterations = 1;
  if (!(out.residuals.maxCoeff() <= tol)) fail("dense eigensolver residual above tolerance", out.values, out.residuals, k);
  return out;
}

}  // namespace

EigenPairs smallest_generalized_eigenpairs(const SparseMatrix& K, const SparseMatrix& M, int k,
                                           const EigenSolverOptions& opts) {
  const Eigen::Index n = K.rows();
  if (K.cols() != n || M.rows() != n || M.cols() != n) throw Error("operator size mismatch");
  if (k < 1 || k > n) throw Error("requested eigenpair count out of range");
  const Eigen::VectorXd mass = mass_diagonal(M);
  if (n <= opts.dense_threshold) return dense_solve(K, mass, k, opts.tol);

  const int p = static_cast<int>(std::min<Eigen::Index>(n, opts.block_size > 0 ? opts.block_size : std::max(2 * k, k + 8)));

  // Mean of diag(K)/diag(M) tracks the spectral scale.
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) scale += K.coeff(i, i) / mass(i);
  scale /= static_cast<double>(n);
  const double sigma = -1e-6 * std::max(scale, 1e-300);

  SparseMatrix A = K;
  for (Eigen::Index i = 0; i < n; ++i) A.coeffRef(i, i) -= sigma * mass(i);
  Eigen::SimplicialLLT<SparseMatrix> chol(A);
  if (chol.info() != Eigen::Success) throw SolverError("shifted operator factorization failed", {}, {});

  Rng rng(opts.seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = gauss(rng);

  const Eigen::VectorXd msq = mass.cwiseSqrt();
  const Eigen::VectorXd imsq = msq.cwiseInverse();
  Eigen::VectorXd values;
  Eigen::VectorXd res;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Eigen::MatrixXd Y = chol.solve(mass.asDiagonal() * X);
    // Mass-orthonormalise: QR of M^{1/2} Y.
    Eigen::MatrixXd Z = msq.asDiagonal() * Y;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
    Y = imsq.asDiagonal() * (qr.householderQ() * Eigen::MatrixXd::Identity(n, p));
    Eigen::MatrixXd Kr = Y.transpose() * (K * Y);
    Kr = 0.5 * (Kr + Kr.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kr);
    values = es.eigenvalues();
    X = Y * es.eigenvectors();
    res = relative_residuals(K, mass, values, X, k, sigma);
    if (res.maxCoeff() <= opts.tol) {
      EigenPairs out;
      out.values = values.head(k);
      out.vectors = X.leftCols(k);
      out.residuals = res;
      out.iterations = it;
      return out;
    }
  }
  fail("subspace iteration did not converge within " + std::to_string(opts.max_iterations) + " iterations",
       values, res, k);
}

}  // namespace specgeo
