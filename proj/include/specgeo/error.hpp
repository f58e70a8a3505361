#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace specgeo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or degenerate geometry (parse failures, zero-measure simplices, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PackingInfeasible : public Error {
 public:
  using Error::Error;
};

/// Eigensolver failed to reach its tolerance; carries the last iterate.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> partial_eigenvalues,
              std::vector<double> partial_residuals)
      : Error(what),
        partial_eigenvalues_(std::move(partial_eigenvalues)),
        partial_residuals_(std::move(partial_residuals)) {}

  const std::vector<double>& partial_eigenvalues() const { return partial_eigenvalues_; }
  const std::vector<double>& partial_residuals() const { return partial_residuals_; }

 private:
  std::vector<double> partial_eigenvalues_;
  std::vector<double> partial_residuals_;
};

}  // namespace specgeo
