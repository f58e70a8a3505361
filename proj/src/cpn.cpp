#include "specgeo/cpn.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "specgeo/error.hpp"
#include "specgeo/shapes.hpp"

namespace specgeo {

namespace {

Complex eval(const std::vector<Complex>& c, Complex z) {
  Complex v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
  return v;
}

Complex eval_derivative(const std::vector<Complex>& c, Complex z) {
  Complex v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * z + static_cast<double>(k) * c[k];
  return v;
}

int degree_of(const std::vector<Complex>& c) { return static_cast<int>(c.size()) - 1; }

std::vector<Complex> roots(const std::vector<Complex>& c) {
  const int n = degree_of(c);
  if (n < 1) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return out;
}

std::vector<Complex> multiply(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  std::vector<Complex> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

double fs_density_raw(const std::vector<std::vector<Complex>>& polys, Complex z) {
  double s = 0.0, dd = 0.0;
  Complex cross = 0.0;
  for (const auto& p : polys) {
    if (p.empty()) continue;
    const Complex v = eval(p, z), d = eval_derivative(p, z);
    s += std::norm(v);
    dd += std::norm(d);
    cross += std::conj(v) * d;
  }
  if (!(s > 0.0)) throw GeometryError("curve has a base point: all polynomials vanish at a sample point");
  return (s * dd - std::norm(cross)) / (s * s);
}

}  // namespace

HolomorphicCurve make_curve(std::vector<std::vector<Complex>> coefficients) {
  if (coefficients.size() < 2) throw GeometryError("a curve in CP^N needs at least two polynomials");
  double scale = 0.0;
  for (const auto& p : coefficients)
    for (const auto& c : p) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw GeometryError("non-finite curve coefficient");
      scale = std::max(scale, std::abs(c));
    }
  if (!(scale > 0.0)) throw GeometryError("all polynomials of the curve are zero");
  HolomorphicCurve curve;
  for (auto& p : coefficients) {
    while (!p.empty() && std::abs(p.back()) <= 1e-14 * scale) p.pop_back();
    curve.degree_d = std::max(curve.degree_d, degree_of(p));
  }
  if (curve.degree_d < 1) throw GeometryError("curve is constant");

  // A common factor shows up as a shared root of the lowest-degree
  // nonconstant polynomial. A nonzero constant polynomial rules it out.
  const std::vector<Complex>* pivot = nullptr;
  bool has_constant = false;
  for (const auto& p : coefficients) {
    if (p.empty()) continue;
    if (degree_of(p) == 0) has_constant = true;
    else if (!pivot || degree_of(p) < degree_of(*pivot)) pivot = &p;
  }
  if (!has_constant && pivot) {
    for (const Complex z0 : roots(*pivot)) {
      bool common = true;
      for (const auto& p : coefficients) {
        if (p.empty()) continue;
        double mag = 0.0;
        for (const auto& c : p) mag += std::abs(c);
        const double tol = 1e-8 * mag * std::pow(std::max(1.0, std::abs(z0)), degree_of(p));
        if (std::abs(eval(p, z0)) > tol) {
          common = false;
          break;
        }
      }
      if (common) throw GeometryError("curve polynomials share a common factor");
    }
  }
  curve.coefficients = std::move(coefficients);
  return curve;
}

HolomorphicCurve rational_normal_curve(int d) {
  if (d < 1) throw GeometryError("rational normal curve needs degree >= 1");
  std::vector<std::vector<Complex>> coeffs;
  double binom = 1.0;
  for (int k = 0; k <= d; ++k) {
    std::vector<Complex> p(static_cast<std::size_t>(k) + 1, 0.0);
    p.back() = std::sqrt(binom);
    coeffs.push_back(std::move(p));
    binom = binom * (d - k) / (k + 1);
  }
  return make_curve(std::move(coeffs));
}

HolomorphicCurve precompose_rotation(const HolomorphicCurve& curve, Complex a, Complex b) {
  const int d = curve.degree_d;
  const std::vector<Complex> num = {b, a};                       // a z + b
  const std::vector<Complex> den = {std::conj(a), -std::conj(b)};  // -conj(b) z + conj(a)
  std::vector<std::vector<Complex>> num_pow(1, {1.0}), den_pow(1, {1.0});
  for (int k = 1; k <= d; ++k) {
    num_pow.push_back(multiply(num_pow.back(), num));
    den_pow.push_back(multiply(den_pow.back(), den));
  }
  std::vector<std::vector<Complex>> out;
  for (const auto& p : curve.coefficients) {
    std::vector<Complex> q(static_cast<std::size_t>(d) + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      const auto term = multiply(num_pow[k], den_pow[static_cast<std::size_t>(d) - k]);
      for (std::size_t i = 0; i < term.size(); ++i) q[i] += p[k] * term[i];
    }
    out.push_back(std::move(q));
  }
  return make_curve(std::move(out));
}

int curve_degree(const HolomorphicCurve& curve) { return curve.degree_d; }

double fs_density(const HolomorphicCurve& curve, Complex z) { return fs_density_raw(curve.coefficients, z); }

ConformalMetric fs_conformal_factor(const HolomorphicCurve& curve, const ImmersedComplex& mesh, Exec exec) {
  if (mesh.dim() != 2 || mesh.ambient_dim() != 3) throw GeometryError("conformal factor needs a sphere mesh in R^3");
  const auto nv = static_cast<long>(mesh.vertex_count());
  Eigen::MatrixXd pts = mesh.vertices();
  for (long v = 0; v < nv; ++v) {
    const double len = pts.col(v).norm();
    if (!(len > 0.0)) throw GeometryError("sphere mesh vertex at the origin");
    pts.col(v) *= 0.5 / len;
  }
  std::vector<int> tris = mesh.simplex_indices();
  ConformalMetric out{ImmersedComplex::create(2, pts, std::move(tris)), {}, {}};

  // Polynomials in the chart w = 1/z: w^d p_j(1/w).
  const int d = curve.degree_d;
  std::vector<std::vector<Complex>> flipped;
  for (const auto& p : curve.coefficients) {
    std::vector<Complex> q(static_cast<std::size_t>(d) + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) q[static_cast<std::size_t>(d) - k] = p[k];
    flipped.push_back(std::move(q));
  }

  out.factor.assign(static_cast<std::size_t>(nv), 0.0);
  std::vector<std::uint8_t> bad(static_cast<std::size_t>(nv), 0);
  auto body = [&](long v) {
    const Eigen::Vector3d u = pts.col(v) * 2.0;
    try {
      double f;
      if (u.z() <= 0.0) {
        const Complex z(u.x() / (1.0 - u.z()), u.y() / (1.0 - u.z()));
        f = fs_density_raw(curve.coefficients, z) * std::pow(1.0 + std::norm(z), 2);
      } else {
        const Complex w(u.x() / (1.0 + u.z()), -u.y() / (1.0 + u.z()));
        f = fs_density_raw(flipped, w) * std::pow(1.0 + std::norm(w), 2);
      }
      out.factor[static_cast<std::size_t>(v)] = f;
      if (!(f > 1e-12)) bad[static_cast<std::size_t>(v)] = 2;
    } catch (const GeometryError&) {
      bad[static_cast<std::size_t>(v)] = 1;
    }
  };
  if (exec == Exec::serial) {
    for (long v = 0; v < nv; ++v) body(v);
  } else {
#pragma omp parallel for schedule(static)
    for (long v = 0; v < nv; ++v) body(v);
  }
  for (long v = 0; v < nv; ++v) {
    if (bad[static_cast<std::size_t>(v)] == 1)
      throw GeometryError("curve has a base point at sample vertex " + std::to_string(v));
    if (bad[static_cast<std::size_t>(v)] == 2)
      throw GeometryError("curve is not immersed at sample vertex " + std::to_string(v));
  }

  out.vertex_area.assign(static_cast<std::size_t>(nv), 0.0);
  for (std::size_t s = 0; s < out.base.simplex_count(); ++s)
    for (int v : out.base.simplex(s)) out.vertex_area[static_cast<std::size_t>(v)] += out.base.simplex_measure(s) / 3.0;
  return out;
}

ConformalMetric fs_conformal_factor(const HolomorphicCurve& curve, int subdiv, Exec exec) {
  return fs_conformal_factor(curve, make_icosphere(subdiv, 0.5), exec);
}

double curve_area(const ConformalMetric& metric) {
  std::vector<double> terms(metric.factor.size());
  for (std::size_t v = 0; v < terms.size(); ++v) terms[v] = metric.factor[v] * metric.vertex_area[v];
  return compensated_sum(terms);
}

SpectrumResult curve_spectrum(const ConformalMetric& metric, int k, double tol, std::uint64_t seed) {
  return solve_spectrum(assemble(metric.base, metric.factor), k, tol, seed);
}

}  // namespace specgeo
