#include "specgeo/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specgeo/error.hpp"

namespace specgeo {

DiscreteOperatorPair assemble(const ImmersedComplex& c, std::span<const double> density, Exec exec) {
  const auto nv = static_cast<Eigen::Index>(c.vertex_count());
  if (!density.empty()) {
    if (static_cast<Eigen::Index>(density.size()) != nv) throw GeometryError("density size mismatch");
    for (double d : density)
      if (!(d > 0.0) || !std::isfinite(d)) throw GeometryError("density must be positive");
  }
  const auto elems = kernels::element_data(c, exec);

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd lumped = Eigen::VectorXd::Zero(nv);
  if (c.dim() == 1) {
    trip.reserve(c.simplex_count() * 4);
    for (std::size_t s = 0; s < c.simplex_count(); ++s) {
      const auto t = c.simplex(s);
      const double w = elems.weights[s];
      trip.emplace_back(t[0], t[0], w);
      trip.emplace_back(t[1], t[1], w);
      trip.emplace_back(t[0], t[1], -w);
      trip.emplace_back(t[1], t[0], -w);
      lumped(t[0]) += 0.5 * elems.measures[s];
      lumped(t[1]) += 0.5 * elems.measures[s];
    }
  } else {
    trip.reserve(c.simplex_count() * 12);
    for (std::size_t s = 0; s < c.simplex_count(); ++s) {
      const auto t = c.simplex(s);
      for (int k = 0; k < 3; ++k) {
        const double w = elems.weights[s * 3 + static_cast<std::size_t>(k)];
        const int i = t[static_cast<std::size_t>((k + 1) % 3)];
        const int j = t[static_cast<std::size_t>((k + 2) % 3)];
        trip.emplace_back(i, i, w);
        trip.emplace_back(j, j, w);
        trip.emplace_back(i, j, -w);
        trip.emplace_back(j, i, -w);
        lumped(t[static_cast<std::size_t>(k)]) += elems.measures[s] / 3.0;
      }
    }
  }
  DiscreteOperatorPair ops;
  ops.stiffness.resize(nv, nv);
  ops.stiffness.setFromTriplets(trip.begin(), trip.end());
  if (!density.empty()) {
    for (Eigen::Index i = 0; i < nv; ++i) lumped(i) *= density[static_cast<std::size_t>(i)];
    ops.vertex_weights.assign(density.begin(), density.end());
  }
  ops.mass.resize(nv, nv);
  std::vector<Eigen::Triplet<double>> mtrip;
  mtrip.reserve(static_cast<std::size_t>(nv));
  for (Eigen::Index i = 0; i < nv; ++i) mtrip.emplace_back(i, i, lumped(i));
  ops.mass.setFromTriplets(mtrip.begin(), mtrip.end());
  return ops;
}

SpectrumResult solve_spectrum(const DiscreteOperatorPair& ops, int k, double tol, std::uint64_t seed) {
  EigenSolverOptions opts;
  opts.tol = tol;
  opts.seed = seed;
  const auto pairs = smallest_generalized_eigenpairs(ops.stiffness, ops.mass, k, opts);
  SpectrumResult out;
  out.k_requested = k;
  out.iterations = pairs.iterations;
  out.eigenvectors = pairs.vectors;
  for (int i = 0; i < k; ++i) {
    // Stiffness is PSD; anything below zero is rounding in the kernel.
    out.eigenvalues.push_back(std::max(0.0, pairs.values(i)));
    out.residual_norms.push_back(pairs.residuals(i));
  }
  return out;
}

long cpm_multiplicity(int m, int j) {
  if (j == 0) return 1;
  // dim of the j-th eigenspace: (m + 2j)/m * C(m + j - 1, j)^2
  long double binom = 1.0L;
  for (int i = 1; i <= j; ++i) binom = binom * (m + i - 1) / i;
  return std::lround(static_cast<long double>(m + 2 * j) / m * binom * binom);
}

std::vector<double> closed_form_spectrum(const ClosedFormShape& shape, int k) {
  if (k < 1) throw Error("closed_form_spectrum needs k >= 1");
  std::vector<double> out;
  auto push = [&](double value, long mult) {
    for (long i = 0; i < mult && static_cast<int>(out.size()) < k; ++i) out.push_back(value);
  };
  switch (shape.kind) {
    case ClosedFormShape::Kind::circle:
      push(0.0, 1);
      for (int j = 1; static_cast<int>(out.size()) < k; ++j) push(double(j) * j / (shape.a * shape.a), 2);
      return out;
    case ClosedFormShape::Kind::sphere:
      for (int l = 0; static_cast<int>(out.size()) < k; ++l) push(double(l) * (l + 1) / (shape.a * shape.a), 2 * l + 1);
      return out;
    case ClosedFormShape::Kind::cpm:
      if (shape.m < 1) throw Error("cpm needs m >= 1");
      for (int j = 0; static_cast<int>(out.size()) < k; ++j) push(4.0 * j * (j + shape.m), cpm_multiplicity(shape.m, j));
      return out;
    case ClosedFormShape::Kind::flat_torus: {
      const double two_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
      const double longest = std::max(shape.a, shape.b);
      for (int J = static_cast<int>(std::ceil(std::sqrt(double(k)))) + 2;; J *= 2) {
        std::vector<double> all;
        for (int j = -J; j <= J; ++j)
          for (int l = -J; l <= J; ++l)
            all.push_back(two_pi_sq * (double(j) * j / (shape.a * shape.a) + double(l) * l / (shape.b * shape.b)));
        std::sort(all.begin(), all.end());
        // Every omitted lattice point has eigenvalue >= this bound.
        const double bound = two_pi_sq * double(J + 1) * (J + 1) / (longest * longest);
        if (all[static_cast<std::size_t>(k - 1)] < bound) return {all.begin(), all.begin() + k};
      }
    }
  }
  throw Error("unsupported closed-form shape");
}

double rayleigh_quotient(const DiscreteOperatorPair& ops, const Eigen::VectorXd& f) {
  if (f.size() != ops.mass.rows()) throw Error("function size mismatch");
  const double den = f.dot(ops.mass * f);
  if (!(den > 0.0)) throw Error("rayleigh quotient: zero denominator");
  return std::max(0.0, f.dot(ops.stiffness * f)) / den;
}

CurvatureNorms mean_curvature_norms(const ImmersedComplex& c) {
  const std::size_t nv = c.vertex_count();
  CurvatureNorms out;
  out.per_vertex.assign(nv, 0.0);
  std::vector<double> area(nv, 0.0);
  std::vector<std::uint8_t> boundary(nv, 0);

  if (c.dim() == 2) {
    if (c.codim() != 1) throw GeometryError("curvature supported only for hypersurfaces and curves");
    const auto ops = assemble(c);
    const Eigen::MatrixXd LX = ops.stiffness * c.vertices().transpose();  // nv x 3
    // Mixed Voronoi areas: the barycentric third is off by ~15% on the
    // irregular triangles of a projected icosphere.
    for (std::size_t s = 0; s < c.simplex_count(); ++s) {
      const auto t = c.simplex(s);
      const double A = c.simplex_measure(s);
      for (int i = 0; i < 3; ++i) {
        const auto v = static_cast<std::size_t>(t[i]);
        const Eigen::VectorXd a = c.vertex(static_cast<std::size_t>(t[(i + 1) % 3])) - c.vertex(v);
        const Eigen::VectorXd b = c.vertex(static_cast<std::size_t>(t[(i + 2) % 3])) - c.vertex(v);
        const Eigen::VectorXd e = b - a;
        if (a.dot(b) < 0.0) {
          area[v] += A / 2.0;
        } else if (a.dot(e) > 0.0 || b.dot(e) < 0.0) {
          area[v] += A / 4.0;  // obtuse elsewhere in the triangle
        } else {
          // Each edge at v weighted by the cotangent of the angle facing it.
          const double cot_facing_a = b.dot(e) / (2.0 * A);
          const double cot_facing_b = -a.dot(e) / (2.0 * A);
          area[v] += (a.squaredNorm() * cot_facing_a + b.squaredNorm() * cot_facing_b) / 8.0;
        }
      }
      if (c.boundary_flags()[s])
        for (int v : c.simplex(s)) boundary[static_cast<std::size_t>(v)] = 1;
    }
    for (std::size_t v = 0; v < nv; ++v)
      if (!boundary[v]) out.per_vertex[v] = LX.row(static_cast<Eigen::Index>(v)).norm() / (2.0 * area[v]);
  } else {
    // Each vertex of a 1-complex has at most two incident segments.
    std::vector<std::array<int, 2>> nbr(nv, {-1, -1});
    for (std::size_t s = 0; s < c.simplex_count(); ++s) {
      const auto t = c.simplex(s);
      nbr[static_cast<std::size_t>(t[0])][1] = t[1];  // outgoing
      nbr[static_cast<std::size_t>(t[1])][0] = t[0];  // incoming
      area[static_cast<std::size_t>(t[0])] += 0.5 * c.simplex_measure(s);
      area[static_cast<std::size_t>(t[1])] += 0.5 * c.simplex_measure(s);
    }
    for (std::size_t v = 0; v < nv; ++v) {
      const auto [prev, next] = nbr[v];
      if (prev < 0 || next < 0) continue;
      const Eigen::VectorXd d0 = (c.vertex(v) - c.vertex(static_cast<std::size_t>(prev))).normalized();
      const Eigen::VectorXd d1 = (c.vertex(static_cast<std::size_t>(next)) - c.vertex(v)).normalized();
      const double turning = std::acos(std::clamp(d0.dot(d1), -1.0, 1.0));
      out.per_vertex[v] = turning / area[v];
    }
  }
  std::vector<double> terms(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    terms[v] = out.per_vertex[v] * out.per_vertex[v] * area[v];
    out.linf_norm = std::max(out.linf_norm, out.per_vertex[v]);
  }
  out.l2_norm_sq = compensated_sum(terms);
  return out;
}

}  // namespace specgeo
