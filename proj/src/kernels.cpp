#include "specgeo/kernels.hpp"

#include <cmath>
#include <limits>

#include "specgeo/error.hpp"
#include "specgeo/grassmann.hpp"
#include "specgeo/rng.hpp"

namespace specgeo::kernels {

namespace {

// Writes the element weights of simplex s; returns false on a degenerate
// cotangent.
bool element_body(const ImmersedComplex& c, std::size_t s, double max_cot, double* w) {
  const auto t = c.simplex(s);
  if (c.dim() == 1) {
    w[0] = 1.0 / c.simplex_measure(s);
    return true;
  }
  const double dbl_area = 2.0 * c.simplex_measure(s);
  for (int k = 0; k < 3; ++k) {
    const auto a = c.vertex(static_cast<std::size_t>(t[static_cast<std::size_t>(k)]));
    const auto b = c.vertex(static_cast<std::size_t>(t[static_cast<std::size_t>((k + 1) % 3)]));
    const auto d = c.vertex(static_cast<std::size_t>(t[static_cast<std::size_t>((k + 2) % 3)]));
    const double cot = (b - a).dot(d - a) / dbl_area;
    if (!(std::abs(cot) <= max_cot)) return false;
    w[k] = 0.5 * cot;  // opposite edge (k+1, k+2)
  }
  return true;
}

double ball_mass_body(const MetricMeasureSpace& x, std::size_t i, double r) {
  double m = 0.0;
  const auto& w = x.weights();
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x.distance(i, j) <= r) m += w[j];
  return m;
}

// Farthest-first r/kappa-net of B(center, r), seeded at the center; ties go
// to the lowest index.
int cover_body(const MetricMeasureSpace& x, std::size_t center, double r, double small,
               std::vector<std::size_t>& ball, std::vector<double>& gap) {
  ball.clear();
  gap.clear();
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x.distance(center, j) <= r) {
      ball.push_back(j);
      gap.push_back(std::numeric_limits<double>::infinity());
    }
  int count = 0;
  std::size_t q = center;
  for (;;) {
    ++count;
    double far = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < ball.size(); ++i) {
      gap[i] = std::min(gap[i], x.distance(q, ball[i]));
      if (gap[i] > far) {
        far = gap[i];
        arg = i;
      }
    }
    if (far <= small) return count;
    q = ball[arg];
  }
}

int stab_body(const ProjectedComplex& pc, const Eigen::MatrixXd& points, Eigen::Index i) {
  const auto res = pc.stab(points.col(i));
  return res.degenerate ? -1 : res.count;
}

double crofton_body(const Eigen::MatrixXd& frame, int p, std::uint64_t seed, long i) {
  const auto h = sample_haar(static_cast<int>(frame.cols()), p, derive_seed(seed, static_cast<std::uint64_t>(i)));
  return std::abs((frame.transpose() * h.basis).determinant());
}

}  // namespace

ElementData element_data(const ImmersedComplex& c, Exec exec, double max_cot) {
  const std::size_t ns = c.simplex_count();
  const std::size_t stride = c.dim() == 1 ? 1 : 3;
  ElementData out;
  out.weights.assign(ns * stride, 0.0);
  out.measures = c.simplex_measures();
  std::vector<std::uint8_t> ok(ns, 1);
  const auto n = static_cast<long>(ns);
  if (exec == Exec::serial) {
    for (long s = 0; s < n; ++s)
      ok[static_cast<std::size_t>(s)] = element_body(c, static_cast<std::size_t>(s), max_cot, &out.weights[static_cast<std::size_t>(s) * stride]);
  } else {
#pragma omp parallel for schedule(static)
    for (long s = 0; s < n; ++s)
      ok[static_cast<std::size_t>(s)] = element_body(c, static_cast<std::size_t>(s), max_cot, &out.weights[static_cast<std::size_t>(s) * stride]);
  }
  for (std::size_t s = 0; s < ns; ++s)
    if (!ok[s]) throw GeometryError("degenerate triangle " + std::to_string(s) + ": cotangent overflow");
  return out;
}

std::vector<double> ball_masses(const MetricMeasureSpace& x, double r, Exec exec) {
  const auto n = static_cast<long>(x.size());
  std::vector<double> out(x.size());
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = ball_mass_body(x, static_cast<std::size_t>(i), r);
  } else {
#pragma omp parallel for schedule(dynamic, 32)
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = ball_mass_body(x, static_cast<std::size_t>(i), r);
  }
  return out;
}

std::vector<int> cover_sizes(const MetricMeasureSpace& x, std::span<const std::size_t> centers,
                             double r, double kappa, Exec exec) {
  const auto n = static_cast<long>(centers.size());
  std::vector<int> out(centers.size());
  const double small = r / kappa;
  if (exec == Exec::serial) {
    std::vector<std::size_t> ball;
    std::vector<double> gap;
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = cover_body(x, centers[static_cast<std::size_t>(i)], r, small, ball, gap);
  } else {
#pragma omp parallel
    {
      std::vector<std::size_t> ball;
      std::vector<double> gap;
#pragma omp for schedule(dynamic, 8)
      for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = cover_body(x, centers[static_cast<std::size_t>(i)], r, small, ball, gap);
    }
  }
  return out;
}

std::vector<int> stab_counts(const ProjectedComplex& pc, const Eigen::MatrixXd& points, Exec exec) {
  const Eigen::Index n = points.cols();
  std::vector<int> out(static_cast<std::size_t>(n));
  if (exec == Exec::serial) {
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = stab_body(pc, points, i);
  } else {
#pragma omp parallel for schedule(dynamic, 64)
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = stab_body(pc, points, i);
  }
  return out;
}

std::vector<double> crofton_samples(const Eigen::MatrixXd& frame, int p, long n_samples,
                                    std::uint64_t seed, Exec exec) {
  std::vector<double> out(static_cast<std::size_t>(n_samples));
  if (exec == Exec::serial) {
    for (long i = 0; i < n_samples; ++i) out[static_cast<std::size_t>(i)] = crofton_body(frame, p, seed, i);
  } else {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n_samples; ++i) out[static_cast<std::size_t>(i)] = crofton_body(frame, p, seed, i);
  }
  return out;
}

}  // namespace specgeo::kernels
