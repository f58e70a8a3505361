#include "specgeo/capacitor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "specgeo/error.hpp"
#include "specgeo/spectrum.hpp"

namespace specgeo {

namespace {

double diameter(const MetricMeasureSpace& x, Exec exec) {
  const auto n = static_cast<long>(x.size());
  std::vector<double> row_max(x.size(), 0.0);
  auto body = [&](long i) {
    double m = 0.0;
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < x.size(); ++j)
      m = std::max(m, x.distance(static_cast<std::size_t>(i), j));
    row_max[static_cast<std::size_t>(i)] = m;
  };
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) body(i);
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) body(i);
  }
  return row_max.empty() ? 0.0 : *std::max_element(row_max.begin(), row_max.end());
}

std::vector<std::size_t> strided(std::size_t n, std::size_t max_count) {
  const std::size_t stride = max_count > 0 && n > max_count ? (n + max_count - 1) / max_count : 1;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; i += stride) out.push_back(i);
  return out;
}

// d(., A) for every point of x.
std::vector<double> distance_to_set(const MetricMeasureSpace& x, const std::vector<std::size_t>& set) {
  std::vector<double> d(x.size(), std::numeric_limits<double>::infinity());
  for (std::size_t z = 0; z < x.size(); ++z)
    for (auto y : set) d[z] = std::min(d[z], x.distance(z, y));
  return d;
}

}  // namespace

CoveringEstimate covering_number(const MetricMeasureSpace& x, double rho, int radii_count,
                                 std::size_t max_centers, Exec exec) {
  if (x.size() == 0) throw Error("covering number of an empty space");
  if (!(rho > 0.0)) throw ConfigError("covering radius bound must be positive");
  if (radii_count < 1) throw ConfigError("radii_count must be positive");
  CoveringEstimate est;
  est.rho = rho;
  est.N_hat = 1;
  const double diam = diameter(x, exec);
  if (diam <= 0.0) return est;
  for (int i = 0; i < radii_count; ++i) {
    const double r = diam * std::pow(2.0, -0.5 * i);
    if (r <= rho) est.radii_tested.push_back(r);
  }
  if (est.radii_tested.empty()) est.radii_tested.push_back(rho);
  const auto centers = strided(x.size(), max_centers);
  est.centers_tested = centers.size();
  for (double r : est.radii_tested) {
    const auto sizes = kernels::cover_sizes(x, centers, r, est.kappa, exec);
    est.N_hat = std::max(est.N_hat, *std::max_element(sizes.begin(), sizes.end()));
  }
  return est;
}

CapacitorFamily build_capacitors(const MetricMeasureSpace& x, int n, double r, int N_hat, Exec exec) {
  if (n < 1) throw ConfigError("capacitor count must be positive");
  if (!(r > 0.0)) throw ConfigError("capacitor radius must be positive");
  const auto masses = kernels::ball_masses(x, r, exec);
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return masses[a] > masses[b]; });

  CapacitorFamily fam;
  fam.n = n;
  fam.r = r;
  std::vector<double> to_cores(x.size(), std::numeric_limits<double>::infinity());
  const auto& w = x.weights();
  for (auto cand : order) {
    if (static_cast<int>(fam.cores.size()) == n) break;
    if (to_cores[cand] <= 2.0 * r) continue;
    std::vector<std::size_t> ball;
    bool ok = true;
    for (std::size_t y = 0; y < x.size() && ok; ++y)
      if (x.distance(cand, y) <= r) {
        ball.push_back(y);
        ok = to_cores[y] > 2.0 * r;
      }
    if (!ok) continue;
    const auto d = distance_to_set(x, ball);
    std::vector<std::size_t> halo;
    double core_mass = 0.0, halo_mass = 0.0;
    for (auto y : ball) core_mass += w[y];
    for (std::size_t z = 0; z < x.size(); ++z) {
      to_cores[z] = std::min(to_cores[z], d[z]);
      if (d[z] <= r) {
        halo.push_back(z);
        halo_mass += w[z];
      }
    }
    fam.centers.push_back(cand);
    fam.cores.push_back(std::move(ball));
    fam.halos.push_back(std::move(halo));
    fam.core_masses.push_back(core_mass);
    fam.halo_masses.push_back(halo_mass);
  }
  if (static_cast<int>(fam.cores.size()) < n)
    throw PackingInfeasible("packing infeasible at radius " + std::to_string(r) + ": placed " +
                            std::to_string(fam.cores.size()) + " of " + std::to_string(n) + " cores");
  if (N_hat > 0) {
    fam.mass_bound = x.total_weight() / (2.0 * N_hat * n);
    for (double m : fam.core_masses) fam.mass_bound_holds.push_back(m >= *fam.mass_bound ? 1 : 0);
  }
  return fam;
}

CapacitorFamily build_test_functions(CapacitorFamily fam, const MetricMeasureSpace& x) {
  fam.test_functions.clear();
  for (const auto& core : fam.cores) {
    const auto d = distance_to_set(x, core);
    std::vector<double> f(x.size());
    for (std::size_t z = 0; z < x.size(); ++z) f[z] = std::clamp(1.0 - d[z] / fam.r, 0.0, 1.0);
    fam.test_functions.push_back(std::move(f));
  }
  return fam;
}

bool halos_disjoint(const CapacitorFamily& fam) {
  std::vector<std::size_t> all;
  for (const auto& h : fam.halos) all.insert(all.end(), h.begin(), h.end());
  std::sort(all.begin(), all.end());
  return std::adjacent_find(all.begin(), all.end()) == all.end();
}

double max_dilatation(const CapacitorFamily& fam, const MetricMeasureSpace& x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < fam.test_functions.size(); ++i) {
    const auto& f = fam.test_functions[i];
    // Pairs with both ends outside the halo have f = 0 at both.
    for (auto a : fam.halos[i])
      for (std::size_t b = 0; b < x.size(); ++b) {
        if (a == b) continue;
        const double d = x.distance(a, b);
        if (d > 2.0 * fam.r || d <= 0.0) continue;
        worst = std::max(worst, std::abs(f[a] - f[b]) / d);
      }
  }
  return worst;
}

CapacitorBound capacitor_upper_bound(const ImmersedComplex& c, int n, double r, Metric metric, Exec exec) {
  if (n < 1) throw ConfigError("capacitor count must be positive");
  const auto x = to_mm_space(c, metric);
  CapacitorBound out;
  CapacitorFamily all;
  try {
    all = build_capacitors(x, 2 * n, r, 0, exec);
    out.built = 2 * n;
  } catch (const PackingInfeasible&) {
    all = build_capacitors(x, n, r, 0, exec);
    out.built = n;
  }

  // Keep the n lightest halos, ties by index.
  std::vector<std::size_t> idx(all.cores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return all.halo_masses[a] < all.halo_masses[b]; });
  idx.resize(static_cast<std::size_t>(n));
  std::sort(idx.begin(), idx.end());
  CapacitorFamily kept;
  kept.n = n;
  kept.r = r;
  for (auto i : idx) {
    kept.centers.push_back(all.centers[i]);
    kept.cores.push_back(all.cores[i]);
    kept.halos.push_back(all.halos[i]);
    kept.core_masses.push_back(all.core_masses[i]);
    kept.halo_masses.push_back(all.halo_masses[i]);
  }
  out.family = build_test_functions(std::move(kept), x);

  const auto nv = static_cast<Eigen::Index>(c.vertex_count());
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(nv, n);
  std::vector<int> owner(c.vertex_count(), -1);
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index v = 0; v < nv; ++v) {
      double d = std::numeric_limits<double>::infinity();
      for (auto y : out.family.cores[static_cast<std::size_t>(i)]) d = std::min(d, (c.vertex(static_cast<std::size_t>(v)) - x.point(y)).norm());
      const double f = std::clamp(1.0 - d / r, 0.0, 1.0);
      if (f <= 0.0) continue;
      F(v, i) = f;
      auto& o = owner[static_cast<std::size_t>(v)];
      if (o >= 0 && o != i) out.stiffness_coupled = true;
      o = i;
    }
    if (F.col(i).maxCoeff() <= 0.0)
      throw Error("test function vanishes on the mesh vertices; radius is below the mesh resolution");
  }

  const auto ops = assemble(c, {}, exec);
  for (Eigen::Index col = 0; col < ops.stiffness.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(ops.stiffness, col); it; ++it) {
      const int a = owner[static_cast<std::size_t>(it.row())], b = owner[static_cast<std::size_t>(it.col())];
      if (it.value() != 0.0 && a >= 0 && b >= 0 && a != b) out.stiffness_coupled = true;
    }

  for (int i = 0; i < n; ++i) out.rayleigh.push_back(rayleigh_quotient(ops, F.col(i)));
  if (out.stiffness_coupled) {
    const Eigen::MatrixXd Kr = F.transpose() * (ops.stiffness * F);
    const Eigen::MatrixXd Mr = F.transpose() * (ops.mass * F);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (Kr + Kr.transpose()), 0.5 * (Mr + Mr.transpose()));
    if (ges.info() != Eigen::Success) throw Error("Ritz projection of the test functions failed");
    out.bound = ges.eigenvalues().maxCoeff();
  } else {
    out.bound = *std::max_element(out.rayleigh.begin(), out.rayleigh.end());
  }
  out.spectrum_check = solve_spectrum(ops, n).eigenvalues.back();
  out.vertex_functions = std::move(F);
  return out;
}

ExplicitBound explicit_bound(int k, double rho, double N, double L, double p, double mu, double nu) {
  if (k < 1) throw ConfigError("k must be positive");
  if (!(N >= 1.0) || !(L > 0.0) || !(p > 0.0) || !(mu > 0.0) || !(nu > 0.0) || !(rho > 0.0))
    throw Error("explicit bound inputs must be positive");
  ExplicitBound b;
  b.k = k;
  b.rho = rho;
  b.N = N;
  b.L = L;
  b.p = p;
  b.mu_total = mu;
  b.nu_total = nu;
  const double ratio = mu / nu;
  b.term_rho = std::isinf(rho) ? 0.0 : 16.0 * N / (rho * rho) * ratio;
  b.term_main = 16.0 * N * std::pow(8.0 * N * N * L, 2.0 / p) * std::pow(ratio, 1.0 + 2.0 / p) *
                std::pow(k / mu, 2.0 / p);
  b.rhs_value = b.term_rho + b.term_main;
  return b;
}

std::vector<double> growth_radii(const ImmersedComplex& c, int count) {
  if (count < 1) throw ConfigError("radius count must be positive");
  double shortest = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < c.simplex_count(); ++s) {
    const auto t = c.simplex(s);
    for (std::size_t a = 0; a < t.size(); ++a)
      for (std::size_t b = a + 1; b < t.size(); ++b)
        shortest = std::min(shortest, (c.vertex(static_cast<std::size_t>(t[a])) - c.vertex(static_cast<std::size_t>(t[b]))).norm());
  }
  const double diam = (c.vertices().rowwise().maxCoeff() - c.vertices().rowwise().minCoeff()).norm();
  const double lo = 0.5 * shortest;
  std::vector<double> radii;
  for (int i = 0; i < count; ++i)
    radii.push_back(count == 1 ? diam : lo * std::pow(diam / lo, static_cast<double>(i) / (count - 1)));
  return radii;
}

CorollaryResult corollary_bound(const ImmersedComplex& c, const Region* region, int k, double rho,
                                const CorollaryOptions& opts) {
  const auto x = to_mm_space(c, Metric::euclidean, region);
  CorollaryResult out;
  if (opts.N) {
    out.covering.N_hat = *opts.N;
    out.covering.rho = rho;
  } else {
    out.covering = covering_number(x, rho, opts.covering_radii, opts.max_centers, opts.exec);
  }
  const double mu = c.volume();
  const double nu = region ? mu - region->measure : mu;
  double L = 0.0;
  if (opts.L_source == LSource::measured) {
    auto radii = growth_radii(c, opts.growth_radii);
    std::erase_if(radii, [&](double s) { return s > rho; });
    if (radii.empty()) radii.push_back(rho);
    const Eigen::MatrixXd& centers = c.vertices();
    if (region && !region->simplex_ids.empty()) {
      const auto rest = remove_region(c, *region);
      out.growth = ball_growth_constant(rest, radii, opts.max_centers, opts.exec, &centers);
    } else {
      out.growth = ball_growth_constant(c, radii, opts.max_centers, opts.exec, &centers);
    }
    L = out.growth->L_hat;
  } else {
    if (!opts.crofton || !opts.index) throw Error("missing index estimate for the integral-geometric growth constant");
    L = theoretical_ball_growth(c.dim(), *opts.crofton, *opts.index);
  }
  out.bound = explicit_bound(k, rho, out.covering.N_hat, L, c.dim(), mu, nu);
  return out;
}

}  // namespace specgeo
