#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "specgeo/capacitor.hpp"
#include "specgeo/error.hpp"
#include "specgeo/shapes.hpp"
#include "specgeo/spectrum.hpp"

using namespace specgeo;
using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MetricMeasureSpace one_point() {
  return MetricMeasureSpace(Eigen::MatrixXd::Zero(2, 1), {1.0}, Metric::euclidean);
}

}  // namespace

TEST_CASE("covering numbers") {
  CHECK(covering_number(one_point(), kInf).N_hat == 1);

  const auto circle = to_mm_space(make_circle(1024));
  CHECK(covering_number(circle, kInf).N_hat <= 9);

  const auto torus = to_mm_space(make_torus(2, 0.5, 16));
  int prev = 0;
  for (double rho : {0.2, 0.5, 1.0, 2.0, kInf}) {
    const auto est = covering_number(torus, rho);
    CHECK(est.N_hat >= prev);
    prev = est.N_hat;
  }
  CHECK_THROWS_AS(covering_number(circle, 0.0), ConfigError);
}

TEST_CASE("covering is identical serial and parallel") {
  const auto x = to_mm_space(make_icosphere(2));
  CHECK(covering_number(x, kInf, 8, 0, Exec::serial).N_hat == covering_number(x, kInf, 8, 0, Exec::parallel).N_hat);
}

TEST_CASE("single capacitor sits on the densest ball") {
  const auto x = to_mm_space(make_ellipsoid(1, 2, 3, 2));
  const auto fam = build_capacitors(x, 1, 0.4);
  REQUIRE(fam.cores.size() == 1);
  CHECK(halos_disjoint(fam));
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double m = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x.distance(i, j) <= 0.4) m += x.weights()[j];
    best = std::max(best, m);
  }
  CHECK(fam.core_masses[0] == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("four capacitors on a uniform circle") {
  const auto x = to_mm_space(make_circle(1024));
  const double r = 2.0 / 20.0;
  const auto fam = build_test_functions(build_capacitors(x, 4, r, 9), x);
  REQUIRE(fam.cores.size() == 4);
  CHECK(halos_disjoint(fam));
  // B(x, r) on the unit circle is an arc of length 4 asin(r / 2).
  const double arc = 4 * std::asin(r / 2);
  for (double m : fam.core_masses) CHECK(m == doctest::Approx(arc).epsilon(0.01));
  REQUIRE(fam.mass_bound);
  CHECK(*fam.mass_bound == doctest::Approx(x.total_weight() / (2 * 9 * 4)));
  CHECK(fam.mass_bound_holds.size() == 4);
  CHECK(max_dilatation(fam, x) <= 1.0 / r + 1e-9);

  for (std::size_t i = 0; i < 4; ++i) {
    const auto& f = fam.test_functions[i];
    for (auto y : fam.cores[i]) CHECK(f[y] == 1.0);
    for (std::size_t z = 0; z < x.size(); ++z) {
      CHECK(f[z] >= 0.0);
      CHECK(f[z] <= 1.0);
    }
    std::vector<char> in_halo(x.size(), 0);
    for (auto z : fam.halos[i]) in_halo[z] = 1;
    for (std::size_t z = 0; z < x.size(); ++z)
      if (!in_halo[z]) CHECK(f[z] == 0.0);
  }
}

TEST_CASE("test function profile") {
  // Points on a line with core {0}.
  Eigen::MatrixXd pts(1, 4);
  pts << 0, 0.5, 0.75, 3.0;
  MetricMeasureSpace x(pts, {1, 1, 1, 1}, Metric::euclidean);
  CapacitorFamily fam;
  fam.n = 1;
  fam.r = 0.5;
  fam.cores = {{0}};
  fam.halos = {{0, 1}};
  fam = build_test_functions(fam, x);
  CHECK(fam.test_functions[0][0] == 1.0);
  CHECK(fam.test_functions[0][1] == doctest::Approx(0.0));
  CHECK(fam.test_functions[0][3] == 0.0);
  fam.r = 1.0;
  fam = build_test_functions(fam, x);
  CHECK(fam.test_functions[0][1] == doctest::Approx(0.5));
  CHECK(fam.test_functions[0][2] == doctest::Approx(0.25));
}

TEST_CASE("oversized radius is infeasible") {
  const auto x = to_mm_space(make_circle(128));
  CHECK_THROWS_AS(build_capacitors(x, 2, 2.0), PackingInfeasible);
}

TEST_CASE("capacitor certificates dominate lambda_n") {
  const auto circle = make_circle(1024);
  const auto one = capacitor_upper_bound(circle, 1, 0.2);
  CHECK(one.bound >= 0.0);

  const auto three = capacitor_upper_bound(circle, 3, 2 * pi / 24);
  CHECK(three.bound >= 1.0);
  CHECK(std::isfinite(three.bound));
  CHECK(three.spectrum_check == doctest::Approx(1.0).epsilon(1e-3));

  const auto sphere = make_icosphere(3);
  const auto four = capacitor_upper_bound(sphere, 4, 0.2);
  CHECK(four.bound >= 2.0 * (1 - 0.02));
  CHECK(four.bound >= four.spectrum_check * (1 - 1e-6));
  CHECK(halos_disjoint(four.family));
  CHECK(four.vertex_functions.rows() == static_cast<Eigen::Index>(sphere.vertex_count()));
}

TEST_CASE("explicit bound algebra") {
  const auto b = explicit_bound(5, kInf, 10, 3, 2, 4 * pi, 4 * pi);
  CHECK(b.term_rho == 0.0);
  const double expected = 16 * 10 * std::pow(8 * 100 * 3.0, 1.0) * std::pow(5 / (4 * pi), 1.0);
  CHECK(b.rhs_value == doctest::Approx(expected).epsilon(1e-14));

  for (int p : {1, 2, 3}) {
    const auto a = explicit_bound(3, 0.5, 7, 2, p, 5, 4);
    const auto d = explicit_bound(6, 0.5, 7, 2, p, 5, 4);
    CHECK(d.term_main == doctest::Approx(a.term_main * std::pow(2.0, 2.0 / p)).epsilon(1e-14));
    CHECK(a.term_rho == doctest::Approx(16 * 7 / 0.25 * 5 / 4.0));
  }
  CHECK_THROWS_AS(explicit_bound(0, kInf, 1, 1, 1, 1, 1), ConfigError);
}

TEST_CASE("corollary bound without a region has the mean-index shape") {
  const auto sphere = make_icosphere(3);
  CorollaryOptions o;
  o.L_source = LSource::crofton_mean;
  o.crofton = 0.5;
  o.index = 2.0;
  o.max_centers = 256;
  const auto res = corollary_bound(sphere, nullptr, 5, kInf, o);
  const double N = res.covering.N_hat;
  const double cm = 16 * N * std::pow(8 * N * N * 2 * pi / 0.5, 1.0);
  CHECK(res.bound.mu_total == res.bound.nu_total);
  CHECK(res.bound.rhs_value == doctest::Approx(cm * 2.0 * 5 / sphere.volume()).epsilon(1e-12));

  CorollaryOptions missing;
  missing.L_source = LSource::crofton_mean;
  CHECK_THROWS_AS(corollary_bound(sphere, nullptr, 5, kInf, missing), Error);
}

TEST_CASE("measured corollary bound dominates the spectrum") {
  for (const char* shape : {"circle(512)", "sphere(3)"}) {
    INFO(shape);
    const auto c = make_shape(shape);
    const auto ev = solve_spectrum(assemble(c), 20).eigenvalues;
    CorollaryOptions o;
    o.max_centers = 256;
    o.growth_radii = 10;
    const auto x = to_mm_space(c);
    const auto N = covering_number(x, kInf, 12, 256).N_hat;
    o.N = N;
    for (int k = 1; k <= 20; ++k) {
      const auto res = corollary_bound(c, nullptr, k, kInf, o);
      CHECK(res.bound.rhs_value >= ev[static_cast<std::size_t>(k - 1)]);
    }
    // Where the small-ball precondition holds the bound is a theorem.
    const double r = 0.05;
    const auto masses = kernels::ball_masses(x, r, Exec::parallel);
    const double worst = *std::max_element(masses.begin(), masses.end());
    if (worst <= x.total_weight() / (4.0 * N * N * 20)) {
      const auto res = corollary_bound(c, nullptr, 20, kInf, o);
      CHECK(res.bound.rhs_value >= ev[19]);
    }
  }
}

TEST_CASE("removing spikes keeps the bound near the smooth sphere's") {
  const auto smooth = make_icosphere(3);
  const auto spiky = make_spiky_sphere(3, 2, 0.4, 0.2);
  const auto spikes = spike_region(spiky, 2, 0.2);
  IndexOptions io;
  io.n_grassmann = 16;
  io.stab_budget = 64;
  const double eps = spikes.volume_fraction + 1e-9;
  const auto eps_idx = eps_index(spiky, eps, std::nullopt, RegionStrategy::greedy_multiplicity, io);
  const auto smooth_idx = mean_index(smooth, io);

  CorollaryOptions o;
  o.L_source = LSource::crofton_mean;
  o.crofton = 0.5;
  o.max_centers = 256;
  o.index = eps_idx.value;
  const auto a = corollary_bound(spiky, &spikes, 5, kInf, o);
  o.index = smooth_idx.value;
  const auto b = corollary_bound(smooth, nullptr, 5, kInf, o);
  CHECK(std::isfinite(a.bound.rhs_value));
  CHECK(a.bound.rhs_value <= 3 * b.bound.rhs_value);
  CHECK(sup_index(spiky, io).value > sup_index(smooth, io).value);
}

TEST_CASE("growth radii span the mesh") {
  const auto radii = growth_radii(make_icosphere(2), 8);
  REQUIRE(radii.size() == 8);
  for (std::size_t i = 1; i < radii.size(); ++i) CHECK(radii[i] > radii[i - 1]);
  CHECK(radii.back() <= 2 * std::sqrt(3.0) + 1e-12);
  CHECK(radii.back() >= 2.0);
}
