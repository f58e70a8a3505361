#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "specgeo/error.hpp"
#include "specgeo/grassmann.hpp"
#include "specgeo/rng.hpp"
#include "specgeo/shapes.hpp"
#include "specgeo/stabbing.hpp"

using namespace specgeo;
using std::numbers::pi;

namespace {

IndexOptions small_opts(int planes = 32, int budget = 128) {
  IndexOptions o;
  o.n_grassmann = planes;
  o.stab_budget = budget;
  o.seed = 11;
  return o;
}

GrassmannSample fixed_plane(Eigen::MatrixXd basis) { return GrassmannSample{std::move(basis), 99}; }

}  // namespace

TEST_CASE("Haar lines in the plane have uniform angle") {
  constexpr int n = 10000, bins = 20;
  std::vector<int> count(bins, 0);
  for (int i = 0; i < n; ++i) {
    const auto h = sample_haar(1, 1, derive_seed(5, static_cast<std::uint64_t>(i)));
    double angle = std::atan2(h.basis(1, 0), h.basis(0, 0));
    if (angle < 0) angle += pi;
    if (angle >= pi) angle -= pi;
    ++count[std::min(bins - 1, static_cast<int>(angle / pi * bins))];
  }
  double chi2 = 0.0;
  for (int c : count) chi2 += (c - n / bins) * (c - n / bins) / static_cast<double>(n / bins);
  CHECK(chi2 < 36.19);  // 99th percentile, 19 degrees of freedom
}

TEST_CASE("Haar samples are orthonormal and reproducible") {
  for (auto [m, p] : {std::pair{1, 1}, {2, 1}, {2, 3}}) {
    const auto h = sample_haar(m, p, 77);
    const Eigen::MatrixXd gram = h.basis.transpose() * h.basis;
    CHECK((gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sample_haar(m, p, 77).basis == h.basis);
  }
}

TEST_CASE("projection Jacobian") {
  const auto h = sample_haar(2, 1, 3);
  CHECK(jacobian_factor(h.basis, h) == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::MatrixXd e1(2, 1), e2(2, 1);
  e1 << 1, 0;
  e2 << 0, 1;
  CHECK(jacobian_factor(e2, fixed_plane(e1)) == doctest::Approx(0.0).epsilon(1e-15));
  for (double theta : {0.1, 0.7, 1.3, 2.5}) {
    Eigen::MatrixXd line(2, 1);
    line << std::cos(theta), std::sin(theta);
    CHECK(jacobian_factor(line, fixed_plane(e1)) == doctest::Approx(std::abs(std::cos(theta))).epsilon(1e-12));
  }
  Eigen::MatrixXd skew(2, 1);
  skew << 1, 1;
  CHECK_THROWS_AS(jacobian_factor(skew, fixed_plane(e1)), Error);
}

TEST_CASE("Crofton constants") {
  const auto a = crofton_constant(1, 1, 100000, 4, 1);
  CHECK(std::abs(a.value - 2 / pi) / (2 / pi) < 0.01);
  CHECK(a.anisotropy_spread < 2 * a.frame_standard_error);
  const auto b = crofton_constant(2, 1, 100000, 4, 1);
  CHECK(std::abs(b.value - 0.5) / 0.5 < 0.01);
  CHECK(b.anisotropy_spread < 2 * b.frame_standard_error);
}

TEST_CASE("Crofton estimate is identical serial and parallel") {
  const auto s = crofton_constant(2, 2, 5000, 3, 9, Exec::serial);
  const auto p = crofton_constant(2, 2, 5000, 3, 9, Exec::parallel);
  CHECK(s.per_frame == p.per_frame);
  CHECK(s.value == p.value);
}

TEST_CASE("fibre index on convex shapes and the torus") {
  const auto circle = make_circle(1024);
  const auto sphere = make_icosphere(3);
  for (int i = 0; i < 8; ++i) {
    CHECK(fiber_index(circle, sample_haar(1, 1, derive_seed(1, i)), 64).value == 2);
    CHECK(fiber_index(sphere, sample_haar(2, 1, derive_seed(2, i)), 64).value == 2);
  }
  // Fibres along the x axis: the plane y = 0 cuts the tube twice on each side.
  Eigen::MatrixXd yz = Eigen::MatrixXd::Zero(3, 2);
  yz(1, 0) = 1;
  yz(2, 1) = 1;
  CHECK(fiber_index(make_torus(2, 0.5, 64), fixed_plane(yz), 256).value == 4);
}

TEST_CASE("sup and mean index") {
  const auto o = small_opts();
  const auto circle = make_circle(1024);
  CHECK(sup_index(circle, o).value == 2);
  CHECK(mean_index(circle, o).value == 2);
  CHECK(sup_index(make_ellipsoid(1, 2, 3, 3), o).value == 2);
  const auto sm = mean_index(make_icosphere(3), o);
  CHECK(std::abs(sm.value - 2) <= sm.standard_error + 1e-12);

  const auto torus = make_torus(2, 0.5, 64);
  IndexOptions t = small_opts(64, 256);
  CHECK(sup_index(torus, t).value == 4);
  const auto tm = mean_index(torus, t);
  CHECK(tm.value > 2.0 + tm.standard_error);
  CHECK(tm.value < 4.0 - tm.standard_error);
}

TEST_CASE("index estimates are identical serial and parallel") {
  const auto c = make_torus(2, 0.5, 32);
  IndexOptions s = small_opts(16, 64), p = s;
  s.exec = Exec::serial;
  p.exec = Exec::parallel;
  CHECK(mean_index(c, s).fiber_values == mean_index(c, p).fiber_values);
  CHECK(local_index(c, 0.5, s).value == local_index(c, 0.5, p).value);
  CHECK(eps_index(c, 0.05, std::nullopt, RegionStrategy::greedy_multiplicity, s).value ==
        eps_index(c, 0.05, std::nullopt, RegionStrategy::greedy_multiplicity, p).value);
}

TEST_CASE("estimates grow with nested budgets") {
  const auto c = make_torus(2, 0.5, 32);
  IndexOptions lo = small_opts(8, 16), mid = small_opts(8, 64), hi = small_opts(32, 64);
  const auto a = mean_index(c, lo), b = mean_index(c, mid);
  for (std::size_t i = 0; i < a.fiber_values.size(); ++i) CHECK(a.fiber_values[i] <= b.fiber_values[i]);
  CHECK(a.value <= b.value);
  CHECK(sup_index(c, lo).value <= sup_index(c, mid).value);
  CHECK(sup_index(c, mid).value <= sup_index(c, hi).value);
}

TEST_CASE("crossing counts of closed hypersurfaces are even") {
  for (const char* shape : {"sphere(3)", "ellipsoid(1,2,3,3)", "torus(2,0.5,32)", "spiky_sphere(3,2,0.4,0.2)"}) {
    INFO(shape);
    const auto c = make_shape(shape);
    int odd = 0, counted = 0;
    for (int i = 0; i < 6; ++i) {
      const auto h = sample_haar(2, 1, derive_seed(31, i));
      const ProjectedComplex pc(c, h.basis);
      Rng rng(derive_seed(32, i));
      std::uniform_real_distribution<double> u(-2.6, 2.6);
      for (int q = 0; q < 400; ++q) {
        Eigen::Vector2d y;
        y(0) = u(rng);
        y(1) = u(rng);
        const auto res = pc.stab(y);
        if (res.degenerate) continue;
        ++counted;
        odd += res.count % 2;
      }
    }
    CHECK(counted > 1000);
    CHECK(odd == 0);
  }
}

TEST_CASE("local index") {
  const auto o = small_opts();
  const auto circle = make_circle(512);
  CHECK(local_index(circle, 2.5, o).value == doctest::Approx(mean_index(circle, o).value));
  const auto s = local_index(make_icosphere(3), 0.1, o);
  CHECK(s.value >= 1.0);
  CHECK(s.value <= 2.0);

  const auto smooth = local_index(make_icosphere(3), 0.3, o);
  const auto spiky = local_index(make_spiky_sphere(3, 1, 0.8, 0.2), 0.3, o);
  CHECK(spiky.value > smooth.value);
}

TEST_CASE("ordering chain local <= mean <= sup") {
  for (const char* shape : {"circle(512)", "sphere(3)", "torus(2,0.5,32)", "spiky_sphere(3,2,0.4,0.2)"}) {
    INFO(shape);
    const auto c = make_shape(shape);
    const auto o = small_opts(16, 64);
    const auto mean = mean_index(c, o);
    const auto sup = sup_index(c, o);
    for (double r : {0.2, 0.8, 3.0}) CHECK(local_index(c, r, o).value <= mean.value + 1e-12);
    CHECK(mean.value <= sup.value);
  }
}

TEST_CASE("eps index") {
  const auto o = small_opts(16, 64);
  const auto c = make_spiky_sphere(3, 2, 0.4, 0.2);
  CHECK(eps_index(c, 0.0, std::nullopt, RegionStrategy::greedy_multiplicity, o).value ==
        doctest::Approx(mean_index(c, o).value));
  for (auto strategy : {RegionStrategy::greedy_multiplicity, RegionStrategy::cap_removal}) {
    double prev = 1e9;
    for (double eps : {0.0, 0.02, 0.05, 0.1}) {
      const auto e = eps_index(c, eps, std::nullopt, strategy, o);
      CHECK(e.value <= prev + 1e-12);
      if (e.chosen_region) CHECK(e.chosen_region->volume_fraction <= eps + 1e-12);
      prev = e.value;
    }
  }
  CHECK_THROWS_AS(eps_index(c, 1.0, std::nullopt, RegionStrategy::none, o), ConfigError);
  CHECK(parse_region_strategy("cap-removal") == RegionStrategy::cap_removal);
  CHECK_THROWS_AS(parse_region_strategy("magic"), ConfigError);
}

TEST_CASE("projected volumes") {
  const auto circle = make_circle(1024);
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(projected_volume(circle, sample_haar(1, 1, derive_seed(3, i))) - 2.0) / 2.0 < 0.01);
  const auto sphere = make_icosphere(4);
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(projected_volume(sphere, sample_haar(2, 1, derive_seed(4, i))) - pi) / pi < 0.02);
  // Along the axis the shadow is the annulus between radii 1.5 and 2.5.
  Eigen::MatrixXd xy = Eigen::MatrixXd::Zero(3, 2);
  xy(0, 0) = 1;
  xy(1, 1) = 1;
  CHECK(std::abs(projected_volume(make_torus(2, 0.5, 64), fixed_plane(xy), 512) - 4 * pi) / (4 * pi) < 0.02);
}

TEST_CASE("volume lemma") {
  for (const char* shape : {"circle(512)", "sphere(3)", "ellipsoid(1,2,3,3)", "torus(2,0.5,32)"}) {
    INFO(shape);
    const auto c = make_shape(shape);
    const auto I = crofton_constant(c.dim(), c.codim(), 20000, 2, 1).value;
    const double bound = 2.0 / I * mean_index(c, small_opts(64, 64)).value * max_projected_volume(c, 64, 128);
    CHECK(c.volume() <= bound * 1.05);
  }
}

TEST_CASE("ball growth") {
  const auto sphere = make_icosphere(4);
  const auto g = ball_growth_constant(sphere, {0.05, 0.1}, 64);
  CHECK(g.L_hat == doctest::Approx(pi).epsilon(0.02));
  CHECK(g.L_hat <= theoretical_ball_growth(2, 0.5, 2.0));
  CHECK(theoretical_ball_growth(2, 0.5, 2.0) == doctest::Approx(8 * pi));

  const auto circle = make_circle(2048);
  const auto gc = ball_growth_constant(circle, {0.01, 0.02}, 64);
  CHECK(gc.L_hat == doctest::Approx(2.0).epsilon(0.01));

  // Exact pieces: a cap of height s^2/2 has area pi s^2.
  Eigen::VectorXd north(3);
  north << 0, 0, 1;
  CHECK(ball_measure(sphere, north, 0.3) == doctest::Approx(pi * 0.09).epsilon(0.01));
  CHECK(ball_measure(sphere, north, 3.0) == doctest::Approx(sphere.volume()).epsilon(1e-12));
  CHECK(unit_ball_volume(1) == 2.0);
  CHECK(unit_ball_volume(2) == doctest::Approx(pi));
}

TEST_CASE("ball growth is identical serial and parallel") {
  const auto c = make_torus(2, 0.5, 16);
  const auto s = ball_growth_constant(c, {0.3, 0.9}, 0, Exec::serial);
  const auto p = ball_growth_constant(c, {0.3, 0.9}, 0, Exec::parallel);
  CHECK(s.L_hat == p.L_hat);
  CHECK(s.worst_center == p.worst_center);
}
