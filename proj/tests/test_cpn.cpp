#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "specgeo/cpn.hpp"
#include "specgeo/error.hpp"
#include "specgeo/shapes.hpp"

using namespace specgeo;
using std::numbers::pi;

namespace {

ImmersedComplex octahedron() {
  Eigen::MatrixXd v(3, 6);
  v << 1, -1, 0, 0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, 0, 0, 1, -1;
  return ImmersedComplex::create(2, v, {0, 2, 4, 2, 1, 4, 1, 3, 4, 3, 0, 4, 2, 0, 5, 1, 2, 5, 3, 1, 5, 0, 3, 5});
}

double round_factor(const HolomorphicCurve& c, Complex z) { return fs_density(c, z) * std::pow(1 + std::norm(z), 2); }

}  // namespace

TEST_CASE("conformal factor of simple curves") {
  const auto identity = rational_normal_curve(1);
  const auto veronese = rational_normal_curve(2);
  for (Complex z : {Complex(0, 0), Complex(0.3, -0.2), Complex(2, 1), Complex(-5, 0.5)}) {
    CHECK(round_factor(identity, z) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(round_factor(veronese, z) == doctest::Approx(2.0).epsilon(1e-12));
  }
  const auto doubled = make_curve({{1.0}, {0.0, 2.0}});
  CHECK(round_factor(doubled, 0.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(round_factor(doubled, 1.0) == doctest::Approx(4.0 * 4.0 / 25.0).epsilon(1e-12));

  const auto metric = fs_conformal_factor(identity, 3);
  for (double f : metric.factor) CHECK(f == doctest::Approx(1.0).epsilon(1e-10));
  const auto vmetric = fs_conformal_factor(veronese, 3);
  for (double f : vmetric.factor) CHECK(f == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("factor is identical serial and parallel") {
  const auto c = make_curve({{1.0, 0.5}, {0.0, 2.0, Complex(0, 1)}, {0.0, 0.0, 0.0, 1.0}});
  const auto s = fs_conformal_factor(c, 3, Exec::serial);
  const auto p = fs_conformal_factor(c, 3, Exec::parallel);
  CHECK(s.factor == p.factor);
}

TEST_CASE("curve areas follow the degree") {
  CHECK(std::abs(curve_area(fs_conformal_factor(rational_normal_curve(1), 4)) - pi) / pi < 0.005);
  CHECK(std::abs(curve_area(fs_conformal_factor(rational_normal_curve(2), 4)) - 2 * pi) / (2 * pi) < 0.005);
  CHECK(std::abs(curve_area(fs_conformal_factor(rational_normal_curve(3), 4)) - 3 * pi) / (3 * pi) < 0.01);
  // A non-homogeneous degree-2 curve still has area 2 pi.
  const auto c = make_curve({{1.0, 0.0, 0.5}, {0.0, 1.0}, {0.0, 0.0, 2.0}});
  CHECK(std::abs(curve_area(fs_conformal_factor(c, 5)) - 2 * pi) / (2 * pi) < 0.01);
}

TEST_CASE("identity curve spectrum") {
  const auto s = curve_spectrum(fs_conformal_factor(rational_normal_curve(1), 4), 4);
  CHECK(std::abs(s.eigenvalues[0]) < 1e-6);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(s.eigenvalues[static_cast<std::size_t>(i)] - 8.0) / 8.0 < 0.02);
}

TEST_CASE("Veronese spectrum is the identity spectrum halved") {
  const auto a = curve_spectrum(fs_conformal_factor(rational_normal_curve(1), 4), 6).eigenvalues;
  const auto b = curve_spectrum(fs_conformal_factor(rational_normal_curve(2), 4), 6).eigenvalues;
  CHECK(b[1] == doctest::Approx(4.0).epsilon(0.02));
  for (std::size_t i = 1; i < 6; ++i) CHECK(b[i] == doctest::Approx(a[i] / 2).epsilon(1e-6));
}

TEST_CASE("rotations leave the spectrum unchanged") {
  const auto c = make_curve({{1.0}, {0.0, 2.0}});
  const auto base = curve_spectrum(fs_conformal_factor(c, 4), 6).eigenvalues;
  const double t = 0.7;
  const Complex a = std::polar(std::cos(t), 0.3), b = std::polar(std::sin(t), -1.1);
  const auto rotated = curve_spectrum(fs_conformal_factor(precompose_rotation(c, a, b), 4), 6).eigenvalues;
  // The rotated metric is resampled on the same mesh, so agreement is up to discretization.
  for (std::size_t i = 1; i < 6; ++i) CHECK(rotated[i] == doctest::Approx(base[i]).epsilon(0.02));
  CHECK(curve_degree(precompose_rotation(c, a, b)) == 1);
}

TEST_CASE("degrees") {
  CHECK(curve_degree(rational_normal_curve(1)) == 1);
  CHECK(curve_degree(rational_normal_curve(2)) == 2);
  CHECK(curve_degree(make_curve({{1.0}, {0.0, 1.0}, {0.0, 0.0, 0.0, 0.0, 0.0, 1.0}})) == 5);
  CHECK(curve_degree(make_curve({{1.0}, {0.0, 1.0, 0.0, 0.0}})) == 1);
}

TEST_CASE("invalid curves are rejected") {
  CHECK_THROWS_AS(make_curve({{0.0, 1.0}}), GeometryError);
  CHECK_THROWS_AS(make_curve({{0.0}, {0.0}}), GeometryError);
  CHECK_THROWS_AS(make_curve({{1.0}, {2.0}}), GeometryError);
  // z and z^2 share the factor z.
  CHECK_THROWS_WITH_AS(make_curve({{0.0, 1.0}, {0.0, 0.0, 1.0}}), doctest::Contains("common factor"), GeometryError);
  // (z - 1)(z + 2) and (z - 1) z.
  CHECK_THROWS_AS(make_curve({{-2.0, 1.0, 1.0}, {0.0, -1.0, 1.0}}), GeometryError);
  CHECK_THROWS_AS(make_curve({{1.0, std::nan("")}, {0.0, 1.0}}), GeometryError);
}

TEST_CASE("branch points are not immersed") {
  // [1 : z^2] has zero derivative at z = 0, the south pole (0, 0, -1).
  const auto c = make_curve({{1.0}, {0.0, 0.0, 1.0}});
  CHECK_THROWS_WITH_AS(fs_conformal_factor(c, octahedron()), doctest::Contains("not immersed"), GeometryError);
  // [1 + z^3 : z] is branched only at infinity, the north pole.
  const auto d = make_curve({{1.0, 0.0, 0.0, 1.0}, {0.0, 1.0}});
  CHECK_THROWS_AS(fs_conformal_factor(d, octahedron()), GeometryError);
}
