#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "specgeo/geom.hpp"
#include "specgeo/kernels.hpp"
#include "specgeo/spectrum.hpp"

namespace specgeo {

using Complex = std::complex<double>;

/// Rational curve [p_0(z) : ... : p_N(z)] in CP^N, coefficients in ascending
/// powers of z.
struct HolomorphicCurve {
  std::vector<std::vector<Complex>> coefficients;
  int degree_d = 0;
};

/// Trims negligible leading coefficients and validates: N >= 1, some
/// polynomial nonconstant, no common root of all polynomials. Throws
/// GeometryError otherwise.
HolomorphicCurve make_curve(std::vector<std::vector<Complex>> coefficients);

/// [1 : sqrt(C(d,1)) z : ... : sqrt(C(d,d)) z^d]; d = 1 is the identity.
HolomorphicCurve rational_normal_curve(int d);

/// Precomposition with z -> (a z + b) / (-conj(b) z + conj(a)), an isometry
/// of the round sphere when |a|^2 + |b|^2 = 1.
HolomorphicCurve precompose_rotation(const HolomorphicCurve& curve, Complex a, Complex b);

int curve_degree(const HolomorphicCurve& curve);

/// d/dz d/dzbar log sum |p_j(z)|^2 in the affine chart z.
double fs_density(const HolomorphicCurve& curve, Complex z);

/// Pullback metric as a per-vertex factor against the round radius-1/2
/// sphere metric |dz|^2 / (1 + |z|^2)^2.
struct ConformalMetric {
  ImmersedComplex base;
  std::vector<double> factor;
  std::vector<double> vertex_area;  // lumped round areas of the base mesh
};

/// Evaluates the factor at every vertex of a sphere mesh centred at the
/// origin (any radius; only directions are used). Stereographic coordinate
/// z from the north pole; vertices with |z| > 1 use w = 1/z with the
/// homogenised polynomials. Throws GeometryError at a base point or where
/// the curve fails to be immersed.
ConformalMetric fs_conformal_factor(const HolomorphicCurve& curve, const ImmersedComplex& mesh,
                                    Exec exec = Exec::parallel);
/// Same on a radius-1/2 icosphere.
ConformalMetric fs_conformal_factor(const HolomorphicCurve& curve, int subdiv, Exec exec = Exec::parallel);

/// sum over vertices of factor * round vertex area.
double curve_area(const ConformalMetric& metric);

/// Round stiffness against the factor-weighted lumped mass.
SpectrumResult curve_spectrum(const ConformalMetric& metric, int k, double tol = 1e-8,
                              std::uint64_t seed = 0x5EEDu);

}  // namespace specgeo
