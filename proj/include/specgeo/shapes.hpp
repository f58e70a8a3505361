#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specgeo/geom.hpp"

namespace specgeo {

/// Closed fixture generators. All throw GeometryError when the resolution is
/// too small to give a manifold (fewer than 3 segments or 4 triangles).
ImmersedComplex make_circle(int n, double radius = 1.0);
/// Icosahedron subdivided `subdiv` times, projected to the sphere:
/// 20 * 4^subdiv triangles.
ImmersedComplex make_icosphere(int subdiv, double radius = 1.0);
ImmersedComplex make_torus(double major_radius, double minor_radius, int res);
ImmersedComplex make_ellipsoid(double a, double b, double c, int subdiv);

/// Unit icosphere with `spike_count` conical spikes: vertices within angular
/// distance `spike_radius` of a spike axis are pushed out radially to
/// 1 + spike_height * (1 - angle / spike_radius). Vertices outside the caps
/// are untouched.
ImmersedComplex make_spiky_sphere(int subdiv, int spike_count, double spike_height,
                                  double spike_radius);
/// Unit spike directions used by make_spiky_sphere.
std::vector<Eigen::Vector3d> spike_axes(int spike_count);
/// Simplices with at least one vertex inside one of the spike caps.
Region spike_region(const ImmersedComplex& c, int spike_count, double spike_radius);

/// Parsed form of "name(a,b,...)" or "file(path)".
struct ShapeSpec {
  std::string kind;
  std::vector<double> params;
  std::string path;
};

ShapeSpec parse_shape_spec(const std::string& text);
ImmersedComplex make_shape(const ShapeSpec& spec);
ImmersedComplex make_shape(const std::string& text);

}  // namespace specgeo
