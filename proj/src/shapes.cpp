#include "specgeo/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "specgeo/error.hpp"

namespace specgeo {

namespace {

struct TriMesh {
  std::vector<Eigen::Vector3d> verts;
  std::vector<int> tris;
};

TriMesh unit_icosphere(int subdiv) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.verts = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
             {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : m.verts) v.normalize();
  m.tris = {0, 11, 5, 0, 5,  1,  0,  1,  7,  0,  7,  10, 0,  10, 11, 1, 5, 9, 5, 11,
            4, 11, 10, 2, 10, 7, 6,  7,  1,  8,  3,  9,  4,  3,  4,  2,  3, 2, 6, 3,
            6, 8,  3,  8, 9,  4, 9,  5,  2,  4,  11, 6,  2,  10, 8,  6,  7, 9, 8, 1};
  for (int level = 0; level < subdiv; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = a < b ? std::pair{a, b} : std::pair{b, a};
      if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
      m.verts.push_back((m.verts[static_cast<std::size_t>(a)] + m.verts[static_cast<std::size_t>(b)]).normalized());
      const int id = static_cast<int>(m.verts.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<int> next;
    next.reserve(m.tris.size() * 4);
    for (std::size_t f = 0; f < m.tris.size(); f += 3) {
      const int a = m.tris[f], b = m.tris[f + 1], c = m.tris[f + 2];
      const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      next.insert(next.end(), {a, ab, ca, b, bc, ab, c, ca, bc, ab, bc, ca});
    }
    m.tris = std::move(next);
  }
  return m;
}

ImmersedComplex to_complex(const TriMesh& m) {
  Eigen::MatrixXd v(3, static_cast<Eigen::Index>(m.verts.size()));
  for (std::size_t i = 0; i < m.verts.size(); ++i) v.col(static_cast<Eigen::Index>(i)) = m.verts[i];
  return ImmersedComplex::create(2, std::move(v), m.tris);
}

void require_subdiv(int subdiv) {
  if (subdiv < 0) throw GeometryError("subdivision level must be >= 0");
  if (subdiv > 7) throw GeometryError("subdivision level above 7 is not supported");
}

}  // namespace

ImmersedComplex make_circle(int n, double radius) {
  if (n < 3) throw GeometryError("resolution too small: circle needs at least 3 segments");
  if (!(radius > 0.0)) throw GeometryError("circle radius must be positive");
  Eigen::MatrixXd v(2, n);
  std::vector<int> segs;
  segs.reserve(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    v(0, i) = radius * std::cos(a);
    v(1, i) = radius * std::sin(a);
    segs.push_back(i);
    segs.push_back((i + 1) % n);
  }
  return ImmersedComplex::create(1, std::move(v), std::move(segs));
}

ImmersedComplex make_icosphere(int subdiv, double radius) {
  require_subdiv(subdiv);
  if (!(radius > 0.0)) throw GeometryError("sphere radius must be positive");
  auto m = unit_icosphere(subdiv);
  for (auto& p : m.verts) p *= radius;
  return to_complex(m);
}

ImmersedComplex make_torus(double major_radius, double minor_radius, int res) {
  if (res < 3) throw GeometryError("resolution too small: torus needs res >= 3");
  if (!(minor_radius > 0.0) || !(major_radius > minor_radius))
    throw GeometryError("torus needs 0 < minor radius < major radius");
  Eigen::MatrixXd v(3, res * res);
  auto id = [res](int i, int j) { return ((i + res) % res) * res + (j + res) % res; };
  for (int i = 0; i < res; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / res;
    for (int j = 0; j < res; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / res;
      const double rho = major_radius + minor_radius * std::cos(theta);
      v.col(id(i, j)) = Eigen::Vector3d(rho * std::cos(phi), rho * std::sin(phi),
                                        minor_radius * std::sin(theta));
    }
  }
  std::vector<int> tris;
  tris.reserve(static_cast<std::size_t>(6 * res * res));
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      tris.insert(tris.end(), {a, b, c, a, c, d});
    }
  return ImmersedComplex::create(2, std::move(v), std::move(tris));
}

ImmersedComplex make_ellipsoid(double a, double b, double c, int subdiv) {
  require_subdiv(subdiv);
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw GeometryError("ellipsoid semi-axes must be positive");
  auto m = unit_icosphere(subdiv);
  for (auto& p : m.verts) p = Eigen::Vector3d(a * p.x(), b * p.y(), c * p.z());
  return to_complex(m);
}

std::vector<Eigen::Vector3d> spike_axes(int spike_count) {
  std::vector<Eigen::Vector3d> axes;
  if (spike_count == 1) return {Eigen::Vector3d(0, 0, 1)};
  // Fibonacci lattice.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < spike_count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / spike_count;
    const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
    axes.emplace_back(rr * std::cos(golden * i), rr * std::sin(golden * i), z);
  }
  return axes;
}

ImmersedComplex make_spiky_sphere(int subdiv, int spike_count, double spike_height,
                                  double spike_radius) {
  require_subdiv(subdiv);
  if (spike_count < 0) throw GeometryError("spike count must be >= 0");
  if (!(spike_height >= 0.0) || !(spike_radius > 0.0) || spike_radius >= std::numbers::pi / 2)
    throw GeometryError("spike height must be >= 0 and spike radius in (0, pi/2)");
  auto m = unit_icosphere(subdiv);
  const auto axes = spike_axes(spike_count);
  for (auto& p : m.verts) {
    double scale = 1.0;
    for (const auto& ax : axes) {
      const double ang = std::acos(std::clamp(p.dot(ax), -1.0, 1.0));
      if (ang < spike_radius) scale = std::max(scale, 1.0 + spike_height * (1.0 - ang / spike_radius));
    }
    p *= scale;
  }
  return to_complex(m);
}

Region spike_region(const ImmersedComplex& c, int spike_count, double spike_radius) {
  const auto axes = spike_axes(spike_count);
  std::vector<std::size_t> ids;
  for (std::size_t s = 0; s < c.simplex_count(); ++s) {
    bool inside = false;
    for (int v : c.simplex(s)) {
      const Eigen::Vector3d p = c.vertex(static_cast<std::size_t>(v)).head<3>().normalized();
      for (const auto& ax : axes)
        if (std::acos(std::clamp(p.dot(ax), -1.0, 1.0)) < spike_radius) inside = true;
    }
    if (inside) ids.push_back(s);
  }
  return make_region(c, std::move(ids));
}

ShapeSpec parse_shape_spec(const std::string& text) {
  ShapeSpec spec;
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  spec.kind = text.substr(0, open);
  spec.kind.erase(std::remove_if(spec.kind.begin(), spec.kind.end(), ::isspace), spec.kind.end());
  if (open == std::string::npos) return spec;
  if (close == std::string::npos || close < open) throw ConfigError("malformed shape spec '" + text + "'");
  const std::string inner = text.substr(open + 1, close - open - 1);
  if (spec.kind == "file") {
    spec.path = inner;
    return spec;
  }
  std::istringstream in(inner);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      spec.params.push_back(std::stod(tok, &used));
    } catch (const std::exception&) {
      throw ConfigError("non-numeric shape parameter '" + tok + "' in '" + text + "'");
    }
  }
  return spec;
}

ImmersedComplex make_shape(const ShapeSpec& spec) {
  const auto& p = spec.params;
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (p.size() < lo || p.size() > hi)
      throw ConfigError("shape '" + spec.kind + "' takes " + std::to_string(lo) + ".." +
                        std::to_string(hi) + " parameters");
  };
  auto as_int = [](double x) { return static_cast<int>(std::lround(x)); };
  if (spec.kind == "circle") {
    need(1, 2);
    return make_circle(as_int(p[0]), p.size() > 1 ? p[1] : 1.0);
  }
  if (spec.kind == "sphere" || spec.kind == "icosphere") {
    need(1, 2);
    return make_icosphere(as_int(p[0]), p.size() > 1 ? p[1] : 1.0);
  }
  if (spec.kind == "torus") {
    need(3, 3);
    return make_torus(p[0], p[1], as_int(p[2]));
  }
  if (spec.kind == "ellipsoid") {
    need(4, 4);
    return make_ellipsoid(p[0], p[1], p[2], as_int(p[3]));
  }
  if (spec.kind == "spiky_sphere") {
    need(4, 4);
    return make_spiky_sphere(as_int(p[0]), as_int(p[1]), p[2], p[3]);
  }
  if (spec.kind == "file") return load_complex(spec.path);
  throw ConfigError("unknown shape '" + spec.kind + "'");
}

ImmersedComplex make_shape(const std::string& text) { return make_shape(parse_shape_spec(text)); }

}  // namespace specgeo
