#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "specgeo/error.hpp"
#include "specgeo/geom.hpp"

namespace specgeo {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GeometryError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Strips '#' comments and blank lines.
std::vector<std::string> content_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (std::all_of(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); })) continue;
    out.push_back(line);
  }
  return out;
}

void fan(std::vector<int>& tris, const std::vector<int>& poly) {
  if (poly.size() < 3) throw GeometryError("face with fewer than 3 vertices");
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    tris.push_back(poly[0]);
    tris.push_back(poly[i]);
    tris.push_back(poly[i + 1]);
  }
}

}  // namespace

ImmersedComplex parse_off(const std::string& text) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw GeometryError("OFF parse failure: empty input");
  std::istringstream tokens([&] {
    std::string all;
    for (const auto& l : lines) all += l + '\n';
    return all;
  }());
  std::string magic;
  tokens >> magic;
  int ambient = 3;
  if (magic == "nOFF") {
    if (!(tokens >> ambient) || ambient < 2) throw GeometryError("OFF parse failure: bad dimension");
  } else if (magic != "OFF") {
    throw GeometryError("OFF parse failure: missing OFF header");
  }
  long nv = 0, nf = 0, ne = 0;
  if (!(tokens >> nv >> nf >> ne) || nv <= 0 || nf <= 0)
    throw GeometryError("OFF parse failure: bad counts line");
  Eigen::MatrixXd verts(ambient, nv);
  for (long i = 0; i < nv; ++i)
    for (int d = 0; d < ambient; ++d)
      if (!(tokens >> verts(d, i))) throw GeometryError("OFF parse failure: truncated vertex list");
  std::vector<int> tris;
  for (long f = 0; f < nf; ++f) {
    int k = 0;
    if (!(tokens >> k) || k < 3) throw GeometryError("OFF parse failure: bad face");
    std::vector<int> poly(static_cast<std::size_t>(k));
    for (auto& v : poly)
      if (!(tokens >> v)) throw GeometryError("OFF parse failure: truncated face");
    // Trailing per-face colour values are left on the line; skip them.
    std::string rest;
    std::getline(tokens, rest);
    fan(tris, poly);
  }
  return ImmersedComplex::create(2, std::move(verts), std::move(tris));
}

ImmersedComplex parse_obj(const std::string& text) {
  std::vector<std::vector<double>> pts;
  std::vector<int> tris;
  for (const auto& line : content_lines(text)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      std::vector<double> p;
      double x;
      while (ls >> x) p.push_back(x);
      if (p.size() < 3) throw GeometryError("OBJ parse failure: vertex with fewer than 3 coordinates");
      p.resize(3);  // drop optional w / colour
      pts.push_back(std::move(p));
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string item;
      while (ls >> item) {
        const auto slash = item.find('/');
        int idx = 0;
        try {
          idx = std::stoi(item.substr(0, slash));
        } catch (const std::exception&) {
          throw GeometryError("OBJ parse failure: bad face index '" + item + "'");
        }
        idx = idx < 0 ? static_cast<int>(pts.size()) + idx : idx - 1;
        poly.push_back(idx);
      }
      fan(tris, poly);
    }
  }
  if (pts.empty() || tris.empty()) throw GeometryError("OBJ parse failure: no geometry");
  Eigen::MatrixXd verts(3, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int d = 0; d < 3; ++d) verts(d, static_cast<Eigen::Index>(i)) = pts[i][static_cast<std::size_t>(d)];
  return ImmersedComplex::create(2, std::move(verts), std::move(tris));
}

ImmersedComplex parse_csv_polyline(const std::string& text) {
  std::vector<std::vector<double>> pts;
  for (auto line : content_lines(text)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> p;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        p.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw GeometryError("CSV parse failure: non-numeric field '" + tok + "'");
      }
    }
    if (!pts.empty() && p.size() != pts.front().size())
      throw GeometryError("inconsistent ambient dimension in CSV polyline");
    pts.push_back(std::move(p));
  }
  if (pts.size() < 3) throw GeometryError("CSV polyline needs at least 3 points");
  if (pts.front() == pts.back()) pts.pop_back();
  const auto n = static_cast<int>(pts.size());
  const auto dim = static_cast<Eigen::Index>(pts.front().size());
  Eigen::MatrixXd verts(dim, n);
  for (int i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < dim; ++d) verts(d, i) = pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
  std::vector<int> segs;
  segs.reserve(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    segs.push_back(i);
    segs.push_back((i + 1) % n);
  }
  return ImmersedComplex::create(1, std::move(verts), std::move(segs));
}

ImmersedComplex load_complex(const std::string& path, MeshFormat format) {
  const std::string text = read_file(path);
  switch (format) {
    case MeshFormat::off: return parse_off(text);
    case MeshFormat::obj: return parse_obj(text);
    case MeshFormat::csv_polyline: return parse_csv_polyline(text);
  }
  throw GeometryError("unknown mesh format");
}

ImmersedComplex load_complex(const std::string& path) {
  auto ext = path.substr(path.find_last_of('.') + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (ext == "off") return load_complex(path, MeshFormat::off);
  if (ext == "obj") return load_complex(path, MeshFormat::obj);
  if (ext == "csv") return load_complex(path, MeshFormat::csv_polyline);
  throw GeometryError("unrecognised mesh extension '." + ext + "'");
}

void write_off(const ImmersedComplex& c, const std::string& path) {
  if (c.dim() != 2) throw GeometryError("OFF output needs a triangle mesh");
  std::ofstream out(path);
  if (!out) throw GeometryError("cannot write " + path);
  out.precision(17);
  if (c.ambient_dim() == 3)
    out << "OFF\n";
  else
    out << "nOFF\n" << c.ambient_dim() << '\n';
  out << c.vertex_count() << ' ' << c.simplex_count() << " 0\n";
  for (std::size_t i = 0; i < c.vertex_count(); ++i) {
    for (int d = 0; d < c.ambient_dim(); ++d) out << (d ? " " : "") << c.vertex(i)(d);
    out << '\n';
  }
  for (std::size_t s = 0; s < c.simplex_count(); ++s) {
    const auto t = c.simplex(s);
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
}

}  // namespace specgeo
