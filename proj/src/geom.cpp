#include "specgeo/geom.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <utility>

#include "specgeo/error.hpp"

namespace specgeo {

namespace {

using Edge = std::pair<int, int>;

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

double gram_measure(const Eigen::MatrixXd& spans) {
  const Eigen::MatrixXd g = spans.transpose() * spans;
  const double det = g.determinant();
  const double fact = spans.cols() == 2 ? 2.0 : 1.0;
  return det > 0.0 ? std::sqrt(det) / fact : 0.0;
}

}  // namespace

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double simplex_measure(std::span<const Eigen::VectorXd> corners) {
  const auto m = static_cast<Eigen::Index>(corners.size()) - 1;
  Eigen::MatrixXd spans(corners[0].size(), m);
  for (Eigen::Index j = 0; j < m; ++j) spans.col(j) = corners[static_cast<std::size_t>(j + 1)] - corners[0];
  return gram_measure(spans);
}

ImmersedComplex ImmersedComplex::create(int dim, Eigen::MatrixXd vertices,
                                        std::vector<int> simplices) {
  if (dim != 1 && dim != 2) throw GeometryError("intrinsic dimension must be 1 or 2");
  if (vertices.rows() < dim + 1)
    throw GeometryError("inconsistent ambient dimension: need at least " +
                        std::to_string(dim + 1) + " coordinates");
  const std::size_t stride = static_cast<std::size_t>(dim + 1);
  if (simplices.empty() || simplices.size() % stride != 0)
    throw GeometryError("simplex list empty or not a multiple of " + std::to_string(stride));
  if (!vertices.allFinite()) throw GeometryError("non-finite vertex coordinate");

  const auto nv = static_cast<int>(vertices.cols());
  for (int idx : simplices)
    if (idx < 0 || idx >= nv) throw GeometryError("simplex index out of range");

  // Drop unreferenced vertices.
  std::vector<int> remap(static_cast<std::size_t>(nv), -1);
  int used = 0;
  for (int idx : simplices)
    if (remap[static_cast<std::size_t>(idx)] < 0) remap[static_cast<std::size_t>(idx)] = used++;
  if (used != nv) {
    Eigen::MatrixXd compact(vertices.rows(), used);
    for (int i = 0; i < nv; ++i)
      if (remap[static_cast<std::size_t>(i)] >= 0) compact.col(remap[static_cast<std::size_t>(i)]) = vertices.col(i);
    vertices = std::move(compact);
    for (int& idx : simplices) idx = remap[static_cast<std::size_t>(idx)];
  }

  ImmersedComplex c;
  c.dim_ = dim;
  c.vertices_ = std::move(vertices);
  c.simplices_ = std::move(simplices);

  const std::size_t ns = c.simplices_.size() / stride;
  c.measures_.resize(ns);
  Eigen::MatrixXd spans(c.vertices_.rows(), dim);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto idx = c.simplex(s);
    double longest = 0.0;
    for (int j = 0; j < dim; ++j) {
      spans.col(j) = c.vertices_.col(idx[static_cast<std::size_t>(j + 1)]) - c.vertices_.col(idx[0]);
      longest = std::max(longest, spans.col(j).norm());
    }
    if (dim == 2) longest = std::max(longest, (spans.col(1) - spans.col(0)).norm());
    const double mu = gram_measure(spans);
    if (!(mu > 1e-14 * std::pow(longest, dim)) || longest == 0.0)
      throw GeometryError("zero-measure simplex " + std::to_string(s));
    c.measures_[s] = mu;
  }

  c.boundary_flags_.assign(ns, 0);
  bool closed = true;
  if (dim == 1) {
    std::vector<int> valence(c.vertex_count(), 0);
    for (int idx : c.simplices_) ++valence[static_cast<std::size_t>(idx)];
    for (std::size_t s = 0; s < ns; ++s) {
      for (int v : c.simplex(s)) {
        const int val = valence[static_cast<std::size_t>(v)];
        if (val > 2) throw GeometryError("non-manifold vertex (valence > 2)");
        if (val == 1) {
          c.boundary_flags_[s] = 1;
          closed = false;
        }
      }
    }
  } else {
    std::map<Edge, int> edge_use;
    for (std::size_t s = 0; s < ns; ++s) {
      const auto t = c.simplex(s);
      for (int e = 0; e < 3; ++e) ++edge_use[make_edge(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)])];
    }
    for (std::size_t s = 0; s < ns; ++s) {
      const auto t = c.simplex(s);
      for (int e = 0; e < 3; ++e) {
        const int use = edge_use[make_edge(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)])];
        if (use > 2) throw GeometryError("non-manifold edge shared by more than two triangles");
        if (use == 1) {
          c.boundary_flags_[s] = 1;
          closed = false;
        }
      }
    }
  }
  c.closed_ = closed;
  c.volume_ = compensated_sum(c.measures_);
  return c;
}

Eigen::VectorXd ImmersedComplex::barycenter(std::size_t s) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(vertices_.rows());
  for (int v : simplex(s)) b += vertices_.col(v);
  return b / static_cast<double>(dim_ + 1);
}

double riemannian_volume(const ImmersedComplex& c) { return c.volume(); }

Region make_region(const ImmersedComplex& c, std::vector<std::size_t> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (!ids.empty() && ids.back() >= c.simplex_count()) throw GeometryError("region simplex id out of range");
  std::vector<double> m;
  m.reserve(ids.size());
  for (auto s : ids) m.push_back(c.simplex_measure(s));
  Region d;
  d.simplex_ids = std::move(ids);
  d.measure = compensated_sum(m);
  d.volume_fraction = d.measure / c.volume();
  return d;
}

std::vector<std::uint8_t> region_mask(const ImmersedComplex& c, const Region& d) {
  std::vector<std::uint8_t> mask(c.simplex_count(), 0);
  for (auto s : d.simplex_ids) mask.at(s) = 1;
  return mask;
}

ImmersedComplex remove_region(const ImmersedComplex& c, const Region& d) {
  const auto mask = region_mask(c, d);
  std::vector<int> kept;
  const auto stride = static_cast<std::size_t>(c.dim() + 1);
  kept.reserve(c.simplex_indices().size());
  for (std::size_t s = 0; s < c.simplex_count(); ++s) {
    if (mask[s]) continue;
    const auto idx = c.simplex(s);
    kept.insert(kept.end(), idx.begin(), idx.end());
  }
  if (kept.empty()) throw GeometryError("region covers the whole complex");
  (void)stride;
  return ImmersedComplex::create(c.dim(), c.vertices(), std::move(kept));
}

MetricMeasureSpace::MetricMeasureSpace(Eigen::MatrixXd points, std::vector<double> weights,
                                       Metric metric, std::optional<Eigen::MatrixXd> distances)
    : points_(std::move(points)),
      weights_(std::move(weights)),
      metric_(metric),
      distances_(std::move(distances)) {
  if (static_cast<std::size_t>(points_.cols()) != weights_.size())
    throw GeometryError("point/weight count mismatch");
  for (double w : weights_)
    if (!(w >= 0.0)) throw GeometryError("negative weight");
  if (distances_ && (distances_->rows() != points_.cols() || distances_->cols() != points_.cols()))
    throw GeometryError("distance matrix size mismatch");
  total_weight_ = compensated_sum(weights_);
}

Eigen::MatrixXd dual_graph_distances(const ImmersedComplex& c) {
  const std::size_t ns = c.simplex_count();
  std::vector<std::vector<std::pair<int, double>>> adj(ns);
  Eigen::MatrixXd bary(c.ambient_dim(), static_cast<Eigen::Index>(ns));
  for (std::size_t s = 0; s < ns; ++s) bary.col(static_cast<Eigen::Index>(s)) = c.barycenter(s);

  // Facets: vertices for m=1, edges for m=2.
  std::map<Edge, std::vector<int>> facet_owner;
  for (std::size_t s = 0; s < ns; ++s) {
    const auto t = c.simplex(s);
    if (c.dim() == 1) {
      facet_owner[{t[0], -1}].push_back(static_cast<int>(s));
      facet_owner[{t[1], -1}].push_back(static_cast<int>(s));
    } else {
      for (int e = 0; e < 3; ++e)
        facet_owner[make_edge(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)])].push_back(static_cast<int>(s));
    }
  }
  for (const auto& [facet, owners] : facet_owner) {
    for (std::size_t a = 0; a < owners.size(); ++a)
      for (std::size_t b = a + 1; b < owners.size(); ++b) {
        const double w = (bary.col(owners[a]) - bary.col(owners[b])).norm();
        adj[static_cast<std::size_t>(owners[a])].emplace_back(owners[b], w);
        adj[static_cast<std::size_t>(owners[b])].emplace_back(owners[a], w);
      }
  }

  const auto n = static_cast<Eigen::Index>(ns);
  Eigen::MatrixXd dist(n, n);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index src = 0; src < n; ++src) {
    std::vector<double> d(ns, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    d[static_cast<std::size_t>(src)] = 0.0;
    heap.emplace(0.0, static_cast<int>(src));
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (du > d[static_cast<std::size_t>(u)]) continue;
      for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
        if (du + w < d[static_cast<std::size_t>(v)]) {
          d[static_cast<std::size_t>(v)] = du + w;
          heap.emplace(du + w, v);
        }
      }
    }
    for (Eigen::Index j = 0; j < n; ++j) dist(src, j) = d[static_cast<std::size_t>(j)];
  }
  // Symmetrize against rounding in path sums.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::min(dist(i, j), dist(j, i));
      dist(i, j) = dist(j, i) = v;
    }
  return dist;
}

MetricMeasureSpace to_mm_space(const ImmersedComplex& c, Metric metric,
                               const Region* restricted_to_complement_of) {
  const std::size_t ns = c.simplex_count();
  Eigen::MatrixXd pts(c.ambient_dim(), static_cast<Eigen::Index>(ns));
  for (std::size_t s = 0; s < ns; ++s) pts.col(static_cast<Eigen::Index>(s)) = c.barycenter(s);
  std::vector<double> w = c.simplex_measures();
  if (restricted_to_complement_of)
    for (auto s : restricted_to_complement_of->simplex_ids) w.at(s) = 0.0;
  std::optional<Eigen::MatrixXd> dist;
  if (metric == Metric::graph_geodesic) dist = dual_graph_distances(c);
  return MetricMeasureSpace(std::move(pts), std::move(w), metric, std::move(dist));
}

}  // namespace specgeo
