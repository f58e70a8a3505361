#include "specgeo/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "specgeo/error.hpp"
#include "specgeo/rng.hpp"
#include "specgeo/stabbing.hpp"

namespace specgeo {

namespace {

template <class Body>
void for_each_index(long n, Exec exec, Body&& body) {
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) body(i);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) body(i);
  }
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : compensated_sum(v) / static_cast<double>(v.size());
}

double standard_error_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mu) * (v[i] - mu);
  return std::sqrt(compensated_sum(sq) / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

// Random point of simplex s with uniform (Dirichlet(1,...,1)) barycentric
// coordinates.
Eigen::VectorXd random_point(const ImmersedComplex& c, std::size_t s, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  const auto t = c.simplex(s);
  double w[3] = {0.0, 0.0, 0.0};
  double total = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) total += (w[k] = expo(rng));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(c.ambient_dim());
  for (std::size_t k = 0; k < t.size(); ++k) x += (w[k] / total) * c.vertex(static_cast<std::size_t>(t[k]));
  return x;
}

constexpr int kJitterAttempts = 16;
constexpr std::uint64_t kRandomStream = 0x5AB5EEDull;
constexpr std::uint64_t kJitterStream = 0x717E4ull;

// Crossing data of one plane H over the active part of a complex.
struct FiberScan {
  int max_count = 0;
  // per candidate (skipped candidates have count -1)
  std::vector<int> counts;
  std::vector<Eigen::VectorXd> anchors_h;  // H-coordinates of the fibre
  // crossings, flattened: candidate j owns [offsets[j], offsets[j+1])
  std::vector<std::size_t> offsets;
  std::vector<int> hit_simplices;
  std::vector<Eigen::VectorXd> hit_points;
};

struct ActiveSet {
  std::vector<std::uint8_t> mask;  // empty means everything active
  std::vector<std::size_t> ids;
};

ActiveSet make_active(const ImmersedComplex& c, const std::vector<std::uint8_t>& mask) {
  ActiveSet a;
  a.mask = mask;
  for (std::size_t s = 0; s < c.simplex_count(); ++s)
    if (mask.empty() || mask[s]) a.ids.push_back(s);
  return a;
}

FiberScan scan_fiber(const ImmersedComplex& c, const ActiveSet& active, const GrassmannSample& h,
                     int stab_budget, double min_jacobian, bool collect, Exec exec) {
  const ProjectedComplex pc(c, h.basis, active.mask, min_jacobian);
  const std::size_t n_bary = active.ids.size();
  const std::size_t n = n_bary + static_cast<std::size_t>(std::max(0, stab_budget));
  FiberScan out;
  out.counts.assign(n, -1);
  out.anchors_h.assign(n, Eigen::VectorXd());
  std::vector<std::vector<ProjectedComplex::Hit>> hits(collect ? n : 0);
  if (active.ids.empty()) {
    out.offsets.assign(n + 1, 0);
    return out;
  }

  for_each_index(static_cast<long>(n), exec, [&](long jl) {
    const auto j = static_cast<std::size_t>(jl);
    std::size_t s;
    Eigen::VectorXd x;
    if (j < n_bary) {
      s = active.ids[j];
      x = c.barycenter(s);
    } else {
      Rng rng = make_rng(h.seed_id ^ kRandomStream, j - n_bary);
      s = active.ids[std::uniform_int_distribution<std::size_t>(0, n_bary - 1)(rng)];
      x = random_point(c, s, rng);
    }
    std::vector<ProjectedComplex::Hit> local;
    auto* sink = collect ? &local : nullptr;
    Rng jitter = make_rng(h.seed_id ^ kJitterStream, j);
    for (int attempt = 0; attempt <= kJitterAttempts; ++attempt) {
      if (attempt > 0) x = random_point(c, s, jitter);
      local.clear();
      const Eigen::VectorXd y = pc.project(x);
      const auto res = pc.stab(y, sink);
      if (!res.degenerate) {
        out.counts[j] = res.count;
        out.anchors_h[j] = y;
        if (collect) hits[j] = std::move(local);
        return;
      }
    }
  });

  out.offsets.assign(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) {
    out.max_count = std::max(out.max_count, out.counts[j]);
    out.offsets[j + 1] = out.offsets[j] + (collect ? hits[j].size() : 0);
  }
  if (collect) {
    out.hit_simplices.reserve(out.offsets.back());
    out.hit_points.reserve(out.offsets.back());
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& hit : hits[j]) {
        const auto t = c.simplex(static_cast<std::size_t>(hit.simplex));
        Eigen::VectorXd q = Eigen::VectorXd::Zero(c.ambient_dim());
        for (std::size_t k = 0; k < t.size(); ++k) q += hit.bary[k] * c.vertex(static_cast<std::size_t>(t[k]));
        out.hit_simplices.push_back(hit.simplex);
        out.hit_points.push_back(std::move(q));
      }
  }
  return out;
}

GrassmannSample plane(const ImmersedComplex& c, const IndexOptions& opts, long i) {
  return sample_haar(c.dim(), c.codim(), derive_seed(opts.seed, static_cast<std::uint64_t>(i)));
}

// Vertices of active simplices, ascending.
std::vector<std::size_t> active_vertices(const ImmersedComplex& c, const ActiveSet& active) {
  std::vector<std::uint8_t> used(c.vertex_count(), 0);
  for (auto s : active.ids)
    for (int v : c.simplex(s)) used[static_cast<std::size_t>(v)] = 1;
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < used.size(); ++v)
    if (used[v]) out.push_back(v);
  return out;
}

// Largest number of crossings of one scanned fibre inside B(x, r), for each
// center x. Only fibres within r of x (in H) can contribute.
std::vector<int> local_counts(const ImmersedComplex& c, const FiberScan& scan,
                              const std::vector<std::size_t>& centers, const Eigen::MatrixXd& basis,
                              double r) {
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < scan.counts.size(); ++j)
    if (scan.counts[j] > 0) order.push_back(j);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scan.anchors_h[a](0) < scan.anchors_h[b](0);
  });
  std::vector<double> key(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) key[i] = scan.anchors_h[order[i]](0);

  const double r2 = r * r;
  std::vector<int> out(centers.size(), 0);
  for (std::size_t ci = 0; ci < centers.size(); ++ci) {
    const Eigen::VectorXd x = c.vertex(centers[ci]);
    const Eigen::VectorXd xh = basis.transpose() * x;
    auto it = std::lower_bound(key.begin(), key.end(), xh(0) - r);
    int best = 0;
    for (auto i = static_cast<std::size_t>(it - key.begin()); i < key.size() && key[i] <= xh(0) + r; ++i) {
      const std::size_t j = order[i];
      if ((scan.anchors_h[j] - xh).squaredNorm() > r2) continue;
      if (scan.counts[j] <= best) continue;
      int inside = 0;
      for (std::size_t q = scan.offsets[j]; q < scan.offsets[j + 1]; ++q)
        if ((scan.hit_points[q] - x).squaredNorm() <= r2) ++inside;
      best = std::max(best, inside);
    }
    out[ci] = best;
  }
  return out;
}

// One evaluation of the mean (or local) index over a fixed active set, plus
// the weighted frequency with which maximal fibres cross each simplex.
struct Evaluation {
  double value = 0.0;
  double standard_error = 0.0;
  std::vector<int> fiber_values;
  std::vector<double> frequency;  // per simplex
};

Evaluation evaluate(const ImmersedComplex& c, const ActiveSet& active, std::optional<double> r,
                    const IndexOptions& opts, bool want_frequency) {
  const long nh = opts.n_grassmann;
  const bool collect = want_frequency || r.has_value();
  auto centers = r ? active_vertices(c, active) : std::vector<std::size_t>{};
  if (opts.max_centers > 0 && centers.size() > opts.max_centers) {
    // Same stride rule as ball_growth_constant.
    const std::size_t stride = (centers.size() + opts.max_centers - 1) / opts.max_centers;
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < centers.size(); i += stride) subset.push_back(centers[i]);
    centers = std::move(subset);
  }
  std::vector<int> fiber(static_cast<std::size_t>(nh), 0);
  std::vector<std::vector<int>> per_center(r ? static_cast<std::size_t>(nh) : 0);
  std::vector<std::vector<std::pair<int, double>>> freq_parts(want_frequency ? static_cast<std::size_t>(nh) : 0);

  for_each_index(nh, opts.exec, [&](long i) {
    const auto h = plane(c, opts, i);
    const auto scan = scan_fiber(c, active, h, opts.stab_budget, opts.min_jacobian, collect, Exec::serial);
    fiber[static_cast<std::size_t>(i)] = scan.max_count;
    if (r) per_center[static_cast<std::size_t>(i)] = local_counts(c, scan, centers, h.basis, *r);
    if (want_frequency && scan.max_count > 0) {
      std::size_t n_max = 0;
      for (int cnt : scan.counts) n_max += cnt == scan.max_count;
      const double w = 1.0 / static_cast<double>(n_max);
      auto& part = freq_parts[static_cast<std::size_t>(i)];
      for (std::size_t j = 0; j < scan.counts.size(); ++j)
        if (scan.counts[j] == scan.max_count)
          for (std::size_t q = scan.offsets[j]; q < scan.offsets[j + 1]; ++q) part.emplace_back(scan.hit_simplices[q], w);
    }
  });

  Evaluation ev;
  ev.fiber_values = fiber;
  if (r) {
    double best = -1.0;
    std::size_t arg = 0;
    std::vector<double> column(static_cast<std::size_t>(nh));
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      for (long i = 0; i < nh; ++i) column[static_cast<std::size_t>(i)] = per_center[static_cast<std::size_t>(i)][ci];
      const double m = mean_of(column);
      if (m > best) {
        best = m;
        arg = ci;
      }
    }
    ev.value = std::max(0.0, best);
    if (!centers.empty()) {
      for (long i = 0; i < nh; ++i) column[static_cast<std::size_t>(i)] = per_center[static_cast<std::size_t>(i)][arg];
      ev.standard_error = standard_error_of(column);
    }
  } else {
    const std::vector<double> vals(fiber.begin(), fiber.end());
    ev.value = mean_of(vals);
    ev.standard_error = standard_error_of(vals);
  }
  if (want_frequency) {
    ev.frequency.assign(c.simplex_count(), 0.0);
    for (const auto& part : freq_parts)
      for (const auto& [s, w] : part) ev.frequency[static_cast<std::size_t>(s)] += w;
  }
  return ev;
}

void check_options(const IndexOptions& opts) {
  if (opts.n_grassmann < 1) throw ConfigError("n_grassmann must be positive");
  if (opts.stab_budget < 0) throw ConfigError("stab_budget must be nonnegative");
}

IndexEstimate base_estimate(IndexKind kind, const IndexOptions& opts) {
  IndexEstimate e;
  e.kind = kind;
  e.samples_grassmann = opts.n_grassmann;
  e.samples_stabbing = opts.stab_budget;
  e.seed = opts.seed;
  return e;
}

// Simplices ranked by decreasing frequency, ties by lowest index; zero
// frequencies are dropped.
std::vector<std::size_t> rank_by_frequency(const std::vector<double>& freq, const ActiveSet& active) {
  std::vector<std::size_t> ids;
  for (auto s : active.ids)
    if (freq[s] > 0.0) ids.push_back(s);
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return freq[a] > freq[b]; });
  return ids;
}

}  // namespace

GrassmannSample sample_haar(int m, int p, std::uint64_t seed) {
  if (m < 1 || p < 1) throw Error("sample_haar needs m >= 1 and p >= 1");
  Rng rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(m + p, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m + p; ++i) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  GrassmannSample h;
  h.basis = qr.householderQ() * Eigen::MatrixXd::Identity(m + p, m);
  h.seed_id = seed;
  return h;
}

double jacobian_factor(const Eigen::MatrixXd& frame, const GrassmannSample& h) {
  if (frame.rows() != h.basis.rows() || frame.cols() != h.basis.cols())
    throw Error("tangent frame does not match the plane dimensions");
  const Eigen::MatrixXd gram = frame.transpose() * frame;
  if ((gram - Eigen::MatrixXd::Identity(frame.cols(), frame.cols())).cwiseAbs().maxCoeff() > 1e-9)
    throw Error("tangent frame is not orthonormal");
  return std::min(1.0, std::abs((frame.transpose() * h.basis).determinant()));
}

CroftonEstimate crofton_constant(int m, int p, long n_samples, int n_frames, std::uint64_t seed, Exec exec) {
  if (n_samples < 1 || n_frames < 1) throw ConfigError("crofton sample counts must be positive");
  CroftonEstimate est;
  est.m = m;
  est.p = p;
  est.samples = n_samples;
  est.seed = seed;
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(n_samples) * static_cast<std::size_t>(n_frames));
  double se_sum = 0.0;
  for (int f = 0; f < n_frames; ++f) {
    const auto frame = sample_haar(m, p, derive_seed(seed ^ 0xF7A3Eull, static_cast<std::uint64_t>(f)));
    const auto vals = kernels::crofton_samples(frame.basis, p, n_samples, derive_seed(seed, static_cast<std::uint64_t>(f)), exec);
    est.per_frame.push_back(mean_of(vals));
    se_sum += standard_error_of(vals);
    all.insert(all.end(), vals.begin(), vals.end());
  }
  est.value = mean_of(all);
  est.standard_error = standard_error_of(all);
  est.frame_standard_error = se_sum / n_frames;
  if (n_frames > 1) est.anisotropy_spread = standard_error_of(est.per_frame) * std::sqrt(static_cast<double>(n_frames));
  return est;
}

std::string to_string(IndexKind k) {
  switch (k) {
    case IndexKind::fiber: return "fiber";
    case IndexKind::sup_index: return "sup_index";
    case IndexKind::mean_index: return "mean_index";
    case IndexKind::local: return "local";
    case IndexKind::eps_mean: return "eps_mean";
    case IndexKind::eps_local: return "eps_local";
  }
  return "unknown";
}

std::string to_string(RegionStrategy s) {
  switch (s) {
    case RegionStrategy::greedy_multiplicity: return "greedy-multiplicity";
    case RegionStrategy::cap_removal: return "cap-removal";
    case RegionStrategy::none: return "none";
  }
  return "unknown";
}

RegionStrategy parse_region_strategy(const std::string& name) {
  if (name == "greedy-multiplicity") return RegionStrategy::greedy_multiplicity;
  if (name == "cap-removal") return RegionStrategy::cap_removal;
  if (name == "none") return RegionStrategy::none;
  throw ConfigError("unknown region strategy '" + name + "'");
}

IndexEstimate fiber_index(const ImmersedComplex& c, const GrassmannSample& h, int stab_budget, Exec exec,
                          double min_jacobian) {
  if (h.basis.rows() != c.ambient_dim() || h.basis.cols() != c.dim())
    throw Error("plane dimension does not match the complex");
  const auto scan = scan_fiber(c, make_active(c, {}), h, stab_budget, min_jacobian, false, exec);
  IndexEstimate e;
  e.kind = IndexKind::fiber;
  e.value = scan.max_count;
  e.samples_grassmann = 1;
  e.samples_stabbing = stab_budget;
  e.seed = h.seed_id;
  e.fiber_values = {scan.max_count};
  return e;
}

IndexEstimate sup_index(const ImmersedComplex& c, const IndexOptions& opts) {
  check_options(opts);
  const auto ev = evaluate(c, make_active(c, {}), std::nullopt, opts, false);
  auto e = base_estimate(IndexKind::sup_index, opts);
  e.value = *std::max_element(ev.fiber_values.begin(), ev.fiber_values.end());
  e.fiber_values = ev.fiber_values;
  return e;
}

IndexEstimate mean_index(const ImmersedComplex& c, const IndexOptions& opts) {
  check_options(opts);
  const auto ev = evaluate(c, make_active(c, {}), std::nullopt, opts, false);
  auto e = base_estimate(IndexKind::mean_index, opts);
  e.value = ev.value;
  e.standard_error = ev.standard_error;
  e.fiber_values = ev.fiber_values;
  return e;
}

IndexEstimate local_index(const ImmersedComplex& c, double r, const IndexOptions& opts) {
  check_options(opts);
  if (!(r > 0.0)) throw ConfigError("local index radius must be positive");
  const auto ev = evaluate(c, make_active(c, {}), r, opts, false);
  auto e = base_estimate(IndexKind::local, opts);
  e.value = ev.value;
  e.standard_error = ev.standard_error;
  e.radius_r = r;
  e.fiber_values = ev.fiber_values;
  return e;
}

IndexEstimate eps_index(const ImmersedComplex& c, double eps, std::optional<double> r,
                        RegionStrategy strategy, const IndexOptions& opts) {
  check_options(opts);
  if (!(eps >= 0.0) || eps >= 1.0) throw ConfigError("epsilon must lie in [0, 1)");
  if (r && !(*r > 0.0)) throw ConfigError("local index radius must be positive");

  const double budget = eps * c.volume();
  const bool search = strategy != RegionStrategy::none && budget > 0.0;
  const auto full = make_active(c, {});
  auto best_eval = evaluate(c, full, r, opts, search);
  std::vector<std::size_t> best_region;

  auto consider = [&](const std::vector<std::uint8_t>& mask, const std::vector<std::size_t>& removed,
                      bool want_frequency) {
    auto ev = evaluate(c, make_active(c, mask), r, opts, want_frequency);
    if (ev.value < best_eval.value) {
      best_region = removed;
      best_eval.value = ev.value;
      best_eval.standard_error = ev.standard_error;
      best_eval.fiber_values = ev.fiber_values;
    }
    return ev;
  };

  if (search && strategy == RegionStrategy::greedy_multiplicity) {
    // Fixed batch size, so the sequence of regions does not depend on eps.
    const double batch = 0.0025 * c.volume();
    std::vector<std::uint8_t> mask(c.simplex_count(), 1);
    std::vector<std::size_t> removed;
    double removed_measure = 0.0;
    std::vector<double> freq = best_eval.frequency;
    for (;;) {
      const auto ranked = rank_by_frequency(freq, make_active(c, mask));
      if (ranked.empty()) break;
      std::vector<std::size_t> round;
      double round_measure = 0.0;
      for (auto s : ranked) {
        if (!round.empty() && round_measure + c.simplex_measure(s) > batch) break;
        round.push_back(s);
        round_measure += c.simplex_measure(s);
      }
      if (removed_measure + round_measure > budget) break;
      // Never remove everything.
      if (removed.size() + round.size() >= c.simplex_count()) break;
      for (auto s : round) {
        mask[s] = 0;
        removed.push_back(s);
      }
      removed_measure += round_measure;
      freq = consider(mask, removed, true).frequency;
    }
  } else if (search && strategy == RegionStrategy::cap_removal) {
    const auto ranked = rank_by_frequency(best_eval.frequency, full);
    const std::size_t n_centers = std::min<std::size_t>(16, ranked.size());
    std::vector<Eigen::VectorXd> bary(c.simplex_count());
    for (std::size_t s = 0; s < c.simplex_count(); ++s) bary[s] = c.barycenter(s);
    for (std::size_t k = 0; k < n_centers; ++k) {
      const Eigen::VectorXd& center = bary[ranked[k]];
      std::vector<std::size_t> order(c.simplex_count());
      std::iota(order.begin(), order.end(), 0);
      std::vector<double> dist(c.simplex_count());
      for (std::size_t s = 0; s < dist.size(); ++s) dist[s] = (bary[s] - center).norm();
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
      std::vector<std::size_t> cap;
      double measure = 0.0;
      for (auto s : order) {
        if (measure + c.simplex_measure(s) > budget || cap.size() + 1 >= c.simplex_count()) break;
        cap.push_back(s);
        measure += c.simplex_measure(s);
      }
      if (cap.empty()) continue;
      std::vector<std::uint8_t> mask(c.simplex_count(), 1);
      for (auto s : cap) mask[s] = 0;
      std::sort(cap.begin(), cap.end());
      consider(mask, cap, false);
    }
  }

  auto e = base_estimate(r ? IndexKind::eps_local : IndexKind::eps_mean, opts);
  e.value = best_eval.value;
  e.standard_error = best_eval.standard_error;
  e.fiber_values = best_eval.fiber_values;
  e.epsilon = eps;
  e.radius_r = r;
  e.chosen_region = make_region(c, best_region);
  return e;
}

double projected_volume(const ImmersedComplex& c, const GrassmannSample& h, int resolution) {
  if (resolution < 1) throw ConfigError("grid resolution must be positive");
  const int m = c.dim();
  if (h.basis.rows() != c.ambient_dim() || h.basis.cols() != m)
    throw Error("plane dimension does not match the complex");
  const Eigen::MatrixXd proj = h.basis.transpose() * c.vertices();
  const Eigen::VectorXd lo = proj.rowwise().minCoeff();
  const Eigen::VectorXd hi = proj.rowwise().maxCoeff();
  const Eigen::VectorXd cell = ((hi - lo) / resolution).cwiseMax(1e-300);
  const int ny = m == 2 ? resolution : 1;
  std::vector<std::uint8_t> covered(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(ny), 0);

  auto first_cell = [&](double v, int d) {
    return std::clamp(static_cast<int>(std::ceil((v - lo(d)) / cell(d) - 0.5)), 0, resolution - 1);
  };
  auto last_cell = [&](double v, int d) {
    return std::clamp(static_cast<int>(std::floor((v - lo(d)) / cell(d) - 0.5)), 0, resolution - 1);
  };

  for (std::size_t s = 0; s < c.simplex_count(); ++s) {
    const auto t = c.simplex(s);
    if (m == 1) {
      const double a = std::min(proj(0, t[0]), proj(0, t[1]));
      const double b = std::max(proj(0, t[0]), proj(0, t[1]));
      for (int i = first_cell(a, 0); i <= last_cell(b, 0); ++i) covered[static_cast<std::size_t>(i)] = 1;
      continue;
    }
    const Eigen::Vector2d p0 = proj.col(t[0]), p1 = proj.col(t[1]), p2 = proj.col(t[2]);
    const double det = (p1 - p0).x() * (p2 - p0).y() - (p2 - p0).x() * (p1 - p0).y();
    if (std::abs(det) <= 1e-14 * cell.prod()) continue;  // null set
    const double x0 = std::min({p0.x(), p1.x(), p2.x()}), x1 = std::max({p0.x(), p1.x(), p2.x()});
    const double y0 = std::min({p0.y(), p1.y(), p2.y()}), y1 = std::max({p0.y(), p1.y(), p2.y()});
    const double tol = -1e-12;
    for (int iy = first_cell(y0, 1); iy <= last_cell(y1, 1); ++iy)
      for (int ix = first_cell(x0, 0); ix <= last_cell(x1, 0); ++ix) {
        const Eigen::Vector2d q(lo(0) + (ix + 0.5) * cell(0), lo(1) + (iy + 0.5) * cell(1));
        const Eigen::Vector2d d = q - p0;
        const double b1 = (d.x() * (p2 - p0).y() - (p2 - p0).x() * d.y()) / det;
        const double b2 = ((p1 - p0).x() * d.y() - d.x() * (p1 - p0).y()) / det;
        if (b1 >= tol && b2 >= tol && 1.0 - b1 - b2 >= tol)
          covered[static_cast<std::size_t>(iy) * static_cast<std::size_t>(resolution) + static_cast<std::size_t>(ix)] = 1;
      }
  }
  const auto n_cov = std::count(covered.begin(), covered.end(), std::uint8_t{1});
  return static_cast<double>(n_cov) * (m == 2 ? cell(0) * cell(1) : cell(0));
}

double max_projected_volume(const ImmersedComplex& c, int n_samples, int resolution, std::uint64_t seed, Exec exec) {
  if (n_samples < 1) throw ConfigError("projection sample count must be positive");
  std::vector<double> vals(static_cast<std::size_t>(n_samples));
  for_each_index(n_samples, exec, [&](long i) {
    vals[static_cast<std::size_t>(i)] =
        projected_volume(c, sample_haar(c.dim(), c.codim(), derive_seed(seed, static_cast<std::uint64_t>(i))), resolution);
  });
  return *std::max_element(vals.begin(), vals.end());
}

double unit_ball_volume(int m) {
  if (m < 0) throw Error("unit ball dimension must be nonnegative");
  // V_m = (2 pi / m) V_{m-2}, exact at m = 1 and 2.
  double v = m % 2 ? 2.0 : 1.0;
  for (int d = m % 2 ? 3 : 2; d <= m; d += 2) v *= 2.0 * std::numbers::pi / d;
  return v;
}

namespace {

double triangle_area(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const Eigen::VectorXd u = b - a, v = c - a;
  const double uu = u.squaredNorm(), vv = v.squaredNorm(), uv = u.dot(v);
  return 0.5 * std::sqrt(std::max(0.0, uu * vv - uv * uv));
}

// Sub-triangle with barycentric corners (columns of w) against the ball.
// G is the Gram matrix of the corners relative to the center, so a point
// with barycentric coordinates u lies at squared distance u^T G u, and two
// points differ by squared length d^T G d.
double subtriangle_in_ball(const Eigen::Matrix3d& g, const Eigen::Matrix3d& w, double area, double s2,
                           int depth) {
  const double da = w.col(0).dot(g * w.col(0)), db = w.col(1).dot(g * w.col(1)), dc = w.col(2).dot(g * w.col(2));
  if (da <= s2 && db <= s2 && dc <= s2) return area;  // the ball is convex
  const Eigen::Vector3d cen = w.rowwise().sum() / 3.0;
  double reach2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d d = w.col(i) - cen;
    reach2 = std::max(reach2, d.dot(g * d));
  }
  const double gap = std::sqrt(std::max(0.0, cen.dot(g * cen))) - std::sqrt(std::max(0.0, reach2));
  if (gap > 0.0 && gap * gap > s2) return 0.0;
  Eigen::Matrix3d mid;
  mid.col(0) = 0.5 * (w.col(0) + w.col(1));
  mid.col(1) = 0.5 * (w.col(1) + w.col(2));
  mid.col(2) = 0.5 * (w.col(2) + w.col(0));
  if (depth == 0) {
    // Edge-midpoint rule.
    int inside = 0;
    for (int i = 0; i < 3; ++i) inside += mid.col(i).dot(g * mid.col(i)) <= s2;
    return area * inside / 3.0;
  }
  Eigen::Matrix3d t;
  double sum = 0.0;
  t << w.col(0), mid.col(0), mid.col(2);
  sum += subtriangle_in_ball(g, t, area / 4.0, s2, depth - 1);
  t << mid.col(0), w.col(1), mid.col(1);
  sum += subtriangle_in_ball(g, t, area / 4.0, s2, depth - 1);
  t << mid.col(2), mid.col(1), w.col(2);
  sum += subtriangle_in_ball(g, t, area / 4.0, s2, depth - 1);
  sum += subtriangle_in_ball(g, mid, area / 4.0, s2, depth - 1);
  return sum;
}

double triangle_in_ball(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                        const Eigen::VectorXd& x, double s, int depth) {
  const Eigen::VectorXd* v[3] = {&a, &b, &c};
  Eigen::Matrix3d g;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) g(i, j) = g(j, i) = (*v[i] - x).dot(*v[j] - x);
  return subtriangle_in_ball(g, Eigen::Matrix3d::Identity(), triangle_area(a, b, c), s * s, depth);
}

double segment_in_ball(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x, double s) {
  const Eigen::VectorXd d = b - a, f = a - x;
  const double A = d.squaredNorm(), B = 2.0 * f.dot(d), C = f.squaredNorm() - s * s;
  const double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0) return 0.0;
  const double sq = std::sqrt(disc);
  const double t0 = std::max(0.0, (-B - sq) / (2.0 * A));
  const double t1 = std::min(1.0, (-B + sq) / (2.0 * A));
  return t1 > t0 ? (t1 - t0) * std::sqrt(A) : 0.0;
}

constexpr int kBallDepth = 5;

}  // namespace

namespace {

// Measures of c inside B(x, s) for every radius, sharing the vertex
// distances. A simplex within reach of nothing is skipped: every point of it
// lies within its longest edge of each vertex.
std::vector<double> ball_measures(const ImmersedComplex& c, const Eigen::VectorXd& x,
                                  const std::vector<double>& radii) {
  const auto nv = static_cast<Eigen::Index>(c.vertex_count());
  Eigen::VectorXd dist(nv);
  for (Eigen::Index v = 0; v < nv; ++v) dist(v) = (c.vertices().col(v) - x).norm();
  std::vector<double> out(radii.size());
  std::vector<double> parts(c.simplex_count());
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const double s = radii[r];
    for (std::size_t k = 0; k < c.simplex_count(); ++k) {
      const auto t = c.simplex(k);
      double lo = dist(t[0]), hi = lo, edge = 0.0;
      for (std::size_t i = 1; i < t.size(); ++i) {
        lo = std::min(lo, dist(t[i]));
        hi = std::max(hi, dist(t[i]));
      }
      if (hi <= s) {
        parts[k] = c.simplex_measure(k);
        continue;
      }
      for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j)
          edge = std::max(edge, (c.vertices().col(t[i]) - c.vertices().col(t[j])).norm());
      if (lo - edge > s) {
        parts[k] = 0.0;
        continue;
      }
      const Eigen::VectorXd a = c.vertex(static_cast<std::size_t>(t[0])), b = c.vertex(static_cast<std::size_t>(t[1]));
      if (c.dim() == 1) {
        parts[k] = segment_in_ball(a, b, x, s);
      } else {
        const Eigen::VectorXd d = c.vertex(static_cast<std::size_t>(t[2]));
        parts[k] = triangle_in_ball(a, b, d, x, s, kBallDepth);
      }
    }
    out[r] = compensated_sum(parts);
  }
  return out;
}

}  // namespace

double ball_measure(const ImmersedComplex& c, const Eigen::VectorXd& x, double s) {
  return ball_measures(c, x, {s})[0];
}

BallGrowth ball_growth_constant(const ImmersedComplex& c, const std::vector<double>& radii,
                                std::size_t max_centers, Exec exec, const Eigen::MatrixXd* center_points) {
  if (radii.empty()) throw ConfigError("ball growth needs at least one radius");
  for (double s : radii)
    if (!(s > 0.0)) throw ConfigError("ball growth radii must be positive");
  const Eigen::MatrixXd& pts = center_points ? *center_points : c.vertices();
  const auto nv = static_cast<std::size_t>(pts.cols());
  const std::size_t stride = max_centers > 0 && nv > max_centers ? (nv + max_centers - 1) / max_centers : 1;
  std::vector<std::size_t> centers;
  for (std::size_t v = 0; v < nv; v += stride) centers.push_back(v);

  const double m = c.dim();
  std::vector<double> best(centers.size(), -1.0);
  std::vector<double> best_r(centers.size(), 0.0);
  for_each_index(static_cast<long>(centers.size()), exec, [&](long i) {
    const Eigen::VectorXd x = pts.col(static_cast<Eigen::Index>(centers[static_cast<std::size_t>(i)]));
    const auto measures = ball_measures(c, x, radii);
    for (std::size_t r = 0; r < radii.size(); ++r) {
      const double ratio = measures[r] / std::pow(radii[r], m);
      if (ratio > best[static_cast<std::size_t>(i)]) {
        best[static_cast<std::size_t>(i)] = ratio;
        best_r[static_cast<std::size_t>(i)] = radii[r];
      }
    }
  });
  BallGrowth out;
  out.L_hat = -1.0;
  for (std::size_t i = 0; i < centers.size(); ++i)
    if (best[i] > out.L_hat) {
      out.L_hat = best[i];
      out.worst_center = centers[i];
      out.worst_radius = best_r[i];
    }
  return out;
}

double theoretical_ball_growth(int m, double crofton, double index) {
  if (!(crofton > 0.0)) throw Error("Crofton constant must be positive");
  return 2.0 * unit_ball_volume(m) / crofton * index;
}

}  // namespace specgeo
