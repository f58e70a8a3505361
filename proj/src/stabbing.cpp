#include "specgeo/stabbing.hpp"

#include <algorithm>
#include <cmath>

#include "specgeo/error.hpp"

namespace specgeo {

ProjectedComplex::ProjectedComplex(const ImmersedComplex& c, const Eigen::MatrixXd& basis,
                                   std::span<const std::uint8_t> active, double min_jacobian)
    : complex_(&c),
      basis_(basis),
      active_(active.begin(), active.end()),
      dim_(c.dim()),
      min_jacobian_(std::max(min_jacobian, kTangentialJacobian)) {
  if (basis.rows() != c.ambient_dim() || basis.cols() != c.dim())
    throw GeometryError("projection basis does not match complex dimensions");
  if (!active_.empty() && active_.size() != c.simplex_count())
    throw GeometryError("active mask size mismatch");
  proj_ = basis_.transpose() * c.vertices();

  const std::size_t ns = c.simplex_count();
  const std::size_t stride = dim_ == 1 ? 1 : 4;
  inverse_.assign(ns * stride, 0.0);
  jacobian_.assign(ns, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto t = c.simplex(s);
    if (dim_ == 1) {
      const double len = proj_(0, t[1]) - proj_(0, t[0]);
      jacobian_[s] = std::abs(len) / c.simplex_measure(s);
      inverse_[s] = jacobian_[s] >= kTangentialJacobian ? 1.0 / len : 0.0;
    } else {
      const double a = proj_(0, t[1]) - proj_(0, t[0]);
      const double b = proj_(0, t[2]) - proj_(0, t[0]);
      const double cc = proj_(1, t[1]) - proj_(1, t[0]);
      const double d = proj_(1, t[2]) - proj_(1, t[0]);
      const double det = a * d - b * cc;
      jacobian_[s] = 0.5 * std::abs(det) / c.simplex_measure(s);
      if (jacobian_[s] >= kTangentialJacobian) {
        double* inv = &inverse_[s * 4];
        inv[0] = d / det;
        inv[1] = -b / det;
        inv[2] = -cc / det;
        inv[3] = a / det;
      }
    }
  }
  build_grid();
}

void ProjectedComplex::build_grid() {
  const std::size_t ns = complex_->simplex_count();
  std::size_t n_active = 0;
  lo_ = Eigen::VectorXd::Constant(dim_, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim_, -std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < ns; ++s) {
    if (!is_active(s)) continue;
    ++n_active;
    for (int v : complex_->simplex(s)) {
      lo_ = lo_.cwiseMin(proj_.col(v));
      hi = hi.cwiseMax(proj_.col(v));
    }
  }
  cells_per_axis_.assign(static_cast<std::size_t>(dim_), 1);
  cell_size_ = Eigen::VectorXd::Ones(dim_);
  if (n_active == 0) {
    lo_.setZero();
    cell_start_.assign(2, 0);
    return;
  }
  const Eigen::VectorXd extent = (hi - lo_).cwiseMax(1e-300);
  const double margin = 1e-9 * extent.maxCoeff();
  lo_.array() -= margin;
  const Eigen::VectorXd span = extent.array() + 2.0 * margin;
  const double target = static_cast<double>(n_active);
  if (dim_ == 1) {
    cells_per_axis_[0] = std::max(1, static_cast<int>(target));
  } else {
    const double aspect = span(0) / span(1);
    const int nx = std::clamp(static_cast<int>(std::ceil(std::sqrt(target * aspect))), 1, 4096);
    const int ny = std::clamp(static_cast<int>(std::ceil(target / nx)), 1, 4096);
    cells_per_axis_ = {nx, ny};
  }
  std::size_t n_cells = 1;
  for (int d = 0; d < dim_; ++d) {
    cell_size_(d) = span(d) / cells_per_axis_[static_cast<std::size_t>(d)];
    n_cells *= static_cast<std::size_t>(cells_per_axis_[static_cast<std::size_t>(d)]);
  }

  auto cell_range = [&](std::size_t s, int d, int& c0, int& c1) {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (int v : complex_->simplex(s)) {
      mn = std::min(mn, proj_(d, v));
      mx = std::max(mx, proj_(d, v));
    }
    const int n = cells_per_axis_[static_cast<std::size_t>(d)];
    c0 = std::clamp(static_cast<int>(std::floor((mn - margin - lo_(d)) / cell_size_(d))), 0, n - 1);
    c1 = std::clamp(static_cast<int>(std::floor((mx + margin - lo_(d)) / cell_size_(d))), 0, n - 1);
  };

  std::vector<std::size_t> counts(n_cells + 1, 0);
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<std::size_t> fill;
    if (pass == 1) {
      cell_start_.assign(n_cells + 1, 0);
      for (std::size_t i = 0; i < n_cells; ++i) cell_start_[i + 1] = cell_start_[i] + counts[i];
      cell_items_.assign(cell_start_.back(), 0);
      fill.assign(cell_start_.begin(), cell_start_.end() - 1);
    }
    for (std::size_t s = 0; s < ns; ++s) {
      if (!is_active(s)) continue;
      int x0, x1, y0 = 0, y1 = 0;
      cell_range(s, 0, x0, x1);
      if (dim_ == 2) cell_range(s, 1, y0, y1);
      for (int iy = y0; iy <= y1; ++iy)
        for (int ix = x0; ix <= x1; ++ix) {
          const auto cell = static_cast<std::size_t>(iy) * static_cast<std::size_t>(cells_per_axis_[0]) + static_cast<std::size_t>(ix);
          if (pass == 0)
            ++counts[cell];
          else
            cell_items_[fill[cell]++] = static_cast<int>(s);
        }
    }
  }
}

std::size_t ProjectedComplex::cell_of(const Eigen::Ref<const Eigen::VectorXd>& y, bool& inside) const {
  std::size_t cell = 0;
  std::size_t stride = 1;
  inside = true;
  for (int d = 0; d < dim_; ++d) {
    const double f = (y(d) - lo_(d)) / cell_size_(d);
    const int n = cells_per_axis_[static_cast<std::size_t>(d)];
    if (!(f >= 0.0) || f >= n) {
      inside = false;
      return 0;
    }
    cell += static_cast<std::size_t>(std::min(static_cast<int>(f), n - 1)) * stride;
    stride *= static_cast<std::size_t>(n);
  }
  return cell;
}

bool ProjectedComplex::barycentric(std::size_t s, const Eigen::Ref<const Eigen::VectorXd>& y,
                                   double* out) const {
  const auto t = complex_->simplex(s);
  if (jacobian_[s] < kTangentialJacobian) return false;
  if (dim_ == 1) {
    out[1] = (y(0) - proj_(0, t[0])) * inverse_[s];
    out[0] = 1.0 - out[1];
  } else {
    const double* inv = &inverse_[s * 4];
    const double dx = y(0) - proj_(0, t[0]);
    const double dy = y(1) - proj_(1, t[0]);
    out[1] = inv[0] * dx + inv[1] * dy;
    out[2] = inv[2] * dx + inv[3] * dy;
    out[0] = 1.0 - out[1] - out[2];
  }
  return true;
}

ProjectedComplex::StabResult ProjectedComplex::stab(const Eigen::Ref<const Eigen::VectorXd>& y,
                                                    std::vector<Hit>* hits) const {
  StabResult res;
  bool inside = false;
  const std::size_t cell = cell_of(y, inside);
  if (!inside) return res;
  for (std::size_t k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
    const auto s = static_cast<std::size_t>(cell_items_[k]);
    double b[3] = {0.0, 0.0, 0.0};
    if (!barycentric(s, y, b)) {
      // Tangential simplex: degenerate if y lies in its (thin) projected hull.
      const auto t = complex_->simplex(s);
      bool near = true;
      for (int d = 0; d < dim_; ++d) {
        double mn = std::numeric_limits<double>::infinity(), mx = -mn;
        for (int v : t) {
          mn = std::min(mn, proj_(d, v));
          mx = std::max(mx, proj_(d, v));
        }
        const double tol = 1e-9 * std::max(1.0, mx - mn);
        if (y(d) < mn - tol || y(d) > mx + tol) near = false;
      }
      if (near) {
        res.degenerate = true;
        return res;
      }
      continue;
    }
    double mn = b[0];
    for (int j = 1; j <= dim_; ++j) mn = std::min(mn, b[j]);
    if (mn > -kFacetTolerance && jacobian_[s] < min_jacobian_) {
      res.degenerate = true;
      return res;
    }
    if (mn > kFacetTolerance) {
      ++res.count;
      if (hits) hits->push_back(Hit{static_cast<int>(s), {b[0], b[1], b[2]}});
    } else if (mn > -kFacetTolerance) {
      res.degenerate = true;
      return res;
    }
  }
  return res;
}

}  // namespace specgeo
