#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace specgeo {

/// A piecewise-linear m-dimensional complex (m = 1 polyline, m = 2 triangle
/// mesh) immersed in R^{m+p}. Immutable once created; `create` validates.
class ImmersedComplex {
 public:
  /// `vertices` is (m+p) x n_vertices; `simplices` is flat with stride m+1.
  /// Throws GeometryError on out-of-range indices, zero-measure simplices,
  /// non-manifold edges or an ambient dimension below m+1.
  static ImmersedComplex create(int dim, Eigen::MatrixXd vertices,
                                std::vector<int> simplices);

  int dim() const { return dim_; }
  int ambient_dim() const { return static_cast<int>(vertices_.rows()); }
  int codim() const { return ambient_dim() - dim_; }

  std::size_t vertex_count() const { return static_cast<std::size_t>(vertices_.cols()); }
  std::size_t simplex_count() const { return measures_.size(); }

  const Eigen::MatrixXd& vertices() const { return vertices_; }
  auto vertex(std::size_t i) const { return vertices_.col(static_cast<Eigen::Index>(i)); }

  std::span<const int> simplex(std::size_t s) const {
    return {simplices_.data() + s * static_cast<std::size_t>(dim_ + 1),
            static_cast<std::size_t>(dim_ + 1)};
  }
  const std::vector<int>& simplex_indices() const { return simplices_; }

  double simplex_measure(std::size_t s) const { return measures_[s]; }
  const std::vector<double>& simplex_measures() const { return measures_; }
  Eigen::VectorXd barycenter(std::size_t s) const;

  /// 1 for simplices touching a boundary facet (an edge used by a single
  /// triangle, or a polyline endpoint), else 0.
  const std::vector<std::uint8_t>& boundary_flags() const { return boundary_flags_; }
  bool is_closed() const { return closed_; }

  /// Total m-dimensional measure, compensated summation.
  double volume() const { return volume_; }

 private:
  ImmersedComplex() = default;

  int dim_ = 0;
  Eigen::MatrixXd vertices_;
  std::vector<int> simplices_;
  std::vector<double> measures_;
  std::vector<std::uint8_t> boundary_flags_;
  bool closed_ = false;
  double volume_ = 0.0;
};

/// m-dimensional measure of the simplex spanned by the given ambient points.
double simplex_measure(std::span<const Eigen::VectorXd> corners);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

double riemannian_volume(const ImmersedComplex& c);

/// A set of simplices, used both as a removed perturbation region and as a
/// restriction mask.
struct Region {
  std::vector<std::size_t> simplex_ids;  // sorted, unique
  double measure = 0.0;
  double volume_fraction = 0.0;
};

Region make_region(const ImmersedComplex& c, std::vector<std::size_t> ids);
std::vector<std::uint8_t> region_mask(const ImmersedComplex& c, const Region& d);

/// The complex with the region's simplices deleted and unreferenced
/// vertices dropped. Throws GeometryError if the region covers everything.
ImmersedComplex remove_region(const ImmersedComplex& c, const Region& d);

enum class Metric { euclidean, graph_geodesic };

/// Finite metric-measure space: one sample point per simplex barycenter,
/// weighted by the simplex measure.
class MetricMeasureSpace {
 public:
  MetricMeasureSpace(Eigen::MatrixXd points, std::vector<double> weights,
                     Metric metric, std::optional<Eigen::MatrixXd> distances = std::nullopt);

  std::size_t size() const { return weights_.size(); }
  int ambient_dim() const { return static_cast<int>(points_.rows()); }
  Metric metric() const { return metric_; }
  const Eigen::MatrixXd& points() const { return points_; }
  auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }
  const std::vector<double>& weights() const { return weights_; }
  double total_weight() const { return total_weight_; }

  double distance(std::size_t i, std::size_t j) const {
    if (distances_) return (*distances_)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return (points_.col(static_cast<Eigen::Index>(i)) - points_.col(static_cast<Eigen::Index>(j))).norm();
  }

 private:
  Eigen::MatrixXd points_;
  std::vector<double> weights_;
  Metric metric_;
  std::optional<Eigen::MatrixXd> distances_;
  double total_weight_ = 0.0;
};

/// When `restricted_to_complement_of` is given, weights of the region's
/// simplices are zeroed (the restricted measure).
MetricMeasureSpace to_mm_space(const ImmersedComplex& c, Metric metric = Metric::euclidean,
                               const Region* restricted_to_complement_of = nullptr);

/// All-pairs shortest paths over the barycenter adjacency graph (simplices
/// sharing a facet), edge lengths = barycenter chord lengths.
Eigen::MatrixXd dual_graph_distances(const ImmersedComplex& c);

// Mesh IO -------------------------------------------------------------------

enum class MeshFormat { off, obj, csv_polyline };

ImmersedComplex load_complex(const std::string& path, MeshFormat format);
ImmersedComplex load_complex(const std::string& path);  // format from extension
ImmersedComplex parse_off(const std::string& text);
ImmersedComplex parse_obj(const std::string& text);
/// One point per line, comma or whitespace separated; a closed polyline.
ImmersedComplex parse_csv_polyline(const std::string& text);

void write_off(const ImmersedComplex& c, const std::string& path);

}  // namespace specgeo
