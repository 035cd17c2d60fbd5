#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "plateau/domain.hpp"
#include "plateau/grassmannian.hpp"

namespace plateau {

// Weighted point cloud standing in for a d-dimensional set in R^n.
class SampledSet {
 public:
  SampledSet() = default;
  SampledSet(int d, int n, std::vector<Point> points, std::vector<double> weights, double resolution,
             std::vector<LinearPlane> tangents = {});

  int d() const { return d_; }
  int n() const { return n_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }
  double resolution() const { return resolution_; }
  bool has_tangents() const { return !tangents_.empty(); }
  const std::vector<LinearPlane>& tangents() const { return tangents_; }

  // Same weights and resolution at new positions; tangents are dropped.
  SampledSet with_points(std::vector<Point> points) const;
  SampledSet subset(const std::vector<std::size_t>& idx) const;
  SampledSet filter(const std::function<bool(const Point&)>& keep) const;
  Box bounding_box() const;

 private:
  int d_ = 0;
  int n_ = 0;
  std::vector<Point> points_;
  std::vector<double> weights_;
  double resolution_ = 0.0;
  std::vector<LinearPlane> tangents_;
};

SampledSet merge(const SampledSet& a, const SampledSet& b);

// Generators. Curves use trapezoid weights, so the weight sum is the exact length.
SampledSet sample_segment(const Point& p, const Point& q, double spacing);
SampledSet sample_polyline(const std::vector<Point>& vertices, double spacing);
SampledSet sample_circle(const Point& center, double radius, double spacing);
SampledSet sample_square_boundary(const Point& corner, double side, double spacing);
// Three arms of equal length meeting at 120 degrees; the first arm points at angle0.
SampledSet sample_y_junction(const Point& center, double arm, double spacing, double angle0 = 0.0);
// Disk of the given radius in the affine plane center + span(frame rows), on a square lattice.
SampledSet sample_planar_disk(const Point& center, const Eigen::MatrixXd& frame, double radius, double spacing);
// Four-corner Cantor set of depth m: 4^m square centers, weights 4^-m, resolution 4^-m.
SampledSet cantor_four_corner(int m);

// CSV with header x1,...,xn,weight; shortest round-trip decimal output.
void write_csv(std::ostream& os, const SampledSet& s);
// Resolution defaults to the median nearest-neighbor spacing when not given.
SampledSet read_csv(std::istream& is, int d, double resolution = 0.0);
std::vector<Point> read_points_csv(std::istream& is);

}  // namespace plateau
