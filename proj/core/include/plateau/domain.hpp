#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <vector>

namespace plateau {

using Point = Eigen::VectorXd;

struct Box {
  Point lo;
  Point hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Point& x) const;
  double dist_inf_to_complement(const Point& x) const;
};

// The open set X, seen through d(x, X^c) and a closed-box inclusion test.
class DomainOracle {
 public:
  using DistFn = std::function<double(const Point&)>;
  using BoxTest = std::function<bool(const Point& lo, const Point& hi)>;

  DomainOracle(Box bbox, DistFn dist, BoxTest contains_box);

  // R^n truncated to a box: distances are infinite, boxes must lie in the bounding box.
  static DomainOracle full_space(Box bbox);
  static DomainOracle open_box(Box box);
  static DomainOracle box_minus_points(Box box, std::vector<Point> punctures);

  double dist_to_complement(const Point& x) const { return dist_(x); }
  bool contains_closed_box(const Point& lo, const Point& hi) const { return box_test_(lo, hi); }
  bool contains(const Point& x) const { return dist_(x) > 0.0; }
  const Box& bounding_box() const { return bbox_; }
  int dim() const { return bbox_.dim(); }
  const std::vector<Point>& punctures() const { return punctures_; }

  // Largest |d(x)-d(y)| / |x-y| over consecutive pairs; 1-Lipschitz means <= 1.
  double lipschitz_spot_check(const std::vector<Point>& points) const;

 private:
  Box bbox_;
  DistFn dist_;
  BoxTest box_test_;
  std::vector<Point> punctures_;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// min{ s/(1+s) d(x, X^c), s }, with the s = infinity limit d(x, X^c).
double scale_radius(const Point& x, double s, const DomainOracle& domain);

}  // namespace plateau
