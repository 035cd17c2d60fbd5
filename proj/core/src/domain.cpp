#include "plateau/domain.hpp"

#include <algorithm>
#include <cmath>

#include "plateau/errors.hpp"

namespace plateau {

bool Box::contains(const Point& x) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

double Box::dist_inf_to_complement(const Point& x) const {
  double r = kInfinity;
  for (int i = 0; i < dim(); ++i) r = std::min({r, x[i] - lo[i], hi[i] - x[i]});
  return std::max(r, 0.0);
}

DomainOracle::DomainOracle(Box bbox, DistFn dist, BoxTest contains_box)
    : bbox_(std::move(bbox)), dist_(std::move(dist)), box_test_(std::move(contains_box)) {
  if (bbox_.lo.size() != bbox_.hi.size()) throw InputError("bounding box corners differ in dimension");
}

DomainOracle DomainOracle::full_space(Box bbox) {
  Box b = bbox;
  return DomainOracle(
      bbox, [](const Point&) { return kInfinity; },
      [b](const Point& lo, const Point& hi) {
        for (int i = 0; i < b.dim(); ++i)
          if (lo[i] < b.lo[i] || hi[i] > b.hi[i]) return false;
        return true;
      });
}

DomainOracle DomainOracle::open_box(Box box) {
  Box b = box;
  return DomainOracle(
      box,
      [b](const Point& x) {
        double r = kInfinity;
        for (int i = 0; i < b.dim(); ++i) r = std::min({r, x[i] - b.lo[i], b.hi[i] - x[i]});
        return std::max(r, 0.0);
      },
      [b](const Point& lo, const Point& hi) {
        for (int i = 0; i < b.dim(); ++i)
          if (!(lo[i] > b.lo[i] && hi[i] < b.hi[i])) return false;
        return true;
      });
}

DomainOracle DomainOracle::box_minus_points(Box box, std::vector<Point> punctures) {
  DomainOracle inner = open_box(box);
  auto dist_box = inner.dist_;
  auto test_box = inner.box_test_;
  DomainOracle out(
      box,
      [dist_box, punctures](const Point& x) {
        double r = dist_box(x);
        for (const auto& p : punctures) r = std::min(r, (x - p).norm());
        return r;
      },
      [test_box, punctures](const Point& lo, const Point& hi) {
        if (!test_box(lo, hi)) return false;
        for (const auto& p : punctures) {
          bool inside = true;
          for (int i = 0; i < p.size(); ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) inside = false;
          if (inside) return false;
        }
        return true;
      });
  out.punctures_ = std::move(punctures);
  return out;
}

double DomainOracle::lipschitz_spot_check(const std::vector<Point>& points) const {
  double worst = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    double dx = (points[i] - points[i - 1]).norm();
    if (dx == 0.0) continue;
    double a = dist_(points[i]), b = dist_(points[i - 1]);
    if (std::isinf(a) && std::isinf(b)) continue;
    worst = std::max(worst, std::abs(a - b) / dx);
  }
  return worst;
}

double scale_radius(const Point& x, double s, const DomainOracle& domain) {
  if (x.size() != domain.dim()) throw InputError("scale_radius: dimension mismatch");
  if (!(s > 0.0)) throw InputError("scale_radius: s must be positive");
  double d = domain.dist_to_complement(x);
  if (std::isinf(s)) return d;
  if (std::isinf(d)) return s;
  return std::min(s / (1.0 + s) * d, s);
}

}  // namespace plateau
