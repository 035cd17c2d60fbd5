#include "plateau/lipschitz.hpp"

#include <algorithm>
#include <cmath>

#include "plateau/errors.hpp"

namespace plateau {

void SampledFunction::validate() const {
  if (domain_points.size() != values.size()) throw InputError("sampled function: one value per domain point needed");
  if (!lipschitz) return;
  for (std::size_t i = 0; i < domain_points.size(); ++i)
    for (std::size_t j = i + 1; j < domain_points.size(); ++j) {
      double dx = (domain_points[i] - domain_points[j]).norm();
      double df = (values[i] - values[j]).norm();
      if (df > *lipschitz * dx * (1.0 + 1e-12) + 1e-15)
        throw InputError("sampled function violates its declared Lipschitz constant");
    }
}

Eigen::VectorXd mcshane_extend(const SampledFunction& f, double L, const Point& x) {
  if (f.domain_points.empty()) throw InputError("mcshane_extend: empty domain");
  if (f.values.size() != f.domain_points.size()) throw InputError("mcshane_extend: one value per domain point needed");
  for (std::size_t i = 0; i < f.domain_points.size(); ++i)
    if (f.domain_points[i] == x) return f.values[i];
  Eigen::VectorXd g = Eigen::VectorXd::Constant(f.values.front().size(), kInfinity);
  for (std::size_t i = 0; i < f.domain_points.size(); ++i) {
    double r = L * (f.domain_points[i] - x).norm();
    g = g.cwiseMin((f.values[i].array() + r).matrix());
  }
  return g;
}

LipschitzApproximation::LipschitzApproximation(const VectorMap& f, double sup_bound, double delta,
                                               std::vector<Point> grid)
    : slope_(2.0 * sup_bound / delta), grid_(std::move(grid)) {
  if (grid_.empty()) throw InputError("lipschitz_approximate: empty grid");
  if (!(delta > 0.0) || sup_bound < 0.0) throw InputError("lipschitz_approximate: bad bound or scale");
  values_.reserve(grid_.size());
  for (const auto& y : grid_) values_.push_back(f(y));
}

Eigen::VectorXd LipschitzApproximation::operator()(const Point& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Constant(values_.front().size(), kInfinity);
  for (std::size_t i = 0; i < grid_.size(); ++i)
    g = g.cwiseMin((values_[i].array() + slope_ * (grid_[i] - x).norm()).matrix());
  return g;
}

Eigen::VectorXd lipschitz_approximate(const VectorMap& f, double sup_bound, double delta,
                                      const std::vector<Point>& grid, const Point& x) {
  return LipschitzApproximation(f, sup_bound, delta, grid)(x);
}

double modulus_of_continuity(const std::vector<Point>& grid, const std::vector<Eigen::VectorXd>& values,
                             double delta) {
  double w = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i + 1; j < grid.size(); ++j)
      if ((grid[i] - grid[j]).norm() <= delta) w = std::max(w, (values[i] - values[j]).cwiseAbs().maxCoeff());
  return w;
}

ApproxExtension::ApproxExtension(const VectorMap& f, std::vector<Point> a_samples, double eps, std::vector<Point> grid)
    : f_(f), eps_(eps), a_(std::move(a_samples)) {
  if (a_.empty()) throw InputError("approx_extend: empty A");
  if (grid.empty()) throw InputError("approx_extend: empty grid");
  if (!(eps > 0.0)) throw InputError("approx_extend: eps must be positive");

  std::vector<Eigen::VectorXd> gv;
  gv.reserve(grid.size());
  double sup = 0.0;
  for (const auto& y : grid) {
    gv.push_back(f(y));
    sup = std::max(sup, gv.back().cwiseAbs().maxCoeff());
  }
  for (const auto& y : a_) {
    fa_.push_back(f(y));
    sup = std::max(sup, fa_.back().cwiseAbs().maxCoeff());
  }
  double diam = 0.0;
  for (const auto& y : grid) diam = std::max(diam, (y - grid.front()).norm());
  delta_ = std::max(2.0 * diam, 1.0);
  for (int i = 0; i < 64 && modulus_of_continuity(grid, gv, delta_) > eps / 2.0; ++i) delta_ /= 2.0;
  approx_.emplace(f, sup, delta_, std::move(grid));

  residual_.domain_points = a_;
  for (std::size_t i = 0; i < a_.size(); ++i) residual_.values.push_back(fa_[i] - (*approx_)(a_[i]));
  for (std::size_t i = 0; i < a_.size(); ++i)
    for (std::size_t j = i + 1; j < a_.size(); ++j) {
      double dx = (a_[i] - a_[j]).norm();
      if (dx > 0.0)
        residual_lipschitz_ =
            std::max(residual_lipschitz_, (residual_.values[i] - residual_.values[j]).cwiseAbs().maxCoeff() / dx);
    }
}

Eigen::VectorXd ApproxExtension::operator()(const Point& x) const {
  for (std::size_t i = 0; i < a_.size(); ++i)
    if (a_[i] == x) return fa_[i];
  Eigen::VectorXd r = mcshane_extend(residual_, residual_lipschitz_, x);
  r = r.cwiseMax(-eps_ / 2.0).cwiseMin(eps_ / 2.0);
  return (*approx_)(x) + r;
}

Eigen::VectorXd approx_extend(const VectorMap& f, const std::vector<Point>& a_samples, double eps,
                              const std::vector<Point>& grid, const Point& x) {
  return ApproxExtension(f, a_samples, eps, grid)(x);
}

double lipschitz_constant_estimate(const std::vector<Point>& points, const std::vector<Point>& images, Rng& rng) {
  if (points.size() != images.size()) throw InputError("lipschitz_constant_estimate: one image per point needed");
  if (points.size() < 2) throw InputError("lipschitz_constant_estimate: at least two points needed");
  double best = 0.0;
  auto pair = [&](std::size_t i, std::size_t j) {
    double dx = (points[i] - points[j]).norm();
    if (dx == 0.0) return;
    best = std::max(best, (images[i] - images[j]).norm() / dx);
  };
  if (points.size() <= 2000) {
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j) pair(i, j);
  } else {
    for (int k = 0; k < 1000000; ++k) pair(rng.below(points.size()), rng.below(points.size()));
  }
  return best;
}

}  // namespace plateau
