#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "plateau/domain.hpp"
#include "plateau/rng.hpp"

namespace plateau {

using VectorMap = std::function<Eigen::VectorXd(const Point&)>;

struct SampledFunction {
  std::vector<Point> domain_points;
  std::vector<Eigen::VectorXd> values;
  std::optional<double> lipschitz;

  // Throws InputError on size mismatch or when a declared constant is violated on some pair.
  void validate() const;
};

// Coordinatewise inf-convolution g_j(x) = min_y f_j(y) + L|x - y|.
Eigen::VectorXd mcshane_extend(const SampledFunction& f, double L, const Point& x);

// g(x) = min over the grid of f(y) + 2M/delta |x - y|, with f cached on the grid.
class LipschitzApproximation {
 public:
  LipschitzApproximation(const VectorMap& f, double sup_bound, double delta, std::vector<Point> grid);
  Eigen::VectorXd operator()(const Point& x) const;
  double lipschitz() const { return slope_; }
  const std::vector<Point>& grid() const { return grid_; }
  const std::vector<Eigen::VectorXd>& grid_values() const { return values_; }

 private:
  double slope_;
  std::vector<Point> grid_;
  std::vector<Eigen::VectorXd> values_;
};

Eigen::VectorXd lipschitz_approximate(const VectorMap& f, double sup_bound, double delta,
                                      const std::vector<Point>& grid, const Point& x);

// Largest |f(x) - f(y)| over grid pairs with |x - y| <= delta.
double modulus_of_continuity(const std::vector<Point>& grid, const std::vector<Eigen::VectorXd>& values,
                             double delta);

// f on A, within eps of f elsewhere on the grid: approximate to eps/2, then extend the residual.
class ApproxExtension {
 public:
  ApproxExtension(const VectorMap& f, std::vector<Point> a_samples, double eps, std::vector<Point> grid);
  Eigen::VectorXd operator()(const Point& x) const;
  double delta() const { return delta_; }

 private:
  VectorMap f_;
  double eps_;
  double delta_ = 0.0;
  std::vector<Point> a_;
  std::vector<Eigen::VectorXd> fa_;
  std::optional<LipschitzApproximation> approx_;
  SampledFunction residual_;
  double residual_lipschitz_ = 0.0;
};

Eigen::VectorXd approx_extend(const VectorMap& f, const std::vector<Point>& a_samples, double eps,
                              const std::vector<Point>& grid, const Point& x);

// Max |f(x) - f(y)| / |x - y| over all pairs (up to 2000 points) or 10^6 random pairs.
double lipschitz_constant_estimate(const std::vector<Point>& points, const std::vector<Point>& images, Rng& rng);

}  // namespace plateau
