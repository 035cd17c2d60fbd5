#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "plateau/errors.hpp"
#include "plateau/lipschitz.hpp"

using namespace plateau;
using oracle::vec;

namespace {

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

std::vector<Point> line_grid(double a, double b, int n) {
  std::vector<Point> g;
  for (int i = 0; i <= n; ++i) g.push_back(vec({a + (b - a) * i / n}));
  return g;
}

}  // namespace

TEST(McShane, ExactOnDomain) {
  Rng rng(1);
  SampledFunction f;
  for (int i = 0; i < 50; ++i) {
    Point p = vec({rng.uniform(), rng.uniform()});
    f.domain_points.push_back(p);
    f.values.push_back(vec({std::sin(3 * p[0]), p[1] * p[1], p[0] - p[1]}));
  }
  for (std::size_t i = 0; i < f.domain_points.size(); ++i)
    EXPECT_EQ(mcshane_extend(f, 6.0, f.domain_points[i]), f.values[i]);
}

TEST(McShane, TwoPointInfimum) {
  SampledFunction f{{vec({0, 0}), vec({2, 0})}, {scalar(0.0), scalar(4.0)}, 2.0};
  f.validate();
  const Point x = vec({1, 0});
  EXPECT_DOUBLE_EQ(mcshane_extend(f, 2.0, x)[0], 2.0);
  EXPECT_DOUBLE_EQ(mcshane_extend(f, 2.0, x)[0], oracle::mcshane({vec({0, 0}), vec({2, 0})}, {0.0, 4.0}, 2.0, x));
}

TEST(McShane, ConstantGrowsWithDistance) {
  const std::vector<Point> a = {vec({0, 0}), vec({1, 3}), vec({-2, 1})};
  SampledFunction f{a, {scalar(1.5), scalar(1.5), scalar(1.5)}, {}};
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const Point x = vec({rng.normal(), rng.normal()});
    double dist = 1e300;
    for (const auto& p : a) dist = std::min(dist, (x - p).norm());
    EXPECT_NEAR(mcshane_extend(f, 1.0, x)[0], 1.5 + dist, 1e-12);
    EXPECT_NEAR(mcshane_extend(f, 1.0, x)[0], oracle::mcshane(a, {1.5, 1.5, 1.5}, 1.0, x), 1e-12);
  }
}

TEST(McShane, EmptyDomainThrows) {
  EXPECT_THROW(mcshane_extend(SampledFunction{}, 1.0, vec({0})), InputError);
}

TEST(McShane, DeclaredConstantValidated) {
  SampledFunction f{{vec({0}), vec({1})}, {scalar(0.0), scalar(3.0)}, 2.0};
  EXPECT_THROW(f.validate(), InputError);
}

TEST(McShane, LipschitzAfterExtension) {
  Rng rng(3);
  const double L = 2.0;
  SampledFunction f;
  for (int i = 0; i < 40; ++i) {
    Point p = vec({rng.uniform(), rng.uniform()});
    f.domain_points.push_back(p);
    f.values.push_back(vec({L * p[0], L * (p[0] + p[1]) / std::sqrt(2.0)}));
  }
  for (int i = 0; i < 2000; ++i) {
    Point x = vec({rng.uniform(-1, 2), rng.uniform(-1, 2)}), y = vec({rng.uniform(-1, 2), rng.uniform(-1, 2)});
    EXPECT_LE((mcshane_extend(f, L, x) - mcshane_extend(f, L, y)).norm(),
              L * std::sqrt(2.0) * (x - y).norm() * (1 + 1e-9));
  }
}

TEST(McShane, ReExtensionIsIdempotent) {
  Rng rng(4);
  SampledFunction f;
  for (int i = 0; i < 20; ++i) {
    Point p = vec({rng.uniform()});
    f.domain_points.push_back(p);
    f.values.push_back(scalar(std::abs(p[0] - 0.5)));
  }
  SampledFunction g = f;
  for (int i = 0; i < 20; ++i) {
    Point q = vec({rng.uniform()});
    g.domain_points.push_back(q);
    g.values.push_back(mcshane_extend(f, 1.0, q));
  }
  for (int i = 0; i < 200; ++i) {
    Point x = vec({rng.uniform(-1, 2)});
    EXPECT_NEAR(mcshane_extend(g, 1.0, x)[0], mcshane_extend(f, 1.0, x)[0], 1e-12);
  }
}

TEST(LipschitzApproximate, ConstantFunction) {
  auto grid = line_grid(0, 1, 50);
  VectorMap f = [](const Point&) { return scalar(0.7); };
  for (const auto& x : grid) EXPECT_DOUBLE_EQ(lipschitz_approximate(f, 1.0, 0.1, grid, x)[0], 0.7);
}

TEST(LipschitzApproximate, SquareRootBounds) {
  auto grid = line_grid(0, 1, 1000);
  VectorMap f = [](const Point& x) { return scalar(std::sqrt(std::abs(x[0]))); };
  LipschitzApproximation g(f, 1.0, 0.01, grid);
  for (const auto& x : grid) {
    const double diff = f(x)[0] - g(x)[0];
    EXPECT_GE(diff, -1e-15);
    EXPECT_LE(diff, 0.1);
  }
}

TEST(LipschitzApproximate, SlopeBound) {
  auto grid = line_grid(0, 1, 500);
  VectorMap f = [](const Point& x) { return scalar(std::sqrt(x[0])); };
  LipschitzApproximation g(f, 1.0, 0.01, grid);
  EXPECT_DOUBLE_EQ(g.lipschitz(), 200.0);
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    Point x = vec({rng.uniform()}), y = vec({rng.uniform()});
    EXPECT_LE(std::abs(g(x)[0] - g(y)[0]), g.lipschitz() * std::abs(x[0] - y[0]) * (1 + 1e-9) + 1e-15);
  }
}

TEST(LipschitzApproximate, EmptyGridThrows) {
  VectorMap f = [](const Point&) { return scalar(0.0); };
  EXPECT_THROW(LipschitzApproximation(f, 1.0, 0.1, {}), InputError);
}

TEST(ModulusOfContinuity, SquareRoot) {
  auto grid = line_grid(0, 1, 1000);
  std::vector<Eigen::VectorXd> vals;
  for (const auto& x : grid) vals.push_back(scalar(std::sqrt(x[0])));
  EXPECT_NEAR(modulus_of_continuity(grid, vals, 0.01), 0.1, 1e-9);
}

TEST(ApproxExtend, WholeGridReproduces) {
  auto grid = line_grid(0, 1, 100);
  VectorMap f = [](const Point& x) { return scalar(x[0] * x[0]); };
  ApproxExtension g(f, grid, 0.05, grid);
  for (const auto& x : grid) EXPECT_EQ(g(x)[0], f(x)[0]);
}

TEST(ApproxExtend, EndpointsOfInterval) {
  auto grid = line_grid(0, 1, 400);
  VectorMap f = [](const Point& x) { return scalar(x[0] * x[0]); };
  const double eps = 0.05;
  ApproxExtension g(f, {vec({0}), vec({1})}, eps, grid);
  EXPECT_EQ(g(vec({0}))[0], 0.0);
  EXPECT_EQ(g(vec({1}))[0], 1.0);
  for (const auto& x : grid) EXPECT_LE(std::abs(g(x)[0] - f(x)[0]), eps + 1e-12);
}

TEST(ApproxExtend, LargeEpsilonIsMcShaneOfRestriction) {
  auto grid = line_grid(0, 1, 100);
  VectorMap f = [](const Point& x) { return scalar(std::sin(6 * x[0])); };
  std::vector<Point> a = {vec({0.2}), vec({0.7})};
  ApproxExtension g(f, a, 100.0, grid);
  for (const auto& p : a) EXPECT_EQ(g(p)[0], f(p)[0]);
  for (const auto& x : grid) EXPECT_LE(std::abs(g(x)[0] - f(x)[0]), 100.0);
}

TEST(LipschitzConstantEstimate, IdentityAndDoubling) {
  Rng rng(6);
  std::vector<Point> pts, twice;
  for (int i = 0; i < 300; ++i) {
    pts.push_back(vec({rng.normal(), rng.normal()}));
    twice.push_back(2.0 * pts.back());
  }
  pts.push_back(pts.front());
  twice.push_back(twice.front());
  EXPECT_NEAR(lipschitz_constant_estimate(pts, pts, rng), 1.0, 1e-12);
  EXPECT_NEAR(lipschitz_constant_estimate(pts, twice, rng), 2.0, 1e-12);
  EXPECT_THROW(lipschitz_constant_estimate({pts.front()}, {pts.front()}, rng), InputError);
}
