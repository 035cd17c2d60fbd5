#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "plateau/errors.hpp"
#include "plateau/grassmannian.hpp"
#include "plateau/sampled_set.hpp"

using namespace plateau;
using oracle::vec;

namespace {

LinearPlane line2(double theta) {
  Eigen::MatrixXd f(1, 2);
  f << std::cos(theta), std::sin(theta);
  return LinearPlane(f);
}

Eigen::MatrixXd random_rotation(int n, Rng& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ();
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    worst = std::max(worst, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return worst;
}

const std::vector<std::pair<int, int>> kDims = {{1, 2}, {1, 3}, {2, 3}, {2, 4}};

}  // namespace

TEST(LinearPlane, FrameInvariants) {
  Rng rng(1);
  for (auto [d, n] : kDims) {
    for (int i = 0; i < 50; ++i) {
      LinearPlane v = haar_sample(d, n, rng);
      EXPECT_LT((v.frame() * v.frame().transpose() - Eigen::MatrixXd::Identity(d, d)).norm(), 1e-12);
      Eigen::MatrixXd p = v.projection();
      EXPECT_LT((p * p - p).norm(), 1e-10);
      EXPECT_LT((p - p.transpose()).norm(), 1e-12);
    }
  }
  Eigen::MatrixXd bad(1, 2);
  bad << 1.0, 1.0;
  EXPECT_THROW(LinearPlane{bad}, InputError);
}

TEST(PlaneDistance, Identity) {
  Rng rng(2);
  LinearPlane v = haar_sample(2, 4, rng);
  EXPECT_NEAR(plane_distance(v, v), 0.0, 1e-12);
}

TEST(PlaneDistance, LinesAtSixthPi) {
  const double theta = std::numbers::pi / 6;
  EXPECT_NEAR(plane_distance(line2(0.3), line2(0.3 + theta)), oracle::line_distance_2d(theta), 1e-10);
}

TEST(PlaneDistance, OrthogonalLinesAtOne) {
  EXPECT_NEAR(plane_distance(line2(0.0), line2(std::numbers::pi / 2)), 1.0, 1e-12);
}

TEST(PlaneDistance, DimensionMismatchThrows) {
  EXPECT_THROW(plane_distance(LinearPlane::coordinate(1, 2), LinearPlane::coordinate(1, 3)), InputError);
}

TEST(PlaneDistance, RestrictedFormsAgree) {
  Rng rng(3);
  for (auto [d, n] : kDims) {
    for (int i = 0; i < 500; ++i) {
      LinearPlane v = haar_sample(d, n, rng), w = haar_sample(d, n, rng);
      const double full = plane_distance(v, w);
      EXPECT_GE(full, 0.0);
      EXPECT_LE(full, 1.0 + 1e-12);
      EXPECT_NEAR(full, plane_distance(w, v), 1e-12);
      EXPECT_NEAR(plane_distance_restricted(v, w), full, 1e-9);
      EXPECT_NEAR(plane_distance_restricted_complement(v, w), full, 1e-9);
      EXPECT_NEAR(plane_distance(v.complement(), w.complement()), full, 1e-9);
    }
  }
}

TEST(GraphMap, ZeroMapIsBase) {
  GraphMap g{LinearPlane::coordinate(1, 2), Eigen::MatrixXd::Zero(1, 1)};
  EXPECT_NEAR(plane_distance(graph_to_plane(g), g.base), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(graph_norm_distance(g), 0.0);
}

TEST(GraphMap, SlopeOneLine) {
  GraphMap g{LinearPlane::coordinate(1, 2), Eigen::MatrixXd::Constant(1, 1, 1.0)};
  LinearPlane w = graph_to_plane(g);
  EXPECT_NEAR(graph_norm_distance(g), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(plane_distance(g.base, w), oracle::line_distance_2d(std::numbers::pi / 4), 1e-12);
}

TEST(GraphMap, SlopeTLine) {
  for (double t : {-3.0, 0.2, 5.0}) {
    GraphMap g{LinearPlane::coordinate(1, 2), Eigen::MatrixXd::Constant(1, 1, t)};
    EXPECT_NEAR(plane_distance(graph_to_plane(g), line2(std::atan(t))), 0.0, 1e-12);
  }
}

TEST(GraphMap, RoundTripAndNormDistance) {
  Rng rng(4);
  for (auto [d, n] : kDims) {
    for (int i = 0; i < 500; ++i) {
      LinearPlane v = haar_sample(d, n, rng);
      Eigen::MatrixXd phi(n - d, d);
      for (int r = 0; r < n - d; ++r)
        for (int c = 0; c < d; ++c) phi(r, c) = rng.normal();
      GraphMap g{v, phi};
      LinearPlane w = graph_to_plane(g);
      EXPECT_EQ(w.d(), d);
      EXPECT_NEAR(graph_norm_distance(g), plane_distance(v, w), 1e-9);
      GraphMap back = plane_to_graph(v, w);
      EXPECT_LT((back.phi - phi).norm(), 1e-9 * std::max(1.0, phi.norm()));
    }
  }
}

TEST(GraphMap, NormDistanceIncreasingAndBelowOne) {
  double prev = -1.0;
  for (double t = 0.0; t < 50.0; t += 0.5) {
    GraphMap g{LinearPlane::coordinate(1, 2), Eigen::MatrixXd::Constant(1, 1, t)};
    const double v = graph_norm_distance(g);
    EXPECT_GT(v, prev);
    EXPECT_LT(v, 1.0);
    prev = v;
  }
}

TEST(GraphMap, DistanceOneThrows) {
  EXPECT_THROW(plane_to_graph(line2(0.0), line2(std::numbers::pi / 2)), DistanceOne);
}

TEST(GraphMap, StretchBound) {
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    LinearPlane v = haar_sample(2, 4, rng), w = haar_sample(2, 4, rng);
    const double dist = plane_distance(v, w);
    if (dist >= 1.0 - 1e-6) continue;
    Eigen::VectorXd x = w.frame().transpose() * Eigen::Vector2d(rng.normal(), rng.normal());
    EXPECT_LE(x.norm(), (v.projection() * x).norm() / std::sqrt(1.0 - dist * dist) * (1.0 + 1e-9));
  }
}

TEST(Isomorphism, IdentityKeepsPlane) {
  Rng rng(6);
  LinearPlane v = haar_sample(2, 3, rng);
  auto img = apply_isomorphism(Eigen::MatrixXd::Identity(3, 3), v);
  EXPECT_NEAR(plane_distance(img.plane, v), 0.0, 1e-12);
  EXPECT_NEAR(img.condition, 1.0, 1e-12);
}

TEST(Isomorphism, SingularThrows) {
  EXPECT_THROW(apply_isomorphism(Eigen::MatrixXd::Zero(2, 2), LinearPlane::coordinate(1, 2)), InputError);
}

TEST(Isomorphism, ConditionBound) {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    Eigen::MatrixXd u(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) u(r, c) = rng.normal();
    const double cond = operator_norm(u) * operator_norm(u.inverse());
    LinearPlane v = haar_sample(1, 3, rng), w = haar_sample(1, 3, rng);
    EXPECT_LE(plane_distance(apply_isomorphism(u, v).plane, apply_isomorphism(u, w).plane),
              cond * plane_distance(v, w) + 1e-9);
  }
}

TEST(Isomorphism, NearIdentityBound) {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    Eigen::MatrixXd e(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) e(r, c) = rng.normal();
    e *= 0.2 / operator_norm(e);
    LinearPlane v = haar_sample(2, 3, rng);
    EXPECT_LE(plane_distance(apply_isomorphism(Eigen::MatrixXd::Identity(3, 3) + e, v).plane, v), 0.25 + 1e-12);
  }
}

TEST(HaarSample, FullDimensionIsDeterministic) {
  Rng a(1), b(2);
  EXPECT_NEAR(plane_distance(haar_sample(3, 3, a), haar_sample(3, 3, b)), 0.0, 1e-12);
}

TEST(HaarSample, RotationInvariance) {
  Rng rng(10), rot_rng(11);
  const LinearPlane v0 = LinearPlane::coordinate(1, 3);
  const Eigen::MatrixXd rot = random_rotation(3, rot_rng);
  std::vector<double> plain, rotated;
  for (int i = 0; i < 10000; ++i) plain.push_back(plane_distance(haar_sample(1, 3, rng), v0));
  for (int i = 0; i < 10000; ++i) rotated.push_back(plane_distance(apply_isomorphism(rot, haar_sample(1, 3, rng)).plane, v0));
  EXPECT_LT(ks_statistic(plain, rotated), 0.05);
}

TEST(HaarSample, LineAnglesUniform) {
  Rng rng(12);
  const int bins = 20, n = 10000;
  std::vector<int> count(bins, 0);
  for (int i = 0; i < n; ++i) {
    LinearPlane v = haar_sample(1, 2, rng);
    double a = std::atan2(v.frame()(0, 1), v.frame()(0, 0));
    if (a < 0) a += std::numbers::pi;
    if (a >= std::numbers::pi) a -= std::numbers::pi;
    ++count[std::min(bins - 1, static_cast<int>(a / std::numbers::pi * bins))];
  }
  double chi2 = 0.0;
  const double expect = double(n) / bins;
  for (int c : count) chi2 += (c - expect) * (c - expect) / expect;
  EXPECT_LT(chi2, 43.8);  // 19 degrees of freedom at the 0.001 level
}

TEST(LineSetMeasure, AllLines) {
  Rng rng(13);
  auto est = line_set_measure([](const LinearPlane&) { return true; }, 2, 1000, rng);
  EXPECT_DOUBLE_EQ(est.value, 1.0);
  EXPECT_EQ(est.samples, 1000u);
}

TEST(LineSetMeasure, ArcInThePlane) {
  Rng rng(14);
  const double theta = std::numbers::pi / 6;
  const LinearPlane l0 = LinearPlane::coordinate(1, 2);
  auto est = line_set_measure([&](const LinearPlane& v) { return plane_distance(v, l0) < std::sin(theta); }, 1,
                              100000, rng);
  EXPECT_NEAR(est.value, oracle::arc_fraction(theta), 3.0 * est.std_error);
}

TEST(LineSetMeasure, CapInSpace) {
  Rng rng(15);
  const double theta = std::numbers::pi / 3;
  auto est = line_set_measure([&](const LinearPlane& v) { return std::abs(v.frame()(0, 2)) > std::cos(theta); }, 2,
                              100000, rng);
  EXPECT_NEAR(est.value, oracle::cap_fraction(theta), 3.0 * est.std_error);
}

TEST(Disintegration, TruePredicate) {
  Rng rng(16);
  auto r = disintegration_check(1, 1, 3, [](const LinearPlane&) { return true; }, 100, 10, 10, rng);
  EXPECT_DOUBLE_EQ(r.lhs.value, 1.0);
  EXPECT_DOUBLE_EQ(r.rhs.value, 1.0);
}

TEST(Disintegration, NormalCap) {
  Rng rng(17);
  const double c = std::cos(std::numbers::pi / 3);
  auto pred = [&](const LinearPlane& p) { return std::abs(p.complement_frame()(0, 2)) > c; };
  auto r = disintegration_check(1, 1, 3, pred, 20000, 200, 50, rng);
  EXPECT_NEAR(r.lhs.value, 0.5, 3.0 * r.lhs.std_error);
  EXPECT_NEAR(r.rhs.value, 0.5, 3.0 * r.rhs.std_error + 0.01);
  EXPECT_LE(std::abs(r.lhs.value - r.rhs.value), 3.0 * r.sigma);
}

TEST(Disintegration, HalfSpaceSelfConsistency) {
  Rng rng(18);
  Eigen::Vector4d a(0.3, -0.5, 0.8, 0.1);
  auto pred = [&](const LinearPlane& p) { return (p.projection() * a).norm() > 0.6 * a.norm(); };
  auto r = disintegration_check(1, 2, 4, pred, 20000, 200, 50, rng);
  EXPECT_LE(std::abs(r.lhs.value - r.rhs.value), 3.0 * r.sigma);
}

TEST(SphereMeasure, LowDimensions) {
  EXPECT_NEAR(sphere_measure(1), 2.0 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(sphere_measure(2), 4.0 * std::numbers::pi, 1e-12);
}

TEST(HyperplaneLineBound, SegmentAtUnitDistance) {
  Rng rng(19);
  AffinePlane h{vec({1.0, 0.0}), LinearPlane(Eigen::MatrixXd(Eigen::RowVector2d(0.0, 1.0)))};
  SampledSet a = sample_segment(vec({1.0, -0.5}), vec({1.0, 0.5}), 0.001);
  auto r = hyperplane_line_bound(h, a, 20000, rng);
  EXPECT_NEAR(r.lhs, 1.0, 0.03);
  EXPECT_NEAR(r.rhs, oracle::hyperplane_segment_rhs(), 3.0 * r.rhs_sigma + 0.01);
  EXPECT_GE(r.rhs + 3.0 * r.rhs_sigma, r.lhs);
  EXPECT_TRUE(r.distance_ok);
}

TEST(HyperplaneLineBound, EmptySet) {
  Rng rng(20);
  AffinePlane h{vec({1.0, 0.0}), LinearPlane(Eigen::MatrixXd(Eigen::RowVector2d(0.0, 1.0)))};
  SampledSet empty(1, 2, {}, {}, 0.01);
  auto r = hyperplane_line_bound(h, empty, 1000, rng);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
}

TEST(HyperplaneLineBound, SmallDiskInSpace) {
  Rng rng(21);
  Eigen::MatrixXd frame(2, 3);
  frame << 1, 0, 0, 0, 1, 0;
  AffinePlane h{vec({0.0, 0.0, 1.0}), LinearPlane(frame)};
  SampledSet disk = sample_planar_disk(vec({0.0, 0.0, 1.0}), frame, 0.1, 0.004);
  auto r = hyperplane_line_bound(h, disk, 100000, rng);
  EXPECT_NEAR(r.lhs, std::numbers::pi * 0.01, 0.1 * std::numbers::pi * 0.01);
  EXPECT_LE(r.lhs, r.rhs + 3.0 * r.rhs_sigma);
  EXPECT_TRUE(r.distance_ok);
}

TEST(HyperplaneLineBound, ThroughOriginThrows) {
  Rng rng(22);
  AffinePlane h{vec({0.0, 0.0}), LinearPlane(Eigen::MatrixXd(Eigen::RowVector2d(0.0, 1.0)))};
  SampledSet a = sample_segment(vec({0.0, -0.5}), vec({0.0, 0.5}), 0.01);
  EXPECT_THROW(hyperplane_line_bound(h, a, 100, rng), InputError);
}

TEST(GrassSelftest, Passes) {
  Rng rng(23);
  auto r = grassmannian_selftest(kDims, 200, rng);
  EXPECT_TRUE(r.passed) << r.failure;
  EXPECT_EQ(r.pairs, 800u);
  EXPECT_EQ(r.iso_violations, 0u);
}
