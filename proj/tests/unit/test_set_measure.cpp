#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "plateau/errors.hpp"
#include "plateau/set_measure.hpp"

using namespace plateau;
using oracle::vec;

namespace {

SampledSet unit_segment(double spacing = 0.001) { return sample_segment(vec({0, 0}), vec({1, 0}), spacing); }

double abs_cos_e1(const LinearPlane& v) { return std::abs(v.frame()(0, 0)); }

}  // namespace

TEST(HausdorffEstimate, UnitSegment) {
  EXPECT_NEAR(hausdorff_estimate(unit_segment(), 0.01), 1.0, 0.02);
}

TEST(HausdorffEstimate, Empty) {
  EXPECT_EQ(hausdorff_estimate(SampledSet(1, 2, {}, {}, 0.01), 0.01), 0.0);
}

TEST(HausdorffEstimate, SquarePerimeter) {
  EXPECT_NEAR(hausdorff_estimate(sample_square_boundary(vec({0, 0}), 1.0, 0.001), 0.01), 4.0, 0.08);
}

TEST(HausdorffEstimate, NonPositiveDeltaThrows) {
  EXPECT_THROW(hausdorff_estimate(unit_segment(), 0.0), InputError);
}

TEST(HausdorffEstimate, ScaleStability) {
  for (const auto& s : {unit_segment(), sample_circle(vec({0, 0}), 0.5, 0.0005)}) {
    const double a = hausdorff_estimate(s, 0.01), b = hausdorff_estimate(s, 0.005);
    EXPECT_LT(std::abs(a - b) / b, 0.10);
  }
}

TEST(WeightMass, Sums) {
  SampledSet s(1, 2, {vec({0, 0}), vec({1, 0}), vec({2, 0})}, {1.0, 2.0, 3.0}, 1.0);
  EXPECT_DOUBLE_EQ(weight_mass(s), 6.0);
  EXPECT_DOUBLE_EQ(weight_mass(SampledSet(1, 2, {}, {}, 1.0)), 0.0);
}

TEST(WeightMass, CalibratedAgainstOccupancy) {
  auto s = unit_segment(0.005);
  EXPECT_NEAR(weight_mass(s) / hausdorff_estimate(s), 1.0, 0.05);
}

TEST(ProjectMeasure, ParallelSegment) {
  EXPECT_NEAR(project_measure(unit_segment(), LinearPlane::coordinate(1, 2), 0.01), 1.0, 0.02);
}

TEST(ProjectMeasure, OrthogonalSegmentIsOneCell) {
  auto v = LinearPlane(Eigen::MatrixXd(Eigen::RowVector2d(0.0, 1.0)));
  EXPECT_DOUBLE_EQ(project_measure(unit_segment(), v, 0.01), 0.01);
}

TEST(ProjectMeasure, CollapsesTranslatesAlongTheKernel) {
  auto s = unit_segment();
  std::vector<Point> shifted;
  for (const auto& p : s.points()) shifted.push_back(p + vec({0.0, 0.37}));
  auto both = merge(s, s.with_points(shifted));
  const auto v = LinearPlane::coordinate(1, 2);
  EXPECT_DOUBLE_EQ(project_measure(both, v, 0.01), project_measure(s, v, 0.01));
}

TEST(ProjectMeasure, NeverAboveOccupancy) {
  Rng rng(1);
  auto s = sample_circle(vec({0.2, 0.1}), 0.4, 0.001);
  const double h = hausdorff_estimate(s, 0.01);
  for (int i = 0; i < 200; ++i) EXPECT_LE(project_measure(s, haar_sample(1, 2, rng), 0.01), 1.05 * h);
}

TEST(ZetaGauge, UnitSegment) {
  Rng rng(2);
  auto z = zeta_gauge(unit_segment(0.0005), 1000, 0.005, rng);
  EXPECT_EQ(z.samples, 1000u);
  EXPECT_NEAR(z.value, oracle::segment_gauge(), 3.0 * z.std_error);
}

TEST(ZetaGauge, BelowOccupancyOnExemplars) {
  Rng rng(3);
  const std::vector<SampledSet> sets = {unit_segment(), sample_circle(vec({0, 0}), 0.5, 0.001),
                                        sample_y_junction(vec({0, 0}), 0.5, 0.001),
                                        sample_square_boundary(vec({0, 0}), 1.0, 0.001), cantor_four_corner(4)};
  for (const auto& s : sets) {
    const double delta = 2.0 * s.resolution();
    EXPECT_LE(zeta_gauge(s, 200, delta, rng).value, 1.05 * hausdorff_estimate(s, delta));
  }
}

TEST(ZetaGauge, SubsetMonotone) {
  Rng a(4), b(4);
  auto s = sample_circle(vec({0, 0}), 0.5, 0.001);
  auto half = s.filter([](const Point& p) { return p[1] > 0.0; });
  auto zs = zeta_gauge(s, 300, 0.004, a);
  auto zh = zeta_gauge(half, 300, 0.004, b);
  EXPECT_LE(zh.value, zs.value + zs.std_error);
}

TEST(ZetaGauge, CantorDecaysWhileOccupancyStays) {
  Rng rng(5);
  std::vector<double> zeta, mass;
  for (int m = 2; m <= 4; ++m) {
    auto c = cantor_four_corner(m);
    zeta.push_back(zeta_gauge(c, 400, 2.0 * c.resolution(), rng).value);
    mass.push_back(hausdorff_estimate(c));
  }
  EXPECT_GT(zeta[0], zeta[1]);
  EXPECT_GT(zeta[1], zeta[2]);
  for (double m : mass) EXPECT_NEAR(m / mass.front(), 1.0, 0.10);
}

TEST(ZetaRestricted, FullDimensionalCellMatchesOccupancy) {
  Rng rng(6);
  Cell a(std::vector<DyadicScalar>{DyadicScalar(), DyadicScalar()}, 0b01, 0);
  auto s = merge(unit_segment(), sample_segment(vec({0.2, 0.5}), vec({0.8, 0.5}), 0.001));
  auto on_a = s.filter([&](const Point& p) { return cell_membership(a, p) != Membership::Outside; });
  auto z = zeta_restricted(s, a, 16, 0.01, rng);
  EXPECT_NEAR(z.value, hausdorff_estimate(on_a, 0.01), 0.05 * hausdorff_estimate(on_a, 0.01));
}

TEST(ZetaRestricted, EmptyIntersection) {
  Rng rng(7);
  Cell a(std::vector<DyadicScalar>{DyadicScalar::integer(5), DyadicScalar()}, 0b01, 0);
  EXPECT_EQ(zeta_restricted(unit_segment(), a, 16, 0.01, rng).value, 0.0);
}

TEST(ZetaRestricted, DiagonalOfAFace) {
  // Face [0,1]^2 x {0} of a cube; gauge of its diagonal averages sqrt(2)|cos| over lines of the face.
  Rng rng(8);
  Cell a(std::vector<DyadicScalar>(3), 0b011, 0);
  auto s = sample_segment(vec({0, 0, 0}), vec({1, 1, 0}), 0.0005);
  auto z = zeta_restricted(s, a, 2000, 0.005, rng);
  EXPECT_NEAR(z.value, std::sqrt(2.0) * oracle::segment_gauge(), 3.0 * z.std_error + 0.005);
}

TEST(ZetaRestricted, LowDimensionalCellThrows) {
  Rng rng(9);
  Cell v(std::vector<DyadicScalar>(2), 0, 0);
  EXPECT_THROW(zeta_restricted(unit_segment(), v, 8, 0.01, rng), InputError);
}

TEST(Integrand, BoundsEnforced) {
  auto bad = Integrand::position([](const Point&) { return 5.0; }, 2.0);
  EXPECT_THROW(bad(vec({0, 0}), nullptr), InputError);
  EXPECT_THROW(Integrand::position([](const Point&) { return 1.0; }, 0.5), InputError);
}

TEST(EnergyEval, HausdorffIsWeightMass) {
  auto s = sample_circle(vec({0, 0}), 0.3, 0.002);
  EXPECT_DOUBLE_EQ(energy_eval(s, Integrand::hausdorff()), weight_mass(s));
}

TEST(EnergyEval, ConstantScales) {
  auto s = unit_segment(0.01);
  EXPECT_NEAR(energy_eval(s, Integrand::position([](const Point&) { return 2.0; }, 2.0)), 2.0 * weight_mass(s),
              1e-12);
}

TEST(EnergyEval, AnisotropicOnHorizontalSegment) {
  auto s = unit_segment(0.005);
  auto aniso = Integrand::anisotropic([](const Point&, const LinearPlane& v) { return 1.0 + abs_cos_e1(v); }, 2.0);
  EXPECT_NEAR(energy_eval(s, aniso), 2.0, 0.1);
}

TEST(EnergyEval, WithinIntegrandBounds) {
  auto s = sample_circle(vec({0, 0}), 0.3, 0.002);
  const double lam = 3.0;
  auto i = Integrand::anisotropic(
      [](const Point& x, const LinearPlane& v) { return 1.0 + x.norm() + abs_cos_e1(v); }, lam);
  const double e = energy_eval(s, i), w = weight_mass(s);
  EXPECT_GE(e, w / lam);
  EXPECT_LE(e, w * lam);
}

TEST(EnergyEval, TooFewNeighborsThrows) {
  SampledSet s(1, 2, {vec({0, 0})}, {1.0}, 0.1);
  auto aniso = Integrand::anisotropic([](const Point&, const LinearPlane&) { return 1.0; }, 1.0);
  EXPECT_THROW(energy_eval(s, aniso), InputError);
}

TEST(CrossingFactor, AxisAndDiagonal) {
  EXPECT_DOUBLE_EQ(crossing_factor(LinearPlane::coordinate(1, 2)), 1.0);
  auto diag = LinearPlane::from_spanning(Eigen::MatrixXd(Eigen::RowVector2d(1.0, 1.0)));
  EXPECT_NEAR(crossing_factor(diag), std::sqrt(2.0), 1e-12);
}

TEST(AhlforsAudit, LineInterior) {
  auto s = sample_segment(vec({-1, 0}), vec({1, 0}), 0.0005);
  auto t = ahlfors_audit(s, {vec({0.1, 0})}, {0.05, 0.1, 0.2});
  EXPECT_NEAR(t.min_ratio, 2.0, 0.2);
  EXPECT_NEAR(t.max_ratio, 2.0, 0.2);
}

TEST(AhlforsAudit, ObliqueLineInterior) {
  auto s = sample_segment(vec({-0.6, -0.8}), vec({0.6, 0.8}), 0.0005);
  auto t = ahlfors_audit(s, {vec({0, 0})}, {0.1, 0.2});
  EXPECT_NEAR(t.min_ratio, 2.0, 0.2);
  EXPECT_NEAR(t.max_ratio, 2.0, 0.2);
}

TEST(AhlforsAudit, SegmentEndpoint) {
  auto s = unit_segment(0.0005);
  auto t = ahlfors_audit(s, {vec({0, 0})}, {0.1, 0.2});
  EXPECT_NEAR(t.min_ratio, 1.0, 0.1);
  EXPECT_NEAR(t.max_ratio, 1.0, 0.1);
}

TEST(AhlforsAudit, TriplePoint) {
  auto s = sample_y_junction(vec({0, 0}), 1.0, 0.0005, 0.3);
  auto t = ahlfors_audit(s, {vec({0, 0})}, {0.1, 0.2, 0.4});
  EXPECT_NEAR(t.min_ratio, 3.0, 0.3);
  EXPECT_NEAR(t.max_ratio, 3.0, 0.3);
}

TEST(QuasiminAudit, IdentityIsTriviallySatisfied) {
  auto s = unit_segment(0.001);
  auto r = quasimin_audit(s, s.points(), Ball{vec({0.5, 0}), 0.3}, {}, Integrand::hausdorff());
  EXPECT_EQ(r.moved, 0u);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_TRUE(r.satisfied);
}

TEST(QuasiminAudit, CrushToEndpointIsFlagged) {
  auto s = unit_segment(0.001);
  std::vector<Point> img;
  for (const auto& p : s.points()) img.push_back(p[0] > 0.3 && p[0] < 0.7 ? vec({0.3, 0.0}) : p);
  auto r = quasimin_audit(s, img, Ball{vec({0.5, 0}), 0.3}, {}, Integrand::hausdorff());
  EXPECT_FALSE(r.satisfied);
  EXPECT_GT(r.lhs, r.rhs);
}

TEST(QuasiminAudit, RigidMotionPreservesMeasure) {
  auto s = unit_segment(0.001);
  const double a = std::numbers::pi / 6;
  Eigen::Matrix2d rot;
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  const Point c = vec({0.5, 0});
  std::vector<Point> img;
  for (const auto& p : s.points()) img.push_back((p - c).norm() < 0.2 ? Point(c + rot * (p - c)) : p);
  auto r = quasimin_audit(s, img, Ball{c, 0.3}, {}, Integrand::hausdorff());
  EXPECT_TRUE(r.satisfied);
  EXPECT_NEAR(r.lhs / r.rhs, 1.0, 0.05);
}

TEST(QuasiminAudit, LowerOrderTermRescuesSmallLosses) {
  auto s = unit_segment(0.001);
  std::vector<Point> img;
  for (const auto& p : s.points()) img.push_back(p[0] > 0.45 && p[0] < 0.55 ? vec({0.45, 0.0}) : p);
  QuasiminParams strict, loose;
  loose.h = 1.0;
  const Ball b{vec({0.5, 0}), 0.3};
  EXPECT_FALSE(quasimin_audit(s, img, b, strict, Integrand::hausdorff()).satisfied);
  EXPECT_TRUE(quasimin_audit(s, img, b, loose, Integrand::hausdorff()).satisfied);
}

TEST(QuasiminAudit, BallOutsideDomainThrows) {
  auto s = unit_segment(0.01);
  auto dom = DomainOracle::open_box(Box{vec({0, -1}), vec({1, 1})});
  EXPECT_THROW(quasimin_audit(s, s.points(), Ball{vec({0.95, 0}), 0.2}, {}, Integrand::hausdorff(), &dom),
               InputError);
}

TEST(CantorFourCorner, Construction) {
  EXPECT_EQ(cantor_four_corner(0).size(), 1u);
  EXPECT_DOUBLE_EQ(cantor_four_corner(0).weight(0), 1.0);
  EXPECT_EQ(cantor_four_corner(1).size(), 4u);
  for (int m = 0; m <= 5; ++m) EXPECT_NEAR(weight_mass(cantor_four_corner(m)), 1.0, 1e-12);
  EXPECT_THROW(cantor_four_corner(9), InputError);
}

TEST(SampledSetCsv, BitExactRoundTrip) {
  Rng rng(10);
  std::vector<Point> pts;
  std::vector<double> w;
  for (int i = 0; i < 100; ++i) {
    pts.push_back(vec({rng.normal(), rng.uniform()}));
    w.push_back(rng.uniform(0.1, 2.0));
  }
  SampledSet s(1, 2, pts, w, 0.01);
  std::stringstream ss;
  write_csv(ss, s);
  SampledSet back = read_csv(ss, 1, 0.01);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back.point(i)[0], s.point(i)[0]);
    EXPECT_EQ(back.point(i)[1], s.point(i)[1]);
    EXPECT_EQ(back.weight(i), s.weight(i));
  }
}

TEST(SampledSetCsv, MalformedLineReportsLineNumber) {
  std::stringstream ss("x1,x2,weight\n0,0,1\n0.5,abc,1\n");
  try {
    read_csv(ss, 1);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}
