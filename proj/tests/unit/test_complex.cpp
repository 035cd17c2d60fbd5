#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "plateau/complex.hpp"
#include "plateau/errors.hpp"
#include "plateau/rng.hpp"

using namespace plateau;
using oracle::vec;

namespace {

std::vector<DyadicScalar> dy(std::initializer_list<double> xs) {
  std::vector<DyadicScalar> out;
  for (double x : xs) out.push_back(DyadicScalar::from_double_or_throw(x));
  return out;
}

std::set<std::string> cell_names(const Complex& k) {
  std::set<std::string> s;
  for (const auto& c : k.cells()) s.insert(c.to_string());
  return s;
}

// Two unit squares side by side with all their faces except possibly the shared edge.
Complex two_squares(bool with_shared_edge) {
  Complex grid = grid_complex(vec({0, 0}), vec({2, 1}), 0);
  std::vector<Cell> cells;
  Cell shared(dy({1.0, 0.0}), 0b10, 0);
  for (const auto& c : grid.cells())
    if (with_shared_edge || !(c == shared)) cells.push_back(c);
  return Complex(2, cells);
}

std::size_t max_containing(const Complex& k) {
  std::size_t worst = 0;
  for (const auto& a : k.cells()) worst = std::max(worst, k.supersets(a).size());
  return worst;
}

}  // namespace

TEST(CanonicalChart, CellCounts) {
  EXPECT_EQ(canonical_chart(1).size(), 3u);
  EXPECT_EQ(canonical_chart(2).size(), 9u);
  EXPECT_EQ(canonical_chart(3).size(), 27u);
  EXPECT_EQ(canonical_chart(4).size(), 81u);
  EXPECT_THROW(canonical_chart(0), InputError);
}

TEST(CanonicalChart, LineCells) {
  auto names = cell_names(canonical_chart(1));
  auto expect = cell_names(Complex(1, {Cell(dy({0.0}), 0, 0), Cell(dy({-1.0}), 1, 0), Cell(dy({0.0}), 1, 0)}));
  EXPECT_EQ(names, expect);
}

TEST(DyadicChart, OriginLevelZeroIsCanonical) {
  EXPECT_EQ(cell_names(dyadic_chart(dy({0.0, 0.0}), 0)), cell_names(canonical_chart(2)));
}

TEST(DyadicChart, HalfScaleAroundCenter) {
  Complex c = dyadic_chart(vec({0.5, 0.5}), 1);
  ASSERT_EQ(c.size(), 9u);
  for (const auto& cell : c.cells()) {
    EXPECT_EQ(cell.scale_exp(), 1);
    EXPECT_EQ(cell_membership(cell, vec({0.5, 0.5})) != Membership::Outside, true);
  }
  EXPECT_TRUE(c.support_contains(vec({0.0, 0.0})));
  EXPECT_TRUE(c.support_contains(vec({1.0, 1.0})));
  EXPECT_FALSE(c.support_contains(vec({1.0 + 1e-3, 0.5})));
  EXPECT_THROW(dyadic_chart(vec({0.25, 0.5}), 1), InputError);
}

TEST(ValidateComplex, CanonicalChartIsValid) {
  for (int n = 1; n <= 3; ++n) EXPECT_TRUE(validate_complex(canonical_chart(n)).valid) << n;
}

TEST(ValidateComplex, TwoSquaresWithAllFaces) {
  EXPECT_TRUE(validate_complex(two_squares(true)).valid);
}

TEST(ValidateComplex, TwoSquaresMissingSharedEdge) {
  // Points of the shared edge lie in |K| but in no cell interior, so the V_A of its endpoints
  // cannot be a relative neighborhood.
  auto rep = validate_complex(two_squares(false));
  EXPECT_FALSE(rep.valid);
  bool axiom3 = false;
  for (const auto& v : rep.violations) axiom3 = axiom3 || v.axiom == 3;
  EXPECT_TRUE(axiom3);
}

TEST(ValidateComplex, OverlappingSquaresViolateDisjointness) {
  Complex k(2, {Cell(dy({0.0, 0.0}), 0b11, 0), Cell(dy({0.5, 0.0}), 0b11, 1), Cell(dy({0.5, 0.5}), 0b11, 1)});
  Complex shifted(2, {Cell(dy({0.0, 0.0}), 0b11, 0), Cell(dy({0.5, 0.0}), 0b11, 0)});
  for (const auto* c : {&k, &shifted}) {
    auto rep = validate_complex(*c);
    EXPECT_FALSE(rep.valid);
    ASSERT_FALSE(rep.violations.empty());
    EXPECT_EQ(rep.violations.front().axiom, 1);
  }
}

TEST(NeighborhoodVA, EdgeOfCanonicalChart) {
  auto e2 = canonical_chart(2);
  Cell a(dy({0.0, 0.0}), 0b01, 0);
  VARegion va = neighborhood_VA(e2, a);
  Rng rng(5);
  for (int i = 0; i < 4000; ++i) {
    Point x = vec({rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)});
    const bool expect = x[0] > 0 && x[0] < 1 && x[1] > -1 && x[1] < 1;
    EXPECT_EQ(va.contains(x), expect) << x.transpose();
  }
  EXPECT_FALSE(va.contains(vec({0.0, 0.5})));
}

TEST(NeighborhoodVA, TopCellIsItsInterior) {
  auto e2 = canonical_chart(2);
  Cell a(dy({0.0, 0.0}), 0b11, 0);
  VARegion va = neighborhood_VA(e2, a);
  EXPECT_EQ(va.cells().size(), 1u);
  EXPECT_TRUE(va.contains(vec({0.5, 0.5})));
  EXPECT_FALSE(va.contains(vec({1.0, 0.5})));
}

TEST(NeighborhoodVA, VertexGivesOpenSquare) {
  auto e2 = canonical_chart(2);
  VARegion va = neighborhood_VA(e2, Cell(dy({0.0, 0.0}), 0, 0));
  EXPECT_EQ(va.cells().size(), 9u);
  EXPECT_TRUE(va.contains(vec({0.0, 0.0})));
  EXPECT_TRUE(va.contains(vec({-0.99, 0.99})));
  EXPECT_FALSE(va.contains(vec({-1.0, 0.5})));
}

TEST(NeighborhoodVA, CellOutsideComplexThrows) {
  EXPECT_THROW(neighborhood_VA(canonical_chart(2), Cell(dy({3.0, 0.0}), 0b01, 0)), InputError);
}

TEST(ConeVA, InteriorPointAlwaysInside) {
  Cell a(dy({0.0, 0.0}), 0b01, 0);
  for (double kappa : {1.0, 2.0, 100.0}) EXPECT_TRUE(in_cone_VA_kappa(a, kappa, vec({0.3, 0.0})));
}

TEST(ConeVA, NearbyPointInsideAtKappaTwo) {
  Cell a(dy({0.0, 0.0}), 0b01, 0);
  const double d_a = 0.1, d_boundary = std::sqrt(0.25 + 0.01);
  ASSERT_LT(d_a, d_boundary / 2.0);
  EXPECT_TRUE(in_cone_VA_kappa(a, 2.0, vec({0.5, 0.1})));
}

TEST(ConeVA, DistanceAttainedOnBoundaryIsOutside) {
  Cell a(dy({0.0, 0.0}), 0b01, 0);
  EXPECT_FALSE(in_cone_VA_kappa(a, 2.0, vec({-0.5, 0.0})));
  EXPECT_THROW(in_cone_VA_kappa(Cell(dy({0.0, 0.0}), 0, 0), 2.0, vec({0.1, 0.0})), InputError);
}

TEST(ConeVA, ConeInsideVAForCanonicalCharts) {
  Rng rng(9);
  for (int n = 2; n <= 3; ++n) {
    auto en = canonical_chart(n);
    const double kappa = kappa_n(n);
    for (const auto& a : en.cells()) {
      if (a.dim() == 0) continue;
      VARegion va = neighborhood_VA(en, a);
      for (int i = 0; i < 3000; ++i) {
        Point x(n);
        for (int j = 0; j < n; ++j) x[j] = rng.uniform(-1.5, 1.5);
        if (in_cone_VA_kappa(a, kappa, x)) EXPECT_TRUE(va.contains(x)) << a.to_string() << " " << x.transpose();
      }
    }
  }
}

TEST(Subcomplex, SelfAndSquares) {
  auto e2 = canonical_chart(2);
  EXPECT_TRUE(is_subcomplex(e2, e2));
  std::vector<Cell> squares;
  for (const auto& c : e2.cells())
    if (c.dim() == 2) squares.push_back(c);
  EXPECT_TRUE(is_subcomplex(Complex(2, squares), e2));
  EXPECT_FALSE(is_subcomplex(Complex(2, {Cell(dy({0.0, 0.0}), 0b01, 0)}), e2));
}

TEST(RigidOpenSet, Membership) {
  auto e2 = canonical_chart(2);
  EXPECT_TRUE(rigid_open_set_contains(e2, vec({0.0, 0.0})));
  EXPECT_FALSE(rigid_open_set_contains(e2, vec({1.0, 0.5})));
  EXPECT_FALSE(rigid_open_set_contains(Complex(2), vec({0.0, 0.0})));
}

TEST(Subordination, FinerGridInsideCoarser) {
  auto coarse = grid_complex(vec({0, 0}), vec({2, 2}), 0);
  auto fine = grid_complex(vec({0, 0}), vec({2, 2}), 1);
  EXPECT_TRUE(is_subordinate(fine, coarse));
  EXPECT_FALSE(is_subordinate(coarse, fine));
  EXPECT_TRUE(is_subordinate(coarse, coarse));
}

TEST(Subordination, ThirdShiftedChartIsNot) {
  const double third = std::ldexp(std::round(std::ldexp(1.0 / 3.0, 40)), -40);
  auto shifted = chart(dy({third, 0.0}), 0);
  EXPECT_FALSE(is_subordinate(shifted, canonical_chart(2)));
}

TEST(Subordination, MutualImpliesEqual) {
  auto a = grid_complex(vec({0, 0}), vec({1, 1}), 1);
  auto b = grid_complex(vec({0, 0}), vec({1, 1}), 1);
  ASSERT_TRUE(is_subordinate(a, b) && is_subordinate(b, a));
  EXPECT_EQ(cell_names(a), cell_names(b));
}

TEST(PasteSystem, IntegerTranslatesGiveCanonicalGrid) {
  ChartSystem charts;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) charts.push_back(dyadic_chart(vec({double(i), double(j)}), 0));
  Complex pasted = paste_system(charts);
  EXPECT_EQ(cell_names(pasted), cell_names(grid_complex(vec({-3, -3}), vec({3, 3}), 0, false)));
  EXPECT_LE(max_containing(pasted), 9u);
  EXPECT_TRUE(validate_complex(pasted).valid);
}

TEST(PasteSystem, SingleChart) {
  EXPECT_EQ(cell_names(paste_system({canonical_chart(2)})), cell_names(canonical_chart(2)));
}

TEST(PasteSystem, DyadicNestedChartsPaste) {
  // A half-scale chart centered on a lattice point nests inside the unit chart.
  Complex k = paste_system({canonical_chart(2), dyadic_chart(vec({0.5, 0.5}), 1)});
  EXPECT_TRUE(validate_complex(k).valid);
}

TEST(PasteSystem, OverlapWithoutNestingThrows) {
  try {
    paste_system({canonical_chart(2), chart(dy({0.5, 0.5}), 0)});
    FAIL() << "expected an axiom violation";
  } catch (const AxiomViolation& e) {
    EXPECT_EQ(e.axiom(), 1);
  }
}

TEST(PasteSystem, PairwiseDisjointInteriors) {
  Rng rng(2);
  ChartSystem charts;
  for (int i = 0; i < 12; ++i) {
    const int k = static_cast<int>(rng.below(3));
    const double h = std::ldexp(1.0, -k);
    charts.push_back(dyadic_chart(vec({h * double(rng.below(5)), h * double(rng.below(5))}), k));
  }
  Complex k = paste_system(charts);
  for (std::size_t a = 0; a < k.size(); ++a)
    for (std::size_t b = a + 1; b < k.size(); ++b) EXPECT_FALSE(interiors_intersect(k.cell(a), k.cell(b)));
  EXPECT_LE(max_containing(k), 9u);
}

TEST(Whitney, UnitSquareSandwich) {
  auto dom = DomainOracle::open_box(Box{vec({0, 0}), vec({1, 1})});
  const int kmax = 6;
  Complex k = whitney_decompose(dom, kmax);
  ASSERT_FALSE(k.empty());
  EXPECT_TRUE(validate_complex(k).valid);
  EXPECT_LE(max_containing(k), 9u);
  for (const auto& c : k.cells()) {
    EXPECT_TRUE(dom.contains_closed_box(c.lo_point(), c.hi_point()));
    if (c.dim() != 2) continue;
    // The chart generating a top cell reaches one side length beyond it and still lies in X.
    EXPECT_GT(dom.bounding_box().dist_inf_to_complement(c.center()), 1.5 * c.side() - 1e-12);
  }
  Rng rng(4);
  for (int i = 0; i < 5000; ++i) {
    Point x = vec({rng.uniform(), rng.uniform()});
    const double r = std::min(1.0, dom.bounding_box().dist_inf_to_complement(x));
    if (r < std::ldexp(1.0, -kmax + 2)) continue;
    auto cs = k.cells_containing(x);
    ASSERT_FALSE(cs.empty()) << x.transpose();
    double h = 0.0;
    for (auto j : cs) h = std::max(h, k.cell(j).side());
    EXPECT_LE(h, r);
    EXPECT_GE(h, r / 8.0);
  }
}

TEST(Whitney, FullSpaceIsUniformCoarseGrid) {
  auto dom = DomainOracle::full_space(Box{vec({0, 0}), vec({4, 4})});
  Complex k = whitney_decompose(dom, 4);
  for (const auto& c : k.cells()) EXPECT_EQ(c.scale_exp(), 0);
  EXPECT_TRUE(validate_complex(k).valid);
}

TEST(Whitney, PunctureRefinesTowardsCenter) {
  auto dom = DomainOracle::box_minus_points(Box{vec({0, 0}), vec({1, 1})}, {vec({0.5, 0.5})});
  Complex k = whitney_decompose(dom, 7);
  EXPECT_TRUE(validate_complex(k).valid);
  double near = 1.0, far = 0.0;
  for (const auto& c : k.cells()) {
    if (c.dim() != 2) continue;
    EXPECT_TRUE(dom.contains_closed_box(c.lo_point(), c.hi_point()));
    const double d = (c.center() - vec({0.5, 0.5})).norm();
    if (d < 0.1) near = std::min(near, c.side());
    if (d > 0.3 && d < 0.4) far = std::max(far, c.side());
  }
  EXPECT_LT(near, far);
}

TEST(Skeleton, Filtration) {
  auto e2 = canonical_chart(2);
  EXPECT_EQ(skeleton(e2, 1).exactly.size(), 4u);
  EXPECT_EQ(skeleton(e2, 1).up_to.size(), 5u);
  EXPECT_EQ(skeleton(e2, 2).exactly.size(), 4u);
  EXPECT_EQ(skeleton(grid_complex(vec({0, 0}), vec({2, 2}), 0), 0).exactly.size(), 9u);
  EXPECT_THROW(skeleton(e2, 3), InputError);
}
