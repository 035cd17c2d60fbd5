#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plateau/domain.hpp"
#include "plateau/dyadic.hpp"

namespace plateau {

enum class Membership { Outside, Interior, Boundary };

// Dyadic cube face Π[p_i, p_i + 2^-k α_i], stored with p the lower corner and α ∈ {0,1}^n.
// A 0-cell carries the coarsest scale exponent on whose lattice its point lies.
class Cell {
 public:
  Cell() = default;
  Cell(std::vector<DyadicScalar> anchor, std::uint32_t span, int scale_exp);

  // Signed form with α_i ∈ {-1, 0, 1}.
  static Cell from_alpha(const std::vector<DyadicScalar>& p, const std::vector<int>& alpha, int k);

  int ambient_dim() const { return static_cast<int>(anchor_.size()); }
  int dim() const { return __builtin_popcount(span_); }
  std::uint32_t span() const { return span_; }
  bool spans(int i) const { return (span_ >> i) & 1U; }
  int scale_exp() const { return k_; }
  const std::vector<DyadicScalar>& anchor() const { return anchor_; }

  const DyadicScalar& lo(int i) const { return anchor_[i]; }
  const DyadicScalar& hi(int i) const { return hi_[i]; }
  double lo_d(int i) const { return lo_d_[i]; }
  double hi_d(int i) const { return hi_d_[i]; }
  Point lo_point() const;
  Point hi_point() const;
  Point center() const;
  double side() const;
  double diameter() const;

  // Anchor on the 2^-k lattice of its own scale.
  bool grid_aligned() const;

  std::size_t hash() const { return hash_; }
  std::string to_string() const;

  friend bool operator==(const Cell& a, const Cell& b) {
    return a.hash_ == b.hash_ && a.span_ == b.span_ && a.k_ == b.k_ && a.anchor_ == b.anchor_;
  }

 private:
  std::vector<DyadicScalar> anchor_;
  std::vector<DyadicScalar> hi_;
  std::vector<double> lo_d_;
  std::vector<double> hi_d_;
  std::uint32_t span_ = 0;
  int k_ = 0;
  std::size_t hash_ = 0;
};

struct CellHash {
  std::size_t operator()(const Cell& c) const { return c.hash(); }
};

int cell_dim(const Cell& c);

// Relative to the affine span of the cell; exact when eps = 0.
Membership cell_membership(const Cell& c, const Point& x, double eps = kEpsGeom);
Membership cell_membership(const Cell& c, const std::vector<DyadicScalar>& x);

// Exact set relations.
bool closed_contains(const Cell& outer, const Cell& inner);
bool interior_contains(const Cell& outer, const Cell& inner);
bool interiors_intersect(const Cell& a, const Cell& b);
bool closed_intersect(const Cell& a, const Cell& b);

double dist_to_cell(const Cell& c, const Point& x);
// Distance to the relative boundary of c (union of its facets).
double dist_to_cell_boundary(const Cell& c, const Point& x);

}  // namespace plateau
