#include "plateau/cell.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plateau/errors.hpp"

namespace plateau {

namespace {

void hash_combine(std::size_t& h, std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); }

}  // namespace

Cell::Cell(std::vector<DyadicScalar> anchor, std::uint32_t span, int scale_exp)
    : anchor_(std::move(anchor)), span_(span), k_(scale_exp) {
  const int n = ambient_dim();
  if (n < 1 || n > 31) throw InputError("cell ambient dimension out of range");
  if (span_ >> n) throw InputError("span mask has bits beyond the ambient dimension");
  if (k_ < 0 || k_ > kMaxDyadicExponent) throw InputError("scale exponent out of range");
  if (span_ == 0) {
    k_ = 0;
    for (const auto& a : anchor_) k_ = std::max(k_, a.exponent());
  }
  hi_.resize(n);
  lo_d_.resize(n);
  hi_d_.resize(n);
  const DyadicScalar step = DyadicScalar::pow2_neg(k_);
  for (int i = 0; i < n; ++i) {
    hi_[i] = spans(i) ? anchor_[i] + step : anchor_[i];
    lo_d_[i] = anchor_[i].to_double();
    hi_d_[i] = hi_[i].to_double();
  }
  hash_ = std::hash<std::uint32_t>()(span_);
  hash_combine(hash_, static_cast<std::size_t>(k_));
  for (const auto& a : anchor_) {
    hash_combine(hash_, std::hash<std::int64_t>()(a.mantissa()));
    hash_combine(hash_, static_cast<std::size_t>(a.exponent()));
  }
}

Cell Cell::from_alpha(const std::vector<DyadicScalar>& p, const std::vector<int>& alpha, int k) {
  if (p.size() != alpha.size()) throw InputError("anchor and alpha differ in length");
  std::vector<DyadicScalar> lo = p;
  std::uint32_t span = 0;
  const DyadicScalar step = DyadicScalar::pow2_neg(k);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (alpha[i] == 0) continue;
    if (alpha[i] != 1 && alpha[i] != -1) throw InputError("alpha entries must be -1, 0 or 1");
    span |= 1U << i;
    if (alpha[i] == -1) lo[i] = p[i] - step;
  }
  return Cell(std::move(lo), span, k);
}

Point Cell::lo_point() const { return Eigen::Map<const Eigen::VectorXd>(lo_d_.data(), ambient_dim()); }
Point Cell::hi_point() const { return Eigen::Map<const Eigen::VectorXd>(hi_d_.data(), ambient_dim()); }
Point Cell::center() const { return 0.5 * (lo_point() + hi_point()); }
double Cell::side() const { return span_ == 0 ? 0.0 : std::ldexp(1.0, -k_); }
double Cell::diameter() const { return side() * std::sqrt(static_cast<double>(dim())); }

bool Cell::grid_aligned() const {
  for (const auto& a : anchor_)
    if (!a.on_lattice(k_)) return false;
  return true;
}

std::string Cell::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < ambient_dim(); ++i) {
    if (i) os << " x ";
    if (spans(i))
      os << "[" << lo_d_[i] << "," << hi_d_[i] << "]";
    else
      os << "{" << lo_d_[i] << "}";
  }
  os << "]";
  return os.str();
}

int cell_dim(const Cell& c) { return c.dim(); }

Membership cell_membership(const Cell& c, const Point& x, double eps) {
  if (x.size() != c.ambient_dim()) throw InputError("cell_membership: dimension mismatch");
  bool on_wall = false;
  for (int i = 0; i < c.ambient_dim(); ++i) {
    const double lo = c.lo_d(i), hi = c.hi_d(i), v = x[i];
    if (!c.spans(i)) {
      if (std::abs(v - lo) > eps) return Membership::Outside;
      continue;
    }
    if (v < lo - eps || v > hi + eps) return Membership::Outside;
    if (std::abs(v - lo) <= eps || std::abs(v - hi) <= eps) on_wall = true;
  }
  return on_wall ? Membership::Boundary : Membership::Interior;
}

Membership cell_membership(const Cell& c, const std::vector<DyadicScalar>& x) {
  if (static_cast<int>(x.size()) != c.ambient_dim()) throw InputError("cell_membership: dimension mismatch");
  bool on_wall = false;
  for (int i = 0; i < c.ambient_dim(); ++i) {
    if (!c.spans(i)) {
      if (x[i] != c.lo(i)) return Membership::Outside;
      continue;
    }
    if (x[i] < c.lo(i) || x[i] > c.hi(i)) return Membership::Outside;
    if (x[i] == c.lo(i) || x[i] == c.hi(i)) on_wall = true;
  }
  return on_wall ? Membership::Boundary : Membership::Interior;
}

bool closed_contains(const Cell& outer, const Cell& inner) {
  for (int i = 0; i < outer.ambient_dim(); ++i)
    if (inner.lo(i) < outer.lo(i) || inner.hi(i) > outer.hi(i)) return false;
  return true;
}

bool interior_contains(const Cell& outer, const Cell& inner) {
  for (int i = 0; i < outer.ambient_dim(); ++i) {
    if (inner.spans(i)) {
      if (!outer.spans(i) || inner.lo(i) < outer.lo(i) || inner.hi(i) > outer.hi(i)) return false;
    } else if (outer.spans(i)) {
      if (!(outer.lo(i) < inner.lo(i) && inner.lo(i) < outer.hi(i))) return false;
    } else if (outer.lo(i) != inner.lo(i)) {
      return false;
    }
  }
  return true;
}

bool interiors_intersect(const Cell& a, const Cell& b) {
  for (int i = 0; i < a.ambient_dim(); ++i) {
    const bool sa = a.spans(i), sb = b.spans(i);
    if (sa && sb) {
      if (!(std::max(a.lo(i), b.lo(i)) < std::min(a.hi(i), b.hi(i)))) return false;
    } else if (sa) {
      if (!(a.lo(i) < b.lo(i) && b.lo(i) < a.hi(i))) return false;
    } else if (sb) {
      if (!(b.lo(i) < a.lo(i) && a.lo(i) < b.hi(i))) return false;
    } else if (a.lo(i) != b.lo(i)) {
      return false;
    }
  }
  return true;
}

bool closed_intersect(const Cell& a, const Cell& b) {
  for (int i = 0; i < a.ambient_dim(); ++i)
    if (std::max(a.lo(i), b.lo(i)) > std::min(a.hi(i), b.hi(i))) return false;
  return true;
}

double dist_to_cell(const Cell& c, const Point& x) {
  double s = 0.0;
  for (int i = 0; i < c.ambient_dim(); ++i) {
    double d = 0.0;
    if (x[i] < c.lo_d(i)) d = c.lo_d(i) - x[i];
    else if (x[i] > c.hi_d(i)) d = x[i] - c.hi_d(i);
    s += d * d;
  }
  return std::sqrt(s);
}

double dist_to_cell_boundary(const Cell& c, const Point& x) {
  if (c.dim() == 0) return kInfinity;
  double normal2 = 0.0;   // squared offset from the affine span
  double outside2 = 0.0;  // squared distance to the box within the span
  double inside = kInfinity;
  bool is_inside = true;
  for (int i = 0; i < c.ambient_dim(); ++i) {
    if (!c.spans(i)) {
      double d = x[i] - c.lo_d(i);
      normal2 += d * d;
      continue;
    }
    double lo = c.lo_d(i), hi = c.hi_d(i);
    if (x[i] < lo) {
      is_inside = false;
      outside2 += (lo - x[i]) * (lo - x[i]);
    } else if (x[i] > hi) {
      is_inside = false;
      outside2 += (x[i] - hi) * (x[i] - hi);
    } else {
      inside = std::min({inside, x[i] - lo, hi - x[i]});
    }
  }
  if (is_inside) return std::sqrt(normal2 + inside * inside);
  return std::sqrt(normal2 + outside2);
}

}  // namespace plateau
