#include "plateau/complex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_set>

#include "plateau/errors.hpp"

namespace plateau {

namespace {

std::vector<DyadicScalar> to_dyadic(const Point& p) {
  std::vector<DyadicScalar> out;
  out.reserve(p.size());
  for (int i = 0; i < p.size(); ++i) out.push_back(DyadicScalar::from_double_or_throw(p[i]));
  return out;
}

// Calls f(alpha) for every alpha in {-1,0,1}^n.
void for_each_alpha(int n, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> alpha(n, -1);
  while (true) {
    f(alpha);
    int i = 0;
    while (i < n && alpha[i] == 1) alpha[i++] = -1;
    if (i == n) return;
    ++alpha[i];
  }
}

}  // namespace

std::size_t Complex::KeyHash::operator()(const std::vector<std::int64_t>& k) const {
  std::size_t h = 1469598103934665603ULL;
  for (auto v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
  return h;
}

Complex::Complex(int n, std::vector<Cell> cells) : n_(n) {
  cells_.reserve(cells.size());
  for (auto& c : cells) {
    if (c.ambient_dim() != n) throw InputError("cell ambient dimension differs from complex");
    if (lookup_.count(c)) continue;
    lookup_.emplace(c, cells_.size());
    cells_.push_back(std::move(c));
  }
  build_index();
}

std::optional<std::size_t> Complex::find(const Cell& c) const {
  auto it = lookup_.find(c);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

int Complex::max_scale_exp() const {
  int k = 0;
  for (const auto& c : cells_) k = std::max(k, c.scale_exp());
  return k;
}

int Complex::max_dim() const {
  int d = -1;
  for (const auto& c : cells_) d = std::max(d, c.dim());
  return d;
}

template <class F>
void Complex::for_buckets(const Point& lo, const Point& hi, F&& f) const {
  std::vector<std::int64_t> a(n_), b(n_), key(n_);
  for (int i = 0; i < n_; ++i) {
    a[i] = static_cast<std::int64_t>(std::floor(lo[i] / bucket_));
    b[i] = static_cast<std::int64_t>(std::floor(hi[i] / bucket_));
    key[i] = a[i];
  }
  while (true) {
    f(key);
    int i = 0;
    while (i < n_ && key[i] == b[i]) {
      key[i] = a[i];
      ++i;
    }
    if (i == n_) return;
    ++key[i];
  }
}

void Complex::build_index() {
  buckets_.clear();
  int kmin = 1 << 20, kmax = -1;
  for (const auto& c : cells_) {
    if (c.dim() == 0) continue;
    kmin = std::min(kmin, c.scale_exp());
    kmax = std::max(kmax, c.scale_exp());
  }
  int level = kmax < 0 ? 0 : std::max(kmin, kmax - 3);
  bucket_ = std::ldexp(1.0, -level);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    for_buckets(cells_[i].lo_point(), cells_[i].hi_point(),
                [&](const std::vector<std::int64_t>& key) { buckets_[key].push_back(static_cast<std::uint32_t>(i)); });
  }
}

std::vector<std::size_t> Complex::cells_meeting_box(const Point& lo, const Point& hi) const {
  std::vector<std::size_t> out;
  if (cells_.empty()) return out;
  for_buckets(lo, hi, [&](const std::vector<std::int64_t>& key) {
    auto it = buckets_.find(key);
    if (it == buckets_.end()) return;
    for (auto idx : it->second) out.push_back(idx);
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::vector<std::size_t> hits;
  for (auto idx : out) {
    const Cell& c = cells_[idx];
    bool meet = true;
    for (int i = 0; i < n_ && meet; ++i)
      if (c.lo_d(i) > hi[i] || c.hi_d(i) < lo[i]) meet = false;
    if (meet) hits.push_back(idx);
  }
  return hits;
}

std::vector<std::size_t> Complex::cells_meeting(const Cell& a) const {
  std::vector<std::size_t> out;
  for (auto idx : cells_meeting_box(a.lo_point(), a.hi_point()))
    if (closed_intersect(cells_[idx], a)) out.push_back(idx);
  return out;
}

std::vector<std::size_t> Complex::supersets(const Cell& a) const {
  std::vector<std::size_t> out;
  for (auto idx : cells_meeting_box(a.lo_point(), a.hi_point()))
    if (closed_contains(cells_[idx], a)) out.push_back(idx);
  return out;
}

std::optional<std::size_t> Complex::locate(const Point& x, double eps) const {
  if (x.size() != n_) throw InputError("locate: dimension mismatch");
  Point lo = x.array() - eps, hi = x.array() + eps;
  for (auto idx : cells_meeting_box(lo, hi))
    if (cell_membership(cells_[idx], x, eps) == Membership::Interior) return idx;
  return std::nullopt;
}

std::vector<std::size_t> Complex::cells_containing(const Point& x, double eps) const {
  std::vector<std::size_t> out;
  Point lo = x.array() - eps, hi = x.array() + eps;
  for (auto idx : cells_meeting_box(lo, hi))
    if (cell_membership(cells_[idx], x, eps) != Membership::Outside) out.push_back(idx);
  return out;
}

bool Complex::support_contains(const Point& x, double eps) const {
  Point lo = x.array() - eps, hi = x.array() + eps;
  for (auto idx : cells_meeting_box(lo, hi))
    if (cell_membership(cells_[idx], x, eps) != Membership::Outside) return true;
  return false;
}

Complex canonical_chart(int n) {
  if (n < 1 || n > 6) throw InputError("canonical_chart: n must lie in [1, 6]");
  return chart(std::vector<DyadicScalar>(n), 0);
}

Complex chart(const std::vector<DyadicScalar>& p, int k) {
  const int n = static_cast<int>(p.size());
  std::vector<Cell> cells;
  for_each_alpha(n, [&](const std::vector<int>& alpha) { cells.push_back(Cell::from_alpha(p, alpha, k)); });
  return Complex(n, std::move(cells));
}

Complex dyadic_chart(const std::vector<DyadicScalar>& p, int k) {
  for (const auto& c : p)
    if (!c.on_lattice(k)) throw InputError("dyadic_chart: center is not on the 2^-k lattice");
  return chart(p, k);
}

Complex dyadic_chart(const Point& p, int k) { return dyadic_chart(to_dyadic(p), k); }

Complex grid_complex(const Point& lo, const Point& hi, int k, bool include_boundary) {
  const int n = static_cast<int>(lo.size());
  std::vector<std::int64_t> jlo(n), jhi(n);
  for (int i = 0; i < n; ++i) {
    double a = std::ldexp(lo[i], k), b = std::ldexp(hi[i], k);
    if (a != std::floor(a) || b != std::floor(b)) throw InputError("grid_complex: box corners off the lattice");
    if (b <= a) throw InputError("grid_complex: empty box");
    jlo[i] = static_cast<std::int64_t>(a);
    jhi[i] = static_cast<std::int64_t>(b);
  }
  // Per coordinate: position j and whether the cell spans [j, j+1].
  std::vector<std::int64_t> pos(jlo);
  std::vector<int> spanning(n, 0);
  std::vector<Cell> cells;
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      std::vector<DyadicScalar> anchor(n);
      std::uint32_t span = 0;
      bool on_boundary = false;
      for (int c = 0; c < n; ++c) {
        anchor[c] = DyadicScalar(pos[c], k);
        if (spanning[c]) span |= 1U << c;
        else if (pos[c] == jlo[c] || pos[c] == jhi[c]) on_boundary = true;
      }
      if (include_boundary || !on_boundary) cells.emplace_back(std::move(anchor), span, k);
      return;
    }
    for (std::int64_t j = jlo[i]; j <= jhi[i]; ++j) {
      pos[i] = j;
      spanning[i] = 0;
      rec(i + 1);
      if (j < jhi[i]) {
        spanning[i] = 1;
        rec(i + 1);
      }
    }
  };
  rec(0);
  return Complex(n, std::move(cells));
}

ValidationReport validate_complex(const Complex& k, const ValidationOptions& opts) {
  ValidationReport rep;
  const int n = k.ambient_dim();
  auto report = [&](Violation v) {
    rep.valid = false;
    if (rep.violations.size() < opts.max_reported) rep.violations.push_back(std::move(v));
  };
  if (k.size() > opts.max_cells) {
    report({2, 0, 0, Point(), "complex exceeds the finiteness cap"});
    return rep;
  }
  for (std::size_t a = 0; a < k.size(); ++a) {
    const Cell& A = k.cell(a);
    const auto near = k.cells_meeting(A);
    for (auto b : near) {
      if (b <= a) continue;
      if (interiors_intersect(A, k.cell(b)))
        report({1, a, b, A.center(), "interiors of " + A.to_string() + " and " + k.cell(b).to_string() + " meet"});
    }

    // Axiom (iii): probe |K| around sample points of int(A).
    std::vector<const Cell*> supers;
    int level = A.dim() > 0 ? A.scale_exp() : -1;
    for (auto b : near) {
      const Cell& B = k.cell(b);
      if (B.dim() > 0) level = std::max(level, B.scale_exp());
      if (closed_contains(B, A)) supers.push_back(&B);
    }
    if (level < 0) continue;  // isolated vertex
    int probe_exp = level + opts.extra_levels;
    auto count_for = [&](int e) {
      double per = A.dim() > 0 ? std::ldexp(A.side(), e) - 1.0 : 1.0;
      return std::pow(std::max(per, 1.0), A.dim());
    };
    while (probe_exp > 0 && count_for(probe_exp) > static_cast<double>(opts.max_probes_per_cell)) --probe_exp;
    const double h = std::ldexp(1.0, -probe_exp);
    const std::int64_t m = A.dim() > 0 ? std::max<std::int64_t>(2, std::llround(A.side() / h)) : 2;

    std::vector<std::int64_t> idx(n, 1);
    bool failed = false;
    while (!failed) {
      Point y(n);
      for (int i = 0; i < n; ++i) y[i] = A.spans(i) ? A.lo_d(i) + (A.side() / m) * idx[i] : A.lo_d(i);
      for_each_alpha(n, [&](const std::vector<int>& e) {
        if (failed) return;
        bool zero = std::all_of(e.begin(), e.end(), [](int v) { return v == 0; });
        if (zero) return;
        Point z = y;
        for (int i = 0; i < n; ++i) z[i] += 0.5 * h * e[i];
        ++rep.probes;
        if (!k.support_contains(z)) return;
        for (const Cell* B : supers)
          if (cell_membership(*B, z, 0.0) == Membership::Interior) return;
        report({3, a, a, z, "V_A of " + A.to_string() + " is not a relative neighborhood"});
        failed = true;
      });
      int i = 0;
      while (i < n && (!A.spans(i) || idx[i] == m - 1)) {
        idx[i] = 1;
        ++i;
      }
      if (i == n) break;
      ++idx[i];
    }
  }
  return rep;
}

bool VARegion::contains(const Point& x, double eps) const {
  for (const auto& c : cells_)
    if (cell_membership(c, x, eps) == Membership::Interior) return true;
  return false;
}

VARegion neighborhood_VA(const Complex& k, const Cell& a) {
  if (!k.contains(a)) throw InputError("neighborhood_VA: cell is not in the complex");
  std::vector<Cell> cells;
  for (auto idx : k.supersets(a)) cells.push_back(k.cell(idx));
  return VARegion(std::move(cells));
}

bool in_cone_VA_kappa(const Cell& a, double kappa, const Point& x) {
  if (a.dim() == 0) throw InputError("in_cone_VA_kappa: 0-cells have empty boundary");
  if (kappa < 1.0) throw InputError("in_cone_VA_kappa: kappa must be >= 1");
  return dist_to_cell(a, x) < dist_to_cell_boundary(a, x) / kappa;
}

double kappa_n(int n) { return 1.0 + std::sqrt(static_cast<double>(n)); }

bool is_subcomplex(const Complex& l, const Complex& k) {
  for (const auto& a : l.cells()) {
    if (!k.contains(a)) return false;
    for (auto idx : k.supersets(a))
      if (!l.contains(k.cell(idx))) return false;
  }
  return true;
}

bool rigid_open_set_contains(const Complex& l, const Point& x) {
  if (l.empty()) return false;
  return l.locate(x, 0.0).has_value();
}

bool is_subordinate(const Complex& l, const Complex& k) {
  for (const auto& a : l.cells()) {
    bool found = false;
    for (auto idx : k.cells_meeting(a))
      if (interior_contains(k.cell(idx), a)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

namespace {

Complex maximal_impl(const Complex& u, bool strict) {
  std::vector<Cell> out;
  for (std::size_t a = 0; a < u.size(); ++a) {
    const Cell& A = u.cell(a);
    bool maximal = true;
    for (auto b : u.cells_meeting(A)) {
      if (b == a) continue;
      const Cell& B = u.cell(b);
      if (!interiors_intersect(A, B)) continue;
      if (interior_contains(B, A)) {
        maximal = false;
      } else if (!interior_contains(A, B) && strict) {
        throw AxiomViolation(1, A.to_string() + " and " + B.to_string() + " overlap without nesting");
      }
    }
    if (maximal) out.push_back(A);
  }
  return Complex(u.ambient_dim(), std::move(out));
}

}  // namespace

Complex paste_system(const ChartSystem& charts, std::size_t max_cells) {
  if (charts.empty()) return Complex();
  const int n = charts.front().ambient_dim();
  std::vector<Cell> all;
  for (const auto& c : charts) {
    if (c.ambient_dim() != n) throw InputError("paste_system: charts differ in dimension");
    all.insert(all.end(), c.cells().begin(), c.cells().end());
    if (all.size() > max_cells) throw AxiomViolation(2, "chart system exceeds the finiteness cap");
  }
  return maximal_impl(Complex(n, std::move(all)), true);
}

Complex maximal_cells(const Complex& u) { return maximal_impl(u, false); }

Complex whitney_decompose(const DomainOracle& domain, int k_max) {
  const Box& bb = domain.bounding_box();
  const int n = bb.dim();
  if (!bb.lo.allFinite() || !bb.hi.allFinite()) throw InputError("whitney_decompose: unbounded bounding box");
  auto admissible = [&](const std::vector<std::int64_t>& j, int k) {
    const double h = std::ldexp(1.0, -k);
    Point lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
      lo[i] = std::ldexp(static_cast<double>(j[i]), -k) - h;
      hi[i] = std::ldexp(static_cast<double>(j[i]), -k) + h;
    }
    return domain.contains_closed_box(lo, hi);
  };
  std::vector<Cell> cells;
  for (int k = 0; k <= k_max; ++k) {
    std::vector<std::int64_t> a(n), b(n), j(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<std::int64_t>(std::ceil(std::ldexp(bb.lo[i], k)));
      b[i] = static_cast<std::int64_t>(std::floor(std::ldexp(bb.hi[i], k)));
      if (b[i] < a[i]) goto next_level;
      j[i] = a[i];
    }
    while (true) {
      if (admissible(j, k)) {
        bool redundant = k > 0;
        if (redundant) {
          // Covered when every coarser chart within reach is itself admissible.
          std::vector<std::vector<std::int64_t>> choices(n);
          for (int i = 0; i < n; ++i) {
            if (j[i] % 2 == 0) choices[i] = {j[i] / 2};
            else choices[i] = {(j[i] - 1) / 2, (j[i] + 1) / 2};
          }
          std::vector<std::size_t> pick(n, 0);
          std::vector<std::int64_t> q(n);
          while (redundant) {
            for (int i = 0; i < n; ++i) q[i] = choices[i][pick[i]];
            if (!admissible(q, k - 1)) redundant = false;
            int i = 0;
            while (i < n && pick[i] + 1 == choices[i].size()) pick[i++] = 0;
            if (i == n) break;
            ++pick[i];
          }
        }
        if (!redundant) {
          std::vector<DyadicScalar> p(n);
          for (int i = 0; i < n; ++i) p[i] = DyadicScalar(j[i], k);
          for_each_alpha(n, [&](const std::vector<int>& alpha) { cells.push_back(Cell::from_alpha(p, alpha, k)); });
        }
      }
      int i = 0;
      while (i < n && j[i] == b[i]) {
        j[i] = a[i];
        ++i;
      }
      if (i == n) break;
      ++j[i];
    }
  next_level:;
  }
  if (cells.empty()) return Complex(n);
  return maximal_impl(Complex(n, std::move(cells)), true);
}

Skeleton skeleton(const Complex& k, int d) {
  if (d < 0 || d > k.ambient_dim()) throw InputError("skeleton: d out of range");
  Skeleton s;
  for (const auto& c : k.cells()) {
    if (c.dim() == d) s.exactly.push_back(c);
    if (c.dim() <= d) s.up_to.push_back(c);
  }
  return s;
}

}  // namespace plateau
