#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "plateau/cell.hpp"

namespace plateau {

// Finite set of cells with a hash index and a bucket grid for neighbor queries.
// Construction deduplicates; the complex axioms are checked by validate_complex.
class Complex {
 public:
  Complex() = default;
  explicit Complex(int n) : n_(n) {}
  Complex(int n, std::vector<Cell> cells);

  int ambient_dim() const { return n_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(std::size_t i) const { return cells_[i]; }
  std::optional<std::size_t> find(const Cell& c) const;
  bool contains(const Cell& c) const { return find(c).has_value(); }
  int max_scale_exp() const;
  int max_dim() const;

  // Cells whose closed box meets [lo, hi].
  std::vector<std::size_t> cells_meeting_box(const Point& lo, const Point& hi) const;
  std::vector<std::size_t> cells_meeting(const Cell& a) const;
  // Cells B with A ⊆ B (closed inclusion), A included when present.
  std::vector<std::size_t> supersets(const Cell& a) const;
  // Cell whose relative interior contains x (membership with tolerance eps).
  std::optional<std::size_t> locate(const Point& x, double eps = 0.0) const;
  std::vector<std::size_t> cells_containing(const Point& x, double eps = 0.0) const;
  bool support_contains(const Point& x, double eps = 0.0) const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& k) const;
  };
  void build_index();
  template <class F>
  void for_buckets(const Point& lo, const Point& hi, F&& f) const;

  int n_ = 0;
  std::vector<Cell> cells_;
  std::unordered_map<Cell, std::size_t, CellHash> lookup_;
  double bucket_ = 1.0;
  std::unordered_map<std::vector<std::int64_t>, std::vector<std::uint32_t>, KeyHash> buckets_;
};

// --- charts and constructions ---

Complex canonical_chart(int n);
// p + 2^-k E_n for any dyadic p (translated chart).
Complex chart(const std::vector<DyadicScalar>& p, int k);
// As chart(), but p must lie on the 2^-k lattice.
Complex dyadic_chart(const std::vector<DyadicScalar>& p, int k);
Complex dyadic_chart(const Point& p, int k);

// All cells of the level-k grid subdividing the box [lo, hi] (corners on the lattice).
// Cells contained in the box boundary are dropped when include_boundary is false.
Complex grid_complex(const Point& lo, const Point& hi, int k, bool include_boundary = true);

// --- validation and queries ---

struct Violation {
  int axiom = 0;  // 1, 2 or 3
  std::size_t cell_a = 0;
  std::size_t cell_b = 0;
  Point witness;
  std::string message;
};

struct ValidationReport {
  bool valid = true;
  std::vector<Violation> violations;
  std::size_t probes = 0;
};

struct ValidationOptions {
  // Probe spacing 2^-(level+2) where level is the finest scale around each cell.
  int extra_levels = 2;
  std::size_t max_probes_per_cell = 1u << 14;
  std::size_t max_cells = 2'000'000;
  std::size_t max_reported = 64;
};

ValidationReport validate_complex(const Complex& k, const ValidationOptions& opts = {});

class VARegion {
 public:
  explicit VARegion(std::vector<Cell> cells) : cells_(std::move(cells)) {}
  bool contains(const Point& x, double eps = 0.0) const;
  const std::vector<Cell>& cells() const { return cells_; }

 private:
  std::vector<Cell> cells_;
};

VARegion neighborhood_VA(const Complex& k, const Cell& a);
bool in_cone_VA_kappa(const Cell& a, double kappa, const Point& x);
double kappa_n(int n);

bool is_subcomplex(const Complex& l, const Complex& k);
bool rigid_open_set_contains(const Complex& l, const Point& x);
bool is_subordinate(const Complex& l, const Complex& k);

using ChartSystem = std::vector<Complex>;
Complex paste_system(const ChartSystem& charts, std::size_t max_cells = 2'000'000);
Complex maximal_cells(const Complex& union_of_cells);

Complex whitney_decompose(const DomainOracle& domain, int k_max);

struct Skeleton {
  std::vector<Cell> exactly;  // K^d
  std::vector<Cell> up_to;    // K^{<=d}
};
Skeleton skeleton(const Complex& k, int d);

}  // namespace plateau
