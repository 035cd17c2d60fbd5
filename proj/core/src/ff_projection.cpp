#include "plateau/ff_projection.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "plateau/errors.hpp"
#include "plateau/lipschitz.hpp"
#include "plateau/set_measure.hpp"

namespace plateau {

namespace {

bool on_relative_boundary(const Cell& a, const Point& y) {
  for (int i = 0; i < a.ambient_dim(); ++i)
    if (a.spans(i) && (y[i] == a.lo_d(i) || y[i] == a.hi_d(i))) return true;
  return false;
}

double effective_delta(const SampledSet& s, double delta) {
  double d = delta > 0.0 ? delta : 2.0 * s.resolution();
  if (!(d > 0.0)) throw InputError("occupancy scale must be positive");
  return d;
}

SampledSet as_set(const SampledSet& like, std::vector<Point> pts) {
  std::vector<double> w(pts.size(), 1.0);
  return SampledSet(like.d(), like.n(), std::move(pts), std::move(w), like.resolution());
}

double face_measure(const Cell& face, const std::vector<Point>& pts, double delta, std::size_t planes, Rng& rng,
                    const SampledSet& like) {
  std::vector<Point> on;
  for (const auto& p : pts)
    if (cell_membership(face, p, 0.0) != Membership::Outside) on.push_back(p);
  if (on.empty()) return 0.0;
  return zeta_restricted(as_set(like, std::move(on)), face, planes, delta, rng).value;
}

}  // namespace

Point radial_project(const Cell& a, const Point& x, const Point& y, double guard) {
  const int n = a.ambient_dim();
  if (x.size() != n || y.size() != n) throw InputError("radial_project: dimension mismatch");
  if (a.dim() == 0) throw InputError("radial_project: 0-cell has no interior");
  if (cell_membership(a, x, 0.0) != Membership::Interior) throw InputError("radial_project: center not interior");
  if (cell_membership(a, y, kEpsGeom) == Membership::Outside) throw InputError("radial_project: point outside cell");
  if (on_relative_boundary(a, y)) return y;

  Point dir = y - x;
  double t = kInfinity;
  int hit = -1;
  bool hit_hi = false;
  for (int i = 0; i < n; ++i) {
    if (!a.spans(i) || dir[i] == 0.0) continue;
    double ti = dir[i] > 0.0 ? (a.hi_d(i) - x[i]) / dir[i] : (a.lo_d(i) - x[i]) / dir[i];
    if (ti < t) {
      t = ti;
      hit = i;
      hit_hi = dir[i] > 0.0;
    }
  }
  if (hit < 0) return y;  // y == x

  const double r = dir.norm();
  const bool inside_guard = guard > 0.0 && r < guard;
  if (inside_guard) t *= r / guard;
  Point out = x + t * dir;
  for (int i = 0; i < n; ++i) {
    if (!a.spans(i)) {
      out[i] = a.lo_d(i);
      continue;
    }
    out[i] = std::clamp(out[i], a.lo_d(i), a.hi_d(i));
  }
  if (!inside_guard) out[hit] = hit_hi ? a.hi_d(hit) : a.lo_d(hit);
  return out;
}

void half_cell_bounds(const Cell& a, Point& lo, Point& hi) {
  lo = a.lo_point();
  hi = a.hi_point();
  const double q = a.side() / 4.0;
  for (int i = 0; i < a.ambient_dim(); ++i)
    if (a.spans(i)) {
      lo[i] += q;
      hi[i] -= q;
    }
}

Point sample_half_cell(const Cell& a, Rng& rng) {
  Point lo, hi;
  half_cell_bounds(a, lo, hi);
  Point x = lo;
  for (int i = 0; i < a.ambient_dim(); ++i)
    if (a.spans(i)) x[i] = rng.uniform(lo[i], hi[i]);
  return x;
}

std::vector<Cell> proper_faces(const Cell& a, int min_dim) {
  std::vector<int> axes;
  for (int i = 0; i < a.ambient_dim(); ++i)
    if (a.spans(i)) axes.push_back(i);
  const int m = static_cast<int>(axes.size());
  std::vector<Cell> out;
  // Each spanned axis is free (0), fixed low (1) or fixed high (2).
  std::size_t total = 1;
  for (int i = 0; i < m; ++i) total *= 3;
  for (std::size_t code = 1; code < total; ++code) {
    std::size_t c = code;
    std::vector<DyadicScalar> anchor = a.anchor();
    std::uint32_t span = a.span();
    int fixed = 0;
    for (int j = 0; j < m; ++j, c /= 3) {
      int s = static_cast<int>(c % 3);
      if (s == 0) continue;
      ++fixed;
      span &= ~(1U << axes[j]);
      if (s == 2) anchor[axes[j]] = a.hi(axes[j]);
    }
    if (m - fixed < min_dim) continue;
    out.emplace_back(std::move(anchor), span, a.scale_exp());
  }
  return out;
}

double occupancy_measure(const std::vector<Point>& points, int d, double delta) {
  if (points.empty()) return 0.0;
  OccupancyGrid g(static_cast<int>(points.front().size()), delta);
  for (const auto& p : points) g.insert(p);
  g.finalize();
  return g.mass(d);
}

double AverageProjectionReport::quantile(double q) const {
  if (ratios.empty()) return 0.0;
  std::size_t i = static_cast<std::size_t>(std::clamp(q, 0.0, 1.0) * (ratios.size() - 1) + 0.5);
  return ratios[i];
}

AverageProjectionReport average_projection_check(const Cell& q, const SampledSet& s, std::size_t n_centers, Rng& rng,
                                                 double delta) {
  delta = effective_delta(s, delta);
  std::vector<Point> inside;
  for (const auto& p : s.points())
    if (cell_membership(q, p, 0.0) != Membership::Outside) inside.push_back(p);
  if (inside.empty()) throw InputError("average_projection_check: set misses the cube");
  const double source = occupancy_measure(inside, s.d(), delta);
  AverageProjectionReport rep;
  for (std::size_t c = 0; c < n_centers; ++c) {
    Point x = sample_half_cell(q, rng);
    double clearance = kInfinity;
    for (const auto& p : inside) clearance = std::min(clearance, (p - x).norm());
    if (clearance < delta) {
      ++rep.rejected;
      continue;
    }
    std::vector<Point> img;
    img.reserve(inside.size());
    for (const auto& p : inside) img.push_back(radial_project(q, x, p));
    rep.ratios.push_back(occupancy_measure(img, s.d(), delta) / source);
  }
  if (rep.ratios.empty()) throw CenterExhausted("average_projection_check: no admissible centers");
  rep.admissible = rep.ratios.size();
  double sum = 0.0;
  for (double r : rep.ratios) sum += r;
  rep.avg_ratio = sum / rep.ratios.size();
  std::sort(rep.ratios.begin(), rep.ratios.end());
  return rep;
}

namespace {

struct CenterProblem {
  const Cell* a = nullptr;
  int d = 0;
  double delta = 0.0;
  std::vector<Point> in_a;   // points of F in the closed cell
  std::vector<char> moving;  // in the relative interior
  struct Parent {
    std::vector<Point> fixed;  // points in B not moved by A's projection
    double source = 0.0;
  };
  std::vector<Parent> parents;
  std::vector<Cell> faces;
  double zeta_source = 0.0;
};

CenterProblem make_problem(const Cell& a, const SampledSet& f, const std::vector<Cell>& parents, double delta,
                           const FFOptions& opts, Rng& rng) {
  CenterProblem pb;
  pb.a = &a;
  pb.d = f.d();
  pb.delta = delta;
  for (const auto& p : f.points()) {
    Membership m = cell_membership(a, p, 0.0);
    if (m == Membership::Outside) continue;
    pb.in_a.push_back(p);
    pb.moving.push_back(m == Membership::Interior);
  }
  std::vector<Cell> all_parents{a};
  for (const auto& b : parents)
    if (!(b == a) && closed_contains(b, a)) all_parents.push_back(b);
  for (const auto& b : all_parents) {
    CenterProblem::Parent par;
    std::vector<Point> src;
    for (const auto& p : f.points()) {
      if (cell_membership(b, p, 0.0) == Membership::Outside) continue;
      src.push_back(p);
      if (cell_membership(a, p, 0.0) != Membership::Interior) par.fixed.push_back(p);
    }
    par.source = occupancy_measure(src, pb.d, delta);
    pb.parents.push_back(std::move(par));
  }
  if (a.dim() > pb.d) {
    pb.faces = proper_faces(a, pb.d);
    std::vector<Point> moving_pts;
    for (std::size_t i = 0; i < pb.in_a.size(); ++i)
      if (pb.moving[i]) moving_pts.push_back(pb.in_a[i]);
    if (!moving_pts.empty()) {
      Rng zr = rng.derive("zeta-source");
      pb.zeta_source = zeta_restricted(as_set(f, pb.in_a), a, opts.zeta_planes, delta, zr).value;
    }
  }
  return pb;
}

}  // namespace

CenterChoice select_center(const Cell& a, const SampledSet& f, const std::vector<Cell>& parents,
                           const FFOptions& opts, Rng& rng) {
  if (a.dim() < 1) throw InputError("select_center: cell must have positive dimension");
  if (opts.lambda < 1.0 || opts.c_dist <= 0.0 || opts.max_tries < 1) throw InputError("select_center: bad options");
  const double delta = effective_delta(f, opts.delta);
  CenterProblem pb = make_problem(a, f, parents, delta, opts, rng);
  const double need = opts.c_dist * a.diameter();

  CenterChoice choice;
  for (int t = 1; t <= opts.max_tries; ++t) {
    Point x = sample_half_cell(a, rng);
    double clearance = kInfinity;
    for (const auto& p : pb.in_a) clearance = std::min(clearance, (p - x).norm());
    if (clearance < need) continue;
    const double guard = 0.5 * std::min(clearance, dist_to_cell_boundary(a, x));

    std::vector<Point> moved;
    for (std::size_t i = 0; i < pb.in_a.size(); ++i)
      if (pb.moving[i]) moved.push_back(radial_project(a, x, pb.in_a[i], guard));

    double ratio_h = 0.0;
    bool ok = true;
    for (const auto& par : pb.parents) {
      if (par.source <= 0.0) continue;
      std::vector<Point> img = par.fixed;
      img.insert(img.end(), moved.begin(), moved.end());
      double r = occupancy_measure(img, pb.d, delta) / par.source;
      ratio_h = std::max(ratio_h, r);
      if (r > opts.lambda) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    double ratio_z = 0.0;
    if (pb.zeta_source > 0.0) {
      std::vector<Point> img;
      for (std::size_t i = 0; i < pb.in_a.size(); ++i)
        if (!pb.moving[i]) img.push_back(pb.in_a[i]);
      img.insert(img.end(), moved.begin(), moved.end());
      Rng zr = rng.derive("zeta-image", static_cast<std::uint64_t>(t));
      for (const auto& face : pb.faces) {
        double r = face_measure(face, img, delta, opts.zeta_planes, zr, f) / pb.zeta_source;
        ratio_z = std::max(ratio_z, r);
        if (r > opts.lambda) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) continue;

    choice.projection = {a, x, guard};
    choice.clearance = clearance;
    choice.ratio_h = ratio_h;
    choice.ratio_zeta = ratio_z;
    choice.tries = t;
    return choice;
  }
  throw CenterExhausted("no admissible center in " + a.to_string() + " after " + std::to_string(opts.max_tries) +
                        " tries; the set is too dense at this resolution");
}

SampledSet ff_sweep(const Complex& k, int m, const SampledSet& f, const CenterMap& centers) {
  std::vector<Point> pts = f.points();
  for (auto& p : pts) {
    auto idx = k.locate(p, 0.0);
    if (!idx || k.cell(*idx).dim() != m) continue;
    auto it = centers.find(k.cell(*idx));
    if (it == centers.end()) throw InputError("ff_sweep: no center for occupied cell " + k.cell(*idx).to_string());
    p = radial_project(it->second, p);
  }
  return f.with_points(std::move(pts));
}

bool in_low_skeleton(const Complex& k, int d, const Point& x, double eps) {
  for (auto i : k.cells_containing(x, eps))
    if (k.cell(i).dim() > d && cell_membership(k.cell(i), x, eps) == Membership::Interior) return false;
  return true;
}

FFResult ff_project(const Complex& k, int d, const SampledSet& e, const FFOptions& opts, Rng& rng) {
  const int n = k.ambient_dim();
  if (e.n() != n) throw InputError("ff_project: set and complex dimensions differ");
  if (d < 0 || d >= n) throw InputError("ff_project: d must lie in [0, n)");
  const double delta = effective_delta(e, opts.delta);
  FFOptions o = opts;
  o.delta = delta;

  FFResult res;
  res.plan.d = d;
  std::vector<std::optional<std::size_t>> home(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) home[i] = k.locate(e.point(i), 0.0);

  SampledSet cur = e;
  for (int m = n; m > d; --m) {
    std::map<std::size_t, std::vector<std::size_t>> occupied;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      auto idx = k.locate(cur.point(i), 0.0);
      if (idx && k.cell(*idx).dim() == m) occupied[*idx].push_back(i);
    }
    FFStage stage;
    stage.m = m;
    CenterMap centers;
    std::vector<RadialProjection> plan;
    for (const auto& [ci, members] : occupied) {
      const Cell& a = k.cell(ci);
      std::vector<Cell> parents;
      for (auto pi : k.supersets(a)) parents.push_back(k.cell(pi));
      Rng crng = rng.derive("ff-center", a.hash() ^ static_cast<std::uint64_t>(m));
      CenterChoice c = select_center(a, cur, parents, o, crng);
      centers.emplace(a, c.projection);
      plan.push_back(c.projection);

      FFCellDiagnostics diag;
      diag.cell = a;
      diag.center = c.projection.center;
      diag.delta = c.projection.guard;
      diag.ratio_h = c.ratio_h;
      diag.ratio_zeta = c.ratio_zeta;
      diag.samples = members.size();
      diag.tries = c.tries;
      if (members.size() >= 2) {
        std::vector<Point> src, img;
        for (auto i : members) {
          src.push_back(cur.point(i));
          img.push_back(radial_project(c.projection, cur.point(i)));
        }
        Rng lr = crng.derive("lip");
        diag.lip_est = lipschitz_constant_estimate(src, img, lr);
      }
      stage.max_ratio_h = std::max(stage.max_ratio_h, diag.ratio_h);
      stage.max_lip = std::max(stage.max_lip, diag.lip_est);
      stage.cells.push_back(std::move(diag));
    }
    cur = ff_sweep(k, m, cur, centers);
    if (!stage.cells.empty()) res.ledger_ratio *= std::max(stage.max_ratio_h, 1.0);
    res.plan.sweeps.emplace_back(m, std::move(plan));
    res.stages.push_back(std::move(stage));
  }
  res.mapped = cur;

  res.source_measure = occupancy_measure(e.points(), d, delta);
  res.image_measure = occupancy_measure(cur.points(), d, delta);
  res.global_ratio = res.source_measure > 0.0 ? res.image_measure / res.source_measure : 1.0;

  std::unordered_map<std::size_t, std::vector<std::size_t>> by_home;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const Point& y = cur.point(i);
    if (!home[i]) {
      if (y != e.point(i)) ++res.moved_outside;
      if (!in_low_skeleton(k, d, y)) ++res.skeleton_failures;
      continue;
    }
    const Cell& h = k.cell(*home[i]);
    if (h.dim() <= d && y != e.point(i)) ++res.moved_outside;
    bool inside = true;
    for (int j = 0; j < n; ++j)
      if (y[j] < h.lo_d(j) || y[j] > h.hi_d(j)) inside = false;
    if (!inside) ++res.preservation_failures;
    if (!in_low_skeleton(k, d, y)) ++res.skeleton_failures;
    by_home[*home[i]].push_back(i);
  }

  // Per-cell ratios over closed cells, gathered from the home cells they contain.
  for (std::size_t ci = 0; ci < k.size(); ++ci) {
    const Cell& a = k.cell(ci);
    std::vector<Point> src, img;
    for (auto hi : k.cells_meeting(a)) {
      if (!closed_contains(a, k.cell(hi))) continue;
      auto it = by_home.find(hi);
      if (it == by_home.end()) continue;
      for (auto i : it->second) {
        src.push_back(e.point(i));
        img.push_back(cur.point(i));
      }
    }
    if (src.empty()) continue;
    double s = occupancy_measure(src, d, delta);
    if (s > 0.0) res.max_cell_ratio = std::max(res.max_cell_ratio, occupancy_measure(img, d, delta) / s);
  }

  // d-cells: image occupancy against the gauge of the source in the cells around them.
  Rng zr = rng.derive("ff-zeta");
  for (std::size_t ci = 0; ci < k.size(); ++ci) {
    const Cell& a = k.cell(ci);
    if (a.dim() != d) continue;
    std::vector<Point> on;
    for (const auto& y : cur.points())
      if (cell_membership(a, y, 0.0) != Membership::Outside) on.push_back(y);
    if (on.empty() || d == 0) continue;
    double image = occupancy_measure(on, d, delta);
    double gauge = 0.0;
    for (auto bi : k.supersets(a)) {
      const Cell& b = k.cell(bi);
      std::vector<Point> src;
      for (const auto& p : e.points())
        if (cell_membership(b, p, 0.0) == Membership::Interior) src.push_back(p);
      if (!src.empty()) gauge += zeta_restricted(as_set(e, std::move(src)), b, opts.zeta_planes, delta, zr).value;
    }
    if (gauge > 0.0) res.max_face_zeta_ratio = std::max(res.max_face_zeta_ratio, image / gauge);
  }
  return res;
}

PruneResult prune_low_mass_dcells(const Complex& k, int d, const SampledSet& f, double threshold_fraction,
                                  double delta) {
  delta = effective_delta(f, delta);
  PruneResult out;
  std::map<std::size_t, std::vector<std::size_t>> occupied;
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto idx = k.locate(f.point(i), 0.0);
    if (idx && k.cell(*idx).dim() == d && d > 0) occupied[*idx].push_back(i);
  }
  std::vector<Point> pts = f.points();
  for (const auto& [ci, members] : occupied) {
    const Cell& a = k.cell(ci);
    std::vector<Point> in_a;
    for (const auto& p : f.points())
      if (cell_membership(a, p, 0.0) != Membership::Outside) in_a.push_back(p);
    const double half = std::pow(a.side() / 2.0, d);
    if (occupancy_measure(in_a, d, delta) >= threshold_fraction * half) continue;

    // Deterministic center: the lattice point of the half cell farthest from the set.
    Point lo, hi;
    half_cell_bounds(a, lo, hi);
    const int steps = 8;
    std::vector<int> axes;
    for (int i = 0; i < a.ambient_dim(); ++i)
      if (a.spans(i)) axes.push_back(i);
    std::size_t total = 1;
    for (std::size_t j = 0; j < axes.size(); ++j) total *= steps + 1;
    Point best = lo;
    double best_clear = -1.0;
    for (std::size_t code = 0; code < total; ++code) {
      Point x = lo;
      std::size_t c = code;
      for (auto ax : axes) {
        x[ax] = lo[ax] + (hi[ax] - lo[ax]) * static_cast<double>(c % (steps + 1)) / steps;
        c /= steps + 1;
      }
      double clear = kInfinity;
      for (const auto& p : in_a) clear = std::min(clear, (p - x).norm());
      if (clear > best_clear) {
        best_clear = clear;
        best = x;
      }
    }
    const double guard = 0.5 * std::min(best_clear, dist_to_cell_boundary(a, best));
    for (auto i : members) pts[i] = radial_project(a, best, pts[i], guard);
    ++out.pruned_cells;
  }
  out.set = f.with_points(std::move(pts));
  return out;
}

}  // namespace plateau
