#include "plateau/skeleton_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "plateau/domain.hpp"
#include "plateau/errors.hpp"

namespace plateau {

int SkeletonGraph::add_node(const Point& p, bool fixed) {
  if (p.size() != n_) throw InputError("skeleton graph: dimension mismatch");
  pos_.push_back(p);
  fixed_.push_back(fixed);
  alive_.push_back(1);
  adj_.emplace_back();
  return static_cast<int>(pos_.size()) - 1;
}

void SkeletonGraph::add_edge(int a, int b) {
  if (a == b) return;
  adj_[a].insert(b);
  adj_[b].insert(a);
}

void SkeletonGraph::remove_edge(int a, int b) {
  adj_[a].erase(b);
  adj_[b].erase(a);
}

std::size_t SkeletonGraph::node_count() const {
  return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), 1));
}

std::size_t SkeletonGraph::edge_count() const { return edges().size(); }

void SkeletonGraph::remove_node(int v) {
  for (int u : adj_[v]) adj_[u].erase(v);
  adj_[v].clear();
  alive_[v] = 0;
}

void SkeletonGraph::merge_into(int a, int b) {
  if (a == b) return;
  std::vector<int> nb(adj_[b].begin(), adj_[b].end());
  remove_node(b);
  for (int u : nb) add_edge(a, u);
  fixed_[a] = fixed_[a] || fixed_[b];
}

double SkeletonGraph::length() const {
  double l = 0.0;
  for (auto [a, b] : edges()) l += (pos_[a] - pos_[b]).norm();
  return l;
}

std::vector<std::pair<int, int>> SkeletonGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t v = 0; v < pos_.size(); ++v)
    if (alive_[v])
      for (int u : adj_[v])
        if (static_cast<int>(v) < u) out.emplace_back(static_cast<int>(v), u);
  return out;
}

SkeletonGraph SkeletonGraph::compacted() const {
  SkeletonGraph g(n_);
  std::vector<int> map(pos_.size(), -1);
  for (std::size_t v = 0; v < pos_.size(); ++v)
    if (alive_[v]) map[v] = g.add_node(pos_[v], fixed_[v]);
  for (auto [a, b] : edges()) g.add_edge(map[a], map[b]);
  return g;
}

int SkeletonGraph::connected_components() const {
  std::vector<int> comp(pos_.size(), -1);
  int count = 0;
  for (std::size_t s = 0; s < pos_.size(); ++s) {
    if (!alive_[s] || comp[s] >= 0) continue;
    std::vector<int> stack{static_cast<int>(s)};
    comp[s] = count;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : adj_[v])
        if (comp[u] < 0) {
          comp[u] = count;
          stack.push_back(u);
        }
    }
    ++count;
  }
  return count;
}

SkeletonGraph::Nearest SkeletonGraph::nearest(const Point& x) const {
  Nearest best;
  best.dist = kInfinity;
  for (std::size_t v = 0; v < pos_.size(); ++v) {
    if (!alive_[v]) continue;
    double d = (pos_[v] - x).norm();
    if (d < best.dist) {
      best = {pos_[v], d, static_cast<int>(v), -1, -1};
    }
  }
  for (auto [a, b] : edges()) {
    Point ab = pos_[b] - pos_[a];
    double len2 = ab.squaredNorm();
    if (len2 == 0.0) continue;
    double t = (x - pos_[a]).dot(ab) / len2;
    if (t <= 0.0 || t >= 1.0) continue;
    Point p = pos_[a] + t * ab;
    double d = (p - x).norm();
    if (d < best.dist) best = {p, d, -1, a, b};
  }
  return best;
}

int SkeletonGraph::split_edge(int a, int b, const Point& p) {
  int s = add_node(p);
  remove_edge(a, b);
  add_edge(a, s);
  add_edge(s, b);
  return s;
}

namespace {

constexpr double kMergeDist = 1e-12;

double local_length(const SkeletonGraph& g, int v, const Point& x) {
  double l = 0.0;
  for (int u : g.neighbors(v)) l += (x - g.position(u)).norm();
  return l;
}

// Removes free leaves, contracts free degree-2 nodes and merges coincident endpoints.
bool cleanup(SkeletonGraph& g) {
  bool any = false;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < g.capacity(); ++v) {
      const int iv = static_cast<int>(v);
      if (!g.alive(iv)) continue;
      for (int u : std::vector<int>(g.neighbors(iv).begin(), g.neighbors(iv).end())) {
        if (!g.alive(iv) || !g.alive(u)) break;
        if ((g.position(u) - g.position(iv)).norm() > kMergeDist) continue;
        if (g.fixed(u) && !g.fixed(iv)) {
          g.merge_into(u, iv);
        } else if (!g.fixed(u) || !g.fixed(iv)) {
          g.merge_into(iv, u);
        } else {
          continue;
        }
        changed = true;
      }
      if (!g.alive(iv) || g.fixed(iv)) continue;
      if (g.degree(iv) <= 1) {
        g.remove_node(iv);
        changed = true;
      } else if (g.degree(iv) == 2) {
        int a = *g.neighbors(iv).begin();
        int b = *g.neighbors(iv).rbegin();
        g.remove_node(iv);
        g.add_edge(a, b);
        changed = true;
      }
    }
    any = any || changed;
  }
  return any;
}

// Weiszfeld step towards the median of the neighbors, or a jump onto a neighbor when that
// neighbor is the median.
bool move_node(SkeletonGraph& g, int v, double step, RelaxReport& rep) {
  const Point x = g.position(v);
  const double f0 = local_length(g, v, x);
  for (int j : g.neighbors(v)) {
    const Point& pj = g.position(j);
    Point pull = Point::Zero(x.size());
    for (int i : g.neighbors(v))
      if (i != j) pull += (pj - g.position(i)).normalized();
    if (pull.norm() <= 1.0) {
      if (local_length(g, v, pj) < f0) {
        g.set_position(v, pj);
        return true;
      }
    }
  }
  Point num = Point::Zero(x.size());
  double den = 0.0;
  for (int u : g.neighbors(v)) {
    double d = (x - g.position(u)).norm();
    if (d < kMergeDist) return false;
    num += g.position(u) / d;
    den += 1.0 / d;
  }
  const Point target = num / den;
  double s = step;
  for (int h = 0; h < 40; ++h) {
    Point trial = x + s * (target - x);
    if (local_length(g, v, trial) < f0) {
      g.set_position(v, trial);
      return true;
    }
    s *= 0.5;
    ++rep.backtracks;
  }
  return false;
}

double angle_between(const Point& a, const Point& b) {
  double c = a.normalized().dot(b.normalized());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// Replaces the sharpest pair of edges at v by a new junction on the bisector.
bool split_node(SkeletonGraph& g, int v, double tol_rad, RelaxReport& rep) {
  if (g.degree(v) < 2 || (!g.fixed(v) && g.degree(v) < 3)) return false;
  const Point x = g.position(v);
  std::vector<int> nb(g.neighbors(v).begin(), g.neighbors(v).end());
  double best = 2.0 * std::numbers::pi / 3.0 - tol_rad;
  int bu = -1, bw = -1;
  for (std::size_t i = 0; i < nb.size(); ++i)
    for (std::size_t j = i + 1; j < nb.size(); ++j) {
      double th = angle_between(g.position(nb[i]) - x, g.position(nb[j]) - x);
      if (th < best) {
        best = th;
        bu = nb[i];
        bw = nb[j];
      }
    }
  if (bu < 0) return false;
  const Point& pu = g.position(bu);
  const Point& pw = g.position(bw);
  Point dir = (pu - x).normalized() + (pw - x).normalized();
  if (dir.norm() == 0.0) return false;
  dir.normalize();
  const double before = (pu - x).norm() + (pw - x).norm();
  double eps = 0.25 * std::min((pu - x).norm(), (pw - x).norm());
  for (int h = 0; h < 30; ++h, eps *= 0.5) {
    Point s = x + eps * dir;
    double after = (s - pu).norm() + (s - pw).norm() + eps;
    if (after < before) {
      int id = g.add_node(s);
      g.remove_edge(v, bu);
      g.remove_edge(v, bw);
      g.add_edge(id, bu);
      g.add_edge(id, bw);
      g.add_edge(id, v);
      ++rep.splits;
      return true;
    }
  }
  return false;
}

}  // namespace

RelaxReport relax_skeleton(SkeletonGraph& g, const RelaxOptions& opts) {
  if (!(opts.step > 0.0) || opts.iters < 0) throw InputError("relax_skeleton: bad options");
  RelaxReport rep;
  rep.length_before = g.length();
  double prev = rep.length_before;
  const double tol_rad = opts.angle_tol_deg * std::numbers::pi / 180.0;
  for (int it = 0; it < opts.iters; ++it) {
    bool changed = cleanup(g);
    for (std::size_t v = 0; v < g.capacity(); ++v) {
      const int iv = static_cast<int>(v);
      if (g.alive(iv) && !g.fixed(iv) && g.degree(iv) >= 3) changed = move_node(g, iv, opts.step, rep) || changed;
    }
    if (opts.split) {
      const std::size_t cap = g.capacity();
      for (std::size_t v = 0; v < cap; ++v)
        if (g.alive(static_cast<int>(v))) changed = split_node(g, static_cast<int>(v), tol_rad, rep) || changed;
    }
    cleanup(g);
    const double cur = g.length();
    if (cur > prev * (1.0 + 1e-13)) rep.monotone = false;
    rep.iterations = it + 1;
    const bool stalled = prev - cur <= 1e-15 * std::max(prev, 1.0);
    prev = cur;
    if (!changed || (stalled && it > 0 && !opts.split)) break;
  }
  rep.length_after = g.length();
  return rep;
}

JunctionAngles junction_angles(const SkeletonGraph& g) {
  JunctionAngles ja;
  for (std::size_t v = 0; v < g.capacity(); ++v) {
    const int iv = static_cast<int>(v);
    if (!g.alive(iv) || g.fixed(iv) || g.degree(iv) != 3) continue;
    ++ja.junctions;
    std::vector<int> nb(g.neighbors(iv).begin(), g.neighbors(iv).end());
    const Point& x = g.position(iv);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) {
        double deg = angle_between(g.position(nb[i]) - x, g.position(nb[j]) - x) * 180.0 / std::numbers::pi;
        ja.angles_deg.push_back(deg);
        ja.max_deviation_deg = std::max(ja.max_deviation_deg, std::abs(deg - 120.0));
      }
  }
  return ja;
}

SampledSet resample_graph(const SkeletonGraph& g, double spacing) {
  if (!(spacing > 0.0)) throw InputError("resample_graph: spacing must be positive");
  const int n = g.ambient_dim();
  std::vector<Point> pts;
  std::vector<double> w;
  std::vector<LinearPlane> tangents;
  std::vector<int> node_slot(g.capacity(), -1);
  auto tangent = [&](const Point& dir) {
    Eigen::MatrixXd f(1, n);
    f.row(0) = dir.normalized().transpose();
    return LinearPlane(f);
  };
  auto slot = [&](int v, const Point& dir) {
    if (node_slot[v] < 0) {
      node_slot[v] = static_cast<int>(pts.size());
      pts.push_back(g.position(v));
      w.push_back(0.0);
      tangents.push_back(tangent(dir));
    }
    return node_slot[v];
  };
  for (auto [a, b] : g.edges()) {
    const Point pa = g.position(a), pb = g.position(b);
    const double len = (pb - pa).norm();
    if (len == 0.0) continue;
    const Point dir = (pb - pa) / len;
    const int m = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    const double piece = len / m;
    w[slot(a, dir)] += 0.5 * piece;
    w[slot(b, dir)] += 0.5 * piece;
    for (int i = 1; i < m; ++i) {
      pts.push_back(pa + (pb - pa) * (static_cast<double>(i) / m));
      w.push_back(piece);
      tangents.push_back(tangent(dir));
    }
  }
  return SampledSet(1, n, std::move(pts), std::move(w), spacing, std::move(tangents));
}

SkeletonGraph graph_from_points(const std::vector<Point>& pts) {
  if (pts.empty()) throw InputError("graph_from_points: no points");
  SkeletonGraph g(static_cast<int>(pts.front().size()));
  for (const auto& p : pts) g.add_node(p);
  const std::size_t n = pts.size();
  std::vector<double> best(n, kInfinity);
  std::vector<int> parent(n, -1);
  std::vector<char> in(n, 0);
  best[0] = 0.0;
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t v = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!in[i] && (v == n || best[i] < best[v])) v = i;
    in[v] = 1;
    if (parent[v] >= 0) g.add_edge(parent[v], static_cast<int>(v));
    for (std::size_t i = 0; i < n; ++i) {
      if (in[i]) continue;
      double d = (pts[i] - pts[v]).norm();
      if (d < best[i]) {
        best[i] = d;
        parent[i] = static_cast<int>(v);
      }
    }
  }
  return g;
}

}  // namespace plateau
