#include "plateau/driver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

#include "plateau/errors.hpp"
#include "plateau/schedule.hpp"

namespace plateau {

using nlohmann::json;

double BoundarySpec::distance(const Point& x) const {
  double best = kInfinity;
  for (const auto& a : anchors) best = std::min(best, (x - a).norm());
  for (const auto& f : faces) best = std::min(best, dist_to_cell(f, x));
  return best;
}

// --- configuration ---

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw InputError(where + ": unknown field '" + it.key() + "'");
  }
}

Point to_point(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw InputError(where + ": expected " + std::to_string(n) + " coordinates");
  Point p(n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number()) throw InputError(where + ": coordinates must be numbers");
    p[i] = j[i].get<double>();
  }
  return p;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("field '") + key + "' has the wrong type");
  }
}

Integrand make_integrand(const json& j, int n, std::string& kind) {
  check_keys(j, {"kind", "value", "weights"}, "integrand");
  kind = get_or<std::string>(j, "kind", "hausdorff");
  if (kind == "hausdorff") return Integrand::hausdorff();
  if (kind == "constant") {
    double c = get_or<double>(j, "value", 1.0);
    if (!(c > 0.0)) throw InputError("integrand: constant must be positive");
    return Integrand::position([c](const Point&) { return c; }, std::max(c, 1.0 / c));
  }
  if (kind == "axis_anisotropic") {
    if (!j.contains("weights")) throw InputError("integrand: axis_anisotropic needs weights");
    Point w = to_point(j["weights"], n, "integrand.weights");
    if (w.minCoeff() <= 0.0) throw InputError("integrand: weights must be positive");
    double lambda = std::max({1.0, w.maxCoeff(), 1.0 / w.minCoeff()});
    return Integrand::anisotropic(
        [w](const Point&, const LinearPlane& t) {
          // sum_i w_i^2 |T e_i|^2 / d lies between min w^2 and max w^2.
          double s = 0.0;
          for (int i = 0; i < t.n(); ++i) s += w[i] * w[i] * t.frame().col(i).squaredNorm();
          return std::sqrt(s / t.d());
        },
        lambda);
  }
  throw InputError("integrand: unknown kind '" + kind + "'");
}

}  // namespace

ProblemConfig parse_config(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"schema", "n", "d", "domain", "boundary", "initial_set", "integrand", "schedule", "quasimin", "seed",
                 "tolerances", "relax"},
             "config");
  if (get_or<int>(j, "schema", 0) != 1) throw InputError("config: schema must be 1");
  for (const char* req : {"n", "d", "domain", "boundary", "initial_set"})
    if (!j.contains(req)) throw InputError(std::string("config: missing field '") + req + "'");

  ProblemConfig c;
  c.n = get_or<int>(j, "n", 2);
  c.d = get_or<int>(j, "d", 1);
  if (c.n < 1 || c.n > 8) throw InputError("config: n must lie in [1, 8]");
  if (c.d < 0 || c.d >= c.n) throw InputError("config: d must lie in [0, n)");

  const json& dom = j["domain"];
  check_keys(dom, {"lo", "hi"}, "domain");
  c.domain.lo = to_point(dom.at("lo"), c.n, "domain.lo");
  c.domain.hi = to_point(dom.at("hi"), c.n, "domain.hi");
  if ((c.domain.hi - c.domain.lo).minCoeff() <= 0.0) throw InputError("domain: empty box");

  const json& b = j["boundary"];
  check_keys(b, {"anchors", "grid_level", "faces"}, "boundary");
  if (b.contains("anchors"))
    for (const auto& a : b["anchors"]) c.boundary.anchors.push_back(to_point(a, c.n, "boundary.anchors"));
  if (b.contains("faces")) {
    if (!b.contains("grid_level")) throw InputError("boundary: faces need grid_level");
    const int level = get_or<int>(b, "grid_level", 0);
    for (const auto& f : b["faces"]) {
      check_keys(f, {"anchor", "span"}, "boundary.faces");
      Point p = to_point(f.at("anchor"), c.n, "face.anchor");
      Point s = to_point(f.at("span"), c.n, "face.span");
      std::vector<DyadicScalar> anchor;
      std::uint32_t mask = 0;
      for (int i = 0; i < c.n; ++i) {
        anchor.push_back(DyadicScalar::from_double_or_throw(p[i]));
        if (!anchor.back().on_lattice(level)) throw InputError("boundary face anchor off the grid lattice");
        if (s[i] != 0.0) mask |= 1U << i;
      }
      c.boundary.faces.emplace_back(std::move(anchor), mask, level);
    }
  }
  if (c.boundary.empty()) throw InputError("boundary: no anchors or faces");
  for (const auto& a : c.boundary.anchors)
    if (!c.domain.contains(a)) throw InputError("boundary anchor outside the domain");
  for (const auto& f : c.boundary.faces)
    if (!c.domain.contains(f.lo_point()) || !c.domain.contains(f.hi_point()))
      throw InputError("boundary face outside the domain");

  const json& init = j["initial_set"];
  check_keys(init, {"polyline", "segments", "csv", "spacing"}, "initial_set");
  c.spacing = get_or<double>(init, "spacing", 0.01);
  if (!(c.spacing > 0.0)) throw InputError("initial_set: spacing must be positive");
  int sources = 0;
  if (init.contains("polyline")) {
    ++sources;
    for (const auto& p : init["polyline"]) c.polyline.push_back(to_point(p, c.n, "initial_set.polyline"));
    if (c.polyline.size() < 2) throw InputError("initial_set: polyline needs two vertices");
  }
  if (init.contains("segments")) {
    ++sources;
    for (const auto& s : init["segments"]) {
      if (!s.is_array() || s.size() != 2) throw InputError("initial_set: a segment has two endpoints");
      c.segments.emplace_back(to_point(s[0], c.n, "segment"), to_point(s[1], c.n, "segment"));
    }
  }
  if (init.contains("csv")) {
    ++sources;
    std::filesystem::path p = get_or<std::string>(init, "csv", "");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    c.csv_path = p.string();
  }
  if (sources != 1) throw InputError("initial_set: give exactly one of polyline, segments, csv");

  if (j.contains("integrand")) c.integrand = make_integrand(j["integrand"], c.n, c.integrand_kind);

  if (j.contains("schedule")) {
    const json& s = j["schedule"];
    check_keys(s, {"mode", "start_level", "mu", "iterations"}, "schedule");
    std::string mode = get_or<std::string>(s, "mode", "uniform");
    if (mode == "uniform") c.mode = ScheduleMode::Uniform;
    else if (mode == "mu") c.mode = ScheduleMode::Mu;
    else throw InputError("schedule: mode must be uniform or mu");
    c.start_level = get_or<int>(s, "start_level", c.start_level);
    c.mu = get_or<double>(s, "mu", c.mu);
    c.iterations = get_or<int>(s, "iterations", c.iterations);
  }
  if (!(c.mu > 0.0 && c.mu < 1.0)) throw InputError("schedule: mu must lie in (0, 1)");
  if (c.iterations < 1 || c.iterations > 60) throw InputError("schedule: iterations must lie in [1, 60]");
  if (c.start_level < 0 || c.start_level > 40) throw InputError("schedule: start_level out of range");

  if (j.contains("quasimin")) {
    const json& q = j["quasimin"];
    check_keys(q, {"kappa", "h", "scale"}, "quasimin");
    c.quasimin.kappa = get_or<double>(q, "kappa", 1.0);
    c.quasimin.h = get_or<double>(q, "h", 0.0);
    c.quasimin.scale = q.contains("scale") ? get_or<double>(q, "scale", kInfinity) : kInfinity;
    if (c.quasimin.kappa < 1.0 || c.quasimin.h < 0.0 || !(c.quasimin.scale > 0.0))
      throw InputError("quasimin: need kappa >= 1, h >= 0, scale > 0");
  }
  c.seed = get_or<std::uint64_t>(j, "seed", 0);

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    check_keys(t, {"eps_geom", "delta", "lambda", "threshold_fraction"}, "tolerances");
    c.eps_geom = get_or<double>(t, "eps_geom", c.eps_geom);
    c.delta = get_or<double>(t, "delta", c.delta);
    c.lambda = get_or<double>(t, "lambda", c.lambda);
    c.threshold_fraction = get_or<double>(t, "threshold_fraction", c.threshold_fraction);
    if (!(c.eps_geom > 0.0) || c.delta < 0.0 || c.lambda < 1.0 || c.threshold_fraction < 0.0)
      throw InputError("tolerances out of range");
  }
  if (j.contains("relax")) {
    const json& r = j["relax"];
    check_keys(r, {"step", "iters", "split"}, "relax");
    c.relax.step = get_or<double>(r, "step", c.relax.step);
    c.relax.iters = get_or<int>(r, "iters", c.relax.iters);
    c.relax.split = get_or<bool>(r, "split", c.relax.split);
    if (!(c.relax.step > 0.0) || c.relax.iters < 0) throw InputError("relax: need step > 0, iters >= 0");
  }
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::vector<int> schedule_levels(const ProblemConfig& cfg) {
  std::vector<int> levels;
  if (cfg.mode == ScheduleMode::Uniform) {
    for (int k = 0; k < cfg.iterations; ++k) levels.push_back(cfg.start_level + k);
  } else {
    for (int q : q_schedule(cfg.mu, cfg.iterations)) levels.push_back(std::max(cfg.start_level, q));
  }
  for (int l : levels)
    if (l > 30) throw InputError("schedule: grid level beyond 30");
  return levels;
}

// --- sliding deformations ---

SlidingReport sliding_validate(const std::vector<Point>& e, const std::vector<Point>& images,
                               const BoundarySpec& gamma, const Ball& u, double c_bound, double eps) {
  if (e.size() != images.size()) throw InputError("sliding_validate: one image per sample needed");
  SlidingReport r;
  r.moved_inside.worst = kInfinity;
  r.gamma_distance.worst = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const Point& x = e[i];
    const Point& y = images[i];
    const bool moved = (y - x).norm() > eps;
    const double margin = u.radius - (x - u.center).norm();
    if (moved && margin < r.moved_inside.worst) {
      r.moved_inside.worst = margin;
      r.moved_inside.witness = x;
    }
    if (!gamma.empty()) {
      const double dx = gamma.distance(x), dy = gamma.distance(y);
      if (dx <= eps && dy > r.gamma_preserved.worst) {
        r.gamma_preserved.worst = dy;
        r.gamma_preserved.witness = x;
      }
      if (dx > eps) {
        double ratio = dy / dx;
        if (ratio > r.gamma_distance.worst) {
          r.gamma_distance.worst = ratio;
          r.gamma_distance.witness = x;
        }
      } else if (dy > eps) {
        r.gamma_distance.worst = kInfinity;
        r.gamma_distance.witness = x;
      }
    }
    if (u.contains(x)) {
      double out = (y - u.center).norm() - u.radius;
      if (out >= 0.0 && (r.stays_in_ball.passed || out > r.stays_in_ball.worst)) {
        r.stays_in_ball.passed = false;
        r.stays_in_ball.worst = out;
        r.stays_in_ball.witness = x;
      }
    }
  }
  r.moved_inside.passed = r.moved_inside.worst > 0.0;
  if (r.moved_inside.worst == kInfinity) r.moved_inside.worst = u.radius;
  r.gamma_preserved.passed = r.gamma_preserved.worst <= eps;
  r.gamma_distance.passed = r.gamma_distance.worst <= c_bound;
  return r;
}

// --- graphs ---

namespace {

void attach_anchor(SkeletonGraph& g, const Point& a, double snap) {
  if (g.node_count() == 0) {
    g.add_node(a, true);
    return;
  }
  auto near = g.nearest(a);
  if (near.dist > snap) throw InputError("boundary anchor is not within snap distance of the set");
  if (near.dist == 0.0) {
    int v = near.node >= 0 ? near.node : g.split_edge(near.a, near.b, a);
    g.set_position(v, a);
    g.set_fixed(v, true);
    return;
  }
  int target = near.node >= 0 ? near.node : g.split_edge(near.a, near.b, near.point);
  int v = g.add_node(a, true);
  g.add_edge(v, target);
}

}  // namespace

SkeletonGraph initial_graph(const ProblemConfig& cfg) {
  if (cfg.d != 1) throw InputError("minimize handles d = 1 only");
  SkeletonGraph g(cfg.n);
  if (!cfg.polyline.empty()) {
    int prev = -1;
    for (const auto& p : cfg.polyline) {
      int v = g.add_node(p);
      if (prev >= 0) g.add_edge(prev, v);
      prev = v;
    }
  } else if (!cfg.segments.empty()) {
    std::map<std::vector<double>, int> ids;
    auto node = [&](const Point& p) {
      std::vector<double> key(p.data(), p.data() + p.size());
      auto it = ids.find(key);
      if (it != ids.end()) return it->second;
      int v = g.add_node(p);
      ids.emplace(std::move(key), v);
      return v;
    };
    for (const auto& [a, b] : cfg.segments) g.add_edge(node(a), node(b));
  } else {
    std::ifstream in(cfg.csv_path);
    if (!in) throw InputError("cannot open initial set " + cfg.csv_path);
    SampledSet s = read_csv(in, cfg.d);
    if (s.n() != cfg.n) throw InputError("initial set dimension differs from n");
    g = graph_from_points(s.points());
  }
  for (std::size_t v = 0; v < g.capacity(); ++v)
    if (!cfg.domain.contains(g.position(static_cast<int>(v)))) throw InputError("initial set leaves the domain");
  for (const auto& f : cfg.boundary.faces)
    if (f.dim() > 0) throw InputError("minimize supports point boundaries only");
  std::vector<Point> anchors = cfg.boundary.anchors;
  for (const auto& f : cfg.boundary.faces) anchors.push_back(f.lo_point());
  for (const auto& a : anchors) attach_anchor(g, a, std::max(cfg.spacing, cfg.eps_geom));
  return g.compacted();
}

SkeletonGraph break_cycles(const SkeletonGraph& g) {
  SkeletonGraph c = g.compacted();
  auto edges = c.edges();
  std::vector<double> len;
  for (auto [a, b] : edges) len.push_back((c.position(a) - c.position(b)).norm());
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return len[x] < len[y]; });
  std::vector<int> parent(c.capacity());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
  SkeletonGraph out(c.ambient_dim());
  for (std::size_t v = 0; v < c.capacity(); ++v) out.add_node(c.position(static_cast<int>(v)), c.fixed(static_cast<int>(v)));
  for (auto i : order) {
    auto [a, b] = edges[i];
    int ra = find(a), rb = find(b);
    if (ra == rb) continue;
    parent[ra] = rb;
    out.add_edge(a, b);
  }
  return out;
}

double graph_energy(const SkeletonGraph& g, const Integrand& integrand, double spacing) {
  return energy_eval(resample_graph(g, spacing), integrand);
}

namespace {

// Point of the level-L grid 1-skeleton: a lattice vertex, or a point inside an edge along `axis`.
struct SkelPoint {
  std::vector<std::int64_t> base;
  int axis = -1;
  double t = 0.0;
};

struct GridFrame {
  Point lo;
  int level = 0;
  std::vector<std::int64_t> extent;
  double side() const { return std::ldexp(1.0, -level); }
};

SkelPoint classify(const GridFrame& g, const Point& y) {
  SkelPoint p;
  const int n = static_cast<int>(y.size());
  p.base.resize(n);
  for (int i = 0; i < n; ++i) {
    const double u = std::ldexp(y[i] - g.lo[i], g.level);
    const double f = std::floor(u);
    if (f < 0 || f > static_cast<double>(g.extent[i])) throw InputError("projected set leaves the grid");
    p.base[i] = static_cast<std::int64_t>(f);
    if (u != f) {
      if (p.axis >= 0) throw InputError("projected sample is not on the 1-skeleton");
      p.axis = i;
      p.t = u - f;
    }
  }
  return p;
}

using EdgeKey = std::pair<std::vector<std::int64_t>, int>;
using Coverage = std::map<EdgeKey, std::vector<std::pair<double, double>>>;

// Shortest path in the grid 1-skeleton between two skeleton points, recorded as edge intervals.
void cover_path(const GridFrame& g, const SkelPoint& p, const SkelPoint& q, Coverage& cov) {
  const int n = static_cast<int>(p.base.size());
  if (p.axis >= 0 && p.axis == q.axis && p.base == q.base) {
    cov[{p.base, p.axis}].emplace_back(std::min(p.t, q.t), std::max(p.t, q.t));
    return;
  }
  std::vector<std::int64_t> wlo(n), whi(n);
  for (int i = 0; i < n; ++i) {
    wlo[i] = std::max<std::int64_t>(0, std::min(p.base[i], q.base[i]) - 1);
    whi[i] = std::min<std::int64_t>(g.extent[i], std::max(p.base[i], q.base[i]) + 2);
  }
  std::vector<std::int64_t> dims(n);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    dims[i] = whi[i] - wlo[i] + 1;
    total *= static_cast<std::size_t>(dims[i]);
  }
  auto id_of = [&](const std::vector<std::int64_t>& v) {
    std::size_t id = 0;
    for (int i = n - 1; i >= 0; --i) id = id * dims[i] + static_cast<std::size_t>(v[i] - wlo[i]);
    return id;
  };
  auto coords_of = [&](std::size_t id) {
    std::vector<std::int64_t> v(n);
    for (int i = 0; i < n; ++i) {
      v[i] = wlo[i] + static_cast<std::int64_t>(id % dims[i]);
      id /= dims[i];
    }
    return v;
  };
  // Extra nodes: total (p) and total + 1 (q) when they sit inside edges.
  const std::size_t np = total, nq = total + 1;
  auto endpoint_ids = [&](const SkelPoint& s) {
    std::vector<std::pair<std::size_t, double>> out;
    out.emplace_back(id_of(s.base), s.t);
    auto up = s.base;
    ++up[s.axis];
    out.emplace_back(id_of(up), 1.0 - s.t);
    return out;
  };
  const std::size_t src = p.axis >= 0 ? np : id_of(p.base);
  const std::size_t dst = q.axis >= 0 ? nq : id_of(q.base);
  std::vector<double> dist(total + 2, kInfinity);
  std::vector<std::size_t> prev(total + 2, SIZE_MAX);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.emplace(0.0, src);
  auto relax = [&](std::size_t from, std::size_t to, double w) {
    if (dist[from] + w < dist[to]) {
      dist[to] = dist[from] + w;
      prev[to] = from;
      pq.emplace(dist[to], to);
    }
  };
  while (!pq.empty()) {
    auto [dv, v] = pq.top();
    pq.pop();
    if (dv > dist[v]) continue;
    if (v == dst) break;
    if (v == np) {
      for (auto [id, w] : endpoint_ids(p)) relax(v, id, w);
      continue;
    }
    if (v == nq) continue;
    auto c = coords_of(v);
    for (int i = 0; i < n; ++i)
      for (int s : {-1, 1}) {
        auto c2 = c;
        c2[i] += s;
        if (c2[i] < wlo[i] || c2[i] > whi[i]) continue;
        relax(v, id_of(c2), 1.0);
      }
    if (q.axis >= 0)
      for (auto [id, w] : endpoint_ids(q))
        if (id == v) relax(v, nq, w);
  }
  if (dist[dst] == kInfinity) throw InputError("no skeleton path between projected samples");

  std::vector<std::size_t> path{dst};
  while (path.back() != src) path.push_back(prev[path.back()]);
  std::reverse(path.begin(), path.end());
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const std::size_t a = path[k], b = path[k + 1];
    auto partial = [&](const SkelPoint& s, std::size_t vid) {
      const bool at_base = coords_of(vid) == s.base;
      cov[{s.base, s.axis}].emplace_back(at_base ? 0.0 : s.t, at_base ? s.t : 1.0);
    };
    if (a == np) partial(p, b);
    else if (b == nq) partial(q, a);
    else {
      auto ca = coords_of(a), cb = coords_of(b);
      int axis = 0;
      for (int i = 0; i < n; ++i)
        if (ca[i] != cb[i]) axis = i;
      cov[{std::min(ca, cb), axis}].emplace_back(0.0, 1.0);
    }
  }
}

}  // namespace

ProjectedGraph project_graph(const SkeletonGraph& g0, const Complex& grid, const Box& box, int level,
                             const BoundarySpec& boundary, const FFOptions& opts, double threshold_fraction, Rng& rng) {
  const SkeletonGraph g = g0.compacted();
  const int n = g.ambient_dim();
  GridFrame frame;
  frame.lo = box.lo;
  frame.level = level;
  for (int i = 0; i < n; ++i) frame.extent.push_back(static_cast<std::int64_t>(std::ldexp(box.hi[i] - box.lo[i], level)));
  const double side = frame.side();
  const double h = side / 8.0;

  // Samples: one per node, then the interior of each edge as a chain.
  std::vector<Point> pts;
  for (std::size_t v = 0; v < g.capacity(); ++v) pts.push_back(g.position(static_cast<int>(v)));
  std::vector<std::vector<std::size_t>> chains;
  for (auto [a, b] : g.edges()) {
    const Point pa = g.position(a), pb = g.position(b);
    const int m = std::max(1, static_cast<int>(std::ceil((pb - pa).norm() / h)));
    std::vector<std::size_t> chain{static_cast<std::size_t>(a)};
    for (int i = 1; i < m; ++i) {
      chain.push_back(pts.size());
      pts.push_back(pa + (pb - pa) * (static_cast<double>(i) / m));
    }
    chain.push_back(static_cast<std::size_t>(b));
    chains.push_back(std::move(chain));
  }
  for (const auto& p : pts)
    if (!box.contains(p)) throw InputError("set leaves the domain box");
  SampledSet s(1, n, pts, std::vector<double>(pts.size(), 1.0), h);

  ProjectedGraph out;
  FFOptions o = opts;
  if (o.delta <= 0.0) o.delta = 2.0 * h;
  out.ff = ff_project(grid, 1, s, o, rng);
  const auto& img = out.ff.mapped.points();

  std::vector<SkelPoint> sk;
  sk.reserve(img.size());
  for (const auto& y : img) sk.push_back(classify(frame, y));
  Coverage cov;
  for (const auto& chain : chains)
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) cover_path(frame, sk[chain[k]], sk[chain[k + 1]], cov);

  SkeletonGraph result(n);
  std::map<std::vector<std::int64_t>, int> vertex_ids;
  auto vertex = [&](const std::vector<std::int64_t>& v) {
    auto it = vertex_ids.find(v);
    if (it != vertex_ids.end()) return it->second;
    Point p(n);
    for (int i = 0; i < n; ++i) p[i] = box.lo[i] + std::ldexp(static_cast<double>(v[i]), -level);
    int id = result.add_node(p);
    vertex_ids.emplace(v, id);
    return id;
  };
  for (auto& [key, intervals] : cov) {
    const auto& [base, axis] = key;
    std::sort(intervals.begin(), intervals.end());
    std::vector<std::pair<double, double>> merged;
    for (auto iv : intervals) {
      if (!merged.empty() && iv.first <= merged.back().second + 1e-12)
        merged.back().second = std::max(merged.back().second, iv.second);
      else
        merged.push_back(iv);
    }
    auto top = base;
    ++top[axis];
    double covered = 0.0;
    for (auto [a, b] : merged) covered += b - a;
    if (covered < threshold_fraction * 0.5) {
      // Collapse onto the end vertices from the uncovered point of the middle half farthest from the set.
      double best_c = 0.5, best_gap = -1.0;
      for (int i = 0; i <= 8; ++i) {
        double c = 0.25 + 0.0625 * i, gap = kInfinity;
        for (auto [a, b] : merged) gap = std::min(gap, c < a ? a - c : (c > b ? c - b : 0.0));
        if (gap > best_gap) {
          best_gap = gap;
          best_c = c;
        }
      }
      for (auto [a, b] : merged) vertex(b <= best_c ? base : top);
      ++out.pruned;
      continue;
    }
    auto node_at = [&](double t) {
      if (t <= 0.0) return vertex(base);
      if (t >= 1.0) return vertex(top);
      Point p(n);
      for (int i = 0; i < n; ++i) p[i] = box.lo[i] + std::ldexp(static_cast<double>(base[i]), -level);
      p[axis] += t * side;
      return result.add_node(p);
    };
    for (auto [a, b] : merged) result.add_edge(node_at(a), node_at(b));
  }
  for (const auto& a : boundary.anchors) attach_anchor(result, a, kInfinity);
  out.graph = result.compacted();
  return out;
}

namespace {

struct AuditPoint {
  Point center;
  double radius;
};

// Balls around junctions and edge midpoints that stay clear of anchors.
std::vector<AuditPoint> audit_points(const SkeletonGraph& g, double max_radius, double min_radius) {
  std::vector<Point> centers;
  for (std::size_t v = 0; v < g.capacity(); ++v) {
    const int iv = static_cast<int>(v);
    if (g.alive(iv) && !g.fixed(iv) && g.degree(iv) >= 3) centers.push_back(g.position(iv));
  }
  for (auto [a, b] : g.edges()) centers.push_back(0.5 * (g.position(a) + g.position(b)));
  std::vector<AuditPoint> out;
  for (const auto& c : centers) {
    double r = max_radius;
    for (std::size_t v = 0; v < g.capacity(); ++v) {
      const int iv = static_cast<int>(v);
      if (!g.alive(iv)) continue;
      const double dist = (g.position(iv) - c).norm();
      if (dist > 1e-12) r = std::min(r, 0.45 * dist);
    }
    if (r >= min_radius) out.push_back({c, r});
  }
  return out;
}

std::vector<Point> bump(const std::vector<Point>& pts, const Point& c, double r, const Point& dir, double amp) {
  std::vector<Point> out = pts;
  for (auto& p : out) {
    double s = (p - c).norm() / r;
    if (s < 1.0) p += amp * (1.0 - s * s) * (1.0 - s * s) * dir;
  }
  return out;
}

bool anchors_present(const SkeletonGraph& g, const std::vector<Point>& anchors) {
  for (const auto& a : anchors) {
    bool found = false;
    for (std::size_t v = 0; v < g.capacity() && !found; ++v) {
      const int iv = static_cast<int>(v);
      found = g.alive(iv) && g.fixed(iv) && g.position(iv) == a;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

MinimizeResult minimize(const ProblemConfig& cfg) {
  MinimizeResult res;
  SkeletonGraph current = initial_graph(cfg);
  const Rng root(cfg.seed);
  std::vector<Point> anchors = cfg.boundary.anchors;
  for (const auto& f : cfg.boundary.faces) anchors.push_back(f.lo_point());
  BoundarySpec gamma;
  gamma.anchors = anchors;

  double energy = graph_energy(current, cfg.integrand, cfg.spacing);
  res.initial_energy = energy;
  res.accepted_energies.push_back(energy);
  res.anchors_conserved = anchors_present(current, anchors);

  FFOptions ff;
  ff.lambda = cfg.lambda;
  ff.delta = cfg.delta;

  const auto levels = schedule_levels(cfg);
  for (std::size_t k = 0; k < levels.size(); ++k) {
    IterationReport rep;
    rep.k = static_cast<int>(k);
    rep.level = levels[k];
    rep.energy_before = energy;
    try {
      Complex grid = grid_complex(cfg.domain.lo, cfg.domain.hi, levels[k], true);
      rep.cells = grid.size();
      Rng rng = root.derive("iteration", k);
      ProjectedGraph pg = project_graph(current, grid, cfg.domain, levels[k], gamma, ff, cfg.threshold_fraction, rng);
      rep.ff_ratio = pg.ff.global_ratio;
      rep.pruned_cells = pg.pruned;
      SkeletonGraph cand = break_cycles(pg.graph);
      rep.relax = relax_skeleton(cand, cfg.relax);
      cand = cand.compacted();
      rep.nodes = cand.node_count();
      rep.energy_after = graph_energy(cand, cfg.integrand, cfg.spacing);
      rep.junction_deviation_deg = junction_angles(cand).max_deviation_deg;

      SampledSet fine = resample_graph(cand, cfg.spacing / 20.0);
      std::vector<Point> centers;
      std::vector<double> radii;
      for (const auto& ap : audit_points(cand, 0.1, cfg.spacing)) {
        centers.push_back(ap.center);
        radii.push_back(ap.radius);
      }
      rep.ahlfors_min = rep.ahlfors_max = 0.0;
      for (std::size_t i = 0; i < centers.size(); ++i) {
        AhlforsTable t = ahlfors_audit(fine, {centers[i]}, {radii[i]});
        rep.ahlfors_min = i == 0 ? t.min_ratio : std::min(rep.ahlfors_min, t.min_ratio);
        rep.ahlfors_max = std::max(rep.ahlfors_max, t.max_ratio);
      }

      if (!anchors_present(cand, anchors)) {
        rep.note = "anchors lost";
      } else if (rep.energy_after < energy) {
        rep.accepted = true;
        energy = rep.energy_after;
        current = std::move(cand);
      }
    } catch (const CenterExhausted& e) {
      rep.note = std::string("center selection exhausted: ") + e.what();
    }
    res.reports.push_back(rep);
    if (rep.accepted) {
      if (energy > res.accepted_energies.back()) res.monotone = false;
      res.accepted_energies.push_back(energy);
    }
    res.anchors_conserved = res.anchors_conserved && anchors_present(current, anchors);
  }

  res.graph = current;
  res.final_energy = energy;
  res.final_set = resample_graph(current, cfg.spacing);
  res.angles = junction_angles(current);

  // Audits on a fine resampling against small bump deformations.
  SampledSet fine = resample_graph(current, cfg.spacing / 20.0);
  DomainOracle domain = DomainOracle::open_box(cfg.domain);
  Rng arng = root.derive("audit");
  bool first = true;
  for (const auto& ap : audit_points(current, 0.1, cfg.spacing)) {
    AhlforsTable t = ahlfors_audit(fine, {ap.center}, {ap.radius});
    res.audits.ahlfors_min = first ? t.min_ratio : std::min(res.audits.ahlfors_min, t.min_ratio);
    res.audits.ahlfors_max = std::max(res.audits.ahlfors_max, t.max_ratio);
    first = false;
    if (domain.dist_to_complement(ap.center) < ap.radius) continue;
    Point dir(cfg.n);
    for (int i = 0; i < cfg.n; ++i) dir[i] = arng.normal();
    dir.normalize();
    auto images = bump(fine.points(), ap.center, ap.radius, dir, 0.1 * ap.radius);
    Ball ball{ap.center, ap.radius};
    ++res.audits.deformations;
    if (quasimin_audit(fine, images, ball, cfg.quasimin, cfg.integrand, &domain).satisfied)
      ++res.audits.quasimin_passed;
    if (sliding_validate(fine.points(), images, gamma, ball, 2.0, cfg.eps_geom).passed()) ++res.audits.sliding_passed;
  }
  return res;
}

}  // namespace plateau
