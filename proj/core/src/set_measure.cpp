#include "plateau/set_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plateau/errors.hpp"

namespace plateau {

OccupancyGrid::OccupancyGrid(int dim, double delta) : dim_(dim), delta_(delta) {
  if (!(delta > 0.0)) throw InputError("occupancy grid: delta must be positive");
  if (dim < 0 || dim > kMaxDim) throw InputError("occupancy grid: dimension out of range");
}

OccupancyGrid::Key OccupancyGrid::key(const Eigen::VectorXd& c) const {
  Key k{};
  for (int i = 0; i < dim_; ++i) k[i] = static_cast<std::int64_t>(std::floor(c[i] / delta_ + kOffset));
  return k;
}

void OccupancyGrid::insert(const Eigen::VectorXd& c) {
  keys_.push_back(key(c));
  finalized_ = false;
}

void OccupancyGrid::finalize() {
  std::sort(keys_.begin(), keys_.end());
  keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
  finalized_ = true;
}

double OccupancyGrid::mass() const { return mass(dim_); }

double OccupancyGrid::mass(int d) const { return static_cast<double>(count()) * std::pow(delta_, d); }

bool OccupancyGrid::contains(const Eigen::VectorXd& c) const {
  if (!finalized_) throw InputError("occupancy grid queried before finalize()");
  return std::binary_search(keys_.begin(), keys_.end(), key(c));
}

std::vector<Eigen::VectorXd> OccupancyGrid::cell_corners() const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(keys_.size());
  for (const auto& k : keys_) {
    Eigen::VectorXd lo(dim_);
    for (int i = 0; i < dim_; ++i) lo[i] = (static_cast<double>(k[i]) - kOffset) * delta_;
    out.push_back(lo);
  }
  return out;
}

double hausdorff_estimate(const SampledSet& s, double delta) {
  if (!(delta > 0.0)) throw InputError("hausdorff_estimate: delta must be positive");
  OccupancyGrid g(s.n(), delta);
  for (const auto& p : s.points()) g.insert(p);
  g.finalize();
  return g.mass(s.d());
}

double hausdorff_estimate(const SampledSet& s) { return hausdorff_estimate(s, 2.0 * s.resolution()); }

double weight_mass(const SampledSet& s) {
  return std::accumulate(s.weights().begin(), s.weights().end(), 0.0);
}

double project_measure(const SampledSet& s, const LinearPlane& v, double delta) {
  if (v.d() != s.d() || v.n() != s.n()) throw InputError("project_measure: plane dimension mismatch");
  OccupancyGrid g(v.d(), delta);
  for (const auto& p : s.points()) g.insert(v.coords(p));
  g.finalize();
  return g.mass();
}

namespace {

MCEstimate summarize(const std::vector<double>& v) {
  MCEstimate e;
  e.samples = v.size();
  if (v.empty()) return e;
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  e.value = mean;
  e.std_error = v.size() > 1 ? std::sqrt(var / (v.size() - 1) / v.size()) : 0.0;
  return e;
}

}  // namespace

MCEstimate zeta_gauge(const SampledSet& s, std::size_t n_planes, double delta, Rng& rng) {
  std::vector<double> vals;
  vals.reserve(n_planes);
  for (std::size_t i = 0; i < n_planes; ++i) vals.push_back(project_measure(s, haar_sample(s.d(), s.n(), rng), delta));
  return summarize(vals);
}

MCEstimate zeta_restricted(const SampledSet& s, const Cell& a, std::size_t n_planes, double delta, Rng& rng) {
  if (a.dim() < s.d()) throw InputError("zeta_restricted: cell dimension below d");
  std::vector<int> axes;
  for (int i = 0; i < a.ambient_dim(); ++i)
    if (a.spans(i)) axes.push_back(i);
  std::vector<Eigen::VectorXd> coords;
  for (const auto& p : s.points()) {
    if (cell_membership(a, p, kEpsGeom) == Membership::Outside) continue;
    Eigen::VectorXd c(axes.size());
    for (std::size_t j = 0; j < axes.size(); ++j) c[j] = p[axes[j]];
    coords.push_back(c);
  }
  MCEstimate e;
  if (coords.empty()) {
    e.samples = n_planes;
    return e;
  }
  const int m = static_cast<int>(axes.size());
  auto measure = [&](const LinearPlane& v) {
    OccupancyGrid g(s.d(), delta);
    for (const auto& c : coords) g.insert(v.coords(c));
    g.finalize();
    return g.mass();
  };
  if (m == s.d()) {
    e.value = measure(LinearPlane::coordinate(m, m));
    e.samples = 1;
    return e;
  }
  std::vector<double> vals;
  for (std::size_t i = 0; i < n_planes; ++i) vals.push_back(measure(haar_sample(s.d(), m, rng)));
  return summarize(vals);
}

Integrand Integrand::hausdorff() { return Integrand(); }

Integrand Integrand::position(PositionFn f, double lambda) {
  if (lambda < 1.0) throw InputError("integrand bound must be >= 1");
  Integrand i;
  i.kind_ = IntegrandKind::PositionOnly;
  i.lambda_ = lambda;
  i.position_ = std::move(f);
  return i;
}

Integrand Integrand::anisotropic(AnisotropicFn f, double lambda) {
  if (lambda < 1.0) throw InputError("integrand bound must be >= 1");
  Integrand i;
  i.kind_ = IntegrandKind::Anisotropic;
  i.lambda_ = lambda;
  i.anisotropic_ = std::move(f);
  return i;
}

double Integrand::operator()(const Point& x, const LinearPlane* tangent) const {
  double v = 1.0;
  switch (kind_) {
    case IntegrandKind::Hausdorff:
      return 1.0;
    case IntegrandKind::PositionOnly:
      v = position_(x);
      break;
    case IntegrandKind::Anisotropic:
      if (!tangent) throw InputError("anisotropic integrand needs a tangent plane");
      v = anisotropic_(x, *tangent);
      break;
  }
  const double slack = 1e-12;
  if (!(v >= 1.0 / lambda_ - slack && v <= lambda_ + slack)) throw InputError("integrand value leaves [1/lambda, lambda]");
  return v;
}

std::vector<LinearPlane> estimate_tangents(const SampledSet& s, int pca_k) {
  const std::size_t n = s.size();
  const int d = s.d();
  if (d == 0) return std::vector<LinearPlane>(n, LinearPlane(Eigen::MatrixXd(0, s.n())));
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(pca_k), n);
  if (k < static_cast<std::size_t>(d + 1)) throw InputError("estimate_tangents: insufficient neighbors");
  std::vector<LinearPlane> out;
  out.reserve(n);
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist[j] = {(s.point(j) - s.point(i)).squaredNorm(), j};
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(s.n());
    for (std::size_t j = 0; j < k; ++j) mean += s.point(dist[j].second);
    mean /= static_cast<double>(k);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(s.n(), s.n());
    for (std::size_t j = 0; j < k; ++j) {
      Eigen::VectorXd c = s.point(dist[j].second) - mean;
      cov += c * c.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::MatrixXd frame(d, s.n());
    for (int r = 0; r < d; ++r) frame.row(r) = es.eigenvectors().col(s.n() - 1 - r).transpose();
    out.push_back(LinearPlane::from_spanning(frame));
  }
  return out;
}

double energy_eval(const SampledSet& s, const Integrand& integrand, int pca_k) {
  if (integrand.kind() == IntegrandKind::Hausdorff) return weight_mass(s);
  std::vector<LinearPlane> tangents;
  const std::vector<LinearPlane>* t = nullptr;
  if (integrand.kind() == IntegrandKind::Anisotropic) {
    if (s.has_tangents()) {
      t = &s.tangents();
    } else {
      tangents = estimate_tangents(s, pca_k);
      t = &tangents;
    }
  }
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) e += s.weight(i) * integrand(s.point(i), t ? &(*t)[i] : nullptr);
  return e;
}

namespace {

// Indices grouped by occupancy cell.
std::vector<std::vector<std::size_t>> group_by_cell(const std::vector<Point>& pts, double delta) {
  if (pts.empty()) return {};
  OccupancyGrid g(static_cast<int>(pts.front().size()), delta);
  std::vector<std::pair<OccupancyGrid::Key, std::size_t>> keyed;
  keyed.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) keyed.emplace_back(g.key(pts[i]), i);
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i == 0 || keyed[i].first != keyed[i - 1].first) groups.emplace_back();
    groups.back().push_back(keyed[i].second);
  }
  return groups;
}

}  // namespace

double occupancy_energy(const std::vector<Point>& points, int d, const Integrand& integrand, double delta,
                        const std::vector<LinearPlane>* tangents, double spread) {
  if (!(delta > 0.0)) throw InputError("occupancy_energy: delta must be positive");
  if (tangents && tangents->size() != points.size()) throw InputError("occupancy_energy: one tangent per point needed");
  if (points.empty()) return 0.0;
  const double cell = std::pow(delta, d);

  // Sub-samples on a kFill^d lattice of the tangent patch; parent[j] is the source sample.
  constexpr int kFill = 4;
  std::vector<Point> pts;
  std::vector<std::size_t> parent;
  if (tangents && spread > 0.0 && d >= 1) {
    const std::size_t per = static_cast<std::size_t>(std::pow(kFill, d));
    pts.reserve(points.size() * per);
    parent.reserve(points.size() * per);
    std::vector<int> idx(d);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Eigen::MatrixXd& f = (*tangents)[i].frame();
      for (std::size_t c = 0; c < per; ++c) {
        std::size_t rest = c;
        Point p = points[i];
        for (int j = 0; j < d; ++j) {
          const int step = static_cast<int>(rest % kFill);
          rest /= kFill;
          p += spread * ((step + 0.5) / kFill - 0.5) * f.col(j);
        }
        pts.push_back(std::move(p));
        parent.push_back(i);
      }
    }
  } else {
    pts = points;
    parent.resize(points.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }

  // Averaging over diagonal grid shifts smooths the count of boxes crossed by oblique pieces.
  constexpr int kShifts = 4;
  double e = 0.0;
  std::vector<Point> shifted(pts);
  for (int sh = 0; sh < kShifts; ++sh) {
    const double off = delta * sh / kShifts;
    for (std::size_t i = 0; i < pts.size(); ++i) shifted[i] = pts[i].array() + off;
    for (const auto& group : group_by_cell(shifted, delta)) {
      double mean = 0.0, crossing = 0.0;
      for (auto j : group) {
        const std::size_t i = parent[j];
        const LinearPlane* t = tangents ? &(*tangents)[i] : nullptr;
        mean += integrand(points[i], t);
        if (t) crossing += crossing_factor(*t);
      }
      mean /= static_cast<double>(group.size());
      crossing = tangents ? std::max(1.0, crossing / static_cast<double>(group.size())) : 1.0;
      e += cell * mean / crossing;
    }
  }
  return e / kShifts;
}

double crossing_factor(const LinearPlane& t) {
  const int d = t.d(), n = t.n();
  if (d == 0) return 1.0;
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  double sum = 0.0;
  while (true) {
    Eigen::MatrixXd sub(d, d);
    for (int j = 0; j < d; ++j) sub.col(j) = t.frame().col(idx[j]);
    sum += std::abs(sub.determinant());
    int i = d - 1;
    while (i >= 0 && idx[i] == n - d + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  return sum;
}

double hausdorff_estimate_oriented(const SampledSet& s, double delta, const std::vector<LinearPlane>& tangents) {
  if (!(delta > 0.0)) throw InputError("hausdorff_estimate_oriented: delta must be positive");
  if (tangents.size() != s.size()) throw InputError("hausdorff_estimate_oriented: one tangent per sample needed");
  const double cell = std::pow(delta, s.d());
  double e = 0.0;
  for (const auto& group : group_by_cell(s.points(), delta)) {
    double c = 0.0;
    for (auto i : group) c += crossing_factor(tangents[i]);
    c /= static_cast<double>(group.size());
    e += cell / std::max(c, 1.0);
  }
  return e;
}

AhlforsTable ahlfors_audit(const SampledSet& s, const std::vector<Point>& centers, const std::vector<double>& radii,
                           double delta) {
  if (delta <= 0.0) delta = kAuditDeltaFactor * s.resolution();
  AhlforsTable table;
  if (s.size() == 0) return table;
  const std::vector<LinearPlane> tangents = s.has_tangents() ? s.tangents() : estimate_tangents(s);
  table.min_ratio = kInfinity;
  table.max_ratio = 0.0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (double r : radii) {
      std::vector<std::size_t> idx;
      std::vector<LinearPlane> t;
      for (std::size_t i = 0; i < s.size(); ++i)
        if ((s.point(i) - centers[c]).norm() <= r) {
          idx.push_back(i);
          t.push_back(tangents[i]);
        }
      double ratio = hausdorff_estimate_oriented(s.subset(idx), delta, t) / std::pow(r, s.d());
      table.entries.push_back({c, r, ratio});
      table.min_ratio = std::min(table.min_ratio, ratio);
      table.max_ratio = std::max(table.max_ratio, ratio);
    }
  }
  return table;
}

QuasiminResult quasimin_audit(const SampledSet& s, const std::vector<Point>& images, const Ball& ball,
                              const QuasiminParams& params, const Integrand& integrand, const DomainOracle* domain,
                              double tol, double delta) {
  if (images.size() != s.size()) throw InputError("quasimin_audit: one image per sample needed");
  if (params.kappa < 1.0 || params.h < 0.0 || !(params.scale > 0.0)) throw InputError("quasimin_audit: bad parameters");
  if (domain && domain->dist_to_complement(ball.center) < ball.radius)
    throw InputError("quasimin_audit: ball is not inside the domain");
  if (delta <= 0.0) delta = kAuditDeltaFactor * s.resolution();
  const int d = s.d();
  const double spread = s.resolution();

  // Tangents of the source and of the whole image cloud correct the box-counting orientation bias.
  const bool oriented = d >= 1 && s.size() > static_cast<std::size_t>(d);
  std::vector<LinearPlane> src_t, img_t;
  if (oriented) {
    src_t = s.has_tangents() ? s.tangents() : estimate_tangents(s);
    img_t = estimate_tangents(s.with_points(images));
  }

  QuasiminResult r;
  std::vector<Point> moved, moved_images, inner;
  std::vector<LinearPlane> moved_t, moved_img_t, inner_t;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (params.h > 0.0 && (s.point(i) - ball.center).norm() < params.h * ball.radius) {
      inner.push_back(s.point(i));
      if (oriented) inner_t.push_back(src_t[i]);
    }
    if ((images[i] - s.point(i)).norm() <= kEpsGeom) continue;
    moved.push_back(s.point(i));
    moved_images.push_back(images[i]);
    if (oriented) {
      moved_t.push_back(src_t[i]);
      moved_img_t.push_back(img_t[i]);
    }
  }
  r.moved = moved.size();
  if (!moved.empty()) {
    r.lhs = occupancy_energy(moved, d, integrand, delta, oriented ? &moved_t : nullptr, spread);
    r.rhs = params.kappa * occupancy_energy(moved_images, d, integrand, delta, oriented ? &moved_img_t : nullptr, spread);
  }
  if (!inner.empty())
    r.rhs += params.h * occupancy_energy(inner, d, integrand, delta, oriented ? &inner_t : nullptr, spread);
  r.satisfied = r.lhs <= r.rhs * (1.0 + tol) + 1e-15;
  return r;
}

}  // namespace plateau
