#include "plateau/grassmannian.hpp"

#include <algorithm>
#include <cmath>

#include "plateau/errors.hpp"
#include "plateau/sampled_set.hpp"
#include "plateau/set_measure.hpp"

namespace plateau {

namespace {

Eigen::MatrixXd orthonormal_rows(const Eigen::MatrixXd& rows) {
  const int d = static_cast<int>(rows.rows()), n = static_cast<int>(rows.cols());
  if (d == 0) return Eigen::MatrixXd(0, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(rows.transpose());
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, d);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(d, d);
  double rmax = 0.0;
  for (int i = 0; i < d; ++i) rmax = std::max(rmax, std::abs(r(i, i)));
  for (int i = 0; i < d; ++i) {
    if (std::abs(r(i, i)) <= 1e-12 * std::max(rmax, 1e-300)) throw InputError("rank-deficient spanning set");
    if (r(i, i) < 0) q.col(i) *= -1.0;
  }
  return q.transpose();
}

double sym_spectral_radius(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Operator norm of m via the symmetric matrix m^T m.
double norm_via_gram(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::MatrixXd g = m.transpose() * m;
  g = 0.5 * (g + g.transpose());
  return std::sqrt(std::max(0.0, sym_spectral_radius(g)));
}

void check_same(const LinearPlane& v, const LinearPlane& w) {
  if (v.d() != w.d() || v.n() != w.n()) throw InputError("planes differ in (d, n)");
}

}  // namespace

LinearPlane::LinearPlane(Eigen::MatrixXd frame) : frame_(std::move(frame)) {
  Eigen::MatrixXd g = frame_ * frame_.transpose();
  if ((g - Eigen::MatrixXd::Identity(d(), d())).cwiseAbs().maxCoeff() > 1e-10)
    throw InputError("frame rows are not orthonormal");
}

LinearPlane LinearPlane::from_spanning(const Eigen::MatrixXd& rows) { return LinearPlane(orthonormal_rows(rows)); }

LinearPlane LinearPlane::coordinate(int d, int n) {
  return LinearPlane(Eigen::MatrixXd::Identity(n, n).topRows(d));
}

Eigen::MatrixXd LinearPlane::complement_frame() const {
  const int dd = d(), nn = n();
  if (dd == 0) return Eigen::MatrixXd::Identity(nn, nn);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(frame_.transpose());
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(nn - dd).transpose();
}

double plane_distance(const LinearPlane& v, const LinearPlane& w) {
  check_same(v, w);
  Eigen::MatrixXd diff = v.projection() - w.projection();
  Eigen::MatrixXd sq = diff * diff;
  sq = 0.5 * (sq + sq.transpose());
  double r = std::sqrt(std::max(0.0, sym_spectral_radius(sq)));
  return std::clamp(r, 0.0, 1.0);
}

double plane_distance_restricted(const LinearPlane& v, const LinearPlane& w) {
  check_same(v, w);
  Eigen::MatrixXd diff = v.projection() - w.projection();
  return std::min(1.0, std::max(norm_via_gram(diff * v.frame().transpose()), norm_via_gram(diff * w.frame().transpose())));
}

double plane_distance_restricted_complement(const LinearPlane& v, const LinearPlane& w) {
  check_same(v, w);
  Eigen::MatrixXd diff = v.projection() - w.projection();
  return std::min(1.0, std::max(norm_via_gram(diff * v.frame().transpose()),
                                norm_via_gram(diff * v.complement_frame().transpose())));
}

double operator_norm(const Eigen::MatrixXd& m) { return norm_via_gram(m); }

LinearPlane graph_to_plane(const GraphMap& g) {
  const auto& f = g.base.frame();
  Eigen::MatrixXd comp = g.base.complement_frame();
  if (g.phi.rows() != comp.rows() || g.phi.cols() != f.rows()) throw InputError("graph map has the wrong shape");
  return LinearPlane::from_spanning(f + g.phi.transpose() * comp);
}

GraphMap plane_to_graph(const LinearPlane& v, const LinearPlane& w) {
  check_same(v, w);
  if (plane_distance(v, w) >= 1.0 - 1e-9) throw DistanceOne("planes at distance one have no graph parametrization");
  const Eigen::MatrixXd& f = v.frame();
  const Eigen::MatrixXd& b = w.frame();
  Eigen::MatrixXd p_star = f * b.transpose();  // W-coordinates to V-coordinates
  Eigen::MatrixXd comp = v.complement_frame();
  Eigen::MatrixXd phi = (comp * b.transpose()) * p_star.inverse();
  return GraphMap{v, phi};
}

double graph_norm_distance(const GraphMap& g) {
  double a = operator_norm(g.phi);
  return a / std::sqrt(1.0 + a * a);
}

IsomorphismImage apply_isomorphism(const Eigen::MatrixXd& u, const LinearPlane& v) {
  if (u.rows() != v.n() || u.cols() != v.n()) throw InputError("isomorphism has the wrong shape");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(u);
  const auto& s = svd.singularValues();
  double smax = s.maxCoeff(), smin = s.minCoeff();
  if (!(smin > 1e-12 * smax)) throw InputError("apply_isomorphism: singular map");
  return {LinearPlane::from_spanning(v.frame() * u.transpose()), smax / smin};
}

LinearPlane haar_sample(int d, int n, Rng& rng) {
  if (d < 0 || d > n) throw InputError("haar_sample: need 0 <= d <= n");
  if (d == n) return LinearPlane::coordinate(n, n);
  Eigen::MatrixXd g(d, n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  return LinearPlane(orthonormal_rows(g));
}

MCEstimate line_set_measure(const PlanePredicate& pred, int n, std::size_t samples, Rng& rng) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i)
    if (pred(haar_sample(1, n + 1, rng))) ++hits;
  double p = samples ? static_cast<double>(hits) / samples : 0.0;
  return {p, samples ? std::sqrt(p * (1 - p) / samples) : 0.0, samples};
}

DisintegrationResult disintegration_check(int p, int q, int n, const PlanePredicate& pred,
                                          std::size_t direct_samples, std::size_t outer_samples,
                                          std::size_t inner_samples, Rng& rng) {
  if (p < 0 || q < 0 || p + q > n) throw InputError("disintegration_check: need p + q <= n");
  DisintegrationResult out;
  Rng direct = rng.derive("disintegration-direct");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < direct_samples; ++i)
    if (pred(haar_sample(p + q, n, direct))) ++hits;
  double pl = direct_samples ? static_cast<double>(hits) / direct_samples : 0.0;
  out.lhs = {pl, direct_samples ? std::sqrt(pl * (1 - pl) / direct_samples) : 0.0, direct_samples};

  Rng nested = rng.derive("disintegration-nested");
  std::vector<double> means(outer_samples);
  for (std::size_t o = 0; o < outer_samples; ++o) {
    LinearPlane v = haar_sample(p, n, nested);
    Eigen::MatrixXd perp = v.complement_frame();
    std::size_t h = 0;
    for (std::size_t i = 0; i < inner_samples; ++i) {
      LinearPlane wc = haar_sample(q, n - p, nested);
      Eigen::MatrixXd rows(p + q, n);
      rows.topRows(p) = v.frame();
      rows.bottomRows(q) = wc.frame() * perp;
      if (pred(LinearPlane::from_spanning(rows))) ++h;
    }
    means[o] = inner_samples ? static_cast<double>(h) / inner_samples : 0.0;
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean = outer_samples ? mean / outer_samples : 0.0;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  double se = outer_samples > 1 ? std::sqrt(var / (outer_samples - 1) / outer_samples) : 0.0;
  out.rhs = {mean, se, outer_samples * inner_samples};
  out.sigma = std::sqrt(out.lhs.std_error * out.lhs.std_error + out.rhs.std_error * out.rhs.std_error);
  return out;
}

double sphere_measure(int k) {
  const double a = 0.5 * (k + 1);
  return 2.0 * std::pow(M_PI, a) / std::tgamma(a);
}

HyperplaneLineBound hyperplane_line_bound(const AffinePlane& h, const SampledSet& a, std::size_t samples, Rng& rng,
                                          double delta) {
  const int m = h.direction.n();
  if (h.direction.d() != m - 1) throw InputError("hyperplane_line_bound: H must be a hyperplane");
  Eigen::VectorXd nu = h.direction.complement_frame().row(0).transpose();
  double r0 = nu.dot(h.point);
  if (r0 < 0) {
    nu = -nu;
    r0 = -r0;
  }
  if (r0 <= kEpsGeom) throw InputError("hyperplane_line_bound: H passes through the origin");
  HyperplaneLineBound out;
  out.r0 = r0;
  if (a.size() == 0) return out;
  if (delta <= 0.0) delta = 2.0 * a.resolution();
  const Eigen::VectorXd foot = r0 * nu;
  const Eigen::MatrixXd& f = h.direction.frame();

  std::vector<Eigen::VectorXd> coords;
  coords.reserve(a.size());
  for (const auto& x : a.points()) coords.push_back(f * (x - foot));
  OccupancyGrid grid(m - 1, delta);
  for (const auto& c : coords) grid.insert(c);
  grid.finalize();
  out.lhs = grid.mass();

  double far2 = 0.0;
  for (const auto& cell_lo : grid.cell_corners()) {
    double s = 0.0;
    for (int i = 0; i < m - 1; ++i) {
      double lo = cell_lo[i], hi = cell_lo[i] + delta;
      s += std::max(lo * lo, hi * hi);
    }
    far2 = std::max(far2, s);
  }
  out.r = std::sqrt(r0 * r0 + far2);
  out.distance_bound = std::sqrt(std::max(0.0, 1.0 - (r0 / out.r) * (r0 / out.r)));

  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    Eigen::VectorXd u = haar_sample(1, m, rng).frame().row(0).transpose();
    double s = u.dot(nu);
    if (std::abs(s) < 1e-15) continue;
    Eigen::VectorXd x = (r0 / s) * u;
    if (!grid.contains(f * (x - foot))) continue;
    ++hits;
    double dist = std::sqrt(std::max(0.0, 1.0 - s * s));
    out.max_line_distance = std::max(out.max_line_distance, dist);
  }
  double g = samples ? static_cast<double>(hits) / samples : 0.0;
  out.gamma = {g, samples ? std::sqrt(g * (1 - g) / samples) : 0.0, samples};
  const double factor = 0.5 * sphere_measure(m - 1) * std::pow(out.r * out.r / r0, m - 1);
  out.rhs = factor * g;
  out.rhs_sigma = factor * out.gamma.std_error;
  out.distance_ok = out.max_line_distance <= out.distance_bound + 1e-12;
  return out;
}

GrassSelftest grassmannian_selftest(const std::vector<std::pair<int, int>>& dims, std::size_t pairs, Rng& rng,
                                    double tol) {
  GrassSelftest r;
  auto fail = [&](const std::string& what) {
    if (r.passed) r.failure = what;
    r.passed = false;
  };
  for (auto [d, n] : dims) {
    const std::string tag = "(" + std::to_string(d) + "," + std::to_string(n) + ")";
    for (std::size_t i = 0; i < pairs; ++i) {
      LinearPlane v = haar_sample(d, n, rng), w = haar_sample(d, n, rng);
      const double dist = plane_distance(v, w);
      ++r.pairs;
      r.min_distance = std::min(r.min_distance, dist);
      r.max_distance = std::max(r.max_distance, dist);
      if (dist < 0.0 || dist > 1.0) fail("distance outside [0,1] in " + tag);

      const double dc = plane_distance(v.complement(), w.complement());
      r.max_complement_error = std::max(r.max_complement_error, std::abs(dist - dc));
      if (std::abs(dist - dc) > tol) fail("complement isometry in " + tag);

      if (dist < 1.0 - 1e-6) {
        GraphMap g = plane_to_graph(v, w);
        double e1 = std::abs(graph_norm_distance(g) - dist);
        double e2 = plane_distance(graph_to_plane(g), w);
        r.max_graph_error = std::max({r.max_graph_error, e1, e2});
        if (e1 > tol || e2 > tol) fail("graph map mismatch in " + tag);
      } else {
        ++r.graph_skips;
      }

      // Near-identity map with |u - id| = 0.2 and a general well-conditioned map.
      Eigen::MatrixXd e(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) e(a, b) = rng.normal();
      e *= 0.2 / operator_norm(e);
      Eigen::MatrixXd u = Eigen::MatrixXd::Identity(n, n) + e;
      if (plane_distance(apply_isomorphism(u, v).plane, v) > 0.2 / 0.8 + tol) {
        ++r.iso_violations;
        fail("near-identity bound in " + tag);
      }
      Eigen::MatrixXd g(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) g(a, b) = rng.normal();
      g += 2.0 * Eigen::MatrixXd::Identity(n, n);
      IsomorphismImage uv = apply_isomorphism(g, v), uw = apply_isomorphism(g, w);
      if (plane_distance(uv.plane, uw.plane) > uv.condition * dist + tol) {
        ++r.iso_violations;
        fail("conditioning bound in " + tag);
      }
    }
  }
  return r;
}

}  // namespace plateau
