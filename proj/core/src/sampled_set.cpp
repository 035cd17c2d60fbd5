#include "plateau/sampled_set.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "plateau/errors.hpp"

namespace plateau {

SampledSet::SampledSet(int d, int n, std::vector<Point> points, std::vector<double> weights, double resolution,
                       std::vector<LinearPlane> tangents)
    : d_(d), n_(n), points_(std::move(points)), weights_(std::move(weights)), resolution_(resolution),
      tangents_(std::move(tangents)) {
  if (d < 0 || d > n) throw InputError("sampled set: need 0 <= d <= n");
  if (points_.size() != weights_.size()) throw InputError("sampled set: points and weights differ in count");
  if (!tangents_.empty() && tangents_.size() != points_.size())
    throw InputError("sampled set: tangents and points differ in count");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() != n) throw InputError("sampled set: point dimension mismatch");
    if (!points_[i].allFinite()) throw InputError("sampled set: non-finite coordinate");
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) throw InputError("sampled set: weights must be positive");
  }
  if (resolution_ < 0.0) throw InputError("sampled set: negative resolution");
}

SampledSet SampledSet::with_points(std::vector<Point> points) const {
  return SampledSet(d_, n_, std::move(points), weights_, resolution_);
}

SampledSet SampledSet::subset(const std::vector<std::size_t>& idx) const {
  std::vector<Point> p;
  std::vector<double> w;
  std::vector<LinearPlane> t;
  for (auto i : idx) {
    p.push_back(points_[i]);
    w.push_back(weights_[i]);
    if (has_tangents()) t.push_back(tangents_[i]);
  }
  return SampledSet(d_, n_, std::move(p), std::move(w), resolution_, std::move(t));
}

SampledSet SampledSet::filter(const std::function<bool(const Point&)>& keep) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < size(); ++i)
    if (keep(points_[i])) idx.push_back(i);
  return subset(idx);
}

Box SampledSet::bounding_box() const {
  Box b{Point::Constant(n_, kInfinity), Point::Constant(n_, -kInfinity)};
  for (const auto& p : points_) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

SampledSet merge(const SampledSet& a, const SampledSet& b) {
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  if (a.d() != b.d() || a.n() != b.n()) throw InputError("merge: sets differ in (d, n)");
  std::vector<Point> p = a.points();
  std::vector<double> w = a.weights();
  p.insert(p.end(), b.points().begin(), b.points().end());
  w.insert(w.end(), b.weights().begin(), b.weights().end());
  return SampledSet(a.d(), a.n(), std::move(p), std::move(w), std::max(a.resolution(), b.resolution()));
}

namespace {

// Trapezoid samples along one segment, endpoints included.
void append_segment(const Point& p, const Point& q, double spacing, std::vector<Point>& pts, std::vector<double>& w) {
  const double len = (q - p).norm();
  const auto m = std::max<long>(1, static_cast<long>(std::ceil(len / spacing - 1e-12)));
  const double h = len / m;
  for (long j = 0; j <= m; ++j) {
    double t = static_cast<double>(j) / m;
    pts.push_back(j == m ? q : Point(p + t * (q - p)));
    w.push_back((j == 0 || j == m) ? 0.5 * h : h);
  }
}

SampledSet drop_zero_weights(int d, int n, std::vector<Point> pts, std::vector<double> w, double res) {
  std::vector<Point> p2;
  std::vector<double> w2;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (w[i] > 0.0) {
      p2.push_back(std::move(pts[i]));
      w2.push_back(w[i]);
    }
  return SampledSet(d, n, std::move(p2), std::move(w2), res);
}

}  // namespace

SampledSet sample_segment(const Point& p, const Point& q, double spacing) {
  return sample_polyline({p, q}, spacing);
}

SampledSet sample_polyline(const std::vector<Point>& vertices, double spacing) {
  if (vertices.size() < 2) throw InputError("polyline needs at least two vertices");
  if (!(spacing > 0.0)) throw InputError("spacing must be positive");
  std::vector<Point> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    if ((vertices[i + 1] - vertices[i]).norm() == 0.0) continue;
    if (i > 0 && !pts.empty()) {
      // Shared vertex: the first sample of this piece merges with the last one.
      std::vector<Point> piece;
      std::vector<double> pw;
      append_segment(vertices[i], vertices[i + 1], spacing, piece, pw);
      w.back() += pw.front();
      pts.insert(pts.end(), piece.begin() + 1, piece.end());
      w.insert(w.end(), pw.begin() + 1, pw.end());
    } else {
      append_segment(vertices[i], vertices[i + 1], spacing, pts, w);
    }
  }
  const int n = static_cast<int>(vertices.front().size());
  return drop_zero_weights(1, n, std::move(pts), std::move(w), spacing);
}

SampledSet sample_circle(const Point& center, double radius, double spacing) {
  const auto m = std::max<long>(3, static_cast<long>(std::ceil(2 * M_PI * radius / spacing)));
  std::vector<Point> pts;
  std::vector<double> w;
  for (long j = 0; j < m; ++j) {
    double t = 2 * M_PI * j / m;
    Point x = center;
    x[0] += radius * std::cos(t);
    x[1] += radius * std::sin(t);
    pts.push_back(x);
    w.push_back(2 * M_PI * radius / m);
  }
  return SampledSet(1, static_cast<int>(center.size()), std::move(pts), std::move(w), spacing);
}

SampledSet sample_square_boundary(const Point& corner, double side, double spacing) {
  Point a = corner, b = corner, c = corner, d = corner;
  b[0] += side;
  c[0] += side;
  c[1] += side;
  d[1] += side;
  SampledSet s = sample_polyline({a, b, c, d, a}, spacing);
  // The closing vertex duplicates the first one.
  std::vector<Point> pts = s.points();
  std::vector<double> w = s.weights();
  if (pts.size() > 1 && pts.back() == pts.front()) {
    w.front() += w.back();
    pts.pop_back();
    w.pop_back();
  }
  return SampledSet(1, s.n(), std::move(pts), std::move(w), spacing);
}

SampledSet sample_y_junction(const Point& center, double arm, double spacing, double angle0) {
  std::vector<Point> pts{center};
  std::vector<double> w{0.0};
  const auto m = std::max<long>(1, static_cast<long>(std::ceil(arm / spacing)));
  const double h = arm / m;
  for (int a = 0; a < 3; ++a) {
    double t = angle0 + a * 2.0 * M_PI / 3.0;
    Point dir = Point::Zero(center.size());
    dir[0] = std::cos(t);
    dir[1] = std::sin(t);
    w[0] += 0.5 * h;
    for (long j = 1; j <= m; ++j) {
      pts.push_back(center + (arm * j / m) * dir);
      w.push_back(j == m ? 0.5 * h : h);
    }
  }
  return SampledSet(1, static_cast<int>(center.size()), std::move(pts), std::move(w), spacing);
}

SampledSet sample_planar_disk(const Point& center, const Eigen::MatrixXd& frame, double radius, double spacing) {
  if (frame.rows() != 2) throw InputError("planar disk needs a 2-row frame");
  std::vector<Point> pts;
  std::vector<double> w;
  const auto m = static_cast<long>(std::ceil(radius / spacing));
  for (long i = -m; i <= m; ++i)
    for (long j = -m; j <= m; ++j) {
      double u = (i + 0.5) * spacing, v = (j + 0.5) * spacing;
      if (u * u + v * v > radius * radius) continue;
      pts.push_back(center + u * frame.row(0).transpose() + v * frame.row(1).transpose());
      w.push_back(spacing * spacing);
    }
  return SampledSet(2, static_cast<int>(center.size()), std::move(pts), std::move(w), spacing);
}

SampledSet cantor_four_corner(int m) {
  if (m < 0 || m > 8) throw InputError("cantor_four_corner: depth must lie in [0, 8]");
  std::vector<Point> corners{Point::Zero(2)};
  double side = 1.0;
  for (int level = 0; level < m; ++level) {
    std::vector<Point> next;
    next.reserve(corners.size() * 4);
    const double child = side / 4.0;
    for (const auto& c : corners)
      for (int dx = 0; dx < 2; ++dx)
        for (int dy = 0; dy < 2; ++dy) {
          Point p = c;
          p[0] += dx * (side - child);
          p[1] += dy * (side - child);
          next.push_back(p);
        }
    corners = std::move(next);
    side = child;
  }
  std::vector<Point> pts;
  for (const auto& c : corners) pts.push_back(c + Point::Constant(2, side / 2));
  std::vector<double> w(pts.size(), std::ldexp(1.0, -2 * m));
  return SampledSet(1, 2, std::move(pts), std::move(w), side);
}

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_row(const std::string& line, std::size_t lineno) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    std::string field = line.substr(pos, comma - pos);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r' || field.back() == '\t')) field.pop_back();
    std::size_t s = 0;
    while (s < field.size() && (field[s] == ' ' || field[s] == '\t')) ++s;
    double v = 0.0;
    const char* b = field.data() + s;
    const char* e = field.data() + field.size();
    if (b == e) throw ParseError("empty field", lineno);
    if (*b == '+') ++b;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) throw ParseError("malformed number '" + field + "'", lineno);
    out.push_back(v);
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return out;
}

double median_nn_spacing(const std::vector<Point>& pts) {
  if (pts.size() < 2) return 0.0;
  std::vector<double> nn;
  const std::size_t stride = std::max<std::size_t>(1, pts.size() / 512);
  for (std::size_t i = 0; i < pts.size(); i += stride) {
    double best = kInfinity;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i) {
        double d = (pts[i] - pts[j]).norm();
        if (d > 0) best = std::min(best, d);
      }
    if (std::isfinite(best)) nn.push_back(best);
  }
  if (nn.empty()) return 0.0;
  std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
  return nn[nn.size() / 2];
}

}  // namespace

void write_csv(std::ostream& os, const SampledSet& s) {
  for (int i = 0; i < s.n(); ++i) os << "x" << (i + 1) << ",";
  os << "weight\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    for (int i = 0; i < s.n(); ++i) os << shortest(s.point(k)[i]) << ",";
    os << shortest(s.weight(k)) << "\n";
  }
}

SampledSet read_csv(std::istream& is, int d, double resolution) {
  std::string line;
  std::size_t lineno = 0;
  int n = -1;
  std::vector<Point> pts;
  std::vector<double> w;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (n < 0) {
      // Header: x1..xn,weight
      std::vector<std::string> names;
      std::stringstream ss(line);
      std::string f;
      while (std::getline(ss, f, ',')) names.push_back(f);
      if (names.size() < 2 || names.back() != "weight") throw ParseError("header must end with 'weight'", lineno);
      for (std::size_t i = 0; i + 1 < names.size(); ++i)
        if (names[i] != "x" + std::to_string(i + 1)) throw ParseError("unexpected column '" + names[i] + "'", lineno);
      n = static_cast<int>(names.size()) - 1;
      continue;
    }
    auto row = parse_row(line, lineno);
    if (static_cast<int>(row.size()) != n + 1)
      throw ParseError("expected " + std::to_string(n + 1) + " fields, got " + std::to_string(row.size()), lineno);
    if (!(row.back() > 0.0)) throw ParseError("weight must be positive", lineno);
    pts.push_back(Eigen::Map<Eigen::VectorXd>(row.data(), n));
    w.push_back(row.back());
  }
  if (n < 0) throw ParseError("missing header", lineno);
  if (d > n) throw InputError("set dimension exceeds ambient dimension");
  if (resolution <= 0.0) resolution = median_nn_spacing(pts);
  return SampledSet(d, n, std::move(pts), std::move(w), resolution);
}

std::vector<Point> read_points_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<Point> pts;
  int n = -1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == 'x') continue;  // header
    auto row = parse_row(line, lineno);
    if (n < 0) n = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != n) throw ParseError("inconsistent field count", lineno);
    pts.push_back(Eigen::Map<Eigen::VectorXd>(row.data(), n));
  }
  return pts;
}

}  // namespace plateau
