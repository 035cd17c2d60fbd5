#include "plateau/schedule.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "plateau/dyadic.hpp"
#include "plateau/errors.hpp"

namespace plateau {

namespace mp = boost::multiprecision;
using Rational = mp::cpp_rational;

namespace {

Rational pow2_neg(int q) { return Rational(1, mp::cpp_int(1) << q); }

Rational pow(const Rational& base, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

void check_mu(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw InputError("mu must lie in (0, 1)");
}

}  // namespace

std::vector<int> q_schedule(double mu, int count) {
  check_mu(mu);
  if (count < 0 || count > 60) throw InputError("q_schedule: count must lie in [0, 60]");
  const Rational m(mu);  // exact binary value
  Rational rem(1, 2);
  std::vector<int> q;
  for (int k = 0; k < count; ++k) {
    const Rational bound = (1 - m) * rem;
    int e = 0;
    while (pow2_neg(e) > bound) ++e;
    q.push_back(e);
    rem -= pow2_neg(e);
  }
  return q;
}

QScheduleCheck check_q_schedule(double mu, const std::vector<int>& q) {
  check_mu(mu);
  const Rational m(mu);
  QScheduleCheck c;
  auto fail = [&](bool& flag, const std::string& what, std::size_t k) {
    if (flag && c.first_failure.empty() && &flag != &c.strictly_increasing)
      c.first_failure = what + " at k=" + std::to_string(k);
    flag = false;
  };
  Rational rem(1, 2);
  const Rational up = (1 + m) / 2;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const int kk = static_cast<int>(k);
    if (q[k] < 2) fail(c.at_least_two, "q < 2", k);
    if (k > 0 && q[k] < q[k - 1]) fail(c.non_decreasing, "q decreases", k);
    if (k > 0 && q[k] <= q[k - 1]) fail(c.strictly_increasing, "q repeats", k);
    if (rem < pow(m, kk) / 2) fail(c.lower_envelope, "R_k < mu^k/2", k);
    if (rem > pow(up, kk) / 2) fail(c.upper_envelope, "R_k above envelope", k);
    const Rational t = pow2_neg(q[k]);
    if (t < (1 - m) * pow(m, kk) / 4) fail(c.term_bound, "term bound", k);
    const Rational ratio = t / rem;
    if (!(ratio > (1 - m) / 2 && ratio <= 1 - m)) fail(c.sandwich, "sandwich", k);
    rem -= t;
    if (rem <= 0) {
      fail(c.remainder_positive, "remainder not positive", k);
      break;
    }
  }
  c.final_remainder = static_cast<double>(rem);
  c.final_remainder_exact = rem.str();
  return c;
}

double nested_radius(NestedDirection dir, const std::vector<int>& q, int k) {
  if (k < 0 || k > static_cast<int>(q.size())) throw InputError("nested_radius: index beyond schedule");
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += std::ldexp(1.0, -q[i]);
  return dir == NestedDirection::Expanding ? 0.5 + s : 1.0 - s;
}

std::vector<Complex> nested_complexes(NestedDirection dir, const std::vector<int>& q, int n, int count) {
  if (count < 0 || count > static_cast<int>(q.size())) throw InputError("nested_complexes: schedule too short");
  if (n < 1) throw InputError("nested_complexes: n must be positive");
  for (int k = 0; k < count; ++k)
    if (q[k] > kMaxDyadicExponent - 2) throw PrecisionError("nested_complexes: schedule exhausts precision");
  std::vector<Complex> out;
  std::vector<Cell> layers;
  for (int k = 0; k < count; ++k) {
    const double r = nested_radius(dir, q, k);
    Complex s = grid_complex(Point::Constant(n, -r), Point::Constant(n, r), q[k], false);
    if (dir == NestedDirection::Shrinking) {
      out.push_back(std::move(s));
      continue;
    }
    layers.insert(layers.end(), s.cells().begin(), s.cells().end());
    out.push_back(maximal_cells(Complex(n, layers)));
  }
  return out;
}

}  // namespace plateau
