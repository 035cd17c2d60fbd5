#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "plateau/domain.hpp"
#include "plateau/rng.hpp"

namespace plateau {

class SampledSet;

// Monte Carlo result: estimate, standard error, sample count.
struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// d-plane in R^n given by a d x n row-orthonormal frame.
class LinearPlane {
 public:
  LinearPlane() = default;
  // The frame must already be row-orthonormal (checked to 1e-10).
  explicit LinearPlane(Eigen::MatrixXd frame);
  // Orthonormalizes the rows of a full-rank d x n matrix.
  static LinearPlane from_spanning(const Eigen::MatrixXd& rows);
  static LinearPlane coordinate(int d, int n);

  int d() const { return static_cast<int>(frame_.rows()); }
  int n() const { return static_cast<int>(frame_.cols()); }
  const Eigen::MatrixXd& frame() const { return frame_; }
  Eigen::MatrixXd projection() const { return frame_.transpose() * frame_; }
  // (n-d) x n frame of the orthogonal complement, deterministic in the frame.
  Eigen::MatrixXd complement_frame() const;
  LinearPlane complement() const { return LinearPlane(complement_frame()); }
  // Coordinates of p_V(x) in the frame basis.
  Eigen::VectorXd coords(const Point& x) const { return frame_ * x; }

 private:
  Eigen::MatrixXd frame_;
};

struct GraphMap {
  LinearPlane base;
  Eigen::MatrixXd phi;  // (n-d) x d, V-coordinates to complement coordinates
};

struct AffinePlane {
  Point point;
  LinearPlane direction;
};

double plane_distance(const LinearPlane& v, const LinearPlane& w);
// max(|(p_V - p_W)|_V|, |(p_V - p_W)|_W|)
double plane_distance_restricted(const LinearPlane& v, const LinearPlane& w);
// max(|(p_V - p_W)|_V|, |(p_V - p_W)|_{V^perp}|)
double plane_distance_restricted_complement(const LinearPlane& v, const LinearPlane& w);

LinearPlane graph_to_plane(const GraphMap& g);
GraphMap plane_to_graph(const LinearPlane& v, const LinearPlane& w);
double graph_norm_distance(const GraphMap& g);
double operator_norm(const Eigen::MatrixXd& m);

struct IsomorphismImage {
  LinearPlane plane;
  double condition = 1.0;
};
IsomorphismImage apply_isomorphism(const Eigen::MatrixXd& u, const LinearPlane& v);

LinearPlane haar_sample(int d, int n, Rng& rng);

using PlanePredicate = std::function<bool(const LinearPlane&)>;

// Lines through the origin of R^{n+1}.
MCEstimate line_set_measure(const PlanePredicate& pred, int n, std::size_t samples, Rng& rng);

struct DisintegrationResult {
  MCEstimate lhs;
  MCEstimate rhs;
  double sigma = 0.0;  // combined standard error
};
DisintegrationResult disintegration_check(int p, int q, int n, const PlanePredicate& pred,
                                          std::size_t direct_samples, std::size_t outer_samples,
                                          std::size_t inner_samples, Rng& rng);

// H^k of the unit k-sphere.
double sphere_measure(int k);

struct HyperplaneLineBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double rhs_sigma = 0.0;
  MCEstimate gamma;
  double r0 = 0.0;
  double r = 0.0;
  double max_line_distance = 0.0;
  double distance_bound = 0.0;
  bool distance_ok = true;
};
// H lives in R^m as an affine hyperplane; A is sampled inside H.
HyperplaneLineBound hyperplane_line_bound(const AffinePlane& h, const SampledSet& a, std::size_t samples, Rng& rng,
                                          double delta = 0.0);

struct GrassSelftest {
  std::size_t pairs = 0;
  double min_distance = 1.0;
  double max_distance = 0.0;
  double max_complement_error = 0.0;  // |d(V,W) - d(V^perp,W^perp)|
  double max_graph_error = 0.0;       // |graph norm distance - d(V,W)| and graph round trip
  std::size_t iso_violations = 0;
  std::size_t graph_skips = 0;  // pairs at distance one, where no graph map exists
  bool passed = true;
  std::string failure;
};
// Distance range, complement isometry, graph-map consistency and isomorphism bounds
// on `pairs` random pairs for each (d, n).
GrassSelftest grassmannian_selftest(const std::vector<std::pair<int, int>>& dims, std::size_t pairs, Rng& rng,
                                    double tol = 1e-9);

}  // namespace plateau
