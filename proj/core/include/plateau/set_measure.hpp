#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "plateau/cell.hpp"
#include "plateau/grassmannian.hpp"
#include "plateau/sampled_set.hpp"

namespace plateau {

// Box-counting grid. Grid lines sit at (j - offset) * delta with an irrational-looking offset,
// so dyadic walls never coincide with grid lines.
class OccupancyGrid {
 public:
  static constexpr int kMaxDim = 8;
  static constexpr double kOffset = 0.3819660112501051;
  using Key = std::array<std::int64_t, kMaxDim>;

  OccupancyGrid(int dim, double delta);

  void insert(const Eigen::VectorXd& coords);
  void finalize();
  std::size_t count() const { return keys_.size(); }
  // count * delta^dim, or count * delta^d for a d-set in a higher-dimensional grid.
  double mass() const;
  double mass(int d) const;
  bool contains(const Eigen::VectorXd& coords) const;
  Key key(const Eigen::VectorXd& coords) const;
  std::vector<Eigen::VectorXd> cell_corners() const;
  int dim() const { return dim_; }
  double delta() const { return delta_; }

 private:
  int dim_;
  double delta_;
  std::vector<Key> keys_;
  bool finalized_ = false;
};

double hausdorff_estimate(const SampledSet& s, double delta);
double hausdorff_estimate(const SampledSet& s);  // delta = 2 * resolution
double weight_mass(const SampledSet& s);
double project_measure(const SampledSet& s, const LinearPlane& v, double delta);
MCEstimate zeta_gauge(const SampledSet& s, std::size_t n_planes, double delta, Rng& rng);
MCEstimate zeta_restricted(const SampledSet& s, const Cell& a, std::size_t n_planes, double delta, Rng& rng);

enum class IntegrandKind { Hausdorff, PositionOnly, Anisotropic };

class Integrand {
 public:
  using PositionFn = std::function<double(const Point&)>;
  using AnisotropicFn = std::function<double(const Point&, const LinearPlane&)>;

  static Integrand hausdorff();
  static Integrand position(PositionFn f, double lambda);
  static Integrand anisotropic(AnisotropicFn f, double lambda);

  IntegrandKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  // Throws when the value leaves [1/lambda, lambda].
  double operator()(const Point& x, const LinearPlane* tangent) const;

 private:
  IntegrandKind kind_ = IntegrandKind::Hausdorff;
  double lambda_ = 1.0;
  PositionFn position_;
  AnisotropicFn anisotropic_;
};

inline constexpr int kPcaNeighbors = 12;

// Local PCA over the k nearest neighbors; d leading directions.
std::vector<LinearPlane> estimate_tangents(const SampledSet& s, int pca_k = kPcaNeighbors);
double energy_eval(const SampledSet& s, const Integrand& integrand, int pca_k = kPcaNeighbors);

// Occupancy estimate of the integrand energy: each occupied cell carries delta^d times
// the mean integrand of its samples. With tangents, cells are also divided by the mean crossing factor,
// and a positive spread fills each sample's tangent patch of that width so clipped cells are not missed.
double occupancy_energy(const std::vector<Point>& points, int d, const Integrand& integrand, double delta,
                        const std::vector<LinearPlane>* tangents = nullptr, double spread = 0.0);

// Occupancy corrected for the orientation bias of box counting: a d-plane with frame T crosses
// on average sum_I |det T_I| / delta^d cells per unit d-area (I over coordinate d-subsets).
double crossing_factor(const LinearPlane& t);
double hausdorff_estimate_oriented(const SampledSet& s, double delta, const std::vector<LinearPlane>& tangents);

struct AhlforsEntry {
  std::size_t center = 0;
  double radius = 0.0;
  double ratio = 0.0;
};
// Audits box-count at this multiple of the sample resolution unless told otherwise.
inline constexpr double kAuditDeltaFactor = 8.0;

struct AhlforsTable {
  std::vector<AhlforsEntry> entries;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};
AhlforsTable ahlfors_audit(const SampledSet& s, const std::vector<Point>& centers, const std::vector<double>& radii,
                           double delta = 0.0);

struct Ball {
  Point center;
  double radius = 0.0;
  bool contains(const Point& x) const { return (x - center).norm() < radius; }
};

struct QuasiminParams {
  double kappa = 1.0;
  double h = 0.0;
  double scale = kInfinity;
};

struct QuasiminResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
  std::size_t moved = 0;
};

QuasiminResult quasimin_audit(const SampledSet& s, const std::vector<Point>& images, const Ball& ball,
                              const QuasiminParams& params, const Integrand& integrand,
                              const DomainOracle* domain = nullptr, double tol = 0.05, double delta = 0.0);

}  // namespace plateau
