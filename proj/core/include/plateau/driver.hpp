#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plateau/complex.hpp"
#include "plateau/ff_projection.hpp"
#include "plateau/set_measure.hpp"
#include "plateau/skeleton_graph.hpp"

namespace plateau {

// Gamma: anchor points and/or faces of a dyadic grid.
struct BoundarySpec {
  std::vector<Point> anchors;
  std::vector<Cell> faces;

  double distance(const Point& x) const;
  bool empty() const { return anchors.empty() && faces.empty(); }
};

enum class ScheduleMode { Uniform, Mu };

struct ProblemConfig {
  int n = 2;
  int d = 1;
  Box domain;
  BoundarySpec boundary;

  // Initial set: a polyline, a list of segments, or a CSV of samples.
  std::vector<Point> polyline;
  std::vector<std::pair<Point, Point>> segments;
  std::string csv_path;
  double spacing = 0.01;

  Integrand integrand = Integrand::hausdorff();
  std::string integrand_kind = "hausdorff";

  ScheduleMode mode = ScheduleMode::Uniform;
  int start_level = 3;
  double mu = 0.5;
  int iterations = 4;

  QuasiminParams quasimin;
  std::uint64_t seed = 0;

  double eps_geom = kEpsGeom;
  double delta = 0.0;
  double lambda = 20.0;
  double threshold_fraction = 0.5;

  RelaxOptions relax;
};

// Schema 1; unknown fields are rejected. Relative CSV paths resolve against base_dir.
ProblemConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
ProblemConfig load_config(const std::string& path);

// Grid levels visited by the driver.
std::vector<int> schedule_levels(const ProblemConfig& cfg);

struct SlidingCheck {
  bool passed = true;
  double worst = 0.0;
  Point witness;
};

struct SlidingReport {
  SlidingCheck moved_inside;     // (a) moved samples compactly inside U; worst is the smallest margin
  SlidingCheck gamma_preserved;  // (b) Gamma samples stay on Gamma; worst is the largest offset
  SlidingCheck stays_in_ball;    // (c) images of samples in U stay in U
  SlidingCheck gamma_distance;   // (d) d(f(x), Gamma) <= C d(x, Gamma); worst is the largest ratio
  bool passed() const {
    return moved_inside.passed && gamma_preserved.passed && stays_in_ball.passed && gamma_distance.passed;
  }
};

SlidingReport sliding_validate(const std::vector<Point>& e, const std::vector<Point>& images,
                               const BoundarySpec& gamma, const Ball& u, double c_bound, double eps = kEpsGeom);

struct IterationReport {
  int k = 0;
  int level = 0;
  std::size_t cells = 0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  double ff_ratio = 0.0;
  std::size_t pruned_cells = 0;
  double ahlfors_min = 0.0;
  double ahlfors_max = 0.0;
  bool accepted = false;
  std::size_t nodes = 0;
  double junction_deviation_deg = 0.0;
  RelaxReport relax;
  std::string note;
};

struct AuditSummary {
  std::size_t deformations = 0;
  std::size_t quasimin_passed = 0;
  std::size_t sliding_passed = 0;
  double ahlfors_min = 0.0;
  double ahlfors_max = 0.0;
};

struct MinimizeResult {
  SkeletonGraph graph;
  SampledSet final_set;
  std::vector<IterationReport> reports;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  std::vector<double> accepted_energies;
  bool monotone = true;
  bool anchors_conserved = true;
  JunctionAngles angles;
  AuditSummary audits;
};

// Builds the initial graph, fixes anchors, and checks they lie within snap distance.
SkeletonGraph initial_graph(const ProblemConfig& cfg);

// Image of a graph under the grid projection: consecutive sample images joined by shortest
// paths in the 1-skeleton, low-mass edges collapsed, anchors reattached.
struct ProjectedGraph {
  SkeletonGraph graph;
  FFResult ff;
  std::size_t pruned = 0;
};
ProjectedGraph project_graph(const SkeletonGraph& g, const Complex& grid, const Box& box, int level,
                             const BoundarySpec& boundary, const FFOptions& opts, double threshold_fraction, Rng& rng);

// Spanning forest keeping the shortest edges; removes cycles without disconnecting.
SkeletonGraph break_cycles(const SkeletonGraph& g);

double graph_energy(const SkeletonGraph& g, const Integrand& integrand, double spacing);

MinimizeResult minimize(const ProblemConfig& cfg);

}  // namespace plateau
