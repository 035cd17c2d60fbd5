#pragma once

#include <unordered_map>
#include <vector>

#include "plateau/complex.hpp"
#include "plateau/grassmannian.hpp"
#include "plateau/rng.hpp"
#include "plateau/sampled_set.hpp"

namespace plateau {

struct FFOptions {
  double lambda = 20.0;
  double c_dist = 0.0625;
  int max_tries = 64;
  double delta = 0.0;  // occupancy scale; 0 means twice the sample resolution
  std::size_t zeta_planes = 32;
};

struct RadialProjection {
  Cell cell;
  Point center;
  double guard = 0.0;
};

// Radial projection from x onto the relative boundary of A. Inside the guard ball the ray
// parameter is scaled by |y - x| / guard. The hitting coordinate is set exactly onto its wall.
Point radial_project(const Cell& a, const Point& x, const Point& y, double guard = 0.0);
inline Point radial_project(const RadialProjection& p, const Point& y) {
  return radial_project(p.cell, p.center, y, p.guard);
}

// Concentric half cell.
void half_cell_bounds(const Cell& a, Point& lo, Point& hi);
Point sample_half_cell(const Cell& a, Rng& rng);

// Faces of A other than A itself with dimension at least min_dim.
std::vector<Cell> proper_faces(const Cell& a, int min_dim);

double occupancy_measure(const std::vector<Point>& points, int d, double delta);

struct AverageProjectionReport {
  double avg_ratio = 0.0;
  std::vector<double> ratios;  // sorted
  double quantile(double q) const;
  std::size_t admissible = 0;
  std::size_t rejected = 0;
};
AverageProjectionReport average_projection_check(const Cell& q, const SampledSet& s, std::size_t n_centers, Rng& rng,
                                                 double delta = 0.0);

struct CenterChoice {
  RadialProjection projection;
  double clearance = 0.0;
  double ratio_h = 0.0;     // worst parent ratio
  double ratio_zeta = 0.0;  // worst face ratio
  int tries = 0;
};

// Parents are the cells containing A; A itself is always checked.
CenterChoice select_center(const Cell& a, const SampledSet& f, const std::vector<Cell>& parents,
                           const FFOptions& opts, Rng& rng);

using CenterMap = std::unordered_map<Cell, RadialProjection, CellHash>;

// Projects every sample lying in the interior of an m-cell of K.
SampledSet ff_sweep(const Complex& k, int m, const SampledSet& f, const CenterMap& centers);

struct FFCellDiagnostics {
  Cell cell;
  Point center;
  double delta = 0.0;
  double ratio_h = 0.0;
  double ratio_zeta = 0.0;
  double lip_est = 0.0;
  std::size_t samples = 0;
  int tries = 0;
};

struct FFStage {
  int m = 0;
  std::vector<FFCellDiagnostics> cells;
  double max_ratio_h = 0.0;
  double max_lip = 0.0;
};

struct FFPlan {
  int d = 0;
  std::vector<std::pair<int, std::vector<RadialProjection>>> sweeps;
};

struct FFResult {
  SampledSet mapped;
  FFPlan plan;
  std::vector<FFStage> stages;
  double source_measure = 0.0;
  double image_measure = 0.0;
  double global_ratio = 0.0;
  double ledger_ratio = 1.0;      // product of per-stage worst ratios
  double max_cell_ratio = 0.0;    // image vs source occupancy per cell of K
  double max_face_zeta_ratio = 0.0;  // d-cell image occupancy vs gauge of the source around it
  std::size_t preservation_failures = 0;
  std::size_t skeleton_failures = 0;
  std::size_t moved_outside = 0;  // samples outside higher-dimensional interiors that moved
};

FFResult ff_project(const Complex& k, int d, const SampledSet& e, const FFOptions& opts, Rng& rng);

// True when x lies in no relative interior of a cell of dimension > d (tolerance eps).
bool in_low_skeleton(const Complex& k, int d, const Point& x, double eps = kEpsGeom);

struct PruneResult {
  SampledSet set;
  std::size_t pruned_cells = 0;
};
PruneResult prune_low_mass_dcells(const Complex& k, int d, const SampledSet& f, double threshold_fraction,
                                  double delta = 0.0);

}  // namespace plateau
