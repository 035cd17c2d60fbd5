#pragma once

#include <set>
#include <vector>

#include "plateau/sampled_set.hpp"

namespace plateau {

// Straight-edge graph in R^n with fixed (anchor) nodes.
class SkeletonGraph {
 public:
  explicit SkeletonGraph(int n = 2) : n_(n) {}

  int ambient_dim() const { return n_; }
  int add_node(const Point& p, bool fixed = false);
  void add_edge(int a, int b);
  void remove_edge(int a, int b);

  std::size_t node_count() const;  // live nodes
  std::size_t edge_count() const;
  bool alive(int v) const { return alive_[v]; }
  const Point& position(int v) const { return pos_[v]; }
  void set_position(int v, const Point& p) { pos_[v] = p; }
  bool fixed(int v) const { return fixed_[v]; }
  void set_fixed(int v, bool f) { fixed_[v] = f; }
  const std::set<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  std::size_t capacity() const { return pos_.size(); }

  // Removes the node and its edges.
  void remove_node(int v);
  // Moves b's edges onto a and removes b.
  void merge_into(int a, int b);
  double length() const;
  std::vector<std::pair<int, int>> edges() const;
  // Renumbers live nodes densely.
  SkeletonGraph compacted() const;
  int connected_components() const;

  // Closest point on the graph and the node or edge carrying it.
  struct Nearest {
    Point point;
    double dist = 0.0;
    int node = -1;  // set when the closest point is a node
    int a = -1, b = -1;
  };
  Nearest nearest(const Point& x) const;
  // Splits edge (a,b) at p and returns the new node.
  int split_edge(int a, int b, const Point& p);

 private:
  int n_;
  std::vector<Point> pos_;
  std::vector<char> fixed_;
  std::vector<char> alive_;
  std::vector<std::set<int>> adj_;
};

struct RelaxOptions {
  double step = 1.0;
  int iters = 500;
  bool split = true;
  double angle_tol_deg = 0.5;
};

struct RelaxReport {
  double length_before = 0.0;
  double length_after = 0.0;
  int iterations = 0;
  int backtracks = 0;
  int splits = 0;
  bool monotone = true;
};

// Removes free leaves, contracts free degree-2 nodes, moves free nodes towards the
// median of their neighbors with backtracking, and inserts junctions at angles below 120 degrees.
// The total length never increases.
RelaxReport relax_skeleton(SkeletonGraph& g, const RelaxOptions& opts = {});

// Largest deviation from 120 degrees over the angles at free nodes of degree 3.
struct JunctionAngles {
  std::vector<double> angles_deg;
  double max_deviation_deg = 0.0;
  std::size_t junctions = 0;
};
JunctionAngles junction_angles(const SkeletonGraph& g);

// Trapezoid sampling of every edge; node samples carry the halves of adjacent pieces.
SampledSet resample_graph(const SkeletonGraph& g, double spacing);

// Graph through the samples: a Euclidean minimum spanning tree.
SkeletonGraph graph_from_points(const std::vector<Point>& pts);

}  // namespace plateau
