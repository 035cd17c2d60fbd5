#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "plateau/complex.hpp"
#include "plateau/driver.hpp"
#include "plateau/ff_projection.hpp"
#include "plateau/skeleton_graph.hpp"

namespace plateau {

// Cells as {anchor_num, anchor_exp, span_mask, scale_exp}; anchor coordinate i is
// anchor_num[i] * 2^-anchor_exp[i]. Cells may instead give "anchor" as exact binary decimals.
nlohmann::json complex_to_json(const Complex& k);
Complex complex_from_json(const nlohmann::json& j);
Complex read_complex(const std::string& path);

nlohmann::json point_to_json(const Point& p);
nlohmann::json cell_to_json(const Cell& c);
nlohmann::json validation_to_json(const ValidationReport& r, const Complex& k);
// {stages:[{m, cells:[{cell, center, delta, ratio_H, ratio_zeta, lip_est}]}], ...}
nlohmann::json ff_to_json(const FFResult& r);
nlohmann::json iteration_to_json(const IterationReport& r);
nlohmann::json minimize_to_json(const MinimizeResult& r);
nlohmann::json quasimin_to_json(const QuasiminResult& r);
nlohmann::json sliding_to_json(const SlidingReport& r);

// Vertices plus each edge as a degenerate two-vertex face.
void write_off(std::ostream& os, const SkeletonGraph& g);

SampledSet read_csv_file(const std::string& path, int d);
std::vector<Point> read_points_file(const std::string& path);

}  // namespace plateau
