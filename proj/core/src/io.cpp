#include "plateau/io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "plateau/errors.hpp"

namespace plateau {

using nlohmann::json;

json point_to_json(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

json cell_to_json(const Cell& c) {
  json num = json::array(), exp = json::array();
  for (const auto& a : c.anchor()) {
    num.push_back(a.mantissa());
    exp.push_back(a.exponent());
  }
  return {{"anchor_num", num}, {"anchor_exp", exp}, {"span_mask", c.span()}, {"scale_exp", c.scale_exp()}};
}

json complex_to_json(const Complex& k) {
  json cells = json::array();
  for (const auto& c : k.cells()) cells.push_back(cell_to_json(c));
  return {{"n", k.ambient_dim()}, {"cells", cells}};
}

Complex complex_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("cells")) throw InputError("complex JSON needs a 'cells' array");
    std::vector<Cell> cells;
    int n = j.contains("n") ? j.at("n").get<int>() : -1;
    for (const auto& c : j.at("cells")) {
      std::vector<DyadicScalar> anchor;
      if (c.contains("anchor")) {
        for (const auto& v : c.at("anchor")) anchor.push_back(DyadicScalar::from_double_or_throw(v.get<double>()));
      } else {
        const auto& num = c.at("anchor_num");
        const auto& exp = c.at("anchor_exp");
        if (num.size() != exp.size()) throw InputError("anchor_num and anchor_exp differ in length");
        for (std::size_t i = 0; i < num.size(); ++i)
          anchor.emplace_back(num[i].get<std::int64_t>(), exp[i].get<int>());
      }
      if (n < 0) n = static_cast<int>(anchor.size());
      if (static_cast<int>(anchor.size()) != n) throw InputError("cell dimension differs from n");
      std::uint32_t span = 0;
      const auto& sm = c.at("span_mask");
      if (sm.is_array()) {
        for (std::size_t i = 0; i < sm.size(); ++i)
          if (sm[i].get<int>() != 0) span |= 1U << i;
      } else {
        span = sm.get<std::uint32_t>();
      }
      cells.emplace_back(std::move(anchor), span, c.at("scale_exp").get<int>());
    }
    if (n < 1) throw InputError("complex JSON: empty complex without n");
    return Complex(n, std::move(cells));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed complex JSON: ") + e.what());
  }
}

Complex read_complex(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InputError(std::string("complex file is not valid JSON: ") + e.what());
  }
  return complex_from_json(j);
}

json validation_to_json(const ValidationReport& r, const Complex& k) {
  json v = json::array();
  for (const auto& x : r.violations) {
    json e = {{"axiom", x.axiom}, {"message", x.message}};
    if (x.cell_a < k.size()) e["cell_a"] = k.cell(x.cell_a).to_string();
    if (x.cell_b < k.size()) e["cell_b"] = k.cell(x.cell_b).to_string();
    if (x.witness.size() > 0) e["witness"] = point_to_json(x.witness);
    v.push_back(e);
  }
  return {{"valid", r.valid}, {"cells", k.size()}, {"probes", r.probes}, {"violations", v}};
}

json ff_to_json(const FFResult& r) {
  json stages = json::array();
  for (const auto& s : r.stages) {
    json cells = json::array();
    for (const auto& c : s.cells)
      cells.push_back({{"cell", c.cell.to_string()},
                       {"center", point_to_json(c.center)},
                       {"delta", c.delta},
                       {"ratio_H", c.ratio_h},
                       {"ratio_zeta", c.ratio_zeta},
                       {"lip_est", c.lip_est},
                       {"samples", c.samples},
                       {"tries", c.tries}});
    stages.push_back({{"m", s.m}, {"cells", cells}, {"max_ratio_H", s.max_ratio_h}, {"max_lip", s.max_lip}});
  }
  return {{"stages", stages},
          {"source_measure", r.source_measure},
          {"image_measure", r.image_measure},
          {"global_ratio", r.global_ratio},
          {"ledger_ratio", r.ledger_ratio},
          {"max_cell_ratio", r.max_cell_ratio},
          {"max_face_zeta_ratio", r.max_face_zeta_ratio},
          {"preservation_failures", r.preservation_failures},
          {"skeleton_failures", r.skeleton_failures},
          {"moved_outside", r.moved_outside}};
}

json iteration_to_json(const IterationReport& r) {
  json j = {{"k", r.k},
            {"level", r.level},
            {"cells", r.cells},
            {"energy_before", r.energy_before},
            {"energy_after", r.energy_after},
            {"ff_ratio", r.ff_ratio},
            {"pruned_cells", r.pruned_cells},
            {"ahlfors_min", r.ahlfors_min},
            {"ahlfors_max", r.ahlfors_max},
            {"accepted", r.accepted},
            {"nodes", r.nodes},
            {"junction_deviation_deg", r.junction_deviation_deg},
            {"relax_polish",
             {{"length_before", r.relax.length_before},
              {"length_after", r.relax.length_after},
              {"iterations", r.relax.iterations},
              {"splits", r.relax.splits},
              {"backtracks", r.relax.backtracks},
              {"monotone", r.relax.monotone}}}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json minimize_to_json(const MinimizeResult& r) {
  json its = json::array();
  for (const auto& it : r.reports) its.push_back(iteration_to_json(it));
  json angles = json::array();
  for (double a : r.angles.angles_deg) angles.push_back(a);
  return {{"iterations", its},
          {"initial_energy", r.initial_energy},
          {"final_energy", r.final_energy},
          {"accepted_energies", r.accepted_energies},
          {"monotone", r.monotone},
          {"anchors_conserved", r.anchors_conserved},
          {"junctions", r.angles.junctions},
          {"junction_angles_deg", angles},
          {"junction_max_deviation_deg", r.angles.max_deviation_deg},
          {"audits",
           {{"deformations", r.audits.deformations},
            {"quasimin_passed", r.audits.quasimin_passed},
            {"sliding_passed", r.audits.sliding_passed},
            {"ahlfors_min", r.audits.ahlfors_min},
            {"ahlfors_max", r.audits.ahlfors_max}}}};
}

json quasimin_to_json(const QuasiminResult& r) {
  return {{"lhs", r.lhs}, {"rhs", r.rhs}, {"satisfied", r.satisfied}, {"moved", r.moved}};
}

json sliding_to_json(const SlidingReport& r) {
  auto check = [](const SlidingCheck& c) {
    json j = {{"passed", c.passed}, {"worst", std::isfinite(c.worst) ? json(c.worst) : json("inf")}};
    if (c.witness.size() > 0) j["witness"] = point_to_json(c.witness);
    return j;
  };
  return {{"moved_inside", check(r.moved_inside)},
          {"gamma_preserved", check(r.gamma_preserved)},
          {"stays_in_ball", check(r.stays_in_ball)},
          {"gamma_distance", check(r.gamma_distance)},
          {"passed", r.passed()}};
}

void write_off(std::ostream& os, const SkeletonGraph& g0) {
  const SkeletonGraph g = g0.compacted();
  const auto edges = g.edges();
  os << "OFF\n" << g.node_count() << ' ' << edges.size() << " 0\n";
  os.precision(17);
  for (std::size_t v = 0; v < g.capacity(); ++v) {
    const Point& p = g.position(static_cast<int>(v));
    for (int i = 0; i < 3; ++i) os << (i ? " " : "") << (i < p.size() ? p[i] : 0.0);
    os << '\n';
  }
  for (auto [a, b] : edges) os << "2 " << a << ' ' << b << '\n';
}

SampledSet read_csv_file(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_csv(in, d);
}

std::vector<Point> read_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_points_csv(in);
}

}  // namespace plateau
