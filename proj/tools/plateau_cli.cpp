#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "plateau/complex.hpp"
#include "plateau/driver.hpp"
#include "plateau/errors.hpp"
#include "plateau/ff_projection.hpp"
#include "plateau/grassmannian.hpp"
#include "plateau/io.hpp"
#include "plateau/set_measure.hpp"

namespace fs = std::filesystem;
using namespace plateau;
using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kViolation = 2;
constexpr int kInputError = 3;

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string format = "json";
};

fs::path out_path(const Globals& g, const std::string& name) {
  fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
  fs::create_directories(dir);
  return dir / name;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("not a number list: " + s);
    }
  }
  return out;
}

int cmd_validate(const std::string& file) {
  Complex k = read_complex(file);
  ValidationReport r = validate_complex(k);
  emit(validation_to_json(r, k));
  return r.valid ? kPass : kViolation;
}

int cmd_whitney(const Globals& g, const std::vector<double>& box, int depth, const std::vector<double>& punct) {
  if (box.size() % 2 != 0 || box.empty()) throw InputError("--box takes lo_1 .. lo_n hi_1 .. hi_n");
  const int n = static_cast<int>(box.size() / 2);
  Box b{Point(n), Point(n)};
  for (int i = 0; i < n; ++i) {
    b.lo[i] = box[i];
    b.hi[i] = box[n + i];
  }
  if (punct.size() % n != 0) throw InputError("--puncture coordinates must come in groups of n");
  std::vector<Point> pts;
  for (std::size_t i = 0; i < punct.size(); i += n) pts.push_back(Eigen::Map<const Point>(&punct[i], n));
  DomainOracle dom = pts.empty() ? DomainOracle::open_box(b) : DomainOracle::box_minus_points(b, pts);
  Complex k = whitney_decompose(dom, depth);
  ValidationReport r = validate_complex(k);
  json out = complex_to_json(k);
  std::ofstream(out_path(g, "whitney.json")) << out.dump() << '\n';
  json summary = validation_to_json(r, k);
  summary["output"] = out_path(g, "whitney.json").string();
  emit(summary);
  return r.valid ? kPass : kViolation;
}

int cmd_grass(const Globals& g, std::size_t samples) {
  Rng rng(g.seed);
  GrassSelftest r = grassmannian_selftest({{1, 2}, {1, 3}, {2, 3}, {2, 4}}, samples, rng);
  emit({{"pairs", r.pairs},
        {"min_distance", r.min_distance},
        {"max_distance", r.max_distance},
        {"max_complement_error", r.max_complement_error},
        {"max_graph_error", r.max_graph_error},
        {"iso_violations", r.iso_violations},
        {"passed", r.passed},
        {"failure", r.failure}});
  return r.passed ? kPass : kViolation;
}

int cmd_gauge(const Globals& g, const std::string& input, int d, std::size_t planes, double delta) {
  SampledSet s = read_csv_file(input, d);
  Rng rng(g.seed);
  if (delta <= 0.0) delta = 2.0 * s.resolution();
  MCEstimate z = zeta_gauge(s, planes, delta, rng);
  emit({{"zeta", z.value},
        {"std_error", z.std_error},
        {"planes", z.samples},
        {"hausdorff", hausdorff_estimate(s, delta)},
        {"weight_mass", weight_mass(s)},
        {"delta", delta}});
  return kPass;
}

int cmd_ffproject(const Globals& g, const std::string& complex_file, const std::string& input, int d, double lambda) {
  Complex k = read_complex(complex_file);
  SampledSet s = read_csv_file(input, d);
  FFOptions o;
  o.lambda = lambda;
  Rng rng(g.seed);
  FFResult r = ff_project(k, d, s, o, rng);
  {
    std::ofstream os(out_path(g, "mapped.csv"));
    write_csv(os, r.mapped);
  }
  json j = ff_to_json(r);
  std::ofstream(out_path(g, "ff_diagnostics.json")) << j.dump(2) << '\n';
  const double bound = std::pow(lambda, k.ambient_dim() - d) * 1.1;
  const bool ok = r.preservation_failures == 0 && r.skeleton_failures == 0 && r.moved_outside == 0 &&
                  r.global_ratio <= bound;
  emit({{"global_ratio", r.global_ratio},
        {"ratio_bound", bound},
        {"preservation_failures", r.preservation_failures},
        {"skeleton_failures", r.skeleton_failures},
        {"moved_outside", r.moved_outside},
        {"passed", ok}});
  return ok ? kPass : kViolation;
}

int cmd_minimize(const Globals& g, const std::string& config) {
  ProblemConfig cfg = load_config(config);
  MinimizeResult r = minimize(cfg);
  json report = minimize_to_json(r);
  std::ofstream(out_path(g, "report.json")) << report.dump(2) << '\n';
  {
    std::ofstream os(out_path(g, "final.csv"));
    write_csv(os, r.final_set);
  }
  {
    std::ofstream os(out_path(g, "skeleton.off"));
    write_off(os, r.graph);
  }
  const bool ok = r.monotone && r.anchors_conserved;
  emit({{"initial_energy", r.initial_energy},
        {"final_energy", r.final_energy},
        {"junctions", r.angles.junctions},
        {"junction_max_deviation_deg", r.angles.max_deviation_deg},
        {"monotone", r.monotone},
        {"anchors_conserved", r.anchors_conserved},
        {"out_dir", g.out_dir.empty() ? "." : g.out_dir}});
  return ok ? kPass : kViolation;
}

int cmd_audit(const std::string& input, const std::string& deform, const std::vector<double>& ball, double kappa,
              double h, int d) {
  SampledSet s = read_csv_file(input, d);
  std::vector<Point> images = read_points_file(deform);
  if (static_cast<int>(ball.size()) != s.n() + 1) throw InputError("--ball takes n center coordinates and a radius");
  Ball b{Eigen::Map<const Point>(ball.data(), s.n()), ball.back()};
  if (!(b.radius > 0.0)) throw InputError("ball radius must be positive");
  QuasiminParams p;
  p.kappa = kappa;
  p.h = h;
  QuasiminResult r = quasimin_audit(s, images, b, p, Integrand::hausdorff());
  SlidingReport sl = sliding_validate(s.points(), images, BoundarySpec{}, b, kInfinity);
  json out = quasimin_to_json(r);
  out["sliding"] = sliding_to_json(sl);
  emit(out);
  return r.satisfied ? kPass : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic complexes, Federer-Fleming projections and a direct-method driver for Plateau-type problems"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Root seed")->default_val(0);
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv", "off"}));

  std::string file;
  auto* validate = app.add_subcommand("validate-complex", "Check the complex axioms of a complex JSON file");
  validate->add_option("file", file)->required();

  std::vector<double> box, punct;
  int depth = 4;
  auto* whitney = app.add_subcommand("whitney", "Whitney decomposition of an open box");
  whitney->add_option("--box", box, "lo_1 .. lo_n hi_1 .. hi_n")->required()->expected(2, 16);
  whitney->add_option("--depth", depth, "Finest level")->default_val(4);
  whitney->add_option("--puncture", punct, "Removed points, n coordinates each");

  std::size_t samples = 500;
  auto* grass = app.add_subcommand("grass-selftest", "Grassmannian invariant suite");
  grass->add_option("--samples", samples)->default_val(500);
  grass->add_option("--seed", g.seed);

  std::string input;
  int d = 1;
  std::size_t planes = 1000;
  double delta = 0.0;
  auto* gauge = app.add_subcommand("gauge", "Projection gauge of a sampled set");
  gauge->add_option("--input", input)->required();
  gauge->add_option("--d", d)->default_val(1);
  gauge->add_option("--planes", planes)->default_val(1000);
  gauge->add_option("--delta", delta)->default_val(0.0);
  gauge->add_option("--seed", g.seed);

  std::string complex_file;
  double lambda = 20.0;
  auto* ff = app.add_subcommand("ffproject", "Federer-Fleming projection onto the d-skeleton");
  ff->add_option("--complex", complex_file)->required();
  ff->add_option("--input", input)->required();
  ff->add_option("--d", d)->default_val(1);
  ff->add_option("--lambda", lambda)->default_val(20.0);
  ff->add_option("--seed", g.seed);

  std::string config;
  auto* mini = app.add_subcommand("minimize", "Direct-method minimization from a JSON config");
  mini->add_option("--config", config)->required();
  mini->add_option("--out-dir", g.out_dir);
  mini->add_option("--seed", g.seed);

  std::string deform, ball_s;
  double kappa = 1.0, h = 0.0;
  auto* audit = app.add_subcommand("audit", "Quasiminimality audit of a deformation");
  audit->set_help_flag("--help", "Print this help message and exit");
  audit->add_option("--input", input)->required();
  audit->add_option("--deform", deform)->required();
  audit->add_option("--ball", ball_s, "c_1,..,c_n,r")->required();
  audit->add_option("--kappa", kappa)->default_val(1.0);
  audit->add_option("--h", h)->default_val(0.0);
  audit->add_option("--d", d)->default_val(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  try {
    if (*validate) return cmd_validate(file);
    if (*whitney) return cmd_whitney(g, box, depth, punct);
    if (*grass) return cmd_grass(g, samples);
    if (*gauge) return cmd_gauge(g, input, d, planes, delta);
    if (*ff) return cmd_ffproject(g, complex_file, input, d, lambda);
    if (*mini) return cmd_minimize(g, config);
    if (*audit) return cmd_audit(input, deform, parse_list(ball_s), kappa, h, d);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const AxiomViolation& e) {
    std::cerr << "violation: " << e.what() << '\n';
    return kViolation;
  } catch (const CenterExhausted& e) {
    std::cerr << "violation: " << e.what() << '\n';
    return kViolation;
  } catch (const PrecisionError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
