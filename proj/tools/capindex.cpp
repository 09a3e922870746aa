// Command-line front end: index computations, parameter sweeps, root tables,
// and the built-in verification suite.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical indeterminacy.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "capindex/capindex.hpp"
#include "capindex/verify.hpp"

namespace {

using nlohmann::ordered_json;

struct CliOptions {
  std::string surface;
  int n = 2;
  double r = -1.0;
  double a = -1.0;
  std::string constraints = "typeI";
  int grid_n = 256;
  int quad_n = 128;
  int k_max = -1;
  std::string output;
  std::string format = "json";
  double eps_count = 1e-9;
  double eps_int = 1e-8;
  double eps_upsilon = 1e-9;
  // sweep
  double r_min = 0.0;
  double r_max = 0.0;
  int steps = 0;
  // roots
  std::string equation;
  double range_max = 20.0;
  std::string config_path;
};

const std::set<std::string> kConfigKeys = {
    "surface", "n", "r", "a", "constraints", "grid_n", "quad_n", "k_max",
    "output", "format", "eps_count", "eps_int", "eps_upsilon",
    "r_min", "r_max", "steps", "equation", "range_max"};

// precedence: flags > config file > CAPINDEX_GRID_N > built-in default
void apply_config_file(CliOptions& opt, const CLI::App& cmd) {
  if (opt.config_path.empty()) return;
  std::ifstream in(opt.config_path);
  if (!in) throw capindex::ConfigError("cannot open config file: " + opt.config_path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw capindex::ConfigError(std::string("config parse error: ") + e.what());
  }
  auto given = [&](const std::string& flag) {
    const auto* o = cmd.get_option_no_throw("--" + flag);
    return o && o->count() > 0;
  };
  for (const auto& [key, val] : j.items()) {
    if (!kConfigKeys.count(key)) throw capindex::ConfigError("unknown config key: " + key);
    try {
      if (key == "surface" && !given("surface")) opt.surface = val.get<std::string>();
      else if (key == "n" && !given("n")) opt.n = val.get<int>();
      else if (key == "r" && !given("r")) opt.r = val.get<double>();
      else if (key == "a" && !given("a")) opt.a = val.get<double>();
      else if (key == "constraints" && !given("constraints")) opt.constraints = val.get<std::string>();
      else if (key == "grid_n" && !given("grid-n")) opt.grid_n = val.get<int>();
      else if (key == "quad_n" && !given("quad-n")) opt.quad_n = val.get<int>();
      else if (key == "k_max" && !given("k-max")) opt.k_max = val.get<int>();
      else if (key == "output" && !given("output")) opt.output = val.get<std::string>();
      else if (key == "format" && !given("format")) opt.format = val.get<std::string>();
      else if (key == "eps_count" && !given("eps-count")) opt.eps_count = val.get<double>();
      else if (key == "eps_int" && !given("eps-int")) opt.eps_int = val.get<double>();
      else if (key == "eps_upsilon" && !given("eps-upsilon")) opt.eps_upsilon = val.get<double>();
      else if (key == "r_min" && !given("r-min")) opt.r_min = val.get<double>();
      else if (key == "r_max" && !given("r-max")) opt.r_max = val.get<double>();
      else if (key == "steps" && !given("steps")) opt.steps = val.get<int>();
      else if (key == "equation" && !given("equation")) opt.equation = val.get<std::string>();
      else if (key == "range_max" && !given("range-max")) opt.range_max = val.get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw capindex::ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

void apply_env_defaults(CliOptions& opt, const CLI::App& cmd, bool config_has_grid) {
  const auto* o = cmd.get_option_no_throw("--grid-n");
  const bool flag_given = o && o->count() > 0;
  if (flag_given || config_has_grid) return;
  if (const char* env = std::getenv("CAPINDEX_GRID_N")) {
    try {
      opt.grid_n = std::stoi(env);
    } catch (...) {
      throw capindex::ConfigError("CAPINDEX_GRID_N is not an integer");
    }
  }
}

capindex::SurfaceModel surface_from(const CliOptions& opt) {
  using namespace capindex;
  if (opt.surface == "cylinder") {
    if (opt.r < 0) throw ConfigError("cylinder requires --r");
    return make_cylinder(opt.n, opt.r);
  }
  if (opt.surface == "catenoid") return make_critical_catenoid();
  if (opt.surface == "torus") {
    if (opt.a < 0) throw ConfigError("torus requires --a");
    return make_cmc_torus_s3(opt.a);
  }
  if (opt.surface == "disk") return make_geodesic_disk();
  throw ConfigError("unknown surface: " + opt.surface);
}

std::vector<capindex::ConstraintType> parse_constraints(const std::string& csv) {
  using namespace capindex;
  std::vector<ConstraintType> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "typeI") out.push_back(ConstraintType::TypeI);
    else if (item == "typeII") out.push_back(ConstraintType::TypeII);
    else if (item == "closedWeak") out.push_back(ConstraintType::ClosedWeak);
    else if (item == "fixedBoundary") out.push_back(ConstraintType::FixedBoundary);
    else throw ConfigError("unknown constraint: " + item);
  }
  if (out.empty()) throw ConfigError("no constraints given");
  return out;
}

capindex::ReportConfig report_config(const CliOptions& opt) {
  capindex::ReportConfig cfg;
  cfg.grid_n = opt.grid_n;
  cfg.quad_n = opt.quad_n;
  cfg.k_max = opt.k_max;
  cfg.eps_count = opt.eps_count;
  cfg.eps_int_rel = opt.eps_int;
  cfg.eps_upsilon = opt.eps_upsilon;
  return cfg;
}

void emit(const CliOptions& opt, const std::string& text) {
  if (opt.output.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(opt.output);
  if (!out) throw capindex::ConfigError("cannot write output file: " + opt.output);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

// key,value flattening of the scalar report fields (csv format of `index`)
std::string index_csv(const ordered_json& j) {
  std::string out = "key,value\n";
  std::function<void(const std::string&, const ordered_json&)> walk =
      [&](const std::string& prefix, const ordered_json& node) {
        if (node.is_object()) {
          for (const auto& [k, v] : node.items())
            walk(prefix.empty() ? k : prefix + "." + k, v);
        } else if (node.is_array()) {
          int i = 0;
          for (const auto& v : node) walk(prefix + "[" + std::to_string(i++) + "]", v);
        } else {
          out += prefix + "," + node.dump() + "\n";
        }
      };
  walk("", j);
  return out;
}

int run_index(const CliOptions& opt) {
  const auto surface = surface_from(opt);
  const auto constraints = parse_constraints(opt.constraints);
  const auto rep = capindex::build_index_report(surface, constraints, report_config(opt));
  const auto j = capindex::report_json(rep);
  if (opt.format == "json") emit(opt, j.dump(2));
  else if (opt.format == "csv") emit(opt, index_csv(j));
  else throw capindex::ConfigError("unknown format: " + opt.format);
  return 0;
}

int run_sweep(const CliOptions& opt) {
  if (!(opt.r_min > 0.0 && opt.r_min <= opt.r_max && opt.r_max < 1.0))
    throw capindex::ConfigError("sweep requires 0 < r_min <= r_max < 1");
  if (opt.steps < 1) throw capindex::ConfigError("sweep requires steps >= 1");
  const auto rows = capindex::run_sweep(opt.n, opt.r_min, opt.r_max, opt.steps, report_config(opt));
  if (opt.format == "csv") emit(opt, capindex::sweep_csv(rows));
  else if (opt.format == "json") emit(opt, capindex::sweep_json(rows).dump(2));
  else throw capindex::ConfigError("unknown format: " + opt.format);
  return 0;
}

int run_roots(const CliOptions& opt) {
  using namespace capindex;
  Equation eq;
  if (opt.equation == "tan") eq = Equation::TanEq;
  else if (opt.equation == "cot") eq = Equation::CotEq;
  else if (opt.equation == "coth") eq = Equation::CothEq;
  else if (opt.equation == "fredholm") eq = Equation::FredholmCyl;
  else if (opt.equation == "catenoid") eq = Equation::CatenoidBdry;
  else throw ConfigError("unknown equation: " + opt.equation +
                         " (expected tan|cot|coth|fredholm|catenoid)");
  const auto roots = enumerate_roots(RootSpec{eq, opt.range_max});
  std::string out = "root,residual\n";
  for (double x : roots)
    out += format12(round12(x)) + "," + format12(round12(root_residual(eq, x))) + "\n";
  emit(opt, out);
  return 0;
}

int run_verify(const CliOptions& opt) {
  const auto results = capindex::run_acceptance(report_config(opt));
  bool all = true;
  std::string out;
  for (const auto& r : results) {
    out += std::string(r.pass ? "PASS" : "FAIL") + " " + r.id + ": " + r.detail + "\n";
    all = all && r.pass;
  }
  out += all ? "verify: all criteria passed\n" : "verify: FAILURES present\n";
  emit(opt, out);
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morse indices of capillary and CMC model hypersurfaces"};
  app.require_subcommand(1);
  CliOptions opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--grid-n", opt.grid_n, "finite-difference grid size");
    cmd->add_option("--quad-n", opt.quad_n, "quadrature order");
    cmd->add_option("--eps-count", opt.eps_count, "eigenvalue counting threshold");
    cmd->add_option("--eps-int", opt.eps_int, "mean-sign tolerance, relative to area");
    cmd->add_option("--eps-upsilon", opt.eps_upsilon, "Upsilon nonnegativity threshold");
    cmd->add_option("--output", opt.output, "write the report to this path");
    cmd->add_option("--format", opt.format, "output format: json or csv");
    cmd->add_option("--config", opt.config_path, "JSON config file (flags win)");
  };

  CLI::App* ci = app.add_subcommand("index", "constrained Morse indices of one surface");
  ci->add_option("--surface", opt.surface, "cylinder|catenoid|torus|disk")->required();
  ci->add_option("--n", opt.n, "cylinder dimension");
  ci->add_option("--r", opt.r, "cylinder radius in (0,1)");
  ci->add_option("--a", opt.a, "torus radius in (0,1)");
  ci->add_option("--constraints", opt.constraints, "comma list: typeI,typeII,closedWeak,fixedBoundary");
  ci->add_option("--k-max", opt.k_max, "mode truncation override");
  add_common(ci);

  CLI::App* cs = app.add_subcommand("sweep", "cylinder radius sweep");
  cs->add_option("--n", opt.n, "cylinder dimension");
  cs->add_option("--r-min", opt.r_min, "sweep start")->required();
  cs->add_option("--r-max", opt.r_max, "sweep end")->required();
  cs->add_option("--steps", opt.steps, "number of points")->required();
  add_common(cs);

  CLI::App* cr = app.add_subcommand("roots", "roots of a characteristic equation");
  cr->add_option("--equation", opt.equation, "tan|cot|coth|fredholm|catenoid")->required();
  cr->add_option("--range-max", opt.range_max, "search on (0, range_max]");
  add_common(cr);

  CLI::App* cv = app.add_subcommand("verify", "run the acceptance suite");
  add_common(cv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    bool config_has_grid = false;
    apply_config_file(opt, *active);
    if (!opt.config_path.empty()) {
      std::ifstream in(opt.config_path);
      ordered_json j;
      in >> j;
      config_has_grid = j.contains("grid_n");
    }
    apply_env_defaults(opt, *active, config_has_grid);

    if (active == ci) return run_index(opt);
    if (active == cs) return run_sweep(opt);
    if (active == cr) return run_roots(opt);
    if (active == cv) return run_verify(opt);
    throw capindex::ConfigError("no subcommand");
  } catch (const capindex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const capindex::ParamOutOfRange& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const capindex::GridTooCoarse& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const capindex::NoBoundary& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const capindex::EmptyRange& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const capindex::Error& e) {
    std::cerr << "numerical indeterminacy: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
