// Command-line front end: run cases, error/order tables, Jacobian timing, oracle dumps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swnmg/swnmg.hpp"

namespace fs = std::filesystem;
using namespace swnmg;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_not_converged = 1;
constexpr int exit_error = 2;

/// Options shared by commands that run the solver; flags override config-file values.
struct SolverOptions {
  std::string config_file;
  ConfigEntries overrides;

  void attach(CLI::App* app, bool with_cells) {
    app->add_option("--config", config_file, "key = value configuration file");
    auto entry = [&](const std::string& key, const std::string& help) {
      app->add_option_function<std::string>(
          "--" + key, [this, key](const std::string& v) { overrides[key] = v; }, help);
    };
    if (with_cells) entry("cells", "cell count N or NXxNY");
    entry("jacobian", "simplified (J3/J9) or full (J5/J21)");
    entry("alpha", "regularization weight");
    entry("tau", "Newton damping");
    entry("omega_sor", "SOR relaxation factor");
    entry("nu_pre", "pre-smoothing sweeps");
    entry("nu_post", "post-smoothing sweeps");
    entry("n_mg", "V-cycles per Newton step");
    entry("max_newton", "Newton step limit per level");
    entry("tol_abs", "absolute residual tolerance");
    entry("tol_rel", "relative residual tolerance");
    entry("gravity", "gravitational acceleration");
    entry("epsilon", "finite-difference step");
    entry("output_dir", "output directory");
  }

  ConfigEntries entries(const std::string& case_id) const {
    ConfigEntries e = config_file.empty() ? ConfigEntries{} : load_config_file(config_file);
    for (const auto& [k, v] : overrides) e[k] = v;
    if (!case_id.empty()) e["case"] = case_id;
    return e;
  }
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw SolverError(ErrorCode::invalid_config, "cannot write '" + path.string() + "'");
  return os;
}

template <int D>
std::vector<int> level_cells(const NmgmResult<D>& r) {
  std::vector<int> out;
  for (const auto& l : r.levels) out.push_back(static_cast<int>(l.field.size()));
  return out;
}

template <int D>
void write_run_outputs(const RunConfig& rc, const NmgmResult<D>& r, const fs::path& dir,
                       auto&& write_solution) {
  fs::create_directories(dir);
  auto sol = open_output(dir / "solution.csv");
  write_solution(sol);
  auto hist = open_output(dir / "history.csv");
  write_history_csv(hist, r.finest.history.rows);
  auto nested = open_output(dir / "nested_history.csv");
  const auto cells = level_cells(r);
  write_nested_history_csv(nested, r, cells);
  auto summary = open_output(dir / "summary.txt");
  write_summary(summary, rc, r);
}

int cmd_run(const std::string& case_id, const SolverOptions& opts, bool allow_stall, bool verbose) {
  const RunConfig rc = resolve_run_config(opts.entries(case_id));
  const CaseSpec spec = find_case(rc.case_id);
  std::ostream* log = verbose ? &std::cerr : nullptr;
  const fs::path dir = rc.output_dir;
  SolveStatus status;
  bool completed;
  if (const auto* c1 = std::get_if<Case1D>(&spec)) {
    const auto r = solve_case(*c1, rc.nx, rc.solver, rc.gravity, log);
    const Mesh1D mesh = case_mesh(*c1, rc.nx);
    write_run_outputs(rc, r, dir, [&](std::ostream& os) {
      write_solution_csv(os, *c1, mesh, r.finest.field);
    });
    status = r.finest.status;
    completed = r.completed;
    std::cout << rc.case_id << ": " << to_string(status) << " after " << r.finest.steps
              << " steps, residual " << r.finest.final_residual << '\n';
  } else {
    const auto& c2 = std::get<Case2D>(spec);
    const auto r = solve_case(c2, rc.nx, rc.ny, rc.solver, rc.gravity, log);
    const Mesh2D mesh = case_mesh(c2, rc.nx, rc.ny);
    write_run_outputs(rc, r, dir, [&](std::ostream& os) {
      write_solution_csv(os, c2, mesh, r.finest.field);
    });
    status = r.finest.status;
    completed = r.completed;
    std::cout << rc.case_id << ": " << to_string(status) << " after " << r.finest.steps
              << " steps, residual " << r.finest.final_residual << '\n';
    if (c2.has_probe && completed) {
      const ProbeValue p = wedge_point_probe(r.finest.field, mesh, c2.probe_x, c2.probe_y);
      std::ostringstream line;
      line.precision(17);
      line << "probe x=" << c2.probe_x << " y=" << c2.probe_y << " h=" << p.h
           << " speed=" << p.speed;
      std::cout << line.str() << '\n';
      std::ofstream summary(dir / "summary.txt", std::ios::app);
      summary << line.str() << '\n';
    }
  }
  if (!completed) return exit_not_converged;
  if (status == SolveStatus::converged) return exit_ok;
  if (status == SolveStatus::stalled && allow_stall) return exit_ok;
  return exit_not_converged;
}

int cmd_order_table(const std::string& case_id, std::vector<int> cells, double threshold,
                    const SolverOptions& opts) {
  ConfigEntries e = opts.entries(case_id);
  const RunConfig rc = resolve_run_config(e);
  const CaseSpec spec = find_case(rc.case_id);
  const auto* c1 = std::get_if<Case1D>(&spec);
  if (!c1 || c1->oracle == OracleKind::none)
    throw SolverError(ErrorCode::oracle_missing, "case '" + rc.case_id + "' has no exact solution");
  if (cells.size() < 2)
    throw SolverError(ErrorCode::invalid_config, "order-table needs at least two meshes");
  const auto study = error_study(*c1, cells, rc.solver, rc.gravity);
  std::vector<Vec<2>> l1;
  bool all_converged = true;
  for (const auto& m : study) {
    l1.push_back(m.l1);
    if (!m.converged) {
      all_converged = false;
      std::cerr << "warning: solve on " << m.cells << " cells did not converge\n";
    }
  }
  const auto rows = order_rows(cells, l1);
  write_order_table(std::cout, rows);
  if (e.count("output_dir")) {
    fs::create_directories(rc.output_dir);
    auto os = open_output(fs::path(rc.output_dir) / "order_table.csv");
    write_order_table(os, rows);
  }
  if (!finest_order_ok(rows, threshold)) {
    std::cerr << "finest observed order is undefined or below " << threshold << '\n';
    return exit_not_converged;
  }
  return all_converged ? exit_ok : exit_not_converged;
}

int cmd_jacobian_bench(const std::string& case_id, const std::string& cells, int repetitions) {
  const CaseSpec spec = find_case(case_id);
  const auto* c2 = std::get_if<Case2D>(&spec);
  if (!c2) throw SolverError(ErrorCode::invalid_config, "jacobian-bench needs a 2D case");
  const auto [nx, ny] = parse_cells(cells);
  if (ny == 0) throw SolverError(ErrorCode::invalid_config, "jacobian-bench needs NXxNY cells");
  const auto rows = jacobian_bench(*c2, nx, ny, repetitions);
  write_bench_csv(std::cout, rows);
  return exit_ok;
}

int cmd_list_cases() {
  std::cout << "id,dimension,oracle,description\n";
  for (const auto& spec : case_registry()) {
    const int dim = case_dimension(spec);
    bool oracle = false;
    if (const auto* c1 = std::get_if<Case1D>(&spec)) oracle = c1->oracle != OracleKind::none;
    if (const auto* c2 = std::get_if<Case2D>(&spec)) oracle = c2->has_probe;
    std::visit(
        [&](const auto& c) {
          std::cout << c.id << ',' << dim << ',' << (oracle ? "yes" : "no") << ",\""
                    << c.description << "\"\n";
        },
        spec);
  }
  return exit_ok;
}

int cmd_dump_oracle(const std::string& case_id, int cells, const std::string& output,
                    double gravity) {
  const CaseSpec spec = find_case(case_id);
  std::ofstream file;
  if (!output.empty()) file = open_output(output);
  std::ostream& os = output.empty() ? std::cout : file;
  if (const auto* c1 = std::get_if<Case1D>(&spec)) {
    const Mesh1D mesh = case_mesh(*c1, cells > 0 ? cells : c1->default_cells);
    write_oracle_csv(os, *c1, mesh, gravity);
    return exit_ok;
  }
  const auto& c2 = std::get<Case2D>(spec);
  if (!c2.has_probe)
    throw SolverError(ErrorCode::oracle_missing, "case '" + case_id + "' has no exact solution");
  // oblique jump behind the inflow turned parallel to the wall
  const Vec<3> in = wedge_inflow_state();
  const double speed = std::hypot(in[1], in[2]) / in[0];
  const double deflection = -std::atan2(in[2], in[1]);
  const ObliqueJump jump = oblique_jump(in[0], speed, deflection, gravity);
  os.precision(17);
  os << "beta_degrees,h,speed\n"
     << jump.beta * 180.0 / std::numbers::pi << ',' << jump.h << ',' << jump.speed << '\n';
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady shallow-water solver: Newton with nested multigrid"};
  app.require_subcommand(1);

  std::string case_id;
  bool allow_stall = false;
  bool verbose = false;
  SolverOptions run_opts;
  auto* run = app.add_subcommand("run", "solve one case and write solution, history, summary");
  run->add_option("case_id", case_id, "case id (see list-cases)");
  run->add_option("--case", case_id, "case id (see list-cases)");
  run->add_flag("--allow-stall", allow_stall, "exit 0 when the solve stalls");
  run->add_flag("-v,--verbose", verbose, "log Newton steps to stderr");
  run_opts.attach(run, true);

  std::vector<int> table_cells{80, 160, 320, 640};
  double threshold = 2.5;
  SolverOptions table_opts;
  auto* table = app.add_subcommand("order-table", "L1 errors and observed orders on a mesh ladder");
  table->add_option("case_id", case_id, "case id with an exact solution");
  table->add_option("--case", case_id, "case id with an exact solution");
  table->add_option("--cells", table_cells, "comma-separated cell counts")->delimiter(',');
  table->add_option("--threshold", threshold, "minimum finest observed order");
  table_opts.attach(table, false);

  std::string bench_cells = "64x32";
  int repetitions = 3;
  std::string bench_case = "swe2d-hump";
  auto* bench = app.add_subcommand("jacobian-bench", "time J21 against J9 assembly");
  bench->add_option("case_id", bench_case, "2D case id");
  bench->add_option("--case", bench_case, "2D case id");
  bench->add_option("--cells", bench_cells, "NXxNY");
  bench->add_option("--repetitions", repetitions, "assemblies per pattern")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-cases", "list the registered cases");

  int oracle_cells = 0;
  std::string oracle_output;
  double gravity = 9.81;
  auto* dump = app.add_subcommand("dump-oracle", "write the exact solution at cell centres");
  dump->add_option("case_id", case_id, "case id");
  dump->add_option("--case", case_id, "case id");
  dump->add_option("--cells", oracle_cells, "cell count");
  dump->add_option("--output", oracle_output, "output file (default stdout)");
  dump->add_option("--gravity", gravity, "gravitational acceleration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(case_id, run_opts, allow_stall, verbose);
    if (*table) return cmd_order_table(case_id, table_cells, threshold, table_opts);
    if (*bench) return cmd_jacobian_bench(bench_case, bench_cells, repetitions);
    if (*list) return cmd_list_cases();
    if (*dump) {
      if (case_id.empty()) throw SolverError(ErrorCode::invalid_config, "no case given");
      return cmd_dump_oracle(case_id, oracle_cells, oracle_output, gravity);
    }
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_error;
  }
  return exit_error;
}
