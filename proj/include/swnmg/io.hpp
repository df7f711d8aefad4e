#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "cases.hpp"

namespace swnmg {

// ---------------------------------------------------------------------------------------------
// Run configuration

/// Keys accepted in a configuration file.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "case",  "cells",   "jacobian",   "alpha",  "tau",    "omega_sor",
      "nu_pre", "nu_post", "n_mg",      "max_newton", "tol_abs", "tol_rel",
      "gravity", "epsilon", "output_dir"};
  return keys;
}

/// Raw key -> value pairs; later assignments replace earlier ones.
using ConfigEntries = std::map<std::string, std::string>;

struct RunConfig {
  std::string case_id;
  int nx = 0;  // 0 selects the case default
  int ny = 0;  // 0 for 1D cases
  SolverConfig solver;
  double gravity = 9.81;
  std::string output_dir = ".";
  /// Reserved; the solver is deterministic and never draws random numbers.
  unsigned seed = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v))
    throw SolverError(ErrorCode::invalid_config, key + ": '" + text + "' is not a finite number");
  return v;
}

inline int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end)
    throw SolverError(ErrorCode::invalid_config, key + ": '" + text + "' is not an integer");
  return v;
}

}  // namespace detail

/// Parses "n" or "nx x ny" (also "nx,ny"); ny is 0 for a single count.
inline std::pair<int, int> parse_cells(const std::string& text) {
  const auto sep = text.find_first_of("xX,");
  const auto positive = [&](const std::string& part) {
    const int n = detail::parse_int("cells", std::string(detail::trim(part)));
    if (n < 1) throw SolverError(ErrorCode::invalid_config, "cells: counts must be positive");
    return n;
  };
  if (sep == std::string::npos) return {positive(text), 0};
  return {positive(text.substr(0, sep)), positive(text.substr(sep + 1))};
}

/// Reads "key = value" lines; '#' starts a comment, blank lines are skipped.
inline ConfigEntries parse_config(std::istream& is) {
  ConfigEntries out;
  const auto& keys = config_keys();
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw SolverError(ErrorCode::invalid_config,
                        "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(detail::trim(s.substr(0, eq)));
    const std::string value(detail::trim(s.substr(eq + 1)));
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw SolverError(ErrorCode::invalid_config,
                        "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (value.empty())
      throw SolverError(ErrorCode::invalid_config,
                        "line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    out[key] = value;
  }
  return out;
}

inline ConfigEntries load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw SolverError(ErrorCode::invalid_config, "cannot open config file '" + path + "'");
  return parse_config(is);
}

/// Builds a run configuration: case defaults first, then every entry on top.
inline RunConfig resolve_run_config(const ConfigEntries& entries) {
  const auto it = entries.find("case");
  if (it == entries.end()) throw SolverError(ErrorCode::invalid_config, "no case given");
  RunConfig rc;
  rc.case_id = it->second;
  const CaseSpec spec = find_case(rc.case_id);
  const int dim = case_dimension(spec);
  rc.solver = std::visit([](const auto& c) { return c.config; }, spec);

  for (const auto& [key, value] : entries) {
    SolverConfig& s = rc.solver;
    if (key == "case") {
      continue;
    } else if (key == "cells") {
      std::tie(rc.nx, rc.ny) = parse_cells(value);
      if ((dim == 1) != (rc.ny == 0))
        throw SolverError(ErrorCode::invalid_config,
                          "cells: case '" + rc.case_id + "' needs " +
                              (dim == 1 ? "one count" : "two counts (NXxNY)"));
    } else if (key == "jacobian") {
      if (value == "simplified")
        s.jacobian = JacobianKind::simplified;
      else if (value == "full")
        s.jacobian = JacobianKind::full;
      else
        throw SolverError(ErrorCode::invalid_config, "jacobian must be 'simplified' or 'full'");
    } else if (key == "alpha") {
      s.alpha = detail::parse_double(key, value);
    } else if (key == "tau") {
      s.tau = detail::parse_double(key, value);
    } else if (key == "omega_sor") {
      s.omega_sor = detail::parse_double(key, value);
    } else if (key == "nu_pre") {
      s.nu_pre = detail::parse_int(key, value);
      s.nu_by_mesh = false;
    } else if (key == "nu_post") {
      s.nu_post = detail::parse_int(key, value);
      s.nu_by_mesh = false;
    } else if (key == "n_mg") {
      s.n_mg = detail::parse_int(key, value);
    } else if (key == "max_newton") {
      s.max_newton = detail::parse_int(key, value);
    } else if (key == "tol_abs") {
      s.tol_abs = detail::parse_double(key, value);
    } else if (key == "tol_rel") {
      s.tol_rel = detail::parse_double(key, value);
    } else if (key == "gravity") {
      rc.gravity = detail::parse_double(key, value);
      if (!(rc.gravity > 0.0)) throw SolverError(ErrorCode::invalid_config, "gravity must be positive");
    } else if (key == "epsilon") {
      s.epsilon = detail::parse_double(key, value);
      if (!(s.epsilon > 0.0)) throw SolverError(ErrorCode::invalid_config, "epsilon must be positive");
    } else if (key == "output_dir") {
      rc.output_dir = value;
    } else {
      throw SolverError(ErrorCode::invalid_config, "unknown key '" + key + "'");
    }
  }

  if (rc.nx == 0) {
    if (const auto* c1 = std::get_if<Case1D>(&spec)) {
      rc.nx = c1->default_cells;
    } else {
      const auto& c2 = std::get<Case2D>(spec);
      rc.nx = c2.default_nx;
      rc.ny = c2.default_ny;
    }
  }
  rc.solver.validate();
  return rc;
}

// ---------------------------------------------------------------------------------------------
// Output

/// 1D columns: x, b, h, hu, h_plus_b, and sigma, Q for channel cases.
inline void write_solution_csv(std::ostream& os, const Case1D& c, const Mesh1D& mesh,
                               std::span<const Vec<2>> field) {
  const bool channel = c.model == ModelKind::channel;
  os.precision(17);
  os << "x,b,h,hu,h_plus_b" << (channel ? ",sigma,Q" : "") << '\n';
  for (int j = 0; j < mesh.n_cells; ++j) {
    const double x = mesh.center(j);
    const Geometry g = c.geometry(x);
    const double h = field[j][0] / g.sigma;
    const double hu = field[j][1] / g.sigma;
    os << x << ',' << g.b << ',' << h << ',' << hu << ',' << h + g.b;
    if (channel) os << ',' << g.sigma << ',' << field[j][1];
    os << '\n';
  }
}

/// 2D columns: x, y, b, h, hu, hv.
inline void write_solution_csv(std::ostream& os, const Case2D& c, const Mesh2D& mesh,
                               std::span<const Vec<3>> field) {
  os.precision(17);
  os << "x,y,b,h,hu,hv\n";
  for (int j = 0; j < mesh.ny; ++j)
    for (int i = 0; i < mesh.nx; ++i) {
      const double x = mesh.center_x(i);
      const double y = mesh.center_y(j);
      const Vec<3>& u = field[mesh.index(i, j)];
      os << x << ',' << y << ',' << c.geometry(x, y).b << ',' << u[0] << ',' << u[1] << ','
         << u[2] << '\n';
    }
}

/// History of all nested levels, coarsest first.
template <int D>
void write_nested_history_csv(std::ostream& os, const NmgmResult<D>& r,
                              std::span<const int> level_cells) {
  os.precision(17);
  os << "level_cells,step,residual_l1,wall_seconds,jacobian_seconds\n";
  for (std::size_t l = 0; l < r.levels.size(); ++l)
    for (const auto& row : r.levels[l].history.rows)
      os << level_cells[l] << ',' << row.step << ',' << row.residual_l1 << ','
         << row.wall_seconds << ',' << row.jacobian_seconds << '\n';
}

/// "key: value" lines describing the finest-level solve.
template <int D>
void write_summary(std::ostream& os, const RunConfig& rc, const NmgmResult<D>& r) {
  const SolveResult<D>& f = r.finest;
  os.precision(17);
  os << "case: " << rc.case_id << '\n';
  os << "cells: " << rc.nx;
  if (rc.ny > 0) os << 'x' << rc.ny;
  os << '\n';
  os << "jacobian: " << pattern_for(rc.solver.jacobian, rc.ny > 0 ? 2 : 1).name << '\n';
  os << "status: " << to_string(f.status) << '\n';
  os << "converged: " << (f.converged() && r.completed ? "true" : "false") << '\n';
  os << "nested_levels_completed: " << (r.completed ? "true" : "false") << '\n';
  os << "N_step: " << f.steps << '\n';
  os << "initial_residual: " << f.initial_residual << '\n';
  os << "final_residual: " << f.final_residual << '\n';
  double total = 0.0;
  int steps = 0;
  for (const auto& l : r.levels) {
    total += l.wall_seconds;
    steps += l.steps;
  }
  os << "total_steps_all_levels: " << steps << '\n';
  os << "finest_wall_seconds: " << f.wall_seconds << '\n';
  os << "finest_jacobian_seconds: " << f.jacobian_seconds << '\n';
  os << "total_wall_seconds: " << total << '\n';
}

// ---------------------------------------------------------------------------------------------
// Error and order tables

struct OrderRow {
  int cells = 0;
  Vec<2> l1{};
  /// Observed order against the previous row; NaN on the first row or when undefined.
  Vec<2> order{std::nan(""), std::nan("")};
};

/// Pairwise observed orders for errors on successively doubled meshes. Zero errors leave the
/// order undefined (NaN) rather than throwing.
inline std::vector<OrderRow> order_rows(std::span<const int> cells, std::span<const Vec<2>> l1) {
  if (cells.size() != l1.size())
    throw SolverError(ErrorCode::shape_mismatch, "one error pair is needed per mesh");
  std::vector<OrderRow> out(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    out[k].cells = cells[k];
    out[k].l1 = l1[k];
    if (k == 0) continue;
    for (int m = 0; m < 2; ++m)
      if (l1[k - 1][m] > 0.0 && l1[k][m] > 0.0)
        out[k].order[m] = std::log2(l1[k - 1][m] / l1[k][m]) / std::log2(double(cells[k]) / cells[k - 1]);
  }
  return out;
}

/// True when the last row has defined orders at or above the threshold in both components.
inline bool finest_order_ok(std::span<const OrderRow> rows, double threshold) {
  if (rows.size() < 2) return false;
  const OrderRow& r = rows.back();
  return r.order[0] >= threshold && r.order[1] >= threshold;
}

/// Columns N, L1_h, order_h, L1_hu, order_hu; undefined orders are written as "-".
inline void write_order_table(std::ostream& os, std::span<const OrderRow> rows) {
  os.precision(17);
  os << "N,L1_h,order_h,L1_hu,order_hu\n";
  auto order = [&](double v) -> std::ostream& {
    if (std::isnan(v))
      os << '-';
    else
      os << v;
    return os;
  };
  for (const auto& r : rows) {
    os << r.cells << ',' << r.l1[0] << ',';
    order(r.order[0]) << ',' << r.l1[1] << ',';
    order(r.order[1]) << '\n';
  }
}

struct MeshError {
  int cells = 0;
  Vec<2> l1{};
  bool converged = false;
};

/// Solves a 1D case on each mesh and measures the L1 error of the cell averages.
inline std::vector<MeshError> error_study(const Case1D& c, std::span<const int> cells,
                                          const SolverConfig& cfg, double g = 9.81) {
  if (c.oracle == OracleKind::none)
    throw SolverError(ErrorCode::oracle_missing, "case '" + c.id + "' has no exact solution");
  std::vector<MeshError> out;
  for (int n : cells) {
    const Mesh1D mesh = case_mesh(c, n);
    const auto r = solve_case(c, n, cfg, g);
    const CellField<2> exact = exact_averages(c, mesh, g);
    out.push_back({n, l1_error<2>(r.finest.field, exact, mesh.dx),
                   r.completed && r.finest.converged()});
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Jacobian assembly timing

struct BenchRow {
  std::string pattern;
  double mean_seconds = 0.0;
  double ratio = 1.0;  // mean time relative to the full pattern
  FdStats stats;       // counts of a single assembly
};

/// Times repeated finite-difference assemblies of J21 and J9 on the case's initial field.
inline std::vector<BenchRow> jacobian_bench(const Case2D& c, int nx, int ny, int repetitions,
                                            double epsilon = 1e-6, double g = 9.81) {
  if (repetitions < 1) throw SolverError(ErrorCode::invalid_config, "repetitions must be positive");
  const Mesh2D mesh = case_mesh(c, nx, ny);
  const auto op = make_residual(c, mesh, g);
  const CellField<3> field = initial_field(c, mesh);
  std::vector<BenchRow> out;
  for (const StencilPattern& p : {StencilPattern::j21(), StencilPattern::j9()}) {
    BenchRow row;
    row.pattern = p.name;
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < repetitions; ++k) {
      FdStats stats;
      const auto J = fd_jacobian(op, std::span<const Vec<3>>(field), p, epsilon, &stats);
      row.stats = stats;
      if (J.rows() != mesh.size()) throw SolverError(ErrorCode::shape_mismatch, "bad Jacobian");
    }
    row.mean_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repetitions;
    out.push_back(row);
  }
  for (auto& r : out)
    r.ratio = out[0].mean_seconds > 0.0 ? r.mean_seconds / out[0].mean_seconds : std::nan("");
  return out;
}

inline void write_bench_csv(std::ostream& os, std::span<const BenchRow> rows) {
  os.precision(17);
  os << "pattern,mean_seconds,ratio\n";
  for (const auto& r : rows) os << r.pattern << ',' << r.mean_seconds << ',' << r.ratio << '\n';
}

}  // namespace swnmg
