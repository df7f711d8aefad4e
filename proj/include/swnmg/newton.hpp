#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "jacobian.hpp"
#include "mesh.hpp"
#include "multigrid.hpp"
#include "residual.hpp"

namespace swnmg {

/// Linear solver run inside each Newton step.
enum class InnerSolver {
  multigrid,     // N_mg V-cycles
  smoother_only  // N_mg * (nu_pre + nu_post) smoother applications on the finest level
};

struct SolverConfig {
  double alpha = 3.0;
  double tau = 0.6;
  double omega_sor = 1.0;
  int nu_pre = 2;
  int nu_post = 2;
  /// 2D only: choose nu_pre = nu_post from the mesh width (10 / 15 / 20).
  bool nu_by_mesh = false;
  int n_mg = 2;
  int max_newton = 400;
  double tol_abs = 1e-10;
  double tol_rel = 1e-7;
  int stagnation_window = 50;
  JacobianKind jacobian = JacobianKind::full;
  /// Fixed finite-difference step; <= 0 selects the mesh-dependent rule.
  double epsilon = 0.0;
  double epsilon_knee = 0.05;
  InnerSolver inner = InnerSolver::multigrid;
  /// Smallest cell count per direction on the coarsest level; 0 picks the per-dimension default.
  int min_coarse_cells = 0;
  int max_tau_halvings = 5;
  bool store_iterates = false;
  /// Forward per-sweep smoother residuals to the solve log.
  bool log_sweeps = false;

  static SolverConfig defaults(int dimension) {
    SolverConfig c;
    if (dimension == 2) {
      c.n_mg = 3;
      c.omega_sor = 0.1;
      c.nu_by_mesh = true;
      c.nu_pre = c.nu_post = 10;
    }
    return c;
  }

  void validate() const {
    auto bad = [](const std::string& what) {
      throw SolverError(ErrorCode::invalid_config, what);
    };
    if (!(alpha >= 0.0)) bad("alpha must be nonnegative");
    if (!(tau > 0.0 && tau <= 1.0)) bad("tau must lie in (0, 1]");
    if (!(omega_sor > 0.0 && omega_sor < 2.0)) bad("omega_sor must lie in (0, 2)");
    if (nu_pre < 0 || nu_post < 0) bad("smoothing counts must be nonnegative");
    if (n_mg < 1) bad("n_mg must be at least 1");
    if (max_newton < 0) bad("max_newton must be nonnegative");
    if (!(tol_abs > 0.0) || !(tol_rel > 0.0)) bad("tolerances must be positive");
    if (stagnation_window < 1) bad("stagnation_window must be positive");
    if (!(epsilon_knee > 0.0 && epsilon_knee <= 0.2)) bad("epsilon_knee must lie in (0, 0.2]");
  }
};

inline int nu_for_mesh(int nx) { return nx <= 16 ? 10 : (nx <= 32 ? 15 : 20); }

/// Finite-difference step, 1e-6 in 2D. In 1D: 0.2 up to 96 cells, minus 0.05 per doubling
/// until the step reaches `knee`, then shrinking like n^(-1/2). The FD Jacobian only stays
/// smoothable by block SOR inside a window of steps that narrows and moves down as the mesh is
/// refined; steps above 0.2 on coarse meshes turn Newton into a slow fixed-point iteration.
inline double epsilon_for_mesh(int n_cells, int dimension, double knee = 0.05) {
  if (dimension != 1) return 1e-6;
  const double linear = 0.2 - 0.05 * std::log2(n_cells / 96.0);
  if (linear >= knee) return std::min(linear, 0.2);
  const double n_knee = 96.0 * std::exp2((0.2 - knee) / 0.05);
  return knee * std::sqrt(n_knee / n_cells);
}

/// Ubar + tau dU, componentwise.
template <int D>
CellField<D> update_state(std::span<const Vec<D>> field, std::span<const Vec<D>> du, double tau) {
  if (field.size() != du.size())
    throw SolverError(ErrorCode::shape_mismatch, "update and field sizes differ");
  CellField<D> out(field.begin(), field.end());
  for (std::size_t j = 0; j < out.size(); ++j)
    for (int k = 0; k < D; ++k) out[j][k] += tau * du[j][k];
  return out;
}

struct HistoryRow {
  int step = 0;
  double residual_l1 = 0.0;
  double wall_seconds = 0.0;      // cumulative since the solve started
  double jacobian_seconds = 0.0;  // cumulative Jacobian assembly time
};

template <int D>
struct ConvergenceHistory {
  std::vector<HistoryRow> rows;
  /// Iterate behind each row, kept only when requested.
  std::vector<CellField<D>> iterates;
};

inline void write_history_csv(std::ostream& os, std::span<const HistoryRow> rows) {
  os.precision(17);
  os << "step,residual_l1,wall_seconds,jacobian_seconds\n";
  for (const auto& r : rows)
    os << r.step << ',' << r.residual_l1 << ',' << r.wall_seconds << ',' << r.jacobian_seconds
       << '\n';
}

enum class SolveStatus { converged, stalled, max_iterations };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::stalled: return "stalled";
    case SolveStatus::max_iterations: return "max-iterations";
  }
  return "?";
}

template <int D>
struct SolveResult {
  CellField<D> field;  // best iterate seen
  ConvergenceHistory<D> history;
  SolveStatus status = SolveStatus::max_iterations;
  int steps = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  double wall_seconds = 0.0;
  double jacobian_seconds = 0.0;
  FdStats fd;

  bool converged() const { return status == SolveStatus::converged; }
};

namespace detail {
using Clock = std::chrono::steady_clock;
inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <int D>
std::vector<Aggregation> aggregations_for(GridShape finest, int min_cells) {
  std::vector<Aggregation> out;
  GridShape s = finest;
  const bool two_d = s.ny > 1;
  while (s.nx / 2 >= min_cells && (!two_d || s.ny / 2 >= min_cells)) {
    if (s.nx % 2 != 0 || (two_d && s.ny % 2 != 0))
      throw SolverError(ErrorCode::non_coarsenable, "cell count is not divisible by 2");
    const GridShape c{s.nx / 2, two_d ? s.ny / 2 : 1};
    out.push_back(make_aggregation(s, c));
    s = c;
  }
  return out;
}
}  // namespace detail

/// Regularized, relaxed Newton iteration on R(U) = 0 with a multigrid (or smoother-only)
/// inner solve.
template <class Op>
SolveResult<Op::d> newton_solve(const Op& op, CellField<Op::d> field0, const SolverConfig& cfg,
                                std::ostream* log = nullptr) {
  constexpr int D = Op::d;
  cfg.validate();
  const GridShape shape = op.shape();
  if (static_cast<int>(field0.size()) != shape.size())
    throw SolverError(ErrorCode::shape_mismatch, "initial field does not match the mesh");
  if (!op.admissible(field0))
    throw SolverError(ErrorCode::nonpositive_depth, "initial field has a nonpositive depth");

  const int dim = Op::dimension;
  const double eps = cfg.epsilon > 0.0 ? cfg.epsilon
                                       : epsilon_for_mesh(shape.size(), dim, cfg.epsilon_knee);
  const int min_cells = cfg.min_coarse_cells > 0 ? cfg.min_coarse_cells : default_min_cells(dim);
  const std::vector<Aggregation> aggs =
      cfg.inner == InnerSolver::multigrid ? detail::aggregations_for<D>(shape, min_cells)
                                          : std::vector<Aggregation>{};
  SmootherConfig smoother{cfg.omega_sor, cfg.nu_pre, cfg.nu_post,
                          dim == 1 ? SweepMode::symmetric : SweepMode::four_direction};
  if (cfg.nu_by_mesh && dim == 2) smoother.nu_pre = smoother.nu_post = nu_for_mesh(shape.nx);
  const StencilPattern pattern = pattern_for(cfg.jacobian, dim);

  const auto t0 = detail::Clock::now();
  SolveResult<D> out;
  CellField<D> U = std::move(field0);
  ResidualField<D> R = op.evaluate(U);
  double res = residual_l1<D>(R);
  out.initial_residual = res;
  double best = res;
  int best_step = 0;
  out.field = U;

  auto record = [&](int step) {
    out.history.rows.push_back({step, res, detail::seconds_since(t0), out.jacobian_seconds});
    if (cfg.store_iterates) out.history.iterates.push_back(U);
    if (log)
      *log << "newton step " << step << " residual " << res << '\n';
  };
  record(0);

  const double target = std::max(cfg.tol_abs, 0.0);
  for (int step = 1;; ++step) {
    if (res < target || res < cfg.tol_rel * out.initial_residual) {
      out.status = SolveStatus::converged;
      break;
    }
    if (step > cfg.max_newton) {
      out.status = SolveStatus::max_iterations;
      break;
    }
    if (step - 1 - best_step >= cfg.stagnation_window) {
      out.status = SolveStatus::stalled;
      break;
    }

    const auto tj = detail::Clock::now();
    BlockBandedMatrix<D> J = fd_jacobian(op, std::span<const Vec<D>>(U), pattern, eps, &out.fd);
    out.jacobian_seconds += detail::seconds_since(tj);
    J = regularize<D>(std::move(J), R, cfg.alpha);

    std::vector<Vec<D>> rhs(R.size());
    for (std::size_t j = 0; j < R.size(); ++j) rhs[j] = -1.0 * R[j];
    std::vector<Vec<D>> du(R.size(), Vec<D>{});
    MultigridSolver<D> mg(std::move(J), aggs, smoother);
    if (cfg.log_sweeps) mg.set_log(log);
    // Keep the inner iterate with the smallest linear residual; if none beats dU = 0 the
    // linearization is out of the smoother's reach and further steps cannot make progress.
    std::vector<Vec<D>> best_du = du;
    double best_lin = res;
    auto keep_best = [&] {
      const double lin = linear_residual_l1<D>(mg.level(0).A, rhs, du);
      if (lin < best_lin) {
        best_lin = lin;
        best_du = du;
      }
    };
    if (cfg.inner == InnerSolver::multigrid) {
      for (int c = 0; c < cfg.n_mg; ++c) {
        mg.v_cycle(rhs, du);
        keep_best();
      }
    } else {
      mg.smooth_only(rhs, du, cfg.n_mg * (smoother.nu_pre + smoother.nu_post));
      keep_best();
    }
    if (!(best_lin < res)) {
      if (log) *log << "inner solve did not reduce the linear residual\n";
      out.status = SolveStatus::stalled;
      break;
    }
    du = std::move(best_du);

    double tau = cfg.tau;
    bool accepted = false;
    for (int attempt = 0; attempt <= cfg.max_tau_halvings; ++attempt, tau *= 0.5) {
      CellField<D> trial = update_state<D>(U, du, tau);
      if (!op.admissible(trial)) continue;
      try {
        R = op.evaluate(trial);
      } catch (const SolverError& e) {
        if (e.code() == ErrorCode::nonpositive_depth) continue;
        throw;
      }
      U = std::move(trial);
      accepted = true;
      break;
    }
    if (!accepted)
      throw SolverError(ErrorCode::nonpositive_depth,
                        "update stays inadmissible after halving tau " +
                            std::to_string(cfg.max_tau_halvings) + " times");
    res = residual_l1<D>(R);
    out.steps = step;
    record(step);
    if (res < 0.99 * best) {
      best = res;
      best_step = step;
      out.field = U;
    } else if (res < best) {
      best = res;
      out.field = U;
    }
  }
  if (out.status == SolveStatus::converged) out.field = U;
  out.final_residual = residual_l1<D>(op.evaluate(out.field));
  out.wall_seconds = detail::seconds_since(t0);
  return out;
}

/// Fine averages from the coarse quadratic reconstruction; cells without both neighbours inject.
template <int D>
CellField<D> prolong_solution_1d(std::span<const Vec<D>> coarse) {
  const int n = static_cast<int>(coarse.size());
  CellField<D> fine(2 * n);
  for (int j = 0; j < n; ++j) {
    if (j == 0 || j == n - 1) {
      fine[2 * j] = fine[2 * j + 1] = coarse[j];
      continue;
    }
    // Children [-1/2, 0] and [0, 1/2]: <xi> = -+1/4 and <xi^2 - 1/12> = 0.
    for (int k = 0; k < D; ++k) {
      const double slope = 0.5 * (coarse[j + 1][k] - coarse[j - 1][k]);
      fine[2 * j][k] = coarse[j][k] - 0.25 * slope;
      fine[2 * j + 1][k] = coarse[j][k] + 0.25 * slope;
    }
  }
  return fine;
}

/// Tensor-product biquadratic version of prolong_solution_1d on an nx x ny coarse grid.
template <int D>
CellField<D> prolong_solution_2d(std::span<const Vec<D>> coarse, int nx, int ny) {
  if (static_cast<int>(coarse.size()) != nx * ny)
    throw SolverError(ErrorCode::shape_mismatch, "coarse field does not match its shape");
  const GridShape cs{nx, ny};
  const GridShape fs{2 * nx, 2 * ny};
  CellField<D> fine(fs.size());
  for (int J = 0; J < ny; ++J)
    for (int I = 0; I < nx; ++I) {
      const Vec<D>& c = coarse[cs.index(I, J)];
      const bool interior = I > 0 && I < nx - 1 && J > 0 && J < ny - 1;
      for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a) {
          Vec<D>& f = fine[fs.index(2 * I + a, 2 * J + b)];
          if (!interior) {
            f = c;
            continue;
          }
          const double ex = a == 0 ? -0.25 : 0.25;
          const double ey = b == 0 ? -0.25 : 0.25;
          auto at = [&](int di, int dj) -> const Vec<D>& { return coarse[cs.index(I + di, J + dj)]; };
          for (int k = 0; k < D; ++k) {
            const double sx = 0.5 * (at(1, 0)[k] - at(-1, 0)[k]);
            const double sy = 0.5 * (at(0, 1)[k] - at(0, -1)[k]);
            const double sxy = 0.25 * (at(1, 1)[k] - at(-1, 1)[k] - at(1, -1)[k] + at(-1, -1)[k]);
            f[k] = c[k] + sx * ex + sy * ey + sxy * ex * ey;
          }
        }
    }
  return fine;
}

template <int D>
struct NmgmResult {
  SolveResult<D> finest;
  /// Coarsest level first.
  std::vector<SolveResult<D>> levels;
  /// Wall time of the finest-level solve only.
  double wall_seconds = 0.0;
  /// False when a coarser level hit max_newton and the finer levels were skipped.
  bool completed = true;
};

/// Nested iteration: solve on the coarsest mesh from `initial`, then prolong each converged
/// solution as the initial guess on the next finer mesh. `make_op` builds the residual
/// operator of a mesh; `initial` returns the starting cell averages on the coarsest mesh.
template <class Mesh, class MakeOp, class Initial>
auto nmgm(const MeshHierarchy<Mesh>& hierarchy, MakeOp make_op, Initial initial,
          const SolverConfig& cfg, std::ostream* log = nullptr) {
  using Op = std::invoke_result_t<MakeOp, const Mesh&>;
  constexpr int D = Op::d;
  NmgmResult<D> out;
  CellField<D> guess;
  for (int l = hierarchy.coarsest_level(); l >= 0; --l) {
    const Mesh& mesh = hierarchy.levels[l];
    const Op op = make_op(mesh);
    if (l == hierarchy.coarsest_level()) {
      guess = initial(mesh);
    } else {
      const Mesh& coarse = hierarchy.levels[l + 1];
      if constexpr (Op::dimension == 1)
        guess = prolong_solution_1d<D>(out.levels.back().field);
      else
        guess = prolong_solution_2d<D>(out.levels.back().field, coarse.nx, coarse.ny);
    }
    if (log) *log << "level " << l << " cells " << mesh.size() << '\n';
    SolveResult<D> r = newton_solve(op, std::move(guess), cfg, log);
    const bool failed = r.status == SolveStatus::max_iterations;
    out.levels.push_back(std::move(r));
    if (failed) {
      if (log) *log << "level " << l << " did not converge\n";
      out.completed = l == 0;
      break;
    }
  }
  out.finest = out.levels.back();
  out.wall_seconds = out.finest.wall_seconds;
  return out;
}

}  // namespace swnmg
