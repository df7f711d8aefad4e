#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "core.hpp"
#include "jacobian.hpp"
#include "mesh.hpp"

namespace swnmg {

namespace detail {
inline int floor_div(int a, int b) { return (a >= 0) ? a / b : -((-a + b - 1) / b); }
}  // namespace detail

/// Offsets reachable on the coarse grid from a fine pattern under the given aggregation.
inline std::vector<Offset> coarse_offsets(const std::vector<Offset>& fine, const Aggregation& agg) {
  std::vector<Offset> out;
  for (const Offset& o : fine)
    for (int b = 0; b < agg.fy; ++b)
      for (int a = 0; a < agg.fx; ++a) {
        const Offset c{detail::floor_div(a + o.di, agg.fx), detail::floor_div(b + o.dj, agg.fy)};
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
      }
  std::sort(out.begin(), out.end(), [](Offset p, Offset q) {
    return p.dj != q.dj ? p.dj < q.dj : p.di < q.di;
  });
  return out;
}

/// Coarse block (J, I) = sum of fine blocks coupling children of J to children of I.
template <int D>
BlockBandedMatrix<D> galerkin_project(const BlockBandedMatrix<D>& fine, const Aggregation& agg) {
  if (!(fine.shape() == agg.fine))
    throw SolverError(ErrorCode::shape_mismatch, "matrix shape does not match the aggregation");
  BlockBandedMatrix<D> coarse(agg.coarse, coarse_offsets(fine.offsets(), agg));
  const GridShape cs = agg.coarse;
  for (int r = 0; r < fine.rows(); ++r) {
    const int J = agg.parent(r);
    for (int k = 0; k < fine.slots(); ++k) {
      const int c = fine.column(r, k);
      if (c < 0) continue;
      const int I = agg.parent(c);
      const Offset o{I % cs.nx - J % cs.nx, I / cs.nx - J / cs.nx};
      coarse.block(J, coarse.slot_of(o)) += fine.block(r, k);
    }
  }
  return coarse;
}

/// Coarse residual R_c[J] = sum over children i of (R_i + (A dU)_i).
template <int D>
std::vector<Vec<D>> restrict_residual(std::span<const Vec<D>> R_fine, const BlockBandedMatrix<D>& A_fine,
                                      std::span<const Vec<D>> du_fine, const Aggregation& agg) {
  if (static_cast<int>(R_fine.size()) != agg.fine.size() ||
      static_cast<int>(du_fine.size()) != agg.fine.size() || !(A_fine.shape() == agg.fine))
    throw SolverError(ErrorCode::shape_mismatch, "restriction inputs do not match the fine grid");
  std::vector<Vec<D>> R_coarse(agg.coarse.size(), Vec<D>{});
  for (int i = 0; i < agg.fine.size(); ++i)
    R_coarse[agg.parent(i)] += R_fine[i] + A_fine.row_product(i, du_fine);
  return R_coarse;
}

/// Piecewise-constant injection: every child gains its parent's correction.
template <int D>
void prolong_correction(std::span<const Vec<D>> du_coarse, const Aggregation& agg,
                        std::span<Vec<D>> du_fine) {
  for (int i = 0; i < agg.fine.size(); ++i) du_fine[i] += du_coarse[agg.parent(i)];
}

/// Cell orderings: forward/backward for 1D loops, d1..d4 for the four 2D sweep directions
/// (x index outer, y index inner).
enum class SweepOrder { forward, backward, d1, d2, d3, d4 };

inline const char* to_string(SweepOrder o) {
  switch (o) {
    case SweepOrder::forward: return "forward";
    case SweepOrder::backward: return "backward";
    case SweepOrder::d1: return "D1";
    case SweepOrder::d2: return "D2";
    case SweepOrder::d3: return "D3";
    case SweepOrder::d4: return "D4";
  }
  return "?";
}

template <int D>
std::vector<BlockLU<D>> factor_diagonal(const BlockBandedMatrix<D>& A) {
  std::vector<BlockLU<D>> lu(A.rows());
  for (int r = 0; r < A.rows(); ++r)
    if (!lu[r].factor(A.diagonal(r)))
      throw SolverError(ErrorCode::singular_diagonal_block, "diagonal block is singular", r);
  return lu;
}

/// One relaxed block Gauss-Seidel pass over A dU = rhs in the given order:
/// dU_j <- (1 - omega) dU_j + omega A_jj^{-1} (rhs_j - sum_{i != j} A_ji dU_i).
template <int D>
void sor_sweep(const BlockBandedMatrix<D>& A, const std::vector<BlockLU<D>>& diag_lu,
               std::span<const Vec<D>> rhs, std::span<Vec<D>> du, double omega, SweepOrder order) {
  const GridShape s = A.shape();
  const int diag = A.diagonal_slot();
  auto relax = [&](int r) {
    Vec<D> acc = rhs[r];
    for (int k = 0; k < A.slots(); ++k) {
      if (k == diag) continue;
      const int c = A.column(r, k);
      if (c >= 0) acc -= A.block(r, k) * du[c];
    }
    const Vec<D> target = diag_lu[r].solve(acc);
    for (int m = 0; m < D; ++m) du[r][m] = (1.0 - omega) * du[r][m] + omega * target[m];
  };
  switch (order) {
    case SweepOrder::forward:
      for (int r = 0; r < s.size(); ++r) relax(r);
      return;
    case SweepOrder::backward:
      for (int r = s.size() - 1; r >= 0; --r) relax(r);
      return;
    default: break;
  }
  const bool i_up = order == SweepOrder::d1 || order == SweepOrder::d4;
  const bool j_up = order == SweepOrder::d1 || order == SweepOrder::d2;
  for (int ii = 0; ii < s.nx; ++ii) {
    const int i = i_up ? ii : s.nx - 1 - ii;
    for (int jj = 0; jj < s.ny; ++jj) {
      const int j = j_up ? jj : s.ny - 1 - jj;
      relax(s.index(i, j));
    }
  }
}

/// Dense LU with partial pivoting for the coarsest system.
template <int D>
class DenseLU {
 public:
  DenseLU() = default;
  explicit DenseLU(const BlockBandedMatrix<D>& A) : n_(A.rows() * D), a_(n_ * n_, 0.0), perm_(n_) {
    for (int r = 0; r < A.rows(); ++r)
      for (int k = 0; k < A.slots(); ++k) {
        const int c = A.column(r, k);
        if (c < 0) continue;
        for (int p = 0; p < D; ++p)
          for (int q = 0; q < D; ++q) a_[(r * D + p) * n_ + c * D + q] += A.block(r, k)(p, q);
      }
    original_ = a_;
    double scale = 0.0;
    for (double v : a_) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < n_; ++i) perm_[i] = i;
    for (int k = 0; k < n_; ++k) {
      int p = k;
      for (int i = k + 1; i < n_; ++i)
        if (std::abs(a_[i * n_ + k]) > std::abs(a_[p * n_ + k])) p = i;
      if (!(std::abs(a_[p * n_ + k]) > 1e-14 * scale))
        throw SolverError(ErrorCode::singular_matrix, "coarsest matrix is singular", k / D);
      if (p != k) {
        for (int j = 0; j < n_; ++j) std::swap(a_[k * n_ + j], a_[p * n_ + j]);
        std::swap(perm_[k], perm_[p]);
      }
      const double piv = a_[k * n_ + k];
      for (int i = k + 1; i < n_; ++i) {
        double& l = a_[i * n_ + k];
        if (l == 0.0) continue;
        l /= piv;
        for (int j = k + 1; j < n_; ++j) a_[i * n_ + j] -= l * a_[k * n_ + j];
      }
    }
  }

  /// Solves with one step of iterative refinement.
  std::vector<Vec<D>> solve(std::span<const Vec<D>> rhs) const {
    std::vector<double> b(n_);
    for (int i = 0; i < n_; ++i) b[i] = rhs[i / D][i % D];
    std::vector<double> x = raw_solve(b);
    std::vector<double> r(n_);
    for (int i = 0; i < n_; ++i) {
      double s = b[i];
      for (int j = 0; j < n_; ++j) s -= original_[i * n_ + j] * x[j];
      r[i] = s;
    }
    const std::vector<double> dx = raw_solve(r);
    std::vector<Vec<D>> out(n_ / D);
    for (int i = 0; i < n_; ++i) out[i / D][i % D] = x[i] + dx[i];
    return out;
  }

 private:
  std::vector<double> raw_solve(const std::vector<double>& b) const {
    std::vector<double> y(n_);
    for (int i = 0; i < n_; ++i) {
      double s = b[perm_[i]];
      for (int j = 0; j < i; ++j) s -= a_[i * n_ + j] * y[j];
      y[i] = s;
    }
    for (int i = n_ - 1; i >= 0; --i) {
      double s = y[i];
      for (int j = i + 1; j < n_; ++j) s -= a_[i * n_ + j] * y[j];
      y[i] = s / a_[i * n_ + i];
    }
    return y;
  }

  int n_ = 0;
  std::vector<double> a_;
  std::vector<double> original_;
  std::vector<int> perm_;
};

template <int D>
std::vector<Vec<D>> coarsest_solve(const BlockBandedMatrix<D>& A, std::span<const Vec<D>> rhs) {
  if (static_cast<int>(rhs.size()) != A.rows())
    throw SolverError(ErrorCode::shape_mismatch, "rhs length does not match the matrix");
  return DenseLU<D>(A).solve(rhs);
}

enum class SweepMode {
  symmetric,      // one application = increasing then decreasing loop
  four_direction  // one application = D1, D2, D3, D4 in turn
};

struct SmootherConfig {
  double omega = 1.0;
  int nu_pre = 2;
  int nu_post = 2;
  SweepMode mode = SweepMode::symmetric;
};

/// Linear system on one mesh level: A dU = rhs with rhs = -R.
template <int D>
struct LevelSystem {
  int level = 0;
  BlockBandedMatrix<D> A;
  std::vector<BlockLU<D>> diag_lu;
  std::vector<Vec<D>> rhs;
  std::vector<Vec<D>> du;
};

template <int D>
double linear_residual_l1(const BlockBandedMatrix<D>& A, std::span<const Vec<D>> rhs,
                          std::span<const Vec<D>> du) {
  double s = 0.0;
  for (int r = 0; r < A.rows(); ++r) s += l1_norm<D>(rhs[r] - A.row_product(r, du));
  return s;
}

/// Geometric V-cycle solver; level matrices are Galerkin projections of the level-0 matrix
/// and are built once at construction.
template <int D>
class MultigridSolver {
 public:
  MultigridSolver(BlockBandedMatrix<D> A0, std::vector<Aggregation> aggregations, SmootherConfig cfg)
      : cfg_(cfg), aggs_(std::move(aggregations)) {
    levels_.resize(aggs_.size() + 1);
    levels_[0].A = std::move(A0);
    for (std::size_t l = 1; l < levels_.size(); ++l)
      levels_[l].A = galerkin_project(levels_[l - 1].A, aggs_[l - 1]);
    for (std::size_t l = 0; l < levels_.size(); ++l) {
      levels_[l].level = static_cast<int>(l);
      levels_[l].diag_lu = factor_diagonal(levels_[l].A);
      levels_[l].rhs.assign(levels_[l].A.rows(), Vec<D>{});
      levels_[l].du.assign(levels_[l].A.rows(), Vec<D>{});
    }
  }

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const LevelSystem<D>& level(int l) const { return levels_[l]; }
  void set_log(std::ostream* log) { log_ = log; }

  /// One V-cycle on A0 du = rhs, updating du in place.
  void v_cycle(std::span<const Vec<D>> rhs, std::span<Vec<D>> du) {
    auto& top = levels_[0];
    std::copy(rhs.begin(), rhs.end(), top.rhs.begin());
    std::copy(du.begin(), du.end(), top.du.begin());
    cycle(0);
    std::copy(top.du.begin(), top.du.end(), du.begin());
  }

  /// Smoother applications on level 0 only, without coarse corrections.
  void smooth_only(std::span<const Vec<D>> rhs, std::span<Vec<D>> du, int applications) {
    auto& top = levels_[0];
    std::copy(rhs.begin(), rhs.end(), top.rhs.begin());
    std::copy(du.begin(), du.end(), top.du.begin());
    smooth(top, applications);
    std::copy(top.du.begin(), top.du.end(), du.begin());
  }

 private:
  void smooth(LevelSystem<D>& sys, int applications) {
    for (int a = 0; a < applications; ++a) {
      if (cfg_.mode == SweepMode::symmetric) {
        sweep(sys, SweepOrder::forward);
        sweep(sys, SweepOrder::backward);
      } else {
        for (SweepOrder o : {SweepOrder::d1, SweepOrder::d2, SweepOrder::d3, SweepOrder::d4})
          sweep(sys, o);
      }
    }
  }

  void sweep(LevelSystem<D>& sys, SweepOrder order) {
    sor_sweep<D>(sys.A, sys.diag_lu, sys.rhs, sys.du, cfg_.omega, order);
    if (log_)
      *log_ << "level " << sys.level << " sweep " << to_string(order) << " residual "
            << linear_residual_l1<D>(sys.A, sys.rhs, sys.du) << '\n';
  }

  void cycle(std::size_t l) {
    auto& sys = levels_[l];
    if (l + 1 == levels_.size()) {
      if (!direct_) direct_.emplace(sys.A);
      sys.du = direct_->solve(sys.rhs);
      return;
    }
    smooth(sys, cfg_.nu_pre);
    auto& next = levels_[l + 1];
    // coarse rhs = -(restricted R + A du) with rhs = -R
    std::vector<Vec<D>> minus_rhs(sys.rhs.size());
    for (std::size_t i = 0; i < sys.rhs.size(); ++i) minus_rhs[i] = -1.0 * sys.rhs[i];
    const auto Rc = restrict_residual<D>(minus_rhs, sys.A, sys.du, aggs_[l]);
    for (std::size_t i = 0; i < Rc.size(); ++i) next.rhs[i] = -1.0 * Rc[i];
    std::fill(next.du.begin(), next.du.end(), Vec<D>{});
    cycle(l + 1);
    prolong_correction<D>(next.du, aggs_[l], sys.du);
    smooth(sys, cfg_.nu_post);
  }

  SmootherConfig cfg_;
  std::vector<Aggregation> aggs_;
  std::vector<LevelSystem<D>> levels_;
  std::optional<DenseLU<D>> direct_;  // built on the first coarsest-level visit
  std::ostream* log_ = nullptr;
};

}  // namespace swnmg
