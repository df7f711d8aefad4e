#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"

namespace swnmg {

/// Set of cell offsets whose Jacobian blocks are assembled.
struct StencilPattern {
  std::string name;
  std::vector<Offset> offsets;

  bool contains(Offset o) const {
    return std::find(offsets.begin(), offsets.end(), o) != offsets.end();
  }

  static StencilPattern j3() { return {"J3", {{-1, 0}, {0, 0}, {1, 0}}}; }
  static StencilPattern j5() { return {"J5", {{-2, 0}, {-1, 0}, {0, 0}, {1, 0}, {2, 0}}}; }
  static StencilPattern j9() {
    StencilPattern p{"J9", {}};
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) p.offsets.push_back({di, dj});
    return p;
  }
  /// 5 x 5 block minus its four corners.
  static StencilPattern j21() {
    StencilPattern p{"J21", {}};
    for (int dj = -2; dj <= 2; ++dj)
      for (int di = -2; di <= 2; ++di)
        if (std::abs(di) + std::abs(dj) < 4) p.offsets.push_back({di, dj});
    return p;
  }
};

enum class JacobianKind { simplified, full };

inline StencilPattern pattern_for(JacobianKind kind, int dimension) {
  if (dimension == 1) return kind == JacobianKind::simplified ? StencilPattern::j3() : StencilPattern::j5();
  return kind == JacobianKind::simplified ? StencilPattern::j9() : StencilPattern::j21();
}

/// Sparse matrix of D x D blocks; row r couples to column r + offset for every stored offset.
/// Slots whose column falls outside the grid exist in storage but are never read.
template <int D>
class BlockBandedMatrix {
 public:
  BlockBandedMatrix() = default;
  BlockBandedMatrix(GridShape shape, std::vector<Offset> offsets)
      : shape_(shape), offsets_(std::move(offsets)), blocks_(shape.size() * offsets_.size()) {
    diag_ = slot_of({0, 0});
    if (diag_ < 0) throw SolverError(ErrorCode::shape_mismatch, "pattern lacks the diagonal offset");
  }

  GridShape shape() const { return shape_; }
  int rows() const { return shape_.size(); }
  const std::vector<Offset>& offsets() const { return offsets_; }
  int slots() const { return static_cast<int>(offsets_.size()); }
  int diagonal_slot() const { return diag_; }

  int slot_of(Offset o) const {
    for (int k = 0; k < slots(); ++k)
      if (offsets_[k] == o) return k;
    return -1;
  }

  /// Column index of slot k in row r, or -1 when it leaves the grid.
  int column(int row, int k) const {
    const int i = row % shape_.nx + offsets_[k].di;
    const int j = row / shape_.nx + offsets_[k].dj;
    return shape_.contains(i, j) ? shape_.index(i, j) : -1;
  }

  Block<D>& block(int row, int k) { return blocks_[row * offsets_.size() + k]; }
  const Block<D>& block(int row, int k) const { return blocks_[row * offsets_.size() + k]; }
  Block<D>& diagonal(int row) { return block(row, diag_); }
  const Block<D>& diagonal(int row) const { return block(row, diag_); }

  /// Row-wise product A v restricted to columns inside the grid.
  Vec<D> row_product(int row, std::span<const Vec<D>> v) const {
    Vec<D> y{};
    for (int k = 0; k < slots(); ++k) {
      const int c = column(row, k);
      if (c >= 0) y += block(row, k) * v[c];
    }
    return y;
  }

 private:
  GridShape shape_{};
  std::vector<Offset> offsets_;
  std::vector<Block<D>> blocks_;
  int diag_ = -1;
};

template <int D>
std::vector<Vec<D>> matvec(const BlockBandedMatrix<D>& A, std::span<const Vec<D>> v) {
  if (static_cast<int>(v.size()) != A.rows())
    throw SolverError(ErrorCode::shape_mismatch, "vector length does not match the matrix");
  std::vector<Vec<D>> y(v.size());
  for (int r = 0; r < A.rows(); ++r) y[r] = A.row_product(r, v);
  return y;
}

/// Adds alpha ||R_j||_1 I to every diagonal block.
template <int D>
BlockBandedMatrix<D> regularize(BlockBandedMatrix<D> J, std::span<const Vec<D>> R, double alpha) {
  if (static_cast<int>(R.size()) != J.rows())
    throw SolverError(ErrorCode::shape_mismatch, "residual length does not match the matrix");
  for (int r = 0; r < J.rows(); ++r) {
    const double shift = alpha * l1_norm<D>(R[r]);
    for (int k = 0; k < D; ++k) J.diagonal(r)(k, k) += shift;
  }
  return J;
}

struct FdStats {
  long perturbations = 0;         // perturbed (cell, component) pairs
  long residual_evaluations = 0;  // per-cell residual evaluations after a perturbation
};

/// Forward-difference Jacobian restricted to `pattern`.
///
/// `Op` supplies make_workspace / value / set_value / cell_residual. For every cell and
/// component the value is raised by epsilon and only rows that the pattern couples to that
/// cell are re-evaluated; blocks outside the pattern are never computed.
template <class Op>
BlockBandedMatrix<Op::d> fd_jacobian(const Op& op, std::span<const Vec<Op::d>> field,
                                     const StencilPattern& pattern, double epsilon,
                                     FdStats* stats = nullptr) {
  constexpr int D = Op::d;
  if (!(epsilon > 0.0))
    throw SolverError(ErrorCode::invalid_config, "finite-difference epsilon must be positive");
  const GridShape shape = op.shape();
  BlockBandedMatrix<D> J(shape, pattern.offsets);
  auto ws = op.make_workspace(field);
  std::vector<Vec<D>> base(shape.size());
  for (int r = 0; r < shape.size(); ++r) base[r] = op.cell_residual(ws, r);

  for (int c = 0; c < shape.size(); ++c) {
    const int ci = c % shape.nx;
    const int cj = c / shape.nx;
    for (int m = 0; m < D; ++m) {
      const double old = op.value(ws, c, m);
      const double bumped = old + epsilon;
      if (bumped == old)
        throw SolverError(ErrorCode::epsilon_too_small,
                          "perturbation vanishes against component " + std::to_string(m), c);
      const double step = bumped - old;
      op.set_value(ws, c, m, bumped);
      if (stats) ++stats->perturbations;
      for (int k = 0; k < J.slots(); ++k) {
        // row r sees column c at offset (c - r) == offsets[k]
        const Offset o = pattern.offsets[k];
        const int ri = ci - o.di;
        const int rj = cj - o.dj;
        if (!shape.contains(ri, rj)) continue;
        const int r = shape.index(ri, rj);
        Vec<D> Rp;
        try {
          Rp = op.cell_residual(ws, r);
        } catch (const SolverError& e) {
          throw SolverError(e.code(),
                            std::string("while perturbing component ") + std::to_string(m) +
                                " of cell " + std::to_string(c) + ": " + e.what(),
                            r);
        }
        if (stats) ++stats->residual_evaluations;
        Block<D>& B = J.block(r, k);
        for (int l = 0; l < D; ++l) B(l, m) = (Rp[l] - base[r][l]) / step;
      }
      op.set_value(ws, c, m, old);
    }
  }
  return J;
}

/// Plain-text dump: one line per stored in-range block, "row col" followed by D*D entries.
template <int D>
void write_triplets(std::ostream& os, const BlockBandedMatrix<D>& A) {
  os.precision(17);
  for (int r = 0; r < A.rows(); ++r)
    for (int k = 0; k < A.slots(); ++k) {
      const int c = A.column(r, k);
      if (c < 0) continue;
      os << r << ' ' << c;
      for (double v : A.block(r, k).a) os << ' ' << v;
      os << '\n';
    }
}

}  // namespace swnmg
