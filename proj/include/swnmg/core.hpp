#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

namespace swnmg {

/// Failure categories reported by the solver components.
enum class ErrorCode {
  invalid_domain,
  non_coarsenable,
  nonpositive_depth,
  degenerate_speeds,
  singular_eigenbasis,
  missing_ghosts,
  inconsistent_spec,
  shape_mismatch,
  singular_diagonal_block,
  singular_matrix,
  epsilon_too_small,
  no_subcritical_root,
  no_real_root,
  nonpositive_error,
  point_outside_domain,
  oracle_missing,
  unknown_case,
  invalid_config,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_domain: return "invalid-domain";
    case ErrorCode::non_coarsenable: return "non-coarsenable";
    case ErrorCode::nonpositive_depth: return "nonpositive-depth";
    case ErrorCode::degenerate_speeds: return "degenerate-speeds";
    case ErrorCode::singular_eigenbasis: return "singular-eigenbasis";
    case ErrorCode::missing_ghosts: return "missing-ghosts";
    case ErrorCode::inconsistent_spec: return "inconsistent-spec";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::singular_diagonal_block: return "singular-diagonal-block";
    case ErrorCode::singular_matrix: return "singular-matrix";
    case ErrorCode::epsilon_too_small: return "epsilon-too-small";
    case ErrorCode::no_subcritical_root: return "no-subcritical-root";
    case ErrorCode::no_real_root: return "no-real-root";
    case ErrorCode::nonpositive_error: return "nonpositive-error";
    case ErrorCode::point_outside_domain: return "point-outside-domain";
    case ErrorCode::oracle_missing: return "oracle-missing";
    case ErrorCode::unknown_case: return "unknown-case";
    case ErrorCode::invalid_config: return "invalid-config";
  }
  return "unknown";
}

class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorCode code, const std::string& what, long cell = -1)
      : std::runtime_error(std::string(to_string(code)) + ": " + what +
                           (cell >= 0 ? " (cell " + std::to_string(cell) + ")" : "")),
        code_(code),
        cell_(cell) {}

  ErrorCode code() const noexcept { return code_; }
  /// Flat cell index the failure refers to, or -1.
  long cell() const noexcept { return cell_; }

 private:
  ErrorCode code_;
  long cell_;
};

template <int D>
using Vec = std::array<double, D>;

/// Dense D x D block stored row-major.
template <int D>
struct Block {
  std::array<double, D * D> a{};

  double& operator()(int r, int c) { return a[r * D + c]; }
  double operator()(int r, int c) const { return a[r * D + c]; }

  static Block identity() {
    Block b;
    for (int i = 0; i < D; ++i) b(i, i) = 1.0;
    return b;
  }

  Block& operator+=(const Block& o) {
    for (int i = 0; i < D * D; ++i) a[i] += o.a[i];
    return *this;
  }
};

template <std::size_t D>
inline std::array<double, D> operator+(const std::array<double, D>& x, const std::array<double, D>& y) {
  std::array<double, D> r;
  for (std::size_t i = 0; i < D; ++i) r[i] = x[i] + y[i];
  return r;
}

template <std::size_t D>
inline std::array<double, D> operator-(const std::array<double, D>& x, const std::array<double, D>& y) {
  std::array<double, D> r;
  for (std::size_t i = 0; i < D; ++i) r[i] = x[i] - y[i];
  return r;
}

template <std::size_t D>
inline std::array<double, D> operator*(double s, const std::array<double, D>& x) {
  std::array<double, D> r;
  for (std::size_t i = 0; i < D; ++i) r[i] = s * x[i];
  return r;
}

template <std::size_t D>
inline std::array<double, D>& operator+=(std::array<double, D>& x, const std::array<double, D>& y) {
  for (std::size_t i = 0; i < D; ++i) x[i] += y[i];
  return x;
}

template <std::size_t D>
inline std::array<double, D>& operator-=(std::array<double, D>& x, const std::array<double, D>& y) {
  for (std::size_t i = 0; i < D; ++i) x[i] -= y[i];
  return x;
}

template <int D>
inline Vec<D> operator*(const Block<D>& m, const std::type_identity_t<Vec<D>>& x) {
  Vec<D> r{};
  for (int i = 0; i < D; ++i) {
    double s = 0.0;
    for (int j = 0; j < D; ++j) s += m(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

template <int D>
inline Block<D> operator*(const Block<D>& m, const Block<D>& n) {
  Block<D> r;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      double s = 0.0;
      for (int k = 0; k < D; ++k) s += m(i, k) * n(k, j);
      r(i, j) = s;
    }
  return r;
}

template <std::size_t D>
inline double l1_norm(const std::array<double, D>& x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

/// Induced 1-norm (max column sum).
template <int D>
inline double l1_norm(const Block<D>& m) {
  double best = 0.0;
  for (int c = 0; c < D; ++c) {
    double s = 0.0;
    for (int r = 0; r < D; ++r) s += std::abs(m(r, c));
    best = std::max(best, s);
  }
  return best;
}

/// LU factorization with partial pivoting of a small block.
template <int D>
class BlockLU {
 public:
  BlockLU() = default;

  /// Returns false when a pivot vanishes.
  bool factor(const Block<D>& m) {
    lu_ = m;
    for (int i = 0; i < D; ++i) perm_[i] = i;
    double scale = 0.0;
    for (double v : m.a) scale = std::max(scale, std::abs(v));
    if (!(scale > 0.0) || !std::isfinite(scale)) return false;
    for (int k = 0; k < D; ++k) {
      int p = k;
      for (int i = k + 1; i < D; ++i)
        if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
      if (std::abs(lu_(p, k)) <= 1e-300 || std::abs(lu_(p, k)) < 1e-14 * scale) return false;
      if (p != k) {
        for (int j = 0; j < D; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(perm_[k], perm_[p]);
      }
      for (int i = k + 1; i < D; ++i) {
        lu_(i, k) /= lu_(k, k);
        for (int j = k + 1; j < D; ++j) lu_(i, j) -= lu_(i, k) * lu_(k, j);
      }
    }
    return true;
  }

  Vec<D> solve(const Vec<D>& b) const {
    Vec<D> y;
    for (int i = 0; i < D; ++i) {
      double s = b[perm_[i]];
      for (int j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
      y[i] = s;
    }
    for (int i = D - 1; i >= 0; --i) {
      double s = y[i];
      for (int j = i + 1; j < D; ++j) s -= lu_(i, j) * y[j];
      y[i] = s / lu_(i, i);
    }
    return y;
  }

  Block<D> inverse() const {
    Block<D> inv;
    for (int c = 0; c < D; ++c) {
      Vec<D> e{};
      e[c] = 1.0;
      const Vec<D> col = solve(e);
      for (int r = 0; r < D; ++r) inv(r, c) = col[r];
    }
    return inv;
  }

 private:
  Block<D> lu_{};
  std::array<int, D> perm_{};
};

/// Logical shape of a structured cell grid; 1D grids use ny == 1.
struct GridShape {
  int nx = 0;
  int ny = 1;

  int size() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
  bool contains(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// Cell-index offset (di along x, dj along y).
struct Offset {
  int di = 0;
  int dj = 0;
  friend bool operator==(const Offset&, const Offset&) = default;
};

}  // namespace swnmg
