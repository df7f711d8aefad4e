#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "core.hpp"
#include "model.hpp"

namespace swnmg {

/// Regularizer in the nonlinear WENO weights.
inline constexpr double weno_epsilon = 1e-6;

/// Two-point Gauss-Legendre rule on the unit cell [-1/2, 1/2].
struct GaussRule {
  static constexpr int size = 2;
  static constexpr std::array<double, 2> nodes{-0.28867513459481287, 0.28867513459481287};
  static constexpr std::array<double, 2> weights{0.5, 0.5};
};

/// WENO3 point value at scaled position eta = (x - x_c) / dx inside the middle cell.
///
/// Combines the two linear candidates built on {m, c} and {c, p}. The linear weights are the
/// ones that make the combination equal the 3-cell quadratic reconstruction at eta; they are
/// (1/3, 2/3) at eta = +1/2 and (1/2, 1/2) at the Gauss nodes.
inline double weno3_point(double u_m, double u_c, double u_p, double eta,
                          double eps = weno_epsilon) {
  const double d1 = (-1.0 / 24.0 + 0.5 * eta + 0.5 * eta * eta) / eta;
  const double d0 = 1.0 - d1;
  const double p0 = u_c + (u_c - u_m) * eta;
  const double p1 = u_c + (u_p - u_c) * eta;
  const double b0 = (u_c - u_m) * (u_c - u_m);
  const double b1 = (u_p - u_c) * (u_p - u_c);
  const double a0 = d0 / ((eps + b0) * (eps + b0));
  const double a1 = d1 / ((eps + b1) * (eps + b1));
  // written as p0 + w1 (p1 - p0) so equal candidates reproduce exactly
  return p0 + a1 / (a0 + a1) * (p1 - p0);
}

/// Nonlinear weights (w0, w1) used by weno3_point; exposed for property checks.
inline std::array<double, 2> weno3_weights(double u_m, double u_c, double u_p, double eta,
                                           double eps = weno_epsilon) {
  const double d1 = (-1.0 / 24.0 + 0.5 * eta + 0.5 * eta * eta) / eta;
  const double d0 = 1.0 - d1;
  const double b0 = (u_c - u_m) * (u_c - u_m);
  const double b1 = (u_p - u_c) * (u_p - u_c);
  const double a0 = d0 / ((eps + b0) * (eps + b0));
  const double a1 = d1 / ((eps + b1) * (eps + b1));
  return {a0 / (a0 + a1), a1 / (a0 + a1)};
}

struct Weno3Pair {
  double left_face;   // right-limit trace at x_{j-1/2}
  double right_face;  // left-limit trace at x_{j+1/2}
};

inline Weno3Pair weno3_pair(double u_m, double u_c, double u_p, double eps = weno_epsilon) {
  return {weno3_point(u_m, u_c, u_p, -0.5, eps), weno3_point(u_m, u_c, u_p, 0.5, eps)};
}

template <int D>
inline Vec<D> weno3_point(const Vec<D>& u_m, const Vec<D>& u_c, const Vec<D>& u_p, double eta) {
  Vec<D> r;
  for (int k = 0; k < D; ++k) r[k] = weno3_point(u_m[k], u_c[k], u_p[k], eta);
  return r;
}

/// Degree-4 polynomial in xi = (x - x_j) / dx.
struct CellPolynomial {
  std::array<double, 5> coeffs{};

  double operator()(double xi) const {
    double v = 0.0;
    for (int k = 4; k >= 0; --k) v = v * xi + coeffs[k];
    return v;
  }

  /// Mean over xi in [-1/2, 1/2].
  double mean() const {
    return coeffs[0] + coeffs[2] / 12.0 + coeffs[4] / 80.0;
  }
};

namespace detail {
// Inverse of the interpolation system: values at xi = -3/2, -1/2, 1/2, 3/2 and the cell mean.
inline const std::array<std::array<double, 5>, 5>& cell_polynomial_inverse() {
  static const auto inv = [] {
    std::array<std::array<double, 10>, 5> m{};
    const double nodes[4] = {-1.5, -0.5, 0.5, 1.5};
    for (int r = 0; r < 4; ++r) {
      double p = 1.0;
      for (int c = 0; c < 5; ++c) {
        m[r][c] = p;
        p *= nodes[r];
      }
    }
    m[4] = {1.0, 0.0, 1.0 / 12.0, 0.0, 1.0 / 80.0};
    for (int r = 0; r < 5; ++r) {
      for (int c = 5; c < 10; ++c) m[r][c] = 0.0;
      m[r][5 + r] = 1.0;
    }
    for (int k = 0; k < 5; ++k) {
      int p = k;
      for (int r = k + 1; r < 5; ++r)
        if (std::abs(m[r][k]) > std::abs(m[p][k])) p = r;
      std::swap(m[k], m[p]);
      const double piv = m[k][k];
      for (double& v : m[k]) v /= piv;
      for (int r = 0; r < 5; ++r) {
        if (r == k) continue;
        const double f = m[r][k];
        for (int c = 0; c < 10; ++c) m[r][c] -= f * m[k][c];
      }
    }
    std::array<std::array<double, 5>, 5> out{};
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c) out[r][c] = m[r][5 + c];
    return out;
  }();
  return inv;
}
}  // namespace detail

/// Interpolates the traces at xi = -3/2, -1/2, +1/2, +3/2 and the cell average.
inline CellPolynomial build_cell_polynomial(double trace_mm, double trace_m, double trace_p,
                                            double trace_pp, double cell_avg) {
  const auto& inv = detail::cell_polynomial_inverse();
  const std::array<double, 5> rhs{trace_mm, trace_m, trace_p, trace_pp, cell_avg};
  CellPolynomial poly;
  for (int r = 0; r < 5; ++r) {
    double s = 0.0;
    for (int c = 0; c < 5; ++c) s += inv[r][c] * rhs[c];
    poly.coeffs[r] = s;
  }
  return poly;
}

template <int D>
std::array<CellPolynomial, D> build_cell_polynomials(const Vec<D>& t_mm, const Vec<D>& t_m,
                                                     const Vec<D>& t_p, const Vec<D>& t_pp,
                                                     const Vec<D>& avg) {
  std::array<CellPolynomial, D> polys;
  for (int k = 0; k < D; ++k)
    polys[k] = build_cell_polynomial(t_mm[k], t_m[k], t_p[k], t_pp[k], avg[k]);
  return polys;
}

template <int D>
Vec<D> evaluate(const std::array<CellPolynomial, D>& polys, double xi) {
  Vec<D> v;
  for (int k = 0; k < D; ++k) v[k] = polys[k](xi);
  return v;
}

/// Two-point Gauss quadrature of the source over one cell of width dx.
/// node_geometry[b] describes the bottom/breadth at GaussRule::nodes[b].
template <class Model>
Vec<Model::d> source_integral_1d(const Model& model, double dx,
                                 const std::array<Geometry, 2>& node_geometry,
                                 const std::array<CellPolynomial, Model::d>& polys) {
  Vec<Model::d> s{};
  for (int b = 0; b < GaussRule::size; ++b) {
    const Vec<Model::d> U = evaluate<Model::d>(polys, GaussRule::nodes[b]);
    s += (dx * GaussRule::weights[b]) * model.source(U, node_geometry[b]);
  }
  return s;
}

/// Tensor two-point quadrature over a dx x dy cell.
/// polys_by_row[b] are x-direction polynomials at the Gauss ordinate y = y_j + nodes[b] dy;
/// node_geometry[b][a] is the geometry at (nodes[a], nodes[b]).
template <class Model>
Vec<Model::d> source_integral_2d(
    const Model& model, double dx, double dy,
    const std::array<std::array<Geometry, 2>, 2>& node_geometry,
    const std::array<std::array<CellPolynomial, Model::d>, 2>& polys_by_row) {
  Vec<Model::d> s{};
  for (int b = 0; b < GaussRule::size; ++b)
    for (int a = 0; a < GaussRule::size; ++a) {
      const Vec<Model::d> U = evaluate<Model::d>(polys_by_row[b], GaussRule::nodes[a]);
      s += (dx * dy * GaussRule::weights[a] * GaussRule::weights[b]) *
           model.source(U, node_geometry[b][a]);
    }
  return s;
}

enum class Side { minus, plus };

/// One-sided WENO3 trace at face `face` (the left face of cell `face`) of a 1D field
/// stored with two ghost cells per side: ghosted[k + 2] is cell k.
///
/// minus uses cells face-2..face, plus uses face-1..face+1. With `characteristic` the
/// reconstruction runs on L(U_ref) U with U_ref the mean of the two cells next to the face.
template <class Model>
Vec<Model::d> face_trace_1d(const Model& model, std::span<const Vec<Model::d>> ghosted, int face,
                            Side side, const Geometry& face_geom, bool characteristic) {
  constexpr int D = Model::d;
  const int g = face + 2;  // ghosted index of the cell right of the face
  const int first = side == Side::minus ? g - 2 : g - 1;
  const double eta = side == Side::minus ? 0.5 : -0.5;
  if (!characteristic)
    return weno3_point<D>(ghosted[first], ghosted[first + 1], ghosted[first + 2], eta);
  const Vec<D> ref = 0.5 * (ghosted[g - 1] + ghosted[g]);
  const auto basis = model.eigenbasis(ref, face_geom, Axis::x);
  const Vec<D> w = weno3_point<D>(basis.left * ghosted[first], basis.left * ghosted[first + 1],
                                  basis.left * ghosted[first + 2], eta);
  return basis.right * w;
}

template <int D>
struct InterfaceStates {
  std::vector<Vec<D>> minus;  // left limits U^-_{k-1/2}, one per face k = 0..n
  std::vector<Vec<D>> plus;   // right limits U^+_{k-1/2}
};

/// Both traces at every face of an n-cell field given with two ghost cells per side.
template <class Model>
InterfaceStates<Model::d> reconstruct_interfaces_1d(const Model& model,
                                                    std::span<const Vec<Model::d>> ghosted,
                                                    std::span<const Geometry> face_geom,
                                                    bool characteristic) {
  if (ghosted.size() < 5)
    throw SolverError(ErrorCode::missing_ghosts, "field needs two ghost cells per side");
  const int n = static_cast<int>(ghosted.size()) - 4;
  if (static_cast<int>(face_geom.size()) != n + 1)
    throw SolverError(ErrorCode::shape_mismatch, "need one geometry record per face");
  InterfaceStates<Model::d> out;
  out.minus.resize(n + 1);
  out.plus.resize(n + 1);
  for (int f = 0; f <= n; ++f) {
    out.minus[f] = face_trace_1d(model, ghosted, f, Side::minus, face_geom[f], characteristic);
    out.plus[f] = face_trace_1d(model, ghosted, f, Side::plus, face_geom[f], characteristic);
  }
  return out;
}

/// Read-only view of a 2D field with a ghost ring of width two.
template <int D>
struct Ghosted2DView {
  std::span<const Vec<D>> data;
  int nx = 0;
  int ny = 0;

  int stride() const { return nx + 4; }
  const Vec<D>& operator()(int i, int j) const { return data[(j + 2) * stride() + (i + 2)]; }
};

/// Trace pair at the two Gauss points of one face of a 2D field.
template <int D>
struct FaceGaussStates {
  std::array<Vec<D>, 2> minus;
  std::array<Vec<D>, 2> plus;
};

namespace detail {
// Cell (n, t) in normal/transverse coordinates relative to an axis.
template <int D>
const Vec<D>& at_axis(const Ghosted2DView<D>& v, Axis axis, int n, int t) {
  return axis == Axis::x ? v(n, t) : v(t, n);
}
}  // namespace detail

/// Dimension-by-dimension WENO3 at the Gauss points of a face.
///
/// `face` indexes faces normal to `axis` (face k separates cells k-1 and k along the axis) and
/// `line` is the cell index along the other direction. Each candidate cell is first reduced to
/// its line value at the Gauss ordinate (transverse sweep), then the face point value is
/// reconstructed normal to the face.
template <class Model>
FaceGaussStates<Model::d> face_gauss_states_2d(const Model& model, const Ghosted2DView<Model::d>& v,
                                               Axis axis, int face, int line, bool need_minus,
                                               bool need_plus, bool characteristic) {
  constexpr int D = Model::d;
  const int lo = need_minus ? face - 2 : face - 1;
  const int hi = need_plus ? face + 1 : face;
  Block<D> left = Block<D>::identity();
  Block<D> right = Block<D>::identity();
  if (characteristic) {
    const Vec<D> ref =
        0.5 * (detail::at_axis(v, axis, face - 1, line) + detail::at_axis(v, axis, face, line));
    const auto basis = model.eigenbasis(ref, Geometry{}, axis);
    left = basis.left;
    right = basis.right;
  }
  // line values at each Gauss ordinate for normal positions lo..hi (at most 4)
  std::array<std::array<Vec<D>, 4>, 2> lines;
  for (int n = lo; n <= hi; ++n) {
    Vec<D> w[3];
    for (int dt = -1; dt <= 1; ++dt) {
      const Vec<D>& u = detail::at_axis(v, axis, n, line + dt);
      w[dt + 1] = characteristic ? left * u : u;
    }
    for (int b = 0; b < 2; ++b)
      lines[b][n - lo] = weno3_point<D>(w[0], w[1], w[2], GaussRule::nodes[b]);
  }
  FaceGaussStates<D> out{};
  for (int b = 0; b < 2; ++b) {
    if (need_minus) {
      const int o = face - 2 - lo;
      const Vec<D> w = weno3_point<D>(lines[b][o], lines[b][o + 1], lines[b][o + 2], 0.5);
      out.minus[b] = characteristic ? right * w : w;
    }
    if (need_plus) {
      const int o = face - 1 - lo;
      const Vec<D> w = weno3_point<D>(lines[b][o], lines[b][o + 1], lines[b][o + 2], -0.5);
      out.plus[b] = characteristic ? right * w : w;
    }
  }
  return out;
}

/// Line values of cell (i, j) at the two Gauss ordinates along y (x-averaged, pointwise in y).
template <int D>
std::array<Vec<D>, 2> transverse_line_values(const Ghosted2DView<D>& v, int i, int j) {
  return {weno3_point<D>(v(i, j - 1), v(i, j), v(i, j + 1), GaussRule::nodes[0]),
          weno3_point<D>(v(i, j - 1), v(i, j), v(i, j + 1), GaussRule::nodes[1])};
}

template <int D>
struct FaceStates2D {
  int nx = 0;
  int ny = 0;
  std::vector<FaceGaussStates<D>> x_faces;  // (nx+1) * ny, index j * (nx+1) + i
  std::vector<FaceGaussStates<D>> y_faces;  // nx * (ny+1), index j * nx + i
};

template <class Model>
FaceStates2D<Model::d> reconstruct_face_gauss_points_2d(const Model& model,
                                                        const Ghosted2DView<Model::d>& v,
                                                        bool characteristic) {
  if (static_cast<int>(v.data.size()) != (v.nx + 4) * (v.ny + 4))
    throw SolverError(ErrorCode::missing_ghosts, "field needs a ghost ring of width two");
  FaceStates2D<Model::d> out;
  out.nx = v.nx;
  out.ny = v.ny;
  out.x_faces.resize((v.nx + 1) * v.ny);
  out.y_faces.resize(v.nx * (v.ny + 1));
  for (int j = 0; j < v.ny; ++j)
    for (int f = 0; f <= v.nx; ++f)
      out.x_faces[j * (v.nx + 1) + f] =
          face_gauss_states_2d(model, v, Axis::x, f, j, true, true, characteristic);
  for (int f = 0; f <= v.ny; ++f)
    for (int i = 0; i < v.nx; ++i)
      out.y_faces[f * v.nx + i] =
          face_gauss_states_2d(model, v, Axis::y, f, i, true, true, characteristic);
  return out;
}

}  // namespace swnmg
