#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "core.hpp"

namespace swnmg {

enum class Axis { x = 0, y = 1 };

enum class NumericalFluxKind { hll, llf };

/// Bottom and channel-breadth data at one evaluation point. Slopes are analytic derivatives.
struct Geometry {
  double b = 0.0;
  double b_x = 0.0;
  double b_y = 0.0;
  double sigma = 1.0;
  double sigma_x = 0.0;
};

/// Left (rows) and right (columns) eigenvectors of a directional flux Jacobian.
template <int D>
struct Eigenbasis {
  Block<D> left;
  Block<D> right;
};

namespace detail {
inline double checked_depth(double h, double scale = 1.0) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw SolverError(ErrorCode::nonpositive_depth,
                      "depth " + std::to_string(h * scale) + " is not positive");
  return h;
}
}  // namespace detail

/// 1D shallow water equations, U = (h, hu).
struct ShallowWater1D {
  static constexpr int d = 2;
  static constexpr int dimension = 1;
  double g = 9.81;

  double depth(const Vec<2>& U, const Geometry& = {}) const { return detail::checked_depth(U[0]); }
  double velocity(const Vec<2>& U, const Geometry& geom = {}) const { return U[1] / depth(U, geom); }
  static constexpr int normal_momentum(Axis) { return 1; }

  Vec<2> flux(const Vec<2>& U, const Geometry& geom = {}, Axis = Axis::x) const {
    const double h = depth(U, geom);
    return {U[1], U[1] * U[1] / h + 0.5 * g * h * h};
  }

  Vec<2> source(const Vec<2>& U, const Geometry& geom) const {
    const double h = depth(U, geom);
    return {0.0, -g * h * geom.b_x};
  }

  std::pair<double, double> wave_speeds(const Vec<2>& U, const Geometry& geom = {},
                                        Axis = Axis::x) const {
    const double h = depth(U, geom);
    const double u = U[1] / h;
    const double c = std::sqrt(g * h);
    return {u - c, u + c};
  }

  Eigenbasis<2> eigenbasis(const Vec<2>& U, const Geometry& geom = {}, Axis = Axis::x) const {
    if (!(U[0] > 0.0))
      throw SolverError(ErrorCode::singular_eigenbasis, "reference depth is not positive");
    const double h = U[0];
    const double u = U[1] / h;
    const double c = std::sqrt(g * h);
    (void)geom;
    return two_wave_basis(u, c);
  }

  static Eigenbasis<2> two_wave_basis(double u, double c) {
    Eigenbasis<2> e;
    e.right(0, 0) = 1.0;
    e.right(0, 1) = 1.0;
    e.right(1, 0) = u - c;
    e.right(1, 1) = u + c;
    const double inv = 0.5 / c;
    e.left(0, 0) = (u + c) * inv;
    e.left(0, 1) = -inv;
    e.left(1, 0) = -(u - c) * inv;
    e.left(1, 1) = inv;
    return e;
  }
};

/// Rectangular channel of breadth sigma(x), U = (H, Q) with H = sigma h and Q = sigma h u.
struct Channel1D {
  static constexpr int d = 2;
  static constexpr int dimension = 1;
  double g = 9.81;

  double depth(const Vec<2>& U, const Geometry& geom) const {
    return detail::checked_depth(U[0] / geom.sigma);
  }
  double velocity(const Vec<2>& U, const Geometry& geom) const {
    depth(U, geom);
    return U[1] / U[0];
  }
  static constexpr int normal_momentum(Axis) { return 1; }

  Vec<2> flux(const Vec<2>& U, const Geometry& geom, Axis = Axis::x) const {
    const double h = depth(U, geom);
    return {U[1], U[1] * U[1] / U[0] + 0.5 * g * geom.sigma * h * h};
  }

  Vec<2> source(const Vec<2>& U, const Geometry& geom) const {
    const double h = depth(U, geom);
    return {0.0, 0.5 * g * h * h * geom.sigma_x - g * geom.sigma * h * geom.b_x};
  }

  std::pair<double, double> wave_speeds(const Vec<2>& U, const Geometry& geom,
                                        Axis = Axis::x) const {
    const double h = depth(U, geom);
    const double u = U[1] / U[0];
    const double c = std::sqrt(g * h);
    return {u - c, u + c};
  }

  // With sigma frozen the Jacobian is [[0, 1], [g h - u^2, 2u]], the same form as the plain SWE.
  Eigenbasis<2> eigenbasis(const Vec<2>& U, const Geometry& geom, Axis = Axis::x) const {
    if (!(U[0] > 0.0) || !(geom.sigma > 0.0))
      throw SolverError(ErrorCode::singular_eigenbasis, "reference depth is not positive");
    const double h = U[0] / geom.sigma;
    return ShallowWater1D::two_wave_basis(U[1] / U[0], std::sqrt(g * h));
  }
};

/// 2D shallow water equations, U = (h, hu, hv).
struct ShallowWater2D {
  static constexpr int d = 3;
  static constexpr int dimension = 2;
  double g = 9.81;

  double depth(const Vec<3>& U, const Geometry& = {}) const { return detail::checked_depth(U[0]); }
  static constexpr int normal_momentum(Axis axis) { return axis == Axis::x ? 1 : 2; }

  Vec<3> flux(const Vec<3>& U, const Geometry& geom = {}, Axis axis = Axis::x) const {
    const double h = depth(U, geom);
    const double u = U[1] / h;
    const double v = U[2] / h;
    const double p = 0.5 * g * h * h;
    if (axis == Axis::x) return {U[1], U[1] * u + p, U[1] * v};
    return {U[2], U[2] * u, U[2] * v + p};
  }

  Vec<3> source(const Vec<3>& U, const Geometry& geom) const {
    const double h = depth(U, geom);
    return {0.0, -g * h * geom.b_x, -g * h * geom.b_y};
  }

  std::pair<double, double> wave_speeds(const Vec<3>& U, const Geometry& geom = {},
                                        Axis axis = Axis::x) const {
    const double h = depth(U, geom);
    const double un = U[normal_momentum(axis)] / h;
    const double c = std::sqrt(g * h);
    return {un - c, un + c};
  }

  Eigenbasis<3> eigenbasis(const Vec<3>& U, const Geometry& = {}, Axis axis = Axis::x) const {
    if (!(U[0] > 0.0))
      throw SolverError(ErrorCode::singular_eigenbasis, "reference depth is not positive");
    const double h = U[0];
    const double u = U[1] / h;
    const double v = U[2] / h;
    const double c = std::sqrt(g * h);
    const double inv = 0.5 / c;
    // n: normal momentum slot, t: tangential momentum slot
    const int n = normal_momentum(axis);
    const int t = 3 - n;
    const double un = axis == Axis::x ? u : v;
    const double ut = axis == Axis::x ? v : u;
    Eigenbasis<3> e;
    e.right(0, 0) = 1.0;
    e.right(n, 0) = un - c;
    e.right(t, 0) = ut;
    e.right(t, 1) = 1.0;
    e.right(0, 2) = 1.0;
    e.right(n, 2) = un + c;
    e.right(t, 2) = ut;

    e.left(0, 0) = (un + c) * inv;
    e.left(0, n) = -inv;
    e.left(1, 0) = -ut;
    e.left(1, t) = 1.0;
    e.left(2, 0) = -(un - c) * inv;
    e.left(2, n) = inv;
    return e;
  }
};

/// Harten-Lax-van Leer flux with simple two-state speed bounds.
template <class Model>
Vec<Model::d> hll_flux(const Model& model, const Vec<Model::d>& UL, const Vec<Model::d>& UR,
                       const Geometry& geom, Axis axis = Axis::x) {
  const auto [l_min, l_max] = model.wave_speeds(UL, geom, axis);
  const auto [r_min, r_max] = model.wave_speeds(UR, geom, axis);
  const double sl = std::min(l_min, r_min);
  const double sr = std::max(l_max, r_max);
  if (sl >= 0.0) return model.flux(UL, geom, axis);
  if (sr <= 0.0) return model.flux(UR, geom, axis);
  const double width = sr - sl;
  if (!(width > 1e-300))
    throw SolverError(ErrorCode::degenerate_speeds, "HLL wave-speed bounds coincide");
  const Vec<Model::d> fl = model.flux(UL, geom, axis);
  const Vec<Model::d> fr = model.flux(UR, geom, axis);
  Vec<Model::d> f;
  for (int k = 0; k < Model::d; ++k)
    f[k] = (sr * fl[k] - sl * fr[k] + sl * sr * (UR[k] - UL[k])) / width;
  return f;
}

/// Local Lax-Friedrichs flux.
template <class Model>
Vec<Model::d> llf_flux(const Model& model, const Vec<Model::d>& UL, const Vec<Model::d>& UR,
                       const Geometry& geom, Axis axis = Axis::x) {
  const auto [l_min, l_max] = model.wave_speeds(UL, geom, axis);
  const auto [r_min, r_max] = model.wave_speeds(UR, geom, axis);
  const double a = std::max({std::abs(l_min), std::abs(l_max), std::abs(r_min), std::abs(r_max)});
  const Vec<Model::d> fl = model.flux(UL, geom, axis);
  const Vec<Model::d> fr = model.flux(UR, geom, axis);
  Vec<Model::d> f;
  for (int k = 0; k < Model::d; ++k) f[k] = 0.5 * (fl[k] + fr[k]) - 0.5 * a * (UR[k] - UL[k]);
  return f;
}

template <class Model>
Vec<Model::d> numerical_flux(const Model& model, NumericalFluxKind kind, const Vec<Model::d>& UL,
                             const Vec<Model::d>& UR, const Geometry& geom, Axis axis = Axis::x) {
  return kind == NumericalFluxKind::hll ? hll_flux(model, UL, UR, geom, axis)
                                        : llf_flux(model, UL, UR, geom, axis);
}

/// Multiplies every state by the left eigenvectors of the flux Jacobian at U_ref.
template <class Model>
std::vector<Vec<Model::d>> to_characteristic(const Model& model, const Vec<Model::d>& U_ref,
                                             std::span<const Vec<Model::d>> values,
                                             const Geometry& geom = {}, Axis axis = Axis::x) {
  const auto basis = model.eigenbasis(U_ref, geom, axis);
  std::vector<Vec<Model::d>> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(basis.left * v);
  return out;
}

template <class Model>
std::vector<Vec<Model::d>> from_characteristic(const Model& model, const Vec<Model::d>& U_ref,
                                               std::span<const Vec<Model::d>> values,
                                               const Geometry& geom = {}, Axis axis = Axis::x) {
  const auto basis = model.eigenbasis(U_ref, geom, axis);
  std::vector<Vec<Model::d>> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(basis.right * v);
  return out;
}

}  // namespace swnmg
