#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "core.hpp"
#include "mesh.hpp"
#include "model.hpp"
#include "reconstruction.hpp"

namespace swnmg {

template <int D>
using CellField = std::vector<Vec<D>>;

template <int D>
using ResidualField = std::vector<Vec<D>>;

enum class BoundaryKind {
  fixed_state,
  fixed_discharge,
  fixed_depth,
  zero_gradient,
  reflective_wall,
  supercritical_inflow,
};

/// Condition on one side of the domain. Values are in the model's conserved variables:
/// `state` for fixed_state / supercritical_inflow, `value` for fixed_discharge (normal
/// momentum) and fixed_depth (first component).
template <int D>
struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::zero_gradient;
  Vec<D> state{};
  double value = 0.0;
  /// fixed_depth only: fall back to zero-gradient while the adjacent interior flow leaves the
  /// domain supercritically (a depth cannot be imposed against such an outflow).
  bool subcritical_only = false;

  static BoundaryCondition fixed(const Vec<D>& s) { return {BoundaryKind::fixed_state, s, 0.0}; }
  static BoundaryCondition discharge(double q) { return {BoundaryKind::fixed_discharge, {}, q}; }
  static BoundaryCondition depth(double h, bool subcritical_only = false) {
    return {BoundaryKind::fixed_depth, {}, h, subcritical_only};
  }
  static BoundaryCondition extrapolate() { return {BoundaryKind::zero_gradient, {}, 0.0}; }
  static BoundaryCondition wall() { return {BoundaryKind::reflective_wall, {}, 0.0}; }
  static BoundaryCondition inflow(const Vec<D>& s) {
    return {BoundaryKind::supercritical_inflow, s, 0.0};
  }
};

template <int D>
struct BoundarySpec1D {
  BoundaryCondition<D> left;
  BoundaryCondition<D> right;
};

template <int D>
struct BoundarySpec2D {
  BoundaryCondition<D> west;   // x = x_min
  BoundaryCondition<D> east;   // x = x_max
  BoundaryCondition<D> south;  // y = y_min
  BoundaryCondition<D> north;  // y = y_max
};

namespace detail {

template <int D>
void validate(const BoundaryCondition<D>& bc) {
  switch (bc.kind) {
    case BoundaryKind::fixed_state:
    case BoundaryKind::supercritical_inflow:
      for (double v : bc.state)
        if (!std::isfinite(v))
          throw SolverError(ErrorCode::inconsistent_spec, "boundary state is not finite");
      if (!(bc.state[0] > 0.0))
        throw SolverError(ErrorCode::inconsistent_spec, "boundary state has nonpositive depth");
      break;
    case BoundaryKind::fixed_depth:
      if (!(bc.value > 0.0) || !std::isfinite(bc.value))
        throw SolverError(ErrorCode::inconsistent_spec, "fixed depth must be positive");
      break;
    case BoundaryKind::fixed_discharge:
      if (!std::isfinite(bc.value))
        throw SolverError(ErrorCode::inconsistent_spec, "fixed discharge is not finite");
      break;
    default: break;
  }
}

// Ghost value for layer `layer` (0 = adjacent to the boundary) given the interior cells
// nearest (first) and second nearest. `normal` is the wall-normal momentum slot and
// `outward` is +1 when the boundary normal points along +axis.
template <int D>
Vec<D> ghost_value(const BoundaryCondition<D>& bc, const std::type_identity_t<Vec<D>>& first,
                   const std::type_identity_t<Vec<D>>& second,
                   int layer, int normal, double outward, double g) {
  switch (bc.kind) {
    case BoundaryKind::fixed_state:
    case BoundaryKind::supercritical_inflow:
      return bc.state;
    case BoundaryKind::fixed_discharge: {
      Vec<D> v = first;
      v[normal] = bc.value;
      return v;
    }
    case BoundaryKind::fixed_depth: {
      if (bc.subcritical_only && first[0] > 0.0) {
        const double u = first[normal] / first[0];
        if (u * outward > std::sqrt(g * first[0])) return first;
      }
      Vec<D> v = first;
      v[0] = bc.value;
      return v;
    }
    case BoundaryKind::zero_gradient:
      return first;
    case BoundaryKind::reflective_wall: {
      Vec<D> v = layer == 0 ? first : second;
      v[normal] = -v[normal];
      return v;
    }
  }
  return first;
}

}  // namespace detail

/// Fills the two ghost cells on each side of a 1D field stored as ghosted[k + 2] = cell k.
template <int D>
void fill_ghosts_1d(std::span<Vec<D>> ghosted, const BoundarySpec1D<D>& spec, double g,
                    int normal = 1) {
  const int n = static_cast<int>(ghosted.size()) - 4;
  if (n < 1) throw SolverError(ErrorCode::missing_ghosts, "field has no ghost layers");
  const int second_l = n > 1 ? 3 : 2;
  const int second_r = n > 1 ? n : n + 1;
  for (int layer = 0; layer < 2; ++layer) {
    ghosted[1 - layer] = detail::ghost_value(spec.left, ghosted[2], ghosted[second_l], layer,
                                             normal, -1.0, g);
    ghosted[n + 2 + layer] = detail::ghost_value(spec.right, ghosted[n + 1], ghosted[second_r],
                                                 layer, normal, 1.0, g);
  }
}

/// Returns the field extended by two ghost cells per side.
template <int D>
std::vector<Vec<D>> fill_ghosts(std::span<const Vec<D>> field, const BoundarySpec1D<D>& spec,
                                double g) {
  detail::validate(spec.left);
  detail::validate(spec.right);
  std::vector<Vec<D>> ghosted(field.size() + 4);
  std::copy(field.begin(), field.end(), ghosted.begin() + 2);
  fill_ghosts_1d<D>(ghosted, spec, g);
  return ghosted;
}

/// Fills the width-two ghost ring of a 2D field: x sides first for interior rows, then the
/// y sides over all columns (which also fills the corners).
template <int D>
void fill_ghosts_2d(std::span<Vec<D>> data, int nx, int ny, const BoundarySpec2D<D>& spec,
                    double g) {
  const int s = nx + 4;
  auto at = [&](int i, int j) -> Vec<D>& { return data[(j + 2) * s + (i + 2)]; };
  for (int j = 0; j < ny; ++j) {
    const int i2w = nx > 1 ? 1 : 0;
    const int i2e = nx > 1 ? nx - 2 : nx - 1;
    for (int layer = 0; layer < 2; ++layer) {
      at(-1 - layer, j) = detail::ghost_value(spec.west, at(0, j), at(i2w, j), layer, 1, -1.0, g);
      at(nx + layer, j) =
          detail::ghost_value(spec.east, at(nx - 1, j), at(i2e, j), layer, 1, 1.0, g);
    }
  }
  for (int i = -2; i < nx + 2; ++i) {
    const int j2s = ny > 1 ? 1 : 0;
    const int j2n = ny > 1 ? ny - 2 : ny - 1;
    for (int layer = 0; layer < 2; ++layer) {
      at(i, -1 - layer) =
          detail::ghost_value(spec.south, at(i, 0), at(i, j2s), layer, 2, -1.0, g);
      at(i, ny + layer) =
          detail::ghost_value(spec.north, at(i, ny - 1), at(i, j2n), layer, 2, 1.0, g);
    }
  }
}

template <int D>
std::vector<Vec<D>> fill_ghosts(std::span<const Vec<D>> field, int nx, int ny,
                                const BoundarySpec2D<D>& spec, double g) {
  for (const auto* bc : {&spec.west, &spec.east, &spec.south, &spec.north}) detail::validate(*bc);
  if (static_cast<int>(field.size()) != nx * ny)
    throw SolverError(ErrorCode::shape_mismatch, "field size does not match the mesh");
  std::vector<Vec<D>> data((nx + 4) * (ny + 4));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) data[(j + 2) * (nx + 4) + i + 2] = field[j * nx + i];
  fill_ghosts_2d<D>(data, nx, ny, spec, g);
  return data;
}

/// Sum over cells and components of |R|.
template <int D>
double residual_l1(std::span<const Vec<D>> R) {
  double s = 0.0;
  for (const auto& r : R) s += l1_norm<D>(r);
  return s;
}

template <int D>
double residual_l1(const std::vector<Vec<D>>& R) {
  return residual_l1<D>(std::span<const Vec<D>>(R));
}

namespace detail {
template <class F>
auto with_cell_context(long cell, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SolverError& e) {
    if (e.cell() >= 0) throw;
    throw SolverError(e.code(), e.what(), cell);
  }
}
}  // namespace detail

/// Steady residual R_j = f_{j+1/2} - f_{j-1/2} - S_j of a 1D balance law.
///
/// Besides whole-field evaluation, the operator exposes a ghosted workspace with
/// single-value updates and per-cell residuals; the finite-difference Jacobian is built on
/// those.
template <class Model>
class Residual1D {
 public:
  static constexpr int d = Model::d;
  static constexpr int dimension = 1;
  using State = Vec<d>;
  using GeometryFn = std::function<Geometry(double)>;

  Residual1D(Model model, Mesh1D mesh, GeometryFn geometry, BoundarySpec1D<d> bc,
             NumericalFluxKind flux, bool characteristic = false)
      : model_(model), mesh_(mesh), bc_(bc), flux_(flux), characteristic_(characteristic) {
    detail::validate(bc_.left);
    detail::validate(bc_.right);
    const int n = mesh_.n_cells;
    face_geom_.resize(n + 3);
    for (int f = -1; f <= n + 1; ++f) face_geom_[f + 1] = geometry(mesh_.face(f));
    node_geom_.resize(n);
    for (int j = 0; j < n; ++j)
      for (int b = 0; b < 2; ++b)
        node_geom_[j][b] = geometry(mesh_.center(j) + GaussRule::nodes[b] * mesh_.dx);
  }

  const Model& model() const { return model_; }
  const Mesh1D& mesh() const { return mesh_; }
  const BoundarySpec1D<d>& boundary() const { return bc_; }
  GridShape shape() const { return mesh_.shape(); }
  NumericalFluxKind flux_kind() const { return flux_; }
  bool characteristic() const { return characteristic_; }
  /// Cells whose averages enter one cell's residual: offsets within +-reach().
  static constexpr Offset reach() { return {2, 0}; }

  struct Workspace {
    std::vector<State> ghosted;
  };

  Workspace make_workspace(std::span<const State> field) const {
    check_size(field.size());
    Workspace ws{std::vector<State>(field.size() + 4)};
    std::copy(field.begin(), field.end(), ws.ghosted.begin() + 2);
    fill_ghosts_1d<d>(ws.ghosted, bc_, model_.g);
    return ws;
  }

  double value(const Workspace& ws, int cell, int comp) const { return ws.ghosted[cell + 2][comp]; }

  /// Sets one cell value and refreshes the ghosts that depend on it.
  void set_value(Workspace& ws, int cell, int comp, double v) const {
    ws.ghosted[cell + 2][comp] = v;
    if (cell < 2 || cell >= mesh_.n_cells - 2) fill_ghosts_1d<d>(ws.ghosted, bc_, model_.g);
  }

  State cell_residual(const Workspace& ws, int j) const {
    return detail::with_cell_context(j, [&] {
      const std::span<const State> g(ws.ghosted);
      const State l_minus = trace(g, j, Side::minus);
      const State l_plus = trace(g, j, Side::plus);
      const State r_minus = trace(g, j + 1, Side::minus);
      const State r_plus = trace(g, j + 1, Side::plus);
      const State mm = trace(g, j - 1, Side::plus);
      const State pp = trace(g, j + 2, Side::minus);
      const State f_left = face_flux(l_minus, l_plus, j);
      const State f_right = face_flux(r_minus, r_plus, j + 1);
      return combine(j, f_left, f_right, mm, l_plus, r_minus, pp, g[j + 2]);
    });
  }

  ResidualField<d> evaluate(std::span<const State> field) const {
    const Workspace ws = make_workspace(field);
    const std::span<const State> g(ws.ghosted);
    const int n = mesh_.n_cells;
    // traces at faces -1 .. n+1
    std::vector<State> minus(n + 3), plus(n + 3), flux(n + 1);
    for (int f = -1; f <= n + 1; ++f) {
      detail::with_cell_context(std::clamp(f, 0, n - 1), [&] {
        if (f >= 0) minus[f + 1] = trace(g, f, Side::minus);
        if (f <= n) plus[f + 1] = trace(g, f, Side::plus);
        if (f >= 0 && f <= n) flux[f] = face_flux(minus[f + 1], plus[f + 1], f);
        return 0;
      });
    }
    ResidualField<d> R(n);
    for (int j = 0; j < n; ++j)
      R[j] = detail::with_cell_context(j, [&] {
        return combine(j, flux[j], flux[j + 1], plus[j], plus[j + 1], minus[j + 2], minus[j + 3],
                       g[j + 2]);
      });
    return R;
  }

  /// Interface traces of a field (faces 0..n), for inspection and tests.
  InterfaceStates<d> interfaces(std::span<const State> field) const {
    const Workspace ws = make_workspace(field);
    return reconstruct_interfaces_1d(model_, std::span<const State>(ws.ghosted),
                                     std::span<const Geometry>(face_geom_).subspan(1, mesh_.n_cells + 1),
                                     characteristic_);
  }

  /// Cell averages are admissible when every depth is positive and finite.
  bool admissible(std::span<const State> field) const {
    for (const auto& u : field)
      for (double v : u)
        if (!std::isfinite(v)) return false;
    for (const auto& u : field)
      if (!(u[0] > 0.0)) return false;
    return true;
  }

 private:
  void check_size(std::size_t n) const {
    if (static_cast<int>(n) != mesh_.n_cells)
      throw SolverError(ErrorCode::shape_mismatch, "field size does not match the mesh");
  }

  State trace(std::span<const State> g, int face, Side side) const {
    return face_trace_1d(model_, g, face, side, face_geom_[face + 1], characteristic_);
  }

  State face_flux(const State& minus, const State& plus, int face) const {
    return numerical_flux(model_, flux_, minus, plus, face_geom_[face + 1], Axis::x);
  }

  State combine(int j, const State& f_left, const State& f_right, const State& mm,
                const State& m, const State& p, const State& pp, const State& avg) const {
    const auto polys = build_cell_polynomials<d>(mm, m, p, pp, avg);
    const State S = source_integral_1d(model_, mesh_.dx, node_geom_[j], polys);
    return (f_right - f_left) - S;
  }

  Model model_;
  Mesh1D mesh_;
  BoundarySpec1D<d> bc_;
  NumericalFluxKind flux_;
  bool characteristic_;
  std::vector<Geometry> face_geom_;                 // faces -1 .. n+1
  std::vector<std::array<Geometry, 2>> node_geom_;  // Gauss nodes per cell
};

/// Steady residual dy (f_{i+1/2} - f_{i-1/2}) + dx (g_{j+1/2} - g_{j-1/2}) - s_ij in 2D.
template <class Model>
class Residual2D {
 public:
  static constexpr int d = Model::d;
  static constexpr int dimension = 2;
  using State = Vec<d>;
  using GeometryFn = std::function<Geometry(double, double)>;

  Residual2D(Model model, Mesh2D mesh, GeometryFn geometry, BoundarySpec2D<d> bc,
             NumericalFluxKind flux, bool characteristic = false)
      : model_(model), mesh_(mesh), bc_(bc), flux_(flux), characteristic_(characteristic) {
    for (const auto* b : {&bc_.west, &bc_.east, &bc_.south, &bc_.north}) detail::validate(*b);
    node_geom_.resize(mesh_.size());
    for (int j = 0; j < mesh_.ny; ++j)
      for (int i = 0; i < mesh_.nx; ++i)
        for (int b = 0; b < 2; ++b)
          for (int a = 0; a < 2; ++a)
            node_geom_[mesh_.index(i, j)][b][a] =
                geometry(mesh_.center_x(i) + GaussRule::nodes[a] * mesh_.dx,
                         mesh_.center_y(j) + GaussRule::nodes[b] * mesh_.dy);
  }

  const Model& model() const { return model_; }
  const Mesh2D& mesh() const { return mesh_; }
  const BoundarySpec2D<d>& boundary() const { return bc_; }
  GridShape shape() const { return mesh_.shape(); }
  bool characteristic() const { return characteristic_; }
  static constexpr Offset reach() { return {2, 2}; }

  struct Workspace {
    std::vector<State> ghosted;
  };

  Workspace make_workspace(std::span<const State> field) const {
    if (static_cast<int>(field.size()) != mesh_.size())
      throw SolverError(ErrorCode::shape_mismatch, "field size does not match the mesh");
    Workspace ws{std::vector<State>((mesh_.nx + 4) * (mesh_.ny + 4))};
    for (int j = 0; j < mesh_.ny; ++j)
      for (int i = 0; i < mesh_.nx; ++i) ws.ghosted[gidx(i, j)] = field[mesh_.index(i, j)];
    fill_ghosts_2d<d>(ws.ghosted, mesh_.nx, mesh_.ny, bc_, model_.g);
    return ws;
  }

  double value(const Workspace& ws, int cell, int comp) const {
    return ws.ghosted[gidx(cell % mesh_.nx, cell / mesh_.nx)][comp];
  }

  void set_value(Workspace& ws, int cell, int comp, double v) const {
    const int i = cell % mesh_.nx;
    const int j = cell / mesh_.nx;
    ws.ghosted[gidx(i, j)][comp] = v;
    if (i < 2 || j < 2 || i >= mesh_.nx - 2 || j >= mesh_.ny - 2)
      fill_ghosts_2d<d>(ws.ghosted, mesh_.nx, mesh_.ny, bc_, model_.g);
  }

  State cell_residual(const Workspace& ws, int cell) const {
    return detail::with_cell_context(cell, [&] {
      const int i = cell % mesh_.nx;
      const int j = cell / mesh_.nx;
      const Ghosted2DView<d> v{ws.ghosted, mesh_.nx, mesh_.ny};
      const auto west = face_gauss_states_2d(model_, v, Axis::x, i, j, true, true, characteristic_);
      const auto east =
          face_gauss_states_2d(model_, v, Axis::x, i + 1, j, true, true, characteristic_);
      const auto south =
          face_gauss_states_2d(model_, v, Axis::y, j, i, true, true, characteristic_);
      const auto north =
          face_gauss_states_2d(model_, v, Axis::y, j + 1, i, true, true, characteristic_);
      const auto far_west =
          face_gauss_states_2d(model_, v, Axis::x, i - 1, j, false, true, characteristic_);
      const auto far_east =
          face_gauss_states_2d(model_, v, Axis::x, i + 2, j, true, false, characteristic_);
      return combine(v, i, j, face_flux(west, Axis::x), face_flux(east, Axis::x),
                     face_flux(south, Axis::y), face_flux(north, Axis::y), far_west, west, east,
                     far_east);
    });
  }

  ResidualField<d> evaluate(std::span<const State> field) const {
    const Workspace ws = make_workspace(field);
    const Ghosted2DView<d> v{ws.ghosted, mesh_.nx, mesh_.ny};
    const int nx = mesh_.nx;
    const int ny = mesh_.ny;
    // x faces -1 .. nx+1 per row, y faces 0 .. ny per column
    const int xs = nx + 3;
    std::vector<FaceGaussStates<d>> xf(xs * ny);
    std::vector<State> xflux((nx + 1) * ny);
    for (int j = 0; j < ny; ++j)
      for (int f = -1; f <= nx + 1; ++f)
        detail::with_cell_context(mesh_.index(std::clamp(f, 0, nx - 1), j), [&] {
          xf[j * xs + f + 1] =
              face_gauss_states_2d(model_, v, Axis::x, f, j, f >= 0, f <= nx, characteristic_);
          if (f >= 0 && f <= nx) xflux[j * (nx + 1) + f] = face_flux(xf[j * xs + f + 1], Axis::x);
          return 0;
        });
    std::vector<State> yflux(nx * (ny + 1));
    for (int f = 0; f <= ny; ++f)
      for (int i = 0; i < nx; ++i)
        detail::with_cell_context(mesh_.index(i, std::clamp(f, 0, ny - 1)), [&] {
          yflux[f * nx + i] = face_flux(
              face_gauss_states_2d(model_, v, Axis::y, f, i, true, true, characteristic_), Axis::y);
          return 0;
        });
    ResidualField<d> R(mesh_.size());
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        R[mesh_.index(i, j)] = detail::with_cell_context(mesh_.index(i, j), [&] {
          return combine(v, i, j, xflux[j * (nx + 1) + i], xflux[j * (nx + 1) + i + 1],
                         yflux[j * nx + i], yflux[(j + 1) * nx + i], xf[j * xs + i],
                         xf[j * xs + i + 1], xf[j * xs + i + 2], xf[j * xs + i + 3]);
        });
    return R;
  }

  /// Gauss-point traces on every face, for inspection and tests.
  FaceStates2D<d> interfaces(std::span<const State> field) const {
    const Workspace ws = make_workspace(field);
    return reconstruct_face_gauss_points_2d(model_, Ghosted2DView<d>{ws.ghosted, mesh_.nx, mesh_.ny},
                                            characteristic_);
  }

  bool admissible(std::span<const State> field) const {
    for (const auto& u : field) {
      for (double x : u)
        if (!std::isfinite(x)) return false;
      if (!(u[0] > 0.0)) return false;
    }
    return true;
  }

 private:
  int gidx(int i, int j) const { return (j + 2) * (mesh_.nx + 4) + (i + 2); }

  State face_flux(const FaceGaussStates<d>& s, Axis axis) const {
    State f{};
    for (int b = 0; b < 2; ++b)
      f += GaussRule::weights[b] *
           numerical_flux(model_, flux_, s.minus[b], s.plus[b], Geometry{}, axis);
    return f;
  }

  State combine(const Ghosted2DView<d>& v, int i, int j, const State& fw, const State& fe,
                const State& gs, const State& gn, const FaceGaussStates<d>& far_west,
                const FaceGaussStates<d>& west, const FaceGaussStates<d>& east,
                const FaceGaussStates<d>& far_east) const {
    const auto lines = transverse_line_values<d>(v, i, j);
    std::array<std::array<CellPolynomial, d>, 2> polys;
    for (int b = 0; b < 2; ++b)
      polys[b] = build_cell_polynomials<d>(far_west.plus[b], west.plus[b], east.minus[b],
                                           far_east.minus[b], lines[b]);
    const State s =
        source_integral_2d(model_, mesh_.dx, mesh_.dy, node_geom_[mesh_.index(i, j)], polys);
    return (mesh_.dy * (fe - fw) + mesh_.dx * (gn - gs)) - s;
  }

  Model model_;
  Mesh2D mesh_;
  BoundarySpec2D<d> bc_;
  NumericalFluxKind flux_;
  bool characteristic_;
  std::vector<std::array<std::array<Geometry, 2>, 2>> node_geom_;
};

}  // namespace swnmg
