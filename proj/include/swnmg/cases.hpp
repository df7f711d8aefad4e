#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "core.hpp"
#include "mesh.hpp"
#include "model.hpp"
#include "newton.hpp"
#include "residual.hpp"

namespace swnmg {

// ---------------------------------------------------------------------------------------------
// Geometry of the benchmark problems

/// Two Gaussian bumps on [-10, 10].
inline Geometry smooth_bottom(double x) {
  const double a = std::exp(-0.5 * (x + 1.0) * (x + 1.0));
  const double c = std::exp(-(x - 1.5) * (x - 1.5));
  Geometry g;
  g.b = 0.2 * a + 0.3 * c;
  g.b_x = -0.2 * (x + 1.0) * a - 0.6 * (x - 1.5) * c;
  return g;
}

/// Parabolic hump of height 0.2 on [8, 12].
inline Geometry hump_bottom(double x) {
  Geometry g;
  if (x >= 8.0 && x <= 12.0) {
    g.b = 0.2 - 0.05 * (x - 10.0) * (x - 10.0);
    g.b_x = -0.1 * (x - 10.0);
  }
  return g;
}

struct Contraction {
  double sigma0 = 0.05;
  double x_l = 3.75;
  double x_r = 16.25;
};

/// Hump bottom plus the cosine contraction 1 - sigma0 (1 + cos(2 pi (x - x_m) / (x_r - x_l))).
inline Geometry channel_geometry(double x, const Contraction& c) {
  Geometry g = hump_bottom(x);
  if (x >= c.x_l && x <= c.x_r) {
    const double L = c.x_r - c.x_l;
    const double phase = 2.0 * std::numbers::pi * (x - 0.5 * (c.x_l + c.x_r)) / L;
    g.sigma = 1.0 - c.sigma0 * (1.0 + std::cos(phase));
    g.sigma_x = c.sigma0 * std::sin(phase) * 2.0 * std::numbers::pi / L;
  }
  return g;
}

/// Paraboloid hump 0.4 - 0.2 r^2 centred at (0, 2), r^2 < 2.
inline Geometry hump_bottom_2d(double x, double y) {
  Geometry g;
  const double r2 = x * x + (y - 2.0) * (y - 2.0);
  if (r2 < 2.0) {
    g.b = 0.4 - 0.2 * r2;
    g.b_x = -0.4 * x;
    g.b_y = -0.4 * (y - 2.0);
  }
  return g;
}

// ---------------------------------------------------------------------------------------------
// Registry

enum class ModelKind { swe, channel };

enum class OracleKind {
  none,
  smooth_cubic,            // u^3 + (2gb - 2g - 1)u + 2g = 0 with hu = 1
  bernoulli_subcritical,   // constant energy fixed by the outflow depth
  bernoulli_transcritical  // constant energy fixed by the critical control point
};

struct Case1D {
  std::string id;
  std::string description;
  ModelKind model = ModelKind::swe;
  double x_min = 0.0;
  double x_max = 1.0;
  std::function<Geometry(double)> geometry;
  /// Pointwise initial state in conserved variables.
  std::function<Vec<2>(double)> initial;
  BoundarySpec1D<2> boundary;
  NumericalFluxKind flux = NumericalFluxKind::hll;
  bool characteristic = false;
  OracleKind oracle = OracleKind::none;
  double q_in = 0.0;     // inflow discharge (hu or Q)
  double h_out = 0.0;    // outflow depth for Bernoulli oracles
  int default_cells = 96;
  SolverConfig config = SolverConfig::defaults(1);
};

struct Case2D {
  std::string id;
  std::string description;
  Bounds2D domain{0.0, 1.0, 0.0, 1.0};
  std::function<Geometry(double, double)> geometry;
  std::function<Vec<3>(double, double)> initial;
  BoundarySpec2D<3> boundary;
  NumericalFluxKind flux = NumericalFluxKind::llf;
  bool characteristic = true;
  int default_nx = 64;
  int default_ny = 32;
  /// Observation point for the probe, if the case has one.
  bool has_probe = false;
  double probe_x = 0.0;
  double probe_y = 0.0;
  SolverConfig config = SolverConfig::defaults(2);
};

using CaseSpec = std::variant<Case1D, Case2D>;

inline const std::string& case_id(const CaseSpec& c) {
  return std::visit([](const auto& s) -> const std::string& { return s.id; }, c);
}

inline int case_dimension(const CaseSpec& c) { return std::holds_alternative<Case1D>(c) ? 1 : 2; }

/// Wedge inflow: depth 1, speed 8.57, direction -8.95 degrees.
inline Vec<3> wedge_inflow_state() {
  const double angle = -8.95 * std::numbers::pi / 180.0;
  return {1.0, 8.57 * std::cos(angle), 8.57 * std::sin(angle)};
}

namespace detail {

inline Case1D hump_case(std::string id, std::string description, double q, double h_out,
                        bool transcritical) {
  Case1D c;
  c.id = std::move(id);
  c.description = std::move(description);
  c.x_min = 0.0;
  c.x_max = 25.0;
  c.geometry = hump_bottom;
  c.initial = [](double x) { return Vec<2>{0.5 - hump_bottom(x).b, 0.0}; };
  c.boundary = {BoundaryCondition<2>::discharge(q),
                BoundaryCondition<2>::depth(h_out, transcritical)};
  c.oracle = transcritical ? OracleKind::bernoulli_transcritical : OracleKind::bernoulli_subcritical;
  c.q_in = q;
  c.h_out = h_out;
  return c;
}

inline Case1D channel_case(std::string id, std::string description, Contraction k, double q,
                           double h_out, bool transcritical) {
  Case1D c = hump_case(std::move(id), std::move(description), q, h_out, transcritical);
  c.model = ModelKind::channel;
  c.geometry = [k](double x) { return channel_geometry(x, k); };
  c.initial = [k](double x) {
    const Geometry g = channel_geometry(x, k);
    return Vec<2>{g.sigma * (0.5 - g.b), 0.0};
  };
  return c;
}

}  // namespace detail

/// The nine benchmark problems.
inline std::vector<CaseSpec> case_registry() {
  std::vector<CaseSpec> out;

  Case1D smooth;
  smooth.id = "smooth-subcritical";
  smooth.description = "subcritical flow over two Gaussian bumps, h = hu = 1 at both ends";
  smooth.x_min = -10.0;
  smooth.x_max = 10.0;
  smooth.geometry = smooth_bottom;
  smooth.initial = [](double) { return Vec<2>{1.0, 1.0}; };
  smooth.boundary = {BoundaryCondition<2>::fixed({1.0, 1.0}),
                     BoundaryCondition<2>::fixed({1.0, 1.0})};
  smooth.oracle = OracleKind::smooth_cubic;
  smooth.q_in = 1.0;
  smooth.h_out = 1.0;
  out.push_back(smooth);

  out.push_back(detail::hump_case("hump-subcritical", "subcritical flow over a parabolic hump",
                                  4.42, 2.0, false));
  Case1D hump_trans = detail::hump_case(
      "hump-transcritical", "transcritical flow without a shock over a parabolic hump", 1.53,
      0.66, true);
  // On 12 cells the hump spans two cells and the nested start never recovers.
  hump_trans.config.min_coarse_cells = 24;
  out.push_back(hump_trans);

  const Contraction left_sub{0.05, 3.75, 16.25};
  const Contraction right_sub{0.05, 8.75, 21.25};
  const Contraction left_trans{0.15, 3.75, 16.25};
  const Contraction right_trans{0.15, 8.75, 21.25};
  out.push_back(detail::channel_case("channel-subcritical-left",
                                     "subcritical channel flow, left-shifted contraction",
                                     left_sub, 4.42, 2.0, false));
  out.push_back(detail::channel_case("channel-subcritical-right",
                                     "subcritical channel flow, right-shifted contraction",
                                     right_sub, 4.42, 2.0, false));
  out.push_back(detail::channel_case("channel-transcritical-left",
                                     "transcritical channel flow, left-shifted contraction",
                                     left_trans, 1.53, 0.66, true));
  out.push_back(detail::channel_case("channel-transcritical-right",
                                     "transcritical channel flow, right-shifted contraction",
                                     right_trans, 1.53, 0.66, true));

  Case2D hump2;
  hump2.id = "swe2d-hump";
  hump2.description = "2D flow over a paraboloid hump, hu = 1 west, h = 1 east";
  hump2.domain = {-4.0, 4.0, 0.0, 4.0};
  hump2.geometry = hump_bottom_2d;
  hump2.initial = [](double x, double y) { return Vec<3>{1.0 - hump_bottom_2d(x, y).b, 1.0, 0.0}; };
  // Neumann in y as a slip wall: plain zero-gradient ghosts leave the linearized operator
  // with growing modes at the inflow corners, which no relaxation smoother can damp.
  hump2.boundary = {BoundaryCondition<3>::discharge(1.0), BoundaryCondition<3>::depth(1.0),
                    BoundaryCondition<3>::wall(), BoundaryCondition<3>::wall()};
  out.push_back(hump2);

  Case2D wedge;
  wedge.id = "wedge";
  wedge.description = "supercritical inflow deflected by a wall, oblique hydraulic jump";
  wedge.domain = {0.0, 4.0, 0.0, 2.0};
  wedge.geometry = [](double, double) { return Geometry{}; };
  wedge.initial = [](double, double) { return wedge_inflow_state(); };
  wedge.boundary = {BoundaryCondition<3>::inflow(wedge_inflow_state()),
                    BoundaryCondition<3>::extrapolate(), BoundaryCondition<3>::wall(),
                    BoundaryCondition<3>::inflow(wedge_inflow_state())};
  wedge.has_probe = true;
  wedge.probe_x = 4.0;
  wedge.probe_y = 0.5;
  out.push_back(wedge);
  return out;
}

inline CaseSpec find_case(const std::string& id) {
  for (auto& c : case_registry())
    if (case_id(c) == id) return c;
  throw SolverError(ErrorCode::unknown_case, "no case named '" + id + "'");
}

// ---------------------------------------------------------------------------------------------
// Operators built from a case

template <class Model>
Residual1D<Model> make_residual(const Case1D& c, const Mesh1D& mesh, double g = 9.81) {
  Model m;
  m.g = g;
  return Residual1D<Model>(m, mesh, c.geometry, c.boundary, c.flux, c.characteristic);
}

inline Residual2D<ShallowWater2D> make_residual(const Case2D& c, const Mesh2D& mesh,
                                                double g = 9.81) {
  ShallowWater2D m;
  m.g = g;
  return Residual2D<ShallowWater2D>(m, mesh, c.geometry, c.boundary, c.flux, c.characteristic);
}

/// Calls f with a default-constructed model object of the case's type.
template <class F>
decltype(auto) with_model(const Case1D& c, F&& f) {
  if (c.model == ModelKind::channel) return f(Channel1D{});
  return f(ShallowWater1D{});
}

/// Four-point Gauss-Legendre rule on [-1/2, 1/2].
struct Gauss4 {
  static constexpr std::array<double, 4> nodes = {-0.43056815579702629, -0.16999052179242813,
                                                  0.16999052179242813, 0.43056815579702629};
  static constexpr std::array<double, 4> weights = {0.17392742256872693, 0.32607257743127307,
                                                    0.32607257743127307, 0.17392742256872693};
};

template <int D, class F>
CellField<D> cell_averages(const Mesh1D& mesh, F&& f) {
  CellField<D> out(mesh.n_cells);
  for (int j = 0; j < mesh.n_cells; ++j) {
    Vec<D> acc{};
    for (int q = 0; q < 4; ++q)
      acc += Gauss4::weights[q] * Vec<D>(f(mesh.center(j) + Gauss4::nodes[q] * mesh.dx));
    out[j] = acc;
  }
  return out;
}

template <int D, class F>
CellField<D> cell_averages(const Mesh2D& mesh, F&& f) {
  CellField<D> out(mesh.size());
  for (int j = 0; j < mesh.ny; ++j)
    for (int i = 0; i < mesh.nx; ++i) {
      Vec<D> acc{};
      for (int b = 0; b < 4; ++b)
        for (int a = 0; a < 4; ++a)
          acc += (Gauss4::weights[a] * Gauss4::weights[b]) *
                 Vec<D>(f(mesh.center_x(i) + Gauss4::nodes[a] * mesh.dx,
                          mesh.center_y(j) + Gauss4::nodes[b] * mesh.dy));
      out[mesh.index(i, j)] = acc;
    }
  return out;
}

inline CellField<2> initial_field(const Case1D& c, const Mesh1D& mesh) {
  return cell_averages<2>(mesh, c.initial);
}

inline CellField<3> initial_field(const Case2D& c, const Mesh2D& mesh) {
  return cell_averages<3>(mesh, c.initial);
}

inline Mesh1D case_mesh(const Case1D& c, int n) { return build_uniform_1d(c.x_min, c.x_max, n); }

inline Mesh2D case_mesh(const Case2D& c, int nx, int ny) {
  return build_uniform_2d(c.domain, nx, ny);
}

/// Nested-iteration solve of a 1D case on n cells.
inline NmgmResult<2> solve_case(const Case1D& c, int n, const SolverConfig& cfg, double g = 9.81,
                                std::ostream* log = nullptr) {
  const Mesh1D finest = case_mesh(c, n);
  const int min_cells = cfg.min_coarse_cells > 0 ? cfg.min_coarse_cells : default_min_cells(1);
  const auto hierarchy = build_hierarchy(finest, min_cells);
  auto init = [&](const Mesh1D& m) { return initial_field(c, m); };
  return with_model(c, [&](auto model) {
    using Model = decltype(model);
    auto make = [&](const Mesh1D& m) { return make_residual<Model>(c, m, g); };
    return nmgm(hierarchy, make, init, cfg, log);
  });
}

inline NmgmResult<3> solve_case(const Case2D& c, int nx, int ny, const SolverConfig& cfg,
                                double g = 9.81, std::ostream* log = nullptr) {
  const Mesh2D finest = case_mesh(c, nx, ny);
  const int min_cells = cfg.min_coarse_cells > 0 ? cfg.min_coarse_cells : default_min_cells(2);
  const auto hierarchy = build_hierarchy(finest, min_cells);
  auto init = [&](const Mesh2D& m) { return initial_field(c, m); };
  auto make = [&](const Mesh2D& m) { return make_residual(c, m, g); };
  return nmgm(hierarchy, make, init, cfg, log);
}

// ---------------------------------------------------------------------------------------------
// Oracles

namespace detail {
/// Bisection on [lo, hi] for a sign change of f, to the resolution of doubles.
template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}
}  // namespace detail

/// Subcritical root of u^3 + (2gb - 2g - 1)u + 2g = 0; returns (h, hu) = (1/u, 1).
inline Vec<2> exact_smooth_subcritical(double b, double g = 9.81) {
  const double p = 2.0 * g * b - 2.0 * g - 1.0;
  auto cubic = [&](double u) { return (u * u + p) * u + 2.0 * g; };
  // the cubic has its local minimum at u_min = sqrt(-p / 3); the subcritical root lies below it
  if (!(p < 0.0))
    throw SolverError(ErrorCode::no_subcritical_root, "cubic has no positive turning point");
  const double u_min = std::sqrt(-p / 3.0);
  if (cubic(u_min) > 0.0)
    throw SolverError(ErrorCode::no_subcritical_root, "cubic has no positive root at this bottom");
  const double u = detail::bisect(cubic, 0.0, u_min);
  return {1.0 / u, 1.0};
}

inline double smooth_cubic_residual(double u, double b, double g = 9.81) {
  return u * u * u + (2.0 * g * b - 2.0 * g - 1.0) * u + 2.0 * g;
}

enum class FlowRegime { subcritical, transcritical };

/// Steady smooth flow with constant discharge Q and energy E = h + b + (Q/sigma)^2 / (2 g h^2).
struct BernoulliOracle {
  double Q = 0.0;
  double E = 0.0;
  double g = 9.81;
  FlowRegime regime = FlowRegime::subcritical;
  double x_crest = 0.0;  // control point for transcritical flow
  std::function<Geometry(double)> geometry;

  double critical_depth(const Geometry& geom) const {
    const double q = Q / geom.sigma;
    return std::cbrt(q * q / g);
  }

  double energy(double h, const Geometry& geom) const {
    const double q = Q / geom.sigma;
    return h + geom.b + q * q / (2.0 * g * h * h);
  }

  /// Depth at x on the branch selected by the regime.
  double depth(double x) const {
    const Geometry geom = geometry(x);
    const double q = Q / geom.sigma;
    const double c = q * q / (2.0 * g);
    auto cubic = [&](double h) { return (h + geom.b - E) * h * h + c; };
    const double hc = critical_depth(geom);
    const double top = E - geom.b;
    const double at_critical = cubic(hc);
    if (at_critical > 0.0) {
      // double root up to rounding at the control point
      if (at_critical <= 1e-12 * std::max(1.0, c)) return hc;
      throw SolverError(ErrorCode::no_real_root,
                        "energy " + std::to_string(E) + " is below critical at x = " +
                            std::to_string(x));
    }
    const bool supercritical = regime == FlowRegime::transcritical && x > x_crest;
    if (supercritical) return detail::bisect(cubic, 0.0, hc);
    return detail::bisect(cubic, hc, top);
  }

  /// Conserved state (sigma h, Q).
  Vec<2> state(double x) const {
    const Geometry geom = geometry(x);
    return {geom.sigma * depth(x), Q};
  }
};

/// Builds the Bernoulli oracle of a hump or channel case.
inline BernoulliOracle make_bernoulli_oracle(const Case1D& c, double g = 9.81) {
  if (c.oracle != OracleKind::bernoulli_subcritical &&
      c.oracle != OracleKind::bernoulli_transcritical)
    throw SolverError(ErrorCode::oracle_missing, "case '" + c.id + "' has no Bernoulli oracle");
  BernoulliOracle o;
  o.Q = c.q_in;
  o.g = g;
  o.geometry = c.geometry;
  if (c.oracle == OracleKind::bernoulli_subcritical) {
    o.regime = FlowRegime::subcritical;
    o.E = o.energy(c.h_out, c.geometry(c.x_max));
    return o;
  }
  o.regime = FlowRegime::transcritical;
  // the control point maximises the critical energy b + 3/2 (q^2 / g)^{1/3}
  auto crit = [&](double x) {
    const Geometry geom = c.geometry(x);
    return geom.b + 1.5 * o.critical_depth(geom);
  };
  const int samples = 20000;
  int best = 0;
  double best_val = -1e300;
  const double step = (c.x_max - c.x_min) / samples;
  for (int k = 0; k <= samples; ++k) {
    const double v = crit(c.x_min + k * step);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  double lo = c.x_min + std::max(best - 1, 0) * step;
  double hi = c.x_min + std::min(best + 1, samples) * step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double a = hi - phi * (hi - lo);
    const double b = lo + phi * (hi - lo);
    if (crit(a) < crit(b))
      lo = a;
    else
      hi = b;
  }
  o.x_crest = 0.5 * (lo + hi);
  o.E = crit(o.x_crest);
  return o;
}

/// Pointwise exact conserved state of a 1D case with an oracle.
inline std::function<Vec<2>(double)> exact_profile(const Case1D& c, double g = 9.81) {
  switch (c.oracle) {
    case OracleKind::smooth_cubic: {
      auto geom = c.geometry;
      return [geom, g](double x) { return exact_smooth_subcritical(geom(x).b, g); };
    }
    case OracleKind::bernoulli_subcritical:
    case OracleKind::bernoulli_transcritical: {
      const BernoulliOracle o = make_bernoulli_oracle(c, g);
      return [o](double x) { return o.state(x); };
    }
    case OracleKind::none: break;
  }
  throw SolverError(ErrorCode::oracle_missing, "case '" + c.id + "' has no exact solution");
}

/// Exact cell averages by 4-point Gauss quadrature per cell.
inline CellField<2> exact_averages(const Case1D& c, const Mesh1D& mesh, double g = 9.81) {
  return cell_averages<2>(mesh, exact_profile(c, g));
}

/// Sum_j |U_j - V_j| dx per component.
template <int D>
Vec<D> l1_error(std::span<const Vec<D>> field, std::span<const Vec<D>> exact, double dx) {
  if (field.size() != exact.size())
    throw SolverError(ErrorCode::shape_mismatch, "field and oracle sizes differ");
  Vec<D> e{};
  for (std::size_t j = 0; j < field.size(); ++j)
    for (int k = 0; k < D; ++k) e[k] += std::abs(field[j][k] - exact[j][k]) * dx;
  return e;
}

/// log2(e_coarse / e_fine) for a factor-2 refinement.
inline double observed_order(double e_coarse, double e_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0))
    throw SolverError(ErrorCode::nonpositive_error, "observed order needs positive errors");
  return std::log2(e_coarse / e_fine);
}

/// max_j |q_j - q_in| for the discharge component.
inline double discharge_constancy(std::span<const Vec<2>> field, double q_in) {
  double m = 0.0;
  for (const auto& u : field) m = std::max(m, std::abs(u[1] - q_in));
  return m;
}

/// Largest |h_j + b(x_j) - (h_exact + b)(x_j)| at cell centres, with h = H / sigma.
inline double max_surface_error(const Case1D& c, const Mesh1D& mesh, std::span<const Vec<2>> field,
                                double g = 9.81) {
  const auto exact = exact_profile(c, g);
  double m = 0.0;
  for (int j = 0; j < mesh.n_cells; ++j) {
    const double x = mesh.center(j);
    const Geometry geom = c.geometry(x);
    const double h_num = field[j][0] / geom.sigma;
    const double h_ex = exact(x)[0] / geom.sigma;
    m = std::max(m, std::abs(h_num - h_ex));
  }
  return m;
}

struct ProbeValue {
  double h = 0.0;
  double speed = 0.0;
};

/// Cell-average depth and speed of the cell containing (x, y); points on the outer boundary
/// belong to the adjacent cell.
inline ProbeValue wedge_point_probe(std::span<const Vec<3>> field, const Mesh2D& mesh, double x,
                                    double y) {
  if (x < mesh.x_min || x > mesh.x_max || y < mesh.y_min || y > mesh.y_max)
    throw SolverError(ErrorCode::point_outside_domain, "probe point lies outside the mesh");
  const int i = std::clamp(static_cast<int>(std::floor((x - mesh.x_min) / mesh.dx)), 0, mesh.nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor((y - mesh.y_min) / mesh.dy)), 0, mesh.ny - 1);
  const Vec<3>& u = field[mesh.index(i, j)];
  return {u[0], std::hypot(u[1], u[2]) / u[0]};
}

struct ObliqueJump {
  double beta = 0.0;   // shock angle to the incoming flow (radians)
  double h = 0.0;      // downstream depth
  double speed = 0.0;  // downstream speed
};

/// Weak oblique hydraulic jump turning a flow of depth h1 and speed v1 by `deflection` radians.
inline ObliqueJump oblique_jump(double h1, double v1, double deflection, double g = 9.81) {
  const double fr = v1 / std::sqrt(g * h1);
  if (!(fr > 1.0)) throw SolverError(ErrorCode::no_real_root, "oblique jump needs Fr > 1");
  auto state = [&](double beta) {
    const double fn = fr * std::sin(beta);
    const double ratio = 0.5 * (std::sqrt(1.0 + 8.0 * fn * fn) - 1.0);
    const double un1 = v1 * std::sin(beta);
    const double vt = v1 * std::cos(beta);
    const double un2 = un1 / ratio;
    return ObliqueJump{beta, h1 * ratio, std::hypot(un2, vt)};
  };
  auto turn = [&](double beta) {
    const ObliqueJump s = state(beta);
    const double un2 = v1 * std::sin(beta) * h1 / s.h;
    return beta - std::atan2(un2, v1 * std::cos(beta)) - deflection;
  };
  const double mach = std::asin(1.0 / fr);
  const double half_pi = 0.5 * std::numbers::pi;
  const int scan = 4000;
  double prev = mach;
  for (int k = 1; k <= scan; ++k) {
    const double beta = mach + (half_pi - mach) * k / scan;
    if (turn(beta) >= 0.0) return state(detail::bisect(turn, prev, beta));
    prev = beta;
  }
  throw SolverError(ErrorCode::no_real_root, "deflection exceeds the maximum turning angle");
}

/// CSV of the exact profile at cell centres: x, b, h_exact, q_exact.
inline void write_oracle_csv(std::ostream& os, const Case1D& c, const Mesh1D& mesh, double g = 9.81) {
  const auto exact = exact_profile(c, g);
  os.precision(17);
  os << "x,b,h_exact,q_exact\n";
  for (int j = 0; j < mesh.n_cells; ++j) {
    const double x = mesh.center(j);
    const Geometry geom = c.geometry(x);
    const Vec<2> u = exact(x);
    os << x << ',' << geom.b << ',' << u[0] / geom.sigma << ',' << u[1] << '\n';
  }
}

}  // namespace swnmg
