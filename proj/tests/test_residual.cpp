#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"

using namespace swnmg;
using swnmg::testing::Gen;

namespace {
Geometry flat(double) { return {}; }
Geometry flat2(double, double) { return {}; }

Residual1D<ShallowWater1D> still_1d(int n, NumericalFluxKind flux = NumericalFluxKind::hll) {
  const BoundarySpec1D<2> bc{BoundaryCondition<2>::fixed({1.0, 1.0}), BoundaryCondition<2>::fixed({1.0, 1.0})};
  return Residual1D<ShallowWater1D>(ShallowWater1D{}, build_uniform_1d(0.0, 1.0, n), flat, bc, flux);
}
}  // namespace

TEST(Ghosts, FixedStateTelescopes) {
  const std::vector<Vec<2>> field(8, Vec<2>{1.0, 1.0});
  const BoundarySpec1D<2> bc{BoundaryCondition<2>::fixed({1.0, 1.0}), BoundaryCondition<2>::fixed({1.0, 1.0})};
  const auto g = fill_ghosts<2>(field, bc, 9.81);
  for (int k : {0, 1, 10, 11}) EXPECT_EQ(g[k], (Vec<2>{1.0, 1.0}));
  const auto R = still_1d(8).evaluate(field);
  for (const auto& r : R) EXPECT_LE(l1_norm(r), 1e-12);
}

TEST(Ghosts, FixedDischarge) {
  std::vector<Vec<2>> field(4, Vec<2>{2.0, 4.0});
  field[0] = {2.1, 4.3};
  const BoundarySpec1D<2> bc{BoundaryCondition<2>::discharge(4.42), BoundaryCondition<2>::depth(2.0)};
  const auto g = fill_ghosts<2>(field, bc, 9.81);
  EXPECT_EQ(g[1], (Vec<2>{2.1, 4.42}));
  EXPECT_EQ(g[0], (Vec<2>{2.1, 4.42}));
  EXPECT_EQ(g[6], (Vec<2>{2.0, 4.0}));
}

TEST(Ghosts, SubcriticalOnlyDepthYieldsToSupercriticalOutflow) {
  const std::vector<Vec<2>> field(4, Vec<2>{0.3, 3.0});  // Fr = 10/sqrt(2.943) > 1
  const BoundarySpec1D<2> bc{BoundaryCondition<2>::extrapolate(), BoundaryCondition<2>::depth(0.66, true)};
  EXPECT_EQ(fill_ghosts<2>(field, bc, 9.81)[6], field[3]);
  const BoundarySpec1D<2> strict{BoundaryCondition<2>::extrapolate(), BoundaryCondition<2>::depth(0.66)};
  EXPECT_EQ(fill_ghosts<2>(field, strict, 9.81)[6][0], 0.66);
}

TEST(Ghosts, WallMirrorsNormalMomentum) {
  const int nx = 2, ny = 3;
  std::vector<Vec<3>> field(nx * ny, Vec<3>{1.0, 0.0, 0.0});
  field[0] = {1.0, 2.0, -3.0};
  field[nx] = {1.2, 0.5, 0.7};
  const BoundarySpec2D<3> bc{BoundaryCondition<3>::extrapolate(), BoundaryCondition<3>::extrapolate(),
                             BoundaryCondition<3>::wall(), BoundaryCondition<3>::extrapolate()};
  const auto g = fill_ghosts<3>(field, nx, ny, bc, 9.81);
  auto at = [&](int i, int j) { return g[(j + 2) * (nx + 4) + i + 2]; };
  EXPECT_EQ(at(0, -1), (Vec<3>{1.0, 2.0, 3.0}));
  EXPECT_EQ(at(0, -2), (Vec<3>{1.2, 0.5, -0.7}));
}

TEST(Ghosts, InconsistentSpecThrows) {
  const std::vector<Vec<2>> field(4, Vec<2>{1.0, 0.0});
  const BoundarySpec1D<2> bc{BoundaryCondition<2>::depth(-1.0), BoundaryCondition<2>::extrapolate()};
  try {
    fill_ghosts<2>(field, bc, 9.81);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.code(), ErrorCode::inconsistent_spec);
  }
}

TEST(ResidualNorm, Examples) {
  EXPECT_EQ(residual_l1<2>(std::vector<Vec<2>>(3, Vec<2>{})), 0.0);
  EXPECT_EQ(residual_l1<2>(std::vector<Vec<2>>{{0.5, -0.25}}), 0.75);
  EXPECT_EQ(residual_l1<2>(std::vector<Vec<2>>{{1.0, 0.0}, {0.0, -2.0}}), 3.0);
}

TEST(Residual1D, ChannelWithUnitBreadthMatchesShallowWater) {
  Gen gen(41);
  const Mesh1D mesh = build_uniform_1d(0.0, 25.0, 24);
  const BoundarySpec1D<2> bc{BoundaryCondition<2>::discharge(4.42), BoundaryCondition<2>::depth(2.0)};
  const Residual1D<ShallowWater1D> swe(ShallowWater1D{}, mesh, hump_bottom, bc, NumericalFluxKind::hll);
  const Residual1D<Channel1D> ch(Channel1D{}, mesh, hump_bottom, bc, NumericalFluxKind::hll);
  std::vector<Vec<2>> field(24);
  for (auto& u : field) u = {gen.uniform(1.5, 2.5), gen.uniform(3.0, 5.0)};
  EXPECT_EQ(swe.evaluate(field), ch.evaluate(field));
}

TEST(Residual1D, NonpositiveDepthCarriesCell) {
  std::vector<Vec<2>> field(8, Vec<2>{1.0, 1.0});
  field[5][0] = -0.1;
  try {
    still_1d(8).evaluate(field);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.code(), ErrorCode::nonpositive_depth);
    EXPECT_GE(e.cell(), 3);
    EXPECT_LE(e.cell(), 7);
  }
}

// The dx-weighted L1 residual of the exact cell averages shrinks by at least 2^2.5 per halving.
TEST(Residual1D, ExactSmoothSolutionResidualConverges) {
  const Case1D c = std::get<Case1D>(find_case("smooth-subcritical"));
  auto norm = [&](int n) {
    const Mesh1D mesh = case_mesh(c, n);
    const auto op = make_residual<ShallowWater1D>(c, mesh);
    return residual_l1<2>(op.evaluate(exact_averages(c, mesh))) * mesh.dx;
  };
  const double r80 = norm(80), r160 = norm(160), r320 = norm(320);
  EXPECT_GE(r80 / r160, std::pow(2.0, 2.5));
  EXPECT_GE(r160 / r320, std::pow(2.0, 2.5));
}

// Perturbing one cell changes residuals only within two cells of it.
TEST(ResidualProperty, Locality1D) {
  Gen gen(42);
  const Case1D c = std::get<Case1D>(find_case("hump-subcritical"));
  const Mesh1D mesh = case_mesh(c, 24);
  const auto op = make_residual<ShallowWater1D>(c, mesh);
  for (int t = 0; t < 50; ++t) {
    std::vector<Vec<2>> field(24);
    for (auto& u : field) u = {gen.uniform(1.5, 2.5), gen.uniform(3.0, 5.0)};
    const auto R0 = op.evaluate(field);
    const int p = gen.integer(0, 23);
    field[p][gen.integer(0, 1)] += gen.uniform(0.01, 0.1);
    const auto R1 = op.evaluate(field);
    for (int j = 0; j < 24; ++j)
      if (std::abs(j - p) > 2) {
        EXPECT_EQ(R0[j], R1[j]) << "cell " << j << " perturbed " << p;
      }
  }
}

TEST(ResidualProperty, Locality2D) {
  Gen gen(43);
  const Case2D c = std::get<Case2D>(find_case("swe2d-hump"));
  const Mesh2D mesh = case_mesh(c, 8, 8);
  const auto op = make_residual(c, mesh);
  const StencilPattern j21 = StencilPattern::j21();
  for (int t = 0; t < 20; ++t) {
    std::vector<Vec<3>> field = initial_field(c, mesh);
    for (auto& u : field) u = u + gen.vec<3>(-0.05, 0.05);
    const auto R0 = op.evaluate(field);
    const int pi = gen.integer(0, 7), pj = gen.integer(0, 7);
    field[mesh.index(pi, pj)][gen.integer(0, 2)] += 0.05;
    const auto R1 = op.evaluate(field);
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i < 8; ++i)
        if (!j21.contains({pi - i, pj - j})) {
          EXPECT_EQ(R0[mesh.index(i, j)], R1[mesh.index(i, j)]) << i << ',' << j;
        }
  }
}

// Shifting the domain and the bottom together leaves the residual unchanged.
TEST(ResidualProperty, TranslationEquivariance) {
  Gen gen(44);
  for (int t = 0; t < 20; ++t) {
    const double s = gen.uniform(-50.0, 50.0);
    const BoundarySpec1D<2> bc{BoundaryCondition<2>::discharge(4.42), BoundaryCondition<2>::depth(2.0)};
    const Residual1D<ShallowWater1D> a(ShallowWater1D{}, build_uniform_1d(0.0, 25.0, 24), hump_bottom, bc,
                                       NumericalFluxKind::hll);
    const Residual1D<ShallowWater1D> b(ShallowWater1D{}, build_uniform_1d(s, 25.0 + s, 24),
                                       [s](double x) { return hump_bottom(x - s); }, bc, NumericalFluxKind::hll);
    std::vector<Vec<2>> field(24);
    for (auto& u : field) u = {gen.uniform(1.5, 2.5), gen.uniform(3.0, 5.0)};
    const auto Ra = a.evaluate(field), Rb = b.evaluate(field);
    for (int j = 0; j < 24; ++j)
      for (int k = 0; k < 2; ++k) EXPECT_NEAR(Ra[j][k], Rb[j][k], 1e-10);
  }
}

// Per-cell residuals from the workspace agree with whole-field evaluation.
TEST(ResidualProperty, CellResidualMatchesEvaluate) {
  Gen gen(45);
  const Case2D c = std::get<Case2D>(find_case("wedge"));
  const Mesh2D mesh = case_mesh(c, 8, 4);
  const auto op = make_residual(c, mesh);
  std::vector<Vec<3>> field = initial_field(c, mesh);
  for (auto& u : field) u = u + gen.vec<3>(-0.1, 0.1);
  const auto R = op.evaluate(field);
  const auto ws = op.make_workspace(field);
  for (int k = 0; k < mesh.size(); ++k)
    for (int m = 0; m < 3; ++m) EXPECT_NEAR(op.cell_residual(ws, k)[m], R[k][m], 1e-12 * (1.0 + std::abs(R[k][m])));
}

TEST(Residual2D, ConstantStateZeroGradientIsSteady) {
  const BoundarySpec2D<3> zg{BoundaryCondition<3>::extrapolate(), BoundaryCondition<3>::extrapolate(),
                             BoundaryCondition<3>::extrapolate(), BoundaryCondition<3>::extrapolate()};
  const Residual2D<ShallowWater2D> op(ShallowWater2D{}, build_uniform_2d({0, 1, 0, 1}, 6, 5), flat2, zg,
                                      NumericalFluxKind::llf, true);
  const auto R = op.evaluate(std::vector<Vec<3>>(30, Vec<3>{1.3, 0.2, -0.1}));
  for (const auto& r : R) EXPECT_LE(l1_norm(r), 1e-12);
}

TEST(Residual2D, UniformFlowWithMatchingBoundaries) {
  const Vec<3> U{1.0, 1.0, 0.0};
  const BoundarySpec2D<3> bc{BoundaryCondition<3>::inflow(U), BoundaryCondition<3>::extrapolate(),
                             BoundaryCondition<3>::wall(), BoundaryCondition<3>::wall()};
  const Residual2D<ShallowWater2D> op(ShallowWater2D{}, build_uniform_2d({0, 2, 0, 1}, 8, 4), flat2, bc,
                                      NumericalFluxKind::llf, false);
  const auto R = op.evaluate(std::vector<Vec<3>>(32, U));
  for (const auto& r : R) EXPECT_LE(l1_norm(r), 1e-12);
}
