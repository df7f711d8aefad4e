#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"

using namespace swnmg;
using swnmg::testing::Gen;

TEST(Weno3, ConstantAndLinearExamples) {
  const Weno3Pair c = weno3_pair(2.5, 2.5, 2.5);
  EXPECT_EQ(c.left_face, 2.5);
  EXPECT_EQ(c.right_face, 2.5);
  const Weno3Pair l = weno3_pair(-1.0, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(l.left_face, -0.5);
  EXPECT_DOUBLE_EQ(l.right_face, 0.5);
}

// Direct evaluation of the sub-stencil values, smoothness indicators and weights.
TEST(Weno3, NonlinearExampleMatchesHandEvaluation) {
  const double um = 1.0, uc = 2.0, up = 4.0, eps = 1e-6;
  const double p0 = -0.5 * um + 1.5 * uc;
  const double p1 = 0.5 * uc + 0.5 * up;
  const double b0 = (uc - um) * (uc - um);
  const double b1 = (up - uc) * (up - uc);
  const double a0 = (1.0 / 3.0) / ((eps + b0) * (eps + b0));
  const double a1 = (2.0 / 3.0) / ((eps + b1) * (eps + b1));
  const double right = (a0 * p0 + a1 * p1) / (a0 + a1);
  EXPECT_NEAR(weno3_pair(um, uc, up).right_face, right, 1e-14);
  // the left trace mirrors the stencil
  const double q0 = 0.5 * um + 0.5 * uc;
  const double q1 = 1.5 * uc - 0.5 * up;
  const double c0 = (2.0 / 3.0) / ((eps + b0) * (eps + b0));
  const double c1 = (1.0 / 3.0) / ((eps + b1) * (eps + b1));
  EXPECT_NEAR(weno3_pair(um, uc, up).left_face, (c0 * q0 + c1 * q1) / (c0 + c1), 1e-14);
}

TEST(Weno3Property, ReproducesConstantsAndLines) {
  Gen gen(31);
  for (int t = 0; t < swnmg::testing::property_trials; ++t) {
    const double c = gen.uniform(-100.0, 100.0);
    const Weno3Pair k = weno3_pair(c, c, c);
    EXPECT_EQ(k.left_face, c);
    EXPECT_EQ(k.right_face, c);
    // line a + s x sampled as cell averages on unit cells centred at -1, 0, 1
    const double a = gen.uniform(-10.0, 10.0);
    const double s = gen.uniform(-10.0, 10.0);
    for (double eta : {-0.5, 0.5, GaussRule::nodes[0], GaussRule::nodes[1]})
      EXPECT_NEAR(weno3_point(a - s, a, a + s, eta), a + s * eta, 1e-13 * (1.0 + std::abs(a) + std::abs(s)));
  }
}

// Weights are a convex combination and the trace lies between the two candidate values.
TEST(Weno3Property, WeightsAndConvexHull) {
  Gen gen(32);
  for (int t = 0; t < swnmg::testing::property_trials; ++t) {
    const double um = gen.uniform(-5.0, 5.0);
    const double uc = gen.uniform(-5.0, 5.0);
    const double up = gen.uniform(-5.0, 5.0);
    for (double eta : {-0.5, 0.5}) {
      const auto w = weno3_weights(um, uc, up, eta);
      EXPECT_GE(w[0], 0.0);
      EXPECT_GE(w[1], 0.0);
      EXPECT_NEAR(w[0] + w[1], 1.0, 1e-14);
      const double p0 = uc + (uc - um) * eta;
      const double p1 = uc + (up - uc) * eta;
      const double v = weno3_point(um, uc, up, eta);
      EXPECT_GE(v, std::min(p0, p1) - 1e-13);
      EXPECT_LE(v, std::max(p0, p1) + 1e-13);
    }
  }
}

// Interface values of smooth data converge at better than 2^2.5 per halving.
TEST(Weno3, ThirdOrderOnSmoothData) {
  auto max_error = [](int n) {
    const double dx = 1.0 / n;
    auto avg = [&](int j) {
      const double a = j * dx, b = a + dx;
      return (std::sin(2.0 * b) - std::sin(2.0 * a)) / (2.0 * dx) + (b * b * b * b - a * a * a * a) / (4.0 * dx);
    };
    auto exact = [](double x) { return std::cos(2.0 * x) + x * x * x; };
    double e = 0.0;
    for (int j = 1; j < n - 1; ++j) {
      const Weno3Pair p = weno3_pair(avg(j - 1), avg(j), avg(j + 1));
      e = std::max(e, std::abs(p.right_face - exact((j + 1) * dx)));
      e = std::max(e, std::abs(p.left_face - exact(j * dx)));
    }
    return e;
  };
  const double e1 = max_error(200), e2 = max_error(400);
  EXPECT_GE(e1 / e2, std::pow(2.0, 2.5));
}

TEST(CellPolynomial, Examples) {
  const CellPolynomial c = build_cell_polynomial(3.0, 3.0, 3.0, 3.0, 3.0);
  EXPECT_NEAR(c.coeffs[0], 3.0, 1e-14);
  for (int k = 1; k < 5; ++k) EXPECT_NEAR(c.coeffs[k], 0.0, 1e-14);

  const CellPolynomial x = build_cell_polynomial(-1.5, -0.5, 0.5, 1.5, 0.0);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(x.coeffs[k], k == 1 ? 1.0 : 0.0, 1e-14);

  auto q = [](double s) { return s * s * s * s; };
  const CellPolynomial quartic = build_cell_polynomial(q(-1.5), q(-0.5), q(0.5), q(1.5), 1.0 / 80.0);
  EXPECT_NEAR(quartic.coeffs[4], 1.0, 1e-12);
}

TEST(CellPolynomialProperty, SatisfiesAllConstraints) {
  Gen gen(33);
  for (int t = 0; t < swnmg::testing::property_trials; ++t) {
    const double v[4] = {gen.uniform(-3, 3), gen.uniform(-3, 3), gen.uniform(-3, 3), gen.uniform(-3, 3)};
    const double avg = gen.uniform(-3, 3);
    const CellPolynomial p = build_cell_polynomial(v[0], v[1], v[2], v[3], avg);
    const double nodes[4] = {-1.5, -0.5, 0.5, 1.5};
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(p(nodes[k]), v[k], 1e-12 * std::max(1.0, std::abs(v[k])));
    EXPECT_NEAR(p.mean(), avg, 1e-12 * std::max(1.0, std::abs(avg)));
  }
}

TEST(SourceIntegral, Examples) {
  const ShallowWater1D m;
  const auto one = build_cell_polynomials<2>({1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0});
  std::array<Geometry, 2> flat{};
  EXPECT_EQ(source_integral_1d(m, 1.0, flat, one), (Vec<2>{0.0, 0.0}));
  std::array<Geometry, 2> slope{};
  slope[0].b_x = slope[1].b_x = 0.1;
  const Vec<2> s = source_integral_1d(m, 1.0, slope, one);
  EXPECT_NEAR(s[1], -0.981, 1e-14);

  const ShallowWater2D m2;
  const auto one3 = build_cell_polynomials<3>({1, 0, 0}, {1, 0, 0}, {1, 0, 0}, {1, 0, 0}, {1, 0, 0});
  std::array<std::array<Geometry, 2>, 2> g2{};
  for (auto& row : g2)
    for (auto& n : row) n.b_x = 0.1;
  const Vec<3> s2 = source_integral_2d(m2, 1.0, 1.0, g2, {one3, one3});
  EXPECT_NEAR(s2[0], 0.0, 1e-15);
  EXPECT_NEAR(s2[1], -0.981, 1e-14);
  EXPECT_NEAR(s2[2], 0.0, 1e-15);
}

// Two-point quadrature of -g b_x over the Gaussian bottom matches a fine composite Simpson rule
// at fourth order.
TEST(SourceIntegral, GaussianBottomAgainstComposite) {
  const ShallowWater1D m;
  auto quad_error = [&](double a, double dx) {
    const double c = a + 0.5 * dx;
    std::array<Geometry, 2> nodes{smooth_bottom(c + GaussRule::nodes[0] * dx),
                                  smooth_bottom(c + GaussRule::nodes[1] * dx)};
    const auto one = build_cell_polynomials<2>({1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0});
    const double approx = source_integral_1d(m, dx, nodes, one)[1];
    const int n = 2000;
    double ref = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      ref += w * (-9.81 * smooth_bottom(a + dx * k / n).b_x);
    }
    ref *= dx / (3.0 * n);
    return std::abs(approx - ref);
  };
  const double e1 = quad_error(-0.25, 0.25);
  const double e2 = quad_error(-0.25, 0.125);
  EXPECT_LT(e1, 1e-4);
  EXPECT_GE(e1 / e2, 16.0 * 0.8);  // O(dx^5) per cell, allow some pre-asymptotic slack
}

TEST(Interfaces1D, ConstantAndLinearFields) {
  const ShallowWater1D m;
  const int n = 6;
  std::vector<Vec<2>> g(n + 4);
  for (int k = 0; k < n + 4; ++k) g[k] = {2.0, 0.5};
  const std::vector<Geometry> faces(n + 1);
  const auto c = reconstruct_interfaces_1d(m, std::span<const Vec<2>>(g), std::span<const Geometry>(faces), false);
  for (int f = 0; f <= n; ++f) {
    EXPECT_EQ(c.minus[f], (Vec<2>{2.0, 0.5}));
    EXPECT_EQ(c.plus[f], (Vec<2>{2.0, 0.5}));
  }
  for (int k = 0; k < n + 4; ++k) g[k] = {1.0 + 0.1 * (k - 2), 0.3 - 0.05 * (k - 2)};
  for (bool chr : {false, true}) {
    const auto l = reconstruct_interfaces_1d(m, std::span<const Vec<2>>(g), std::span<const Geometry>(faces), chr);
    for (int f = 0; f <= n; ++f) {
      // cell k spans [k - 1/2, k + 1/2] in index units, face f sits at f - 1/2
      const Vec<2> exact{1.0 + 0.1 * (f - 0.5), 0.3 - 0.05 * (f - 0.5)};
      for (int q = 0; q < 2; ++q) {
        EXPECT_NEAR(l.minus[f][q], exact[q], 1e-13);
        EXPECT_NEAR(l.plus[f][q], exact[q], 1e-13);
      }
    }
  }
}

TEST(Interfaces1D, NeedsGhosts) {
  const ShallowWater1D m;
  std::vector<Vec<2>> g(4, Vec<2>{1.0, 0.0});
  std::vector<Geometry> faces(1);
  try {
    reconstruct_interfaces_1d(m, std::span<const Vec<2>>(g), std::span<const Geometry>(faces), false);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.code(), ErrorCode::missing_ghosts);
  }
}

namespace {
std::vector<Vec<3>> ghosted_2d(int nx, int ny, auto&& f) {
  std::vector<Vec<3>> data((nx + 4) * (ny + 4));
  for (int j = -2; j < ny + 2; ++j)
    for (int i = -2; i < nx + 2; ++i) data[(j + 2) * (nx + 4) + i + 2] = f(i, j);
  return data;
}
}  // namespace

TEST(Interfaces2D, ConstantAndLinearFields) {
  const ShallowWater2D m;
  const int nx = 4, ny = 3;
  const auto c = ghosted_2d(nx, ny, [](int, int) { return Vec<3>{1.5, 0.2, -0.1}; });
  const auto fc = reconstruct_face_gauss_points_2d(m, Ghosted2DView<3>{c, nx, ny}, true);
  for (const auto& s : fc.x_faces)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(s.minus[b][k], c[0][k], 1e-14);
        EXPECT_NEAR(s.plus[b][k], c[0][k], 1e-14);
      }

  // cell averages of a + p x + q y on unit cells centred at (i, j) equal point values at centres
  auto lin = [](double x, double y) { return Vec<3>{2.0 + 0.1 * x - 0.2 * y, 0.3 * x + 0.1 * y, -0.2 + 0.05 * y}; };
  const auto l = ghosted_2d(nx, ny, [&](int i, int j) { return lin(i, j); });
  for (bool chr : {false, true}) {
    const auto fl = reconstruct_face_gauss_points_2d(m, Ghosted2DView<3>{l, nx, ny}, chr);
    for (int j = 0; j < ny; ++j)
      for (int f = 0; f <= nx; ++f)
        for (int b = 0; b < 2; ++b) {
          const Vec<3> e = lin(f - 0.5, j + GaussRule::nodes[b]);
          for (int k = 0; k < 3; ++k) {
            EXPECT_NEAR(fl.x_faces[j * (nx + 1) + f].minus[b][k], e[k], 1e-13);
            EXPECT_NEAR(fl.x_faces[j * (nx + 1) + f].plus[b][k], e[k], 1e-13);
          }
        }
    for (int f = 0; f <= ny; ++f)
      for (int i = 0; i < nx; ++i)
        for (int b = 0; b < 2; ++b) {
          const Vec<3> e = lin(i + GaussRule::nodes[b], f - 0.5);
          for (int k = 0; k < 3; ++k) EXPECT_NEAR(fl.y_faces[f * nx + i].plus[b][k], e[k], 1e-13);
        }
  }
}

// Gauss-point values of x^2 y^2 converge at third order.
TEST(Interfaces2D, ThirdOrderOnSmoothData) {
  const ShallowWater2D m;
  auto err = [&](int n) {
    const double h = 1.0 / n;
    auto avg1 = [&](double a) { return ((a + h) * (a + h) * (a + h) - a * a * a) / (3.0 * h); };
    const auto data = ghosted_2d(n, n, [&](int i, int j) {
      return Vec<3>{1.0 + avg1(i * h) * avg1(j * h), 0.0, 0.0};
    });
    const auto fs = reconstruct_face_gauss_points_2d(m, Ghosted2DView<3>{data, n, n}, false);
    double e = 0.0;
    for (int j = 0; j < n; ++j)
      for (int f = 1; f < n; ++f)
        for (int b = 0; b < 2; ++b) {
          const double x = f * h, y = (j + 0.5 + GaussRule::nodes[b]) * h;
          e = std::max(e, std::abs(fs.x_faces[j * (n + 1) + f].minus[b][0] - (1.0 + x * x * y * y)));
        }
    return e;
  };
  const double e1 = err(32), e2 = err(64);
  EXPECT_GE(e1 / e2, 7.0);
}
