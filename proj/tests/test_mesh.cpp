#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "generators.hpp"

using namespace swnmg;
using swnmg::testing::Gen;

TEST(Mesh1D, UniformSpacingAndCenters) {
  const Mesh1D m = build_uniform_1d(-10.0, 10.0, 80);
  EXPECT_DOUBLE_EQ(m.dx, 0.25);
  EXPECT_DOUBLE_EQ(m.center(0), -9.875);

  const Mesh1D hump = build_uniform_1d(0.0, 25.0, 96);
  EXPECT_DOUBLE_EQ(hump.dx, 25.0 / 96.0);

  const Mesh1D one = build_uniform_1d(0.0, 1.0, 1);
  EXPECT_EQ(one.n_cells, 1);
  EXPECT_DOUBLE_EQ(one.face(0), 0.0);
  EXPECT_DOUBLE_EQ(one.face(1), 1.0);
}

TEST(Mesh1D, RejectsEmptyDomain) {
  EXPECT_THROW(build_uniform_1d(1.0, 1.0, 4), SolverError);
  EXPECT_THROW(build_uniform_1d(0.0, 1.0, 0), SolverError);
  try {
    build_uniform_1d(2.0, 1.0, 4);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_domain);
  }
}

TEST(Mesh2D, UniformSpacing) {
  const Mesh2D hump = build_uniform_2d({-4.0, 4.0, 0.0, 4.0}, 64, 32);
  EXPECT_DOUBLE_EQ(hump.dx, 0.125);
  EXPECT_DOUBLE_EQ(hump.dy, 0.125);

  const Mesh2D wedge = build_uniform_2d({0.0, 4.0, 0.0, 2.0}, 64, 32);
  EXPECT_DOUBLE_EQ(wedge.dx, 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(wedge.dy, 1.0 / 16.0);

  const Mesh2D one = build_uniform_2d({0.0, 1.0, 0.0, 1.0}, 1, 1);
  EXPECT_EQ(one.size(), 1);
  EXPECT_THROW(build_uniform_2d({0.0, 1.0, 1.0, 1.0}, 2, 2), SolverError);
}

TEST(Mesh2D, RowMajorIndexing) {
  const Mesh2D m = build_uniform_2d({0.0, 1.0, 0.0, 1.0}, 5, 3);
  EXPECT_EQ(m.index(0, 0), 0);
  EXPECT_EQ(m.index(4, 0), 4);
  EXPECT_EQ(m.index(0, 1), 5);
  EXPECT_EQ(m.index(4, 2), 14);
}

TEST(Hierarchy, LevelsIn1D) {
  const auto h = build_hierarchy(build_uniform_1d(0.0, 1.0, 96), 12);
  ASSERT_EQ(h.coarsest_level(), 3);
  const int expect[] = {96, 48, 24, 12};
  for (int l = 0; l <= 3; ++l) EXPECT_EQ(h.levels[l].n_cells, expect[l]);

  const auto single = build_hierarchy(build_uniform_1d(0.0, 1.0, 12), 12);
  EXPECT_EQ(single.coarsest_level(), 0);
}

TEST(Hierarchy, LevelsIn2D) {
  const auto h = build_hierarchy(build_uniform_2d({-4.0, 4.0, 0.0, 4.0}, 64, 32), 4);
  ASSERT_EQ(h.coarsest_level(), 3);
  EXPECT_EQ(h.levels[3].nx, 8);
  EXPECT_EQ(h.levels[3].ny, 4);
}

TEST(Hierarchy, OddCountIsNotCoarsenable) {
  try {
    build_hierarchy(build_uniform_1d(0.0, 1.0, 50), 12);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_coarsenable);
  }
}

// Depth equals the number of halvings that keep every direction at or above min_cells.
TEST(HierarchyProperty, DepthMatchesHalvingCount) {
  Gen gen(11);
  for (int t = 0; t < swnmg::testing::property_trials; ++t) {
    const int min_cells = gen.integer(1, 6);
    const int k = gen.integer(0, 5);
    const int base = gen.integer(min_cells, 2 * min_cells - 1);
    const int n = base << k;
    const auto h = build_hierarchy(build_uniform_1d(0.0, 1.0, n), min_cells);
    EXPECT_EQ(h.coarsest_level(), k) << "n " << n << " min " << min_cells;

    const int ky = gen.integer(0, k);
    const int ny = gen.integer(min_cells, 2 * min_cells - 1) << ky;
    const auto h2 = build_hierarchy(build_uniform_2d({0.0, 1.0, 0.0, 1.0}, n, ny), min_cells);
    EXPECT_EQ(h2.coarsest_level(), std::min(k, ky));
  }
}

// Children partition the parent: exact child counts, disjoint sets, widths summing to the parent.
TEST(HierarchyProperty, ChildrenPartitionParents) {
  Gen gen(12);
  for (int t = 0; t < 50; ++t) {
    const int nx = 4 << gen.integer(0, 3);
    const int ny = 4 << gen.integer(0, 3);
    const auto h = build_hierarchy(build_uniform_2d({0.0, gen.uniform(0.5, 3.0), 0.0, 1.0}, nx, ny), 4);
    for (int l = 1; l <= h.coarsest_level(); ++l) {
      std::set<int> seen;
      const Mesh2D& fine = h.levels[l - 1];
      const Mesh2D& coarse = h.levels[l];
      for (int c = 0; c < coarse.size(); ++c) {
        const auto& kids = h.child_map[l][c];
        ASSERT_EQ(kids.size(), 4u);
        for (int k : kids) EXPECT_TRUE(seen.insert(k).second);
        EXPECT_NEAR(4.0 * fine.dx * fine.dy, coarse.dx * coarse.dy, 1e-14);
      }
      EXPECT_EQ(static_cast<int>(seen.size()), fine.size());
    }
    const auto h1 = build_hierarchy(build_uniform_1d(-1.0, 1.0, nx * 3), 3);
    for (int l = 1; l <= h1.coarsest_level(); ++l)
      for (int c = 0; c < h1.levels[l].n_cells; ++c) {
        const auto& kids = h1.child_map[l][c];
        ASSERT_EQ(kids.size(), 2u);
        EXPECT_EQ(kids[0], 2 * c);
        EXPECT_EQ(kids[1], 2 * c + 1);
        EXPECT_NEAR(2.0 * h1.levels[l - 1].dx, h1.levels[l].dx, 1e-15);
      }
  }
}
