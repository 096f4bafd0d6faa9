#include <algorithm>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "faca/prediction.hpp"

namespace faca {
namespace {

// Brute force over an evenly spaced grid of n points on [0, horizon].
double grid_min(Vec2 s_i, Vec2 v_i, Vec2 s_j, Vec2 v_j, double horizon, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double t = horizon * k / (n - 1);
    best = std::min(best, distance(s_i + v_i * t, s_j + v_j * t));
  }
  return best;
}

TEST(ClosestApproach, HeadOn) {
  const ApproachResult r = closest_approach({0, 0}, {1, 0}, {10, 0}, {-1, 0}, 10.0);
  EXPECT_DOUBLE_EQ(r.t_star, 5.0);
  EXPECT_DOUBLE_EQ(r.d_min, 0.0);
}

TEST(ClosestApproach, ParallelKeepsSeparation) {
  const ApproachResult r = closest_approach({0, 0}, {2, 1}, {3, 4}, {2, 1}, 10.0);
  EXPECT_EQ(r.t_star, 0.0);
  EXPECT_DOUBLE_EQ(r.d_min, 5.0);
}

TEST(ClosestApproach, PassingStaticPoint) {
  const ApproachResult r = closest_approach({0, 0}, {1, 0}, {4, 3}, {0, 0}, 10.0);
  EXPECT_DOUBLE_EQ(r.t_star, 4.0);
  EXPECT_DOUBLE_EQ(r.d_min, 3.0);
  EXPECT_NEAR(grid_min({0, 0}, {1, 0}, {4, 3}, {0, 0}, 10.0, 10000), 3.0, 1e-6);
}

TEST(ClosestApproach, ClampsToHorizon) {
  const ApproachResult r = closest_approach({0, 0}, {1, 0}, {100, 0}, {0, 0}, 5.0);
  EXPECT_DOUBLE_EQ(r.t_star, 5.0);
  EXPECT_DOUBLE_EQ(r.d_min, 95.0);
}

TEST(ClosestApproach, DivergingClampsToNow) {
  const ApproachResult r = closest_approach({0, 0}, {-1, 0}, {3, 0}, {1, 0}, 5.0);
  EXPECT_EQ(r.t_star, 0.0);
  EXPECT_DOUBLE_EQ(r.d_min, 3.0);
}

TEST(ClosestApproach, RejectsNonPositiveHorizon) {
  EXPECT_THROW(closest_approach({0, 0}, {1, 0}, {1, 0}, {0, 0}, 0.0), InvalidArgument);
}

TEST(ClosestApproach, MatchesGridSearch) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(-50.0, 50.0);
  std::uniform_real_distribution<double> vel(-15.0, 15.0);
  std::uniform_real_distribution<double> hor(0.5, 10.0);
  for (int k = 0; k < 200; ++k) {
    const Vec2 s_i{pos(rng), pos(rng)}, v_i{vel(rng), vel(rng)};
    const Vec2 s_j{pos(rng), pos(rng)}, v_j{vel(rng), vel(rng)};
    const double h = hor(rng);
    const ApproachResult r = closest_approach(s_i, v_i, s_j, v_j, h);
    // The analytic minimum is never above any sampled point.
    const double grid = grid_min(s_i, v_i, s_j, v_j, h, 20001);
    EXPECT_LE(r.d_min, grid + 1e-9);
    EXPECT_NEAR(r.d_min, grid, 1e-3 * std::max(1.0, distance(s_i, s_j)));
    EXPECT_GE(r.t_star, 0.0);
    EXPECT_LE(r.t_star, h);
  }
}

TEST(ClosestApproach, SymmetricInPair) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int k = 0; k < 500; ++k) {
    const Vec2 s_i{u(rng), u(rng)}, v_i{u(rng), u(rng)};
    const Vec2 s_j{u(rng), u(rng)}, v_j{u(rng), u(rng)};
    const ApproachResult a = closest_approach(s_i, v_i, s_j, v_j, 5.0);
    const ApproachResult b = closest_approach(s_j, v_j, s_i, v_i, 5.0);
    EXPECT_NEAR(a.d_min, b.d_min, 1e-12 * std::max(1.0, a.d_min));
    EXPECT_NEAR(a.t_star, b.t_star, 1e-12);
  }
}

TEST(ClosestApproach, ClosingNeverExceedsSeparation) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  int closing = 0;
  for (int k = 0; k < 2000; ++k) {
    const Vec2 s_i{u(rng), u(rng)}, v_i{u(rng), u(rng)};
    const Vec2 s_j{u(rng), u(rng)}, v_j{u(rng), u(rng)};
    if (dot(s_i - s_j, v_i - v_j) >= 0.0) continue;
    ++closing;
    EXPECT_LE(closest_approach(s_i, v_i, s_j, v_j, 5.0).d_min, distance(s_i, s_j));
  }
  EXPECT_GT(closing, 500);
}

TEST(CollisionImminent, Examples) {
  EXPECT_TRUE(collision_imminent({0, 0}, {1, 0}, {10, 0}, {-1, 0}, 1.0, 10.0));
  EXPECT_FALSE(collision_imminent({0, 0}, {1, 0}, {0, 5}, {1, 0}, 1.0, 10.0));
  // Grazing at exactly the threshold is not a conflict.
  EXPECT_FALSE(collision_imminent({0, 0}, {1, 0}, {4, 1}, {0, 0}, 1.0, 10.0));
  EXPECT_THROW(collision_imminent({0, 0}, {1, 0}, {4, 1}, {0, 0}, 0.0, 10.0), InvalidArgument);
}

}  // namespace
}  // namespace faca
