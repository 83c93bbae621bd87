#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "poem.hpp"
#include "support/oracles.hpp"

using namespace poem;

TEST(Vector, DistanceExamples) {
  EXPECT_DOUBLE_EQ(distance(Vector{0, 0}, Vector{3, 4}), 5.0);
  const Vector x{1.5, -2.0, 7.0};
  EXPECT_EQ(distance(x, x), 0.0);
  EXPECT_DOUBLE_EQ(distance(Vector{1}, Vector{-1}), 2.0);
}

TEST(Vector, DimensionMismatchThrows) {
  EXPECT_THROW((void)distance(Vector{1, 2}, Vector{1}), std::invalid_argument);
  EXPECT_THROW((void)dot(Vector{1, 2}, Vector{1}), std::invalid_argument);
  Vector a{1, 2};
  EXPECT_THROW(a += Vector{1}, std::invalid_argument);
}

TEST(Vector, NonFiniteRejected) {
  EXPECT_THROW(require_finite(Vector{1.0, std::nan("")}, "x"), std::domain_error);
  EXPECT_THROW(require_finite(Vector{std::numeric_limits<double>::infinity()}, "x"), std::domain_error);
  EXPECT_NO_THROW(require_finite(Vector{0.0, -3.0}, "x"));
}

TEST(CompensatedSum, RecoversSmallTermsLostByNaiveSum) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000000; ++i) s.add(1e-16);
  EXPECT_NEAR(s.value(), 1.0 + 1e-10, 1e-15);
}

TEST(Domain, BallProjectionExamples) {
  const Domain ball = Domain::centered_ball(3, 1.0);
  const Vector far{2.0, 0.0, 0.0};
  EXPECT_EQ(project(ball, far), (Vector{1.0, 0.0, 0.0}));
  const Vector x{1.2, -0.4, 1.0};
  const Vector scaled = (2.0 / norm(x)) * x;
  const Vector p = project(ball, scaled);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(p[i], scaled[i] / 2.0, 1e-15);
  const Vector inner = (0.5 / norm(x)) * x;
  EXPECT_EQ(project(ball, inner), inner);
}

TEST(Domain, BallBoundaryPointUnchanged) {
  const Domain ball = Domain::centered_ball(2, 1.0);
  const Vector e{0.6, 0.8};
  EXPECT_EQ(project(ball, e), e);
}

TEST(Domain, BoxProjectionClamps) {
  const Domain box = Domain::box(Vector{0, 0}, Vector{1, 1});
  EXPECT_EQ(project(box, Vector{-1, 0.5}), (Vector{0, 0.5}));
  EXPECT_EQ(project(box, Vector{3, -2}), (Vector{1, 0}));
}

TEST(Domain, UnboundedIsIdentity) {
  const Domain u = Domain::unbounded(2);
  EXPECT_EQ(project(u, Vector{1e9, -3}), (Vector{1e9, -3}));
  EXPECT_FALSE(u.is_bounded());
}

TEST(Domain, DiameterExamples) {
  EXPECT_DOUBLE_EQ(diameter(Domain::centered_ball(4, 1.0)), 2.0);
  EXPECT_DOUBLE_EQ(diameter(Domain::box(Vector{0, 0}, Vector{3, 4})), 5.0);
  EXPECT_TRUE(std::isinf(diameter(Domain::unbounded(7))));
}

TEST(Domain, InvalidConstructionThrows) {
  EXPECT_THROW(Domain::centered_ball(2, 0.0), std::invalid_argument);
  EXPECT_THROW(Domain::centered_ball(2, -1.0), std::invalid_argument);
  EXPECT_THROW(Domain::box(Vector{0, 2}, Vector{1, 1}), std::invalid_argument);
  EXPECT_THROW(Domain::box(Vector{0}, Vector{1, 1}), std::invalid_argument);
}

TEST(Domain, ProjectionDimensionMismatchThrows) {
  EXPECT_THROW((void)project(Domain::centered_ball(2, 1.0), Vector{1, 2, 3}), std::invalid_argument);
  EXPECT_THROW((void)project(Domain::unbounded(2), Vector{1}), std::invalid_argument);
}

namespace {

std::vector<Domain> test_domains() {
  return {Domain::centered_ball(5, 1.0), Domain::ball(Vector{0.3, -1, 2, 0, 5}, 2.5),
          Domain::box(Vector{-1, 0, -2, 1, 0}, Vector{1, 0.5, 2, 3, 0}), Domain::unbounded(5)};
}

}  // namespace

TEST(DomainProperty, IdempotentExactly) {
  RngStream rng(101);
  for (const auto& dom : test_domains()) {
    for (int i = 0; i < 5000; ++i) {
      const Vector x = oracle::random_gaussian(rng, 5, 3.0);
      const Vector p = dom.project(x);
      EXPECT_EQ(dom.project(p), p);
    }
  }
}

TEST(DomainProperty, Nonexpansive) {
  RngStream rng(102);
  for (const auto& dom : test_domains()) {
    for (int i = 0; i < 5000; ++i) {
      const Vector x = oracle::random_gaussian(rng, 5, 3.0);
      const Vector y = oracle::random_gaussian(rng, 5, 3.0);
      EXPECT_LE(distance(dom.project(x), dom.project(y)), distance(x, y) + 1e-12);
    }
  }
}

TEST(DomainProperty, MembershipAfterProjection) {
  RngStream rng(103);
  for (const auto& dom : test_domains()) {
    for (int i = 0; i < 5000; ++i) {
      const Vector p = dom.project(oracle::random_gaussian(rng, 5, 10.0));
      EXPECT_TRUE(dom.contains(p));
    }
  }
}

TEST(DomainProperty, BallProjectionIsNearestAmongSampledFeasiblePoints) {
  // Brute-force oracle: no sampled feasible point is closer than the projection.
  RngStream rng(104);
  const Domain ball = Domain::ball(Vector{1, -1}, 0.7);
  for (int i = 0; i < 200; ++i) {
    const Vector x = oracle::random_gaussian(rng, 2, 3.0);
    const double best = distance(ball.project(x), x);
    for (int j = 0; j < 200; ++j) {
      Vector cand = sample_unit_ball(rng, 2);
      cand *= 0.7;
      cand += Vector{1, -1};
      EXPECT_LE(best, distance(cand, x) + 1e-12);
    }
  }
}
