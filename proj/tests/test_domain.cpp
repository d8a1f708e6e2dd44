#include <catch2/catch_amalgamated.hpp>

#include "iflh/geometry.hpp"
#include "iflh/rng.hpp"
#include "test_support.hpp"

using iflh::Domain;
using iflh::Mat;
using iflh::Vec;

namespace {
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("ball projection") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);

  SECTION("outside point scales radially") {
    const Vec p = ball.project(v2(3.0, 0.0));
    REQUIRE(p[0] == Catch::Approx(1.0).margin(1e-15));
    REQUIRE(p[1] == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("interior point is fixed") {
    const Vec p = ball.project(v2(0.2, 0.3));
    REQUIRE(p == v2(0.2, 0.3));
  }
  SECTION("idempotent and feasible on random points") {
    iflh::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
      const Vec p = 4.0 * rng.gaussian_vec(2);
      const Vec q = ball.project(p);
      REQUIRE(ball.contains(q, 1e-12));
      REQUIRE((ball.project(q) - q).norm() <= 1e-12);
    }
  }
}

TEST_CASE("box projection clamps coordinates") {
  const Domain box = Domain::box(v2(0.0, 0.0), v2(1.0, 1.0));
  const Vec p = box.project(v2(-1.0, 0.5));
  REQUIRE(p == v2(0.0, 0.5));
  REQUIRE(box.project(p) == p);
}

TEST_CASE("projection is non-expansive") {
  iflh::Rng rng(17);
  const Domain ball = Domain::ball(v2(0.3, -0.1), 0.8);
  const Domain box = Domain::box(v2(-1.0, 0.0), v2(0.5, 2.0));
  for (const Domain& dom : {ball, box}) {
    for (int i = 0; i < 300; ++i) {
      const Vec x = 3.0 * rng.gaussian_vec(2);
      const Vec y = 3.0 * rng.gaussian_vec(2);
      REQUIRE((dom.project(x) - dom.project(y)).norm() <= (x - y).norm() + 1e-9);
    }
  }
}

TEST_CASE("diameter matches the declared shape") {
  REQUIRE(Domain::ball(Vec::Zero(3), 2.5).diameter() == Catch::Approx(5.0));
  REQUIRE(Domain::box(v2(0.0, 0.0), v2(3.0, 4.0)).diameter() == Catch::Approx(5.0));
}

TEST_CASE("domain constructors reject bad shapes") {
  REQUIRE_THROWS_AS(Domain::ball(Vec::Zero(2), 0.0), iflh::InvalidParameter);
  REQUIRE_THROWS_AS(Domain::ball(Vec::Zero(2), -1.0), iflh::InvalidParameter);
  REQUIRE_THROWS_AS(Domain::box(v2(0.0, 0.0), v2(1.0, 0.0)), iflh::InvalidParameter);
  REQUIRE_THROWS_AS(Domain::box(v2(1.0, 0.0), v2(0.0, 1.0)), iflh::InvalidParameter);
}

TEST_CASE("generalized projection with the identity metric equals the Euclidean one") {
  const Domain ball = Domain::ball(v2(0.1, 0.2), 1.5);
  const Mat eye = Mat::Identity(2, 2);
  iflh::Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const Vec p = 5.0 * rng.gaussian_vec(2);
    REQUIRE((iflh::project_mahalanobis(ball, eye, p) - ball.project(p)).norm() <= 1e-9);
  }
}

TEST_CASE("generalized projection fixes interior points") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  Mat a(2, 2);
  a << 4.0, 1.0, 1.0, 3.0;
  const Vec p = v2(0.4, -0.2);
  REQUIRE(iflh::project_mahalanobis(ball, a, p) == p);
}

TEST_CASE("generalized projection minimizes the metric distance") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  Mat a(2, 2);
  a << 4.0, 0.0, 0.0, 1.0;
  const Vec p = v2(2.0, 0.0);
  const Vec w = iflh::project_mahalanobis(ball, a, p);
  REQUIRE(w[0] == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(w[1] == Catch::Approx(0.0).margin(1e-9));

  // dense sweep of the boundary circle as the oracle: our point must be
  // feasible and at least as good as every grid candidate
  const auto objective = [&](const Vec& x) { return ((x - p).transpose() * a * (x - p))(0); };
  REQUIRE(ball.contains(w, 1e-12));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200000; ++i) {
    const double phi = 2.0 * M_PI * i / 200000.0;
    best = std::min(best, objective(v2(std::cos(phi), std::sin(phi))));
  }
  REQUIRE(objective(w) <= best + 1e-9);
}

TEST_CASE("generalized projection against a random-metric grid oracle") {
  iflh::Rng rng(31);
  const Domain ball = Domain::ball(v2(0.2, -0.3), 0.9);
  for (int trial = 0; trial < 20; ++trial) {
    Mat g = rng.gaussian_vec(2) * rng.gaussian_vec(2).transpose();
    Mat a = g * g.transpose() + 0.3 * Mat::Identity(2, 2);
    const Vec p = ball.ball_center() + 3.0 * rng.unit_vector(2);
    const Vec w = iflh::project_mahalanobis(ball, a, p);
    REQUIRE(ball.contains(w, 1e-12));
    const auto objective = [&](const Vec& x) { return ((x - p).transpose() * a * (x - p))(0); };
    for (int i = 0; i < 20000; ++i) {
      const double phi = 2.0 * M_PI * i / 20000.0;
      const Vec cand = ball.ball_center() +
                       ball.ball_radius() * v2(std::cos(phi), std::sin(phi));
      REQUIRE(objective(w) <= objective(cand) + 1e-9);
    }
  }
}

TEST_CASE("generalized projection rejects bad inputs") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  const Domain box = Domain::box(v2(0.0, 0.0), v2(1.0, 1.0));
  Mat indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  Mat asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  REQUIRE_THROWS_AS(iflh::project_mahalanobis(box, Mat::Identity(2, 2), v2(2.0, 0.0)),
                    iflh::UnsupportedDomain);
  REQUIRE_THROWS_AS(iflh::project_mahalanobis(ball, indefinite, v2(2.0, 0.0)),
                    iflh::NonPsdMatrix);
  REQUIRE_THROWS_AS(iflh::project_mahalanobis(ball, asym, v2(2.0, 0.0)), iflh::NonPsdMatrix);
}

TEST_CASE("shrunk domains stay inside the original") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  const Domain inner = ball.shrunk(0.25);
  REQUIRE(inner.ball_radius() == Catch::Approx(0.75));
  REQUIRE_THROWS_AS(ball.shrunk(1.0), iflh::InvalidParameter);
}
