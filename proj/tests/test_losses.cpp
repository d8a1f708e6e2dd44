#include <catch2/catch_amalgamated.hpp>

#include "iflh/losses.hpp"
#include "test_support.hpp"

using iflh::Domain;
using iflh::LossFunction;
using iflh::Mat;
using iflh::Variation;
using iflh::Vec;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::vector<LossFunction> all_families(const Domain& dom) {
  return {
      LossFunction::shifted_quadratic(dom, v2(0.3, -0.2), 1.5),
      LossFunction::regularized_linear(dom, v2(-0.4, 0.6), 0.8),
      LossFunction::log_loss(dom, v2(0.9, -0.5), -1),
  };
}

}  // namespace

TEST_CASE("strong convexity to exp-concavity conversion") {
  REQUIRE(iflh::derive_expconcavity(1.0, 1.0) == 1.0);
  REQUIRE(iflh::derive_expconcavity(2.0, 4.0) == Catch::Approx(0.125));
  REQUIRE(iflh::derive_expconcavity(0.5, 5.0) == Catch::Approx(0.02));
  REQUIRE_THROWS_AS(iflh::derive_expconcavity(0.0, 1.0), iflh::InvalidParameter);
  REQUIRE_THROWS_AS(iflh::derive_expconcavity(1.0, -2.0), iflh::InvalidParameter);
}

TEST_CASE("gradients agree with central differences") {
  const Domain ball = Domain::ball(v2(0.1, 0.1), 1.0);
  const Domain box = Domain::box(v2(-1.0, -0.5), v2(0.5, 1.5));
  iflh::Rng rng(5);
  for (const Domain& dom : {ball, box}) {
    for (const LossFunction& f : all_families(dom)) {
      for (int i = 0; i < 50; ++i) {
        const Vec w = testsupport::random_point(dom, rng);
        const Vec dir = rng.unit_vector(2);
        const double fd = testsupport::directional_fd(f, w, dir);
        const double an = f.gradient(w).dot(dir);
        REQUIRE(std::abs(fd - an) <= 1e-5 * (1.0 + std::abs(f.value(w))));
      }
    }
  }
}

TEST_CASE("declared gradient bounds dominate sampled gradients") {
  const Domain ball = Domain::ball(v2(0.2, -0.1), 0.9);
  const Domain box = Domain::box(v2(-1.0, 0.0), v2(1.0, 2.0));
  iflh::Rng rng(7);
  for (const Domain& dom : {ball, box}) {
    for (const LossFunction& f : all_families(dom)) {
      for (int i = 0; i < 500; ++i) {
        Vec w = testsupport::random_point(dom, rng);
        if (dom.kind() == Domain::Kind::ball && i % 2 == 0) {
          // boundary points stress the bound hardest
          w = dom.ball_center() + dom.ball_radius() * rng.unit_vector(2);
        }
        REQUIRE(f.gradient(w).norm() <= f.grad_bound() + 1e-12);
      }
    }
  }
}

TEST_CASE("quadratic minimizer is the projected center") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  SECTION("interior center is exact") {
    const LossFunction f = LossFunction::shifted_quadratic(ball, v2(0.3, 0.1), 2.0);
    REQUIRE((iflh::loss_minimizer(f, ball) - v2(0.3, 0.1)).norm() <= 1e-15);
  }
  SECTION("exterior center projects to the boundary") {
    const LossFunction f = LossFunction::shifted_quadratic(ball, v2(3.0, 0.0), 2.0);
    REQUIRE((iflh::loss_minimizer(f, ball) - v2(1.0, 0.0)).norm() <= 1e-15);
  }
}

TEST_CASE("regularized linear minimizer matches the grid oracle") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  iflh::Rng rng(13);
  for (int i = 0; i < 10; ++i) {
    const Vec a = 1.5 * rng.gaussian_vec(2);
    const LossFunction f = LossFunction::regularized_linear(ball, a, 0.7);
    const Vec w = iflh::loss_minimizer(f, ball);
    const auto [best, arg] = testsupport::grid_min(ball, [&](const Vec& x) { return f.value(x); });
    REQUIRE(f.value(w) <= best + 1e-9);
    REQUIRE(ball.contains(w, 1e-12));
  }
}

TEST_CASE("log-loss minimizer solves to the gradient-mapping tolerance") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  const LossFunction f = LossFunction::log_loss(ball, v2(1.2, -0.4), 1);
  const Vec w = iflh::loss_minimizer(f, ball);

  const double lips = 0.25 * f.param().squaredNorm();
  const Vec next = ball.project(w - (1.0 / lips) * f.gradient(w));
  REQUIRE((w - next).norm() * lips <= 1e-8 * 1.001);

  const auto [best, arg] = testsupport::grid_min(ball, [&](const Vec& x) { return f.value(x); });
  REQUIRE(f.value(w) <= best + 1e-6);
}

TEST_CASE("minimizers have nonnegative directional derivatives") {
  const Domain ball = Domain::ball(v2(0.1, 0.0), 0.8);
  iflh::Rng rng(19);
  const std::vector<LossFunction> losses = {
      LossFunction::shifted_quadratic(ball, v2(2.0, 1.0), 1.0),
      LossFunction::regularized_linear(ball, v2(0.9, -0.3), 0.5),
      LossFunction::log_loss(ball, v2(1.0, 0.7), 1),
  };
  for (const LossFunction& f : losses) {
    const Vec w = iflh::loss_minimizer(f, ball);
    for (int i = 0; i < 20; ++i) {
      const Vec target = testsupport::random_point(ball, rng);
      Vec dir = target - w;
      if (dir.norm() < 1e-12) continue;
      dir /= dir.norm();
      REQUIRE(f.gradient(w).dot(dir) >= -1e-7);
    }
  }
}

TEST_CASE("pairwise variation of identical losses is zero") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  const LossFunction f = LossFunction::shifted_quadratic(ball, v2(0.2, 0.4), 1.3);
  const Variation v = iflh::pairwise_variation(f, f, ball);
  REQUIRE(v.value == 0.0);
  REQUIRE(v.exact);
}

TEST_CASE("quadratic pair variation has the affine closed form") {
  // with equal scales over a centered ball the difference is affine and
  // the sup is scale * R |c1 - c2| + (scale/2) | |c1|^2 - |c2|^2 |
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  iflh::Rng rng(29);
  for (int i = 0; i < 8; ++i) {
    const Vec c1 = 0.8 * rng.unit_vector(2) * rng.uniform01();
    const Vec c2 = 0.8 * rng.unit_vector(2) * rng.uniform01();
    const double lambda = 0.5 + rng.uniform01();
    const LossFunction f = LossFunction::shifted_quadratic(ball, c1, lambda);
    const LossFunction g = LossFunction::shifted_quadratic(ball, c2, lambda);
    const Variation v = iflh::pairwise_variation(f, g, ball);
    REQUIRE(v.exact);
    const double expected = lambda * (c1 - c2).norm() +
                            0.5 * lambda * std::abs(c1.squaredNorm() - c2.squaredNorm());
    REQUIRE(v.value == Catch::Approx(expected).margin(1e-12));
    const double sampled =
        testsupport::grid_max_abs(ball, [&](const Vec& w) { return f.value(w) - g.value(w); });
    REQUIRE(v.value >= sampled - 1e-9);
    REQUIRE(v.value <= sampled + 2e-2 * (1.0 + sampled));
  }
}

TEST_CASE("constant offsets shift the variation by their magnitude") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  const LossFunction f = LossFunction::regularized_linear(ball, v2(0.5, -0.2), 0.9);
  const LossFunction g = LossFunction::regularized_linear(ball, v2(0.5, -0.2), 0.9, -0.75);
  const Variation v = iflh::pairwise_variation(f, g, ball);
  REQUIRE(v.exact);
  REQUIRE(v.value == Catch::Approx(0.75).margin(1e-15));
}

TEST_CASE("mixed-family quadratic variation matches the grid") {
  const Domain ball = Domain::ball(v2(0.1, -0.1), 0.9);
  const LossFunction f = LossFunction::shifted_quadratic(ball, v2(0.4, 0.2), 1.2);
  const LossFunction g = LossFunction::regularized_linear(ball, v2(-0.3, 0.5), 0.6);
  const Variation v = iflh::pairwise_variation(f, g, ball);
  REQUIRE(v.exact);
  const double sampled =
      testsupport::grid_max_abs(ball, [&](const Vec& w) { return f.value(w) - g.value(w); });
  REQUIRE(v.value >= sampled - 1e-9);
  REQUIRE(v.value <= sampled + 2e-2 * (1.0 + sampled));
}

TEST_CASE("variation over boxes uses the separable closed form") {
  const Domain box = Domain::box(v2(-1.0, -0.5), v2(0.5, 1.0));
  const LossFunction f = LossFunction::shifted_quadratic(box, v2(0.3, 0.3), 1.1);
  const LossFunction g = LossFunction::shifted_quadratic(box, v2(-0.4, 0.1), 0.7);
  const Variation v = iflh::pairwise_variation(f, g, box);
  REQUIRE(v.exact);
  const double sampled =
      testsupport::grid_max_abs(box, [&](const Vec& w) { return f.value(w) - g.value(w); });
  REQUIRE(v.value >= sampled - 1e-9);
  REQUIRE(v.value <= sampled + 2e-2 * (1.0 + sampled));
}

TEST_CASE("log-loss variation is flagged approximate and lower-bounds nothing it saw") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  const LossFunction f = LossFunction::log_loss(ball, v2(1.0, 0.2), 1);
  const LossFunction g = LossFunction::log_loss(ball, v2(-0.6, 0.8), 1);
  const Variation v = iflh::pairwise_variation(f, g, ball);
  REQUIRE_FALSE(v.exact);
  iflh::Rng rng(37);
  for (int i = 0; i < 2000; ++i) {
    const Vec w = testsupport::random_point(ball, rng);
    REQUIRE(v.value >= std::abs(f.value(w) - g.value(w)) - 1e-6);
  }
}

TEST_CASE("variation is symmetric and satisfies the triangle inequality") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  iflh::Rng rng(41);
  for (int i = 0; i < 30; ++i) {
    const LossFunction f =
        LossFunction::shifted_quadratic(ball, 0.7 * rng.unit_vector(2), 0.5 + rng.uniform01());
    const LossFunction g =
        LossFunction::shifted_quadratic(ball, 0.7 * rng.unit_vector(2), 0.5 + rng.uniform01());
    const LossFunction h =
        LossFunction::regularized_linear(ball, 0.7 * rng.unit_vector(2), 0.5 + rng.uniform01());
    const double fg = iflh::pairwise_variation(f, g, ball).value;
    const double gf = iflh::pairwise_variation(g, f, ball).value;
    REQUIRE(fg == Catch::Approx(gf).margin(1e-9));
    const double fh = iflh::pairwise_variation(f, h, ball).value;
    const double gh = iflh::pairwise_variation(g, h, ball).value;
    REQUIRE(fh <= fg + gh + 1e-9);
  }
}

TEST_CASE("exp-concavity certificate holds at the derived parameter") {
  // alpha grad grad' must stay below the Hessian; Hessians come from
  // finite differences of the gradient, which is exact here
  const Domain ball = Domain::ball(v2(0.1, 0.2), 1.0);
  iflh::Rng rng(43);
  const std::vector<LossFunction> strongly_convex = {
      LossFunction::shifted_quadratic(ball, v2(0.5, -0.3), 1.7),
      LossFunction::regularized_linear(ball, v2(0.6, 0.4), 0.9),
  };
  for (const LossFunction& f : strongly_convex) {
    const double alpha = iflh::derive_expconcavity(f.strong_convexity(), f.grad_bound());
    REQUIRE(alpha == Catch::Approx(f.exp_concavity()));
    for (int i = 0; i < 100; ++i) {
      const Vec w = testsupport::random_point(ball, rng);
      const Vec g = f.gradient(w);
      const Mat m = testsupport::fd_hessian(f, w) - alpha * (g * g.transpose());
      Eigen::SelfAdjointEigenSolver<Mat> es(m);
      REQUIRE(es.eigenvalues().minCoeff() >= -1e-9);
    }
  }
  // log-loss is not strongly convex; its own construction-time
  // parameter must satisfy the same matrix inequality
  const LossFunction ll = LossFunction::log_loss(ball, v2(0.8, -0.6), 1);
  for (int i = 0; i < 100; ++i) {
    const Vec w = testsupport::random_point(ball, rng);
    const Vec g = ll.gradient(w);
    const Mat m = ll.hessian(w) - ll.exp_concavity() * (g * g.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    REQUIRE(es.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("loss constructors validate their inputs") {
  const Domain ball = Domain::ball(Vec::Zero(2), 1.0);
  REQUIRE_THROWS_AS(LossFunction::shifted_quadratic(ball, v2(0.0, 0.0), 0.0),
                    iflh::InvalidParameter);
  REQUIRE_THROWS_AS(LossFunction::shifted_quadratic(ball, Vec::Zero(3), 1.0),
                    iflh::InvalidParameter);
  REQUIRE_THROWS_AS(LossFunction::log_loss(ball, v2(1.0, 0.0), 2), iflh::InvalidParameter);
}
