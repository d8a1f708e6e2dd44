#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "iflh/config.hpp"
#include "iflh/losses.hpp"
#include "iflh/rng.hpp"

namespace iflh {

// A synthesized non-stationary loss sequence with its realized drift
// path and stream-level curvature constants. The variation total is
// computed from the closed-form pairwise variation as the stream is
// built; for the quadratic families it is exact.
struct StreamData {
  Domain domain = Domain::ball(Vec::Zero(1), 1.0);
  std::vector<LossFunction> losses;
  std::vector<Vec> centers;  // per-round loss parameter (center / direction / feature)
  double variation_total = 0.0;
  bool variation_exact = true;
  double grad_bound = 0.0;   // envelope over the stream
  double lambda = 0.0;       // shared strong convexity (0 for log-loss)
  double alpha = 0.0;        // exp-concavity valid for every round
};

namespace detail {

// Fixed-chord rotation on the sphere of radius rho around `origin`:
// move by `chord` in a random tangent direction and renormalize by
// construction, so consecutive parameters keep their distance exact.
inline Vec sphere_step(const Vec& origin, const Vec& c, double rho, double chord, Rng& rng) {
  const Vec u = (c - origin) / rho;
  Vec v;
  for (;;) {
    Vec g = rng.gaussian_vec(static_cast<int>(u.size()));
    g -= g.dot(u) * u;
    const double n = g.norm();
    if (n > 1e-12) {
      v = g / n;
      break;
    }
  }
  const double theta = 2.0 * std::asin(0.5 * chord / rho);
  return origin + rho * (std::cos(theta) * u + std::sin(theta) * v);
}

inline LossFunction make_loss(const ExperimentConfig& cfg, const Domain& domain, const Vec& c) {
  switch (cfg.family) {
    case LossFunction::Family::shifted_quadratic:
      return LossFunction::shifted_quadratic(domain, c, cfg.scale);
    case LossFunction::Family::regularized_linear:
      return LossFunction::regularized_linear(domain, c, cfg.scale);
    case LossFunction::Family::log_loss:
      return LossFunction::log_loss(domain, c, 1);
  }
  throw InvalidConfig("unknown loss family");
}

}  // namespace detail

inline StreamData generate_stream(const ExperimentConfig& cfg) {
  validate_config(cfg);
  StreamData out;
  out.domain = cfg.make_domain();
  const std::int64_t t_max = cfg.rounds;
  Rng rng(cfg.seed);

  // realized parameter path
  out.centers.reserve(static_cast<std::size_t>(t_max));
  if (out.domain.kind() == Domain::Kind::ball) {
    const double rho = cfg.drift_radius();
    const Vec origin = out.domain.ball_center();
    Vec c = origin + rho * rng.unit_vector(cfg.dim);
    if (cfg.drift == DriftKind::stationary) {
      out.centers.assign(static_cast<std::size_t>(t_max), c);
    } else if (cfg.drift == DriftKind::continuous) {
      out.centers.push_back(c);
      for (std::int64_t t = 2; t <= t_max; ++t) {
        c = detail::sphere_step(origin, c, rho, cfg.step_size, rng);
        out.centers.push_back(c);
      }
    } else {
      std::set<std::int64_t> switches;
      const std::int64_t want = std::min<std::int64_t>(cfg.num_switches, t_max - 1);
      while (static_cast<std::int64_t>(switches.size()) < want) {
        switches.insert(rng.uniform_int(2, t_max));
      }
      for (std::int64_t t = 1; t <= t_max; ++t) {
        if (switches.count(t)) c = detail::sphere_step(origin, c, rho, cfg.jump_size, rng);
        out.centers.push_back(c);
      }
    }
  } else {
    // box environments drift by clamped steps inside a shrunk copy
    const Domain inner = out.domain.shrunk(0.25 * out.domain.diameter() /
                                           std::sqrt(static_cast<double>(cfg.dim)));
    Vec c(cfg.dim);
    for (int i = 0; i < cfg.dim; ++i) {
      c[i] = rng.uniform(inner.box_lower()[i], inner.box_upper()[i]);
    }
    std::set<std::int64_t> switches;
    if (cfg.drift == DriftKind::piecewise) {
      const std::int64_t want = std::min<std::int64_t>(cfg.num_switches, t_max - 1);
      while (static_cast<std::int64_t>(switches.size()) < want) {
        switches.insert(rng.uniform_int(2, t_max));
      }
    }
    for (std::int64_t t = 1; t <= t_max; ++t) {
      if (t > 1 && cfg.drift == DriftKind::continuous) {
        c = inner.project(Vec(c + cfg.step_size * rng.unit_vector(cfg.dim)));
      } else if (cfg.drift == DriftKind::piecewise && switches.count(t)) {
        c = inner.project(Vec(c + cfg.jump_size * rng.unit_vector(cfg.dim)));
      }
      out.centers.push_back(c);
    }
  }

  // losses plus running analytic variation and curvature envelopes
  out.losses.reserve(static_cast<std::size_t>(t_max));
  for (std::int64_t t = 1; t <= t_max; ++t) {
    out.losses.push_back(detail::make_loss(cfg, out.domain,
                                           out.centers[static_cast<std::size_t>(t - 1)]));
    const LossFunction& f = out.losses.back();
    out.grad_bound = std::max(out.grad_bound, f.grad_bound());
    out.alpha = (t == 1) ? f.exp_concavity() : std::min(out.alpha, f.exp_concavity());
    if (t >= 2) {
      const Variation v =
          pairwise_variation(f, out.losses[static_cast<std::size_t>(t - 2)], out.domain);
      out.variation_total += v.value;
      out.variation_exact = out.variation_exact && v.exact;
    }
  }
  out.lambda = cfg.family == LossFunction::Family::log_loss ? 0.0 : cfg.scale;
  // the per-round exp-concavity above uses each round's own gradient
  // bound; rounds share the envelope G, so the stream-level value for
  // the quadratic families is lambda / G^2
  if (out.lambda > 0.0) out.alpha = derive_expconcavity(out.lambda, out.grad_bound);
  return out;
}

// Step length that realizes a target total variation with the
// fixed-chord spherical walk: each move contributes scale * R * chord.
inline double step_for_target_variation(double target, std::int64_t rounds, double scale,
                                        double ball_radius) {
  if (rounds < 2 || !(scale > 0.0) || !(ball_radius > 0.0) || target < 0.0) {
    throw InvalidParameter("bad arguments for the variation-targeting step");
  }
  return target / (static_cast<double>(rounds - 1) * scale * ball_radius);
}

}  // namespace iflh
