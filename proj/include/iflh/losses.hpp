#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "iflh/geometry.hpp"
#include "iflh/rng.hpp"

namespace iflh {

// Canonical isotropic quadratic (mu/2)|w|^2 + <v, w> + kappa. The two
// quadratic loss families reduce to this form, which is what makes
// interval minimization and pairwise variation exactly solvable.
struct QuadForm {
  double mu = 0.0;
  Vec v;
  double kappa = 0.0;
};

struct Extremes {
  double min = 0.0;
  double max = 0.0;
};

namespace detail {

// min/max of (mu/2)x^2 + v x over [lo, hi]
inline Extremes scalar_quad_extremes(double mu, double v, double lo, double hi) {
  const double at_lo = 0.5 * mu * lo * lo + v * lo;
  const double at_hi = 0.5 * mu * hi * hi + v * hi;
  Extremes e{std::min(at_lo, at_hi), std::max(at_lo, at_hi)};
  if (mu != 0.0) {
    const double x = -v / mu;
    if (x > lo && x < hi) {
      const double at_x = 0.5 * mu * x * x + v * x;
      if (mu > 0.0) e.min = at_x; else e.max = at_x;
    }
  }
  return e;
}

}  // namespace detail

// Exact extreme values of a canonical quadratic over the domain.
// Balls: radial reduction around the center. Boxes: the form is
// separable, so per-coordinate scalar extremes add up.
inline Extremes quadratic_extremes(const QuadForm& q, const Domain& domain) {
  if (domain.kind() == Domain::Kind::ball) {
    const Vec& o = domain.ball_center();
    const double r = domain.ball_radius();
    const Vec b = q.v + q.mu * o;
    const double bn = b.norm();
    const double c0 = 0.5 * q.mu * o.squaredNorm() + q.v.dot(o) + q.kappa;
    const double shell = 0.5 * q.mu * r * r;
    Extremes e;
    if (q.mu > 0.0) {
      e.max = c0 + shell + r * bn;
      e.min = (bn / q.mu <= r) ? c0 - bn * bn / (2.0 * q.mu) : c0 + shell - r * bn;
    } else if (q.mu < 0.0) {
      e.min = c0 + shell - r * bn;
      e.max = (bn / -q.mu <= r) ? c0 + bn * bn / (-2.0 * q.mu) : c0 + shell + r * bn;
    } else {
      e.min = c0 - r * bn;
      e.max = c0 + r * bn;
    }
    return e;
  }
  Extremes e{q.kappa, q.kappa};
  for (int i = 0; i < domain.dim(); ++i) {
    const Extremes ei = detail::scalar_quad_extremes(q.mu, q.v[i], domain.box_lower()[i],
                                                     domain.box_upper()[i]);
    e.min += ei.min;
    e.max += ei.max;
  }
  return e;
}

// Lemma-style conversion: a lambda-strongly-convex function whose
// gradients are bounded by G is lambda/G^2 exp-concave.
inline double derive_expconcavity(double lambda, double grad_bound) {
  if (!(lambda > 0.0) || !(grad_bound > 0.0)) {
    throw InvalidParameter("derive_expconcavity requires positive lambda and gradient bound");
  }
  return lambda / (grad_bound * grad_bound);
}

// One round's loss. Three parameterized families with analytic
// curvature metadata over a fixed construction domain:
//   shifted_quadratic:  (scale/2) |w - center|^2 + offset
//   regularized_linear: <direction, w> + (scale/2) |w|^2 + offset
//   log_loss:           log(1 + exp(-label <feature, w>)) + offset
class LossFunction {
 public:
  enum class Family { shifted_quadratic, regularized_linear, log_loss };

  static LossFunction shifted_quadratic(const Domain& domain, Vec center, double scale,
                                        double offset = 0.0) {
    check_param(domain, center, scale);
    LossFunction f;
    f.family_ = Family::shifted_quadratic;
    f.param_ = std::move(center);
    f.scale_ = scale;
    f.offset_ = offset;
    f.strong_convexity_ = scale;
    f.grad_bound_ = scale * max_distance(domain, f.param_);
    f.exp_concavity_ = derive_expconcavity(scale, f.grad_bound_);
    return f;
  }

  static LossFunction regularized_linear(const Domain& domain, Vec direction, double scale,
                                         double offset = 0.0) {
    check_param(domain, direction, scale);
    LossFunction f;
    f.family_ = Family::regularized_linear;
    f.param_ = std::move(direction);
    f.scale_ = scale;
    f.offset_ = offset;
    f.strong_convexity_ = scale;
    f.grad_bound_ = max_affine_norm(domain, f.param_, scale);
    f.exp_concavity_ = derive_expconcavity(scale, f.grad_bound_);
    return f;
  }

  static LossFunction log_loss(const Domain& domain, Vec feature, int label,
                               double offset = 0.0) {
    if (feature.size() != domain.dim() || !feature.allFinite()) {
      throw InvalidParameter("log_loss feature must be finite and match the domain dimension");
    }
    if (label != 1 && label != -1) {
      throw InvalidParameter("log_loss label must be +1 or -1");
    }
    LossFunction f;
    f.family_ = Family::log_loss;
    f.param_ = std::move(feature);
    f.label_ = label;
    f.offset_ = offset;
    f.strong_convexity_ = 0.0;
    const double m = max_abs_inner(domain, f.param_);
    f.grad_bound_ = sigmoid(m) * f.param_.norm();
    f.exp_concavity_ = std::exp(-m);
    return f;
  }

  Family family() const { return family_; }
  const Vec& param() const { return param_; }
  double scale() const { return scale_; }
  int label() const { return label_; }
  double offset() const { return offset_; }
  int dim() const { return static_cast<int>(param_.size()); }

  double grad_bound() const { return grad_bound_; }
  double strong_convexity() const { return strong_convexity_; }
  double exp_concavity() const { return exp_concavity_; }

  double value(const Vec& w) const {
    switch (family_) {
      case Family::shifted_quadratic:
        return 0.5 * scale_ * (w - param_).squaredNorm() + offset_;
      case Family::regularized_linear:
        return param_.dot(w) + 0.5 * scale_ * w.squaredNorm() + offset_;
      case Family::log_loss:
        return softplus(-label_ * param_.dot(w)) + offset_;
    }
    return 0.0;
  }

  Vec gradient(const Vec& w) const {
    switch (family_) {
      case Family::shifted_quadratic:
        return scale_ * (w - param_);
      case Family::regularized_linear:
        return param_ + scale_ * w;
      case Family::log_loss: {
        const double z = label_ * param_.dot(w);
        return (-label_ * sigmoid(-z)) * param_;
      }
    }
    return Vec::Zero(w.size());
  }

  Mat hessian(const Vec& w) const {
    const auto d = param_.size();
    switch (family_) {
      case Family::shifted_quadratic:
      case Family::regularized_linear:
        return scale_ * Mat::Identity(d, d);
      case Family::log_loss: {
        const double z = label_ * param_.dot(w);
        return (sigmoid(z) * sigmoid(-z)) * (param_ * param_.transpose());
      }
    }
    return Mat::Zero(d, d);
  }

  bool has_quad_form() const { return family_ != Family::log_loss; }

  QuadForm quad_form() const {
    if (!has_quad_form()) throw InvalidParameter("log_loss has no canonical quadratic form");
    QuadForm q;
    q.mu = scale_;
    if (family_ == Family::shifted_quadratic) {
      q.v = -scale_ * param_;
      q.kappa = 0.5 * scale_ * param_.squaredNorm() + offset_;
    } else {
      q.v = param_;
      q.kappa = offset_;
    }
    return q;
  }

  bool same_params(const LossFunction& other) const {
    return family_ == other.family_ && scale_ == other.scale_ && label_ == other.label_ &&
           offset_ == other.offset_ && param_.size() == other.param_.size() &&
           param_ == other.param_;
  }

  static double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  }

  static double softplus(double u) {  // log(1 + e^u), overflow-safe
    if (u > 35.0) return u;
    return std::log1p(std::exp(u));
  }

 private:
  static void check_param(const Domain& domain, const Vec& p, double scale) {
    if (p.size() != domain.dim() || !p.allFinite()) {
      throw InvalidParameter("loss parameter must be finite and match the domain dimension");
    }
    if (!(scale > 0.0)) throw InvalidParameter("loss scale must be positive");
  }

  static double max_distance(const Domain& domain, const Vec& c) {
    if (domain.kind() == Domain::Kind::ball) {
      return (domain.ball_center() - c).norm() + domain.ball_radius();
    }
    double s = 0.0;
    for (int i = 0; i < domain.dim(); ++i) {
      const double a = domain.box_lower()[i] - c[i];
      const double b = domain.box_upper()[i] - c[i];
      s += std::max(a * a, b * b);
    }
    return std::sqrt(s);
  }

  static double max_affine_norm(const Domain& domain, const Vec& a, double scale) {
    // sup over the domain of |a + scale * w|
    if (domain.kind() == Domain::Kind::ball) {
      return (a + scale * domain.ball_center()).norm() + scale * domain.ball_radius();
    }
    double s = 0.0;
    for (int i = 0; i < domain.dim(); ++i) {
      const double u = a[i] + scale * domain.box_lower()[i];
      const double v = a[i] + scale * domain.box_upper()[i];
      s += std::max(u * u, v * v);
    }
    return std::sqrt(s);
  }

  static double max_abs_inner(const Domain& domain, const Vec& x) {
    if (domain.kind() == Domain::Kind::ball) {
      return std::abs(x.dot(domain.ball_center())) + domain.ball_radius() * x.norm();
    }
    double hi = 0.0, lo = 0.0;
    for (int i = 0; i < domain.dim(); ++i) {
      const double u = x[i] * domain.box_lower()[i];
      const double v = x[i] * domain.box_upper()[i];
      hi += std::max(u, v);
      lo += std::min(u, v);
    }
    return std::max(std::abs(hi), std::abs(lo));
  }

  Family family_ = Family::shifted_quadratic;
  Vec param_;
  double scale_ = 1.0;
  int label_ = 1;
  double offset_ = 0.0;
  double grad_bound_ = 0.0;
  double strong_convexity_ = 0.0;
  double exp_concavity_ = 0.0;
};

// Exact minimizer where a closed form exists (quadratic families are
// isotropic, so the constrained minimizer is the projection of the
// unconstrained one). log_loss falls back to projected gradient with a
// gradient-mapping stopping rule.
inline Vec loss_minimizer(const LossFunction& f, const Domain& domain,
                          const NumericPolicy& pol = default_policy()) {
  if (f.has_quad_form()) {
    const QuadForm q = f.quad_form();
    return domain.project(Vec(-q.v / q.mu));
  }
  const double lips = 0.25 * f.param().squaredNorm() + 1e-12;
  const double step = 1.0 / lips;
  Vec w = domain.center();
  const std::int64_t budget = 200000;
  for (std::int64_t it = 0; it < budget; ++it) {
    Vec next = domain.project(w - step * f.gradient(w));
    const double gmap = (w - next).norm() / step;
    w = next;
    if (gmap <= pol.solver_tol) return w;
  }
  throw NoConvergence("loss_minimizer exceeded its iteration budget");
}

struct Variation {
  double value = 0.0;
  bool exact = true;
};

namespace detail {

// sampled sup of |f - g| with local projected-gradient refinement;
// used only when no closed form applies
inline Variation sampled_variation(const LossFunction& f, const LossFunction& g,
                                   const Domain& domain) {
  Rng rng(0x5eedu);
  const int d = domain.dim();
  auto sample = [&]() {
    if (domain.kind() == Domain::Kind::ball) {
      Vec u = rng.unit_vector(d);
      const double r = domain.ball_radius() * std::pow(rng.uniform01(), 1.0 / d);
      return Vec(domain.ball_center() + r * u);
    }
    Vec w(d);
    for (int i = 0; i < d; ++i) {
      w[i] = rng.uniform(domain.box_lower()[i], domain.box_upper()[i]);
    }
    return w;
  };
  auto diff = [&](const Vec& w) { return f.value(w) - g.value(w); };

  Vec best_hi = domain.center(), best_lo = domain.center();
  double hi = diff(best_hi), lo = hi;
  for (int i = 0; i < 512; ++i) {
    const Vec w = sample();
    const double v = diff(w);
    if (v > hi) { hi = v; best_hi = w; }
    if (v < lo) { lo = v; best_lo = w; }
  }
  // hill-climb both extremes along the difference gradient
  const double step = 0.05 * domain.diameter();
  for (int sign = 0; sign < 2; ++sign) {
    Vec w = sign == 0 ? best_hi : best_lo;
    const double dir = sign == 0 ? 1.0 : -1.0;
    for (int it = 0; it < 200; ++it) {
      Vec gvec = f.gradient(w) - g.gradient(w);
      const double n = gvec.norm();
      if (n < 1e-14) break;
      w = domain.project(w + dir * step * gvec / n);
      const double v = diff(w);
      if (sign == 0 && v > hi) hi = v;
      if (sign == 1 && v < lo) lo = v;
    }
  }
  return Variation{std::max(std::abs(hi), std::abs(lo)), false};
}

}  // namespace detail

// sup over the domain of |f(w) - g(w)|. Exact whenever both losses have
// canonical quadratic forms (their difference is again such a form);
// otherwise a sampled lower bound with refinement, flagged approximate.
inline Variation pairwise_variation(const LossFunction& f, const LossFunction& g,
                                    const Domain& domain) {
  if (f.same_params(g)) return Variation{0.0, true};
  if (f.has_quad_form() && g.has_quad_form()) {
    const QuadForm qf = f.quad_form();
    const QuadForm qg = g.quad_form();
    QuadForm q;
    q.mu = qf.mu - qg.mu;
    q.v = qf.v - qg.v;
    q.kappa = qf.kappa - qg.kappa;
    const Extremes e = quadratic_extremes(q, domain);
    return Variation{std::max(std::abs(e.min), std::abs(e.max)), true};
  }
  return detail::sampled_variation(f, g, domain);
}

}  // namespace iflh
