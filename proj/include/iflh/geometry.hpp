#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "iflh/errors.hpp"
#include "iflh/numeric.hpp"

namespace iflh {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Bounded convex feasible set: a Euclidean ball or an axis-aligned box.
// The diameter is the constant B that appears in the regret bounds.
class Domain {
 public:
  enum class Kind { ball, box };

  static Domain ball(Vec center, double radius) {
    if (center.size() < 1 || !center.allFinite()) {
      throw InvalidParameter("ball center must be finite and non-empty");
    }
    if (!(radius > 0.0)) {
      throw InvalidParameter("ball radius must be positive");
    }
    Domain d;
    d.kind_ = Kind::ball;
    d.center_ = std::move(center);
    d.radius_ = radius;
    d.diameter_ = 2.0 * radius;
    return d;
  }

  static Domain box(Vec lower, Vec upper) {
    if (lower.size() < 1 || lower.size() != upper.size() ||
        !lower.allFinite() || !upper.allFinite()) {
      throw InvalidParameter("box bounds must be finite and of equal dimension");
    }
    if (!((upper - lower).minCoeff() > 0.0)) {
      throw InvalidParameter("box requires lower < upper coordinate-wise");
    }
    Domain d;
    d.kind_ = Kind::box;
    d.lower_ = std::move(lower);
    d.upper_ = std::move(upper);
    d.diameter_ = (d.upper_ - d.lower_).norm();
    return d;
  }

  Kind kind() const { return kind_; }

  int dim() const {
    return kind_ == Kind::ball ? static_cast<int>(center_.size())
                               : static_cast<int>(lower_.size());
  }

  double diameter() const { return diameter_; }

  const Vec& ball_center() const { return center_; }
  double ball_radius() const { return radius_; }
  const Vec& box_lower() const { return lower_; }
  const Vec& box_upper() const { return upper_; }

  // Ball center, or box midpoint. Used as the default start iterate.
  Vec center() const {
    return kind_ == Kind::ball ? center_ : Vec(0.5 * (lower_ + upper_));
  }

  bool contains(const Vec& p, double tol = default_policy().equality_tol) const {
    if (p.size() != dim()) return false;
    if (kind_ == Kind::ball) {
      return (p - center_).norm() <= radius_ + tol;
    }
    return (p - lower_).minCoeff() >= -tol && (upper_ - p).minCoeff() >= -tol;
  }

  // Euclidean projection. Radial scaling for balls, coordinate clamp
  // for boxes; idempotent and non-expansive.
  Vec project(const Vec& p) const {
    if (kind_ == Kind::ball) {
      Vec u = p - center_;
      const double n = u.norm();
      if (n <= radius_) return p;
      return center_ + (radius_ / n) * u;
    }
    return p.cwiseMax(lower_).cwiseMin(upper_);
  }

  // Same shape pulled inward by a margin. Drift processes keep loss
  // parameters inside a shrunk copy so the losses stay well-defined.
  Domain shrunk(double margin) const {
    if (!(margin >= 0.0)) throw InvalidParameter("margin must be nonnegative");
    if (kind_ == Kind::ball) {
      if (margin >= radius_) throw InvalidParameter("margin swallows the ball");
      return Domain::ball(center_, radius_ - margin);
    }
    Vec lo = lower_.array() + margin;
    Vec hi = upper_.array() - margin;
    if (!((hi - lo).minCoeff() > 0.0)) throw InvalidParameter("margin swallows the box");
    return Domain::box(lo, hi);
  }

 private:
  Kind kind_ = Kind::ball;
  Vec center_;
  Vec lower_;
  Vec upper_;
  double radius_ = 0.0;
  double diameter_ = 0.0;
};

inline Vec project(const Domain& domain, const Vec& p) { return domain.project(p); }

// argmin over a ball of (w-p)' A (w-p) for symmetric positive definite A.
// Solved on the KKT system: with q = p - center, the minimizer is
// u(nu) = (A + nu I)^{-1} A q whose norm decreases in nu; bisection finds
// the multiplier with |u| = radius. Box domains are not supported.
inline Vec project_mahalanobis(const Domain& domain, const Mat& A, const Vec& p) {
  if (domain.kind() != Domain::Kind::ball) {
    throw UnsupportedDomain("generalized projection supports ball domains only");
  }
  if (A.rows() != A.cols() || A.rows() != domain.dim()) {
    throw InvalidParameter("metric matrix shape does not match the domain");
  }
  if (!A.isApprox(A.transpose(), 1e-12)) {
    throw NonPsdMatrix("metric matrix is not symmetric");
  }
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NonPsdMatrix("metric matrix failed Cholesky factorization");
  }

  const double radius = domain.ball_radius();
  Vec q = p - domain.ball_center();
  if (q.norm() <= radius) return p;

  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  if (es.info() != Eigen::Success) {
    throw NonPsdMatrix("eigendecomposition of the metric matrix failed");
  }
  const Vec lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0) {
    throw NonPsdMatrix("metric matrix is not positive definite");
  }
  const Mat Q = es.eigenvectors();
  const Vec z = Q.transpose() * q;

  auto norm2 = [&](double nu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double ui = lam[i] * z[i] / (lam[i] + nu);
      s += ui * ui;
    }
    return s;
  };

  const double r2 = radius * radius;
  double lo = 0.0;
  double hi = std::max(1.0, lam.maxCoeff()) * q.norm() / radius;
  while (norm2(hi) > r2) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (norm2(mid) > r2) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double nu = hi;  // feasible side of the bracket
  Vec u(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    u[i] = lam[i] * z[i] / (lam[i] + nu);
  }
  Vec w = Q * u;
  const double n = w.norm();
  if (n > radius) w *= radius / n;  // keep the iterate feasible exactly
  return domain.ball_center() + w;
}

}  // namespace iflh
