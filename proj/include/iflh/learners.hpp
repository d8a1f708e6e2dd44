#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "iflh/geometry.hpp"
#include "iflh/losses.hpp"

namespace iflh {

// Base online learners run inside each expert. Value type: copying a
// Learner snapshots its state, so runs can be replayed or forked.
//
//   ogd: projected gradient steps 1/(lambda t) for strongly convex losses
//   ons: online Newton step for exp-concave losses, with the standard
//        beta = min{1/(4GB), alpha}/2 and A_0 = I / (beta B)^2
class Learner {
 public:
  enum class Kind { ogd, ons };

  static Learner ogd(double lambda, const Domain& domain, Vec start) {
    if (!(lambda > 0.0)) throw InvalidParameter("ogd requires positive strong convexity");
    check_start(domain, start);
    Learner s(domain);
    s.kind_ = Kind::ogd;
    s.lambda_ = lambda;
    s.round_index_ = 1;
    s.current_ = std::move(start);
    return s;
  }

  static Learner ons(double alpha, double grad_bound, const Domain& domain, Vec start) {
    if (!(alpha > 0.0) || !(grad_bound > 0.0)) {
      throw InvalidParameter("ons requires positive exp-concavity and gradient bound");
    }
    if (domain.kind() != Domain::Kind::ball) {
      throw UnsupportedDomain("ons needs the generalized projection, available on balls only");
    }
    check_start(domain, start);
    Learner s(domain);
    s.kind_ = Kind::ons;
    s.alpha_ = alpha;
    const double b = domain.diameter();
    s.beta_ = 0.5 * std::min(1.0 / (4.0 * grad_bound * b), alpha);
    const double eps = 1.0 / (s.beta_ * s.beta_ * b * b);
    s.matrix_ = eps * Mat::Identity(domain.dim(), domain.dim());
    s.current_ = std::move(start);
    return s;
  }

  Kind kind() const { return kind_; }
  const Vec& predict() const { return current_; }
  const Domain& domain() const { return domain_; }

  std::int64_t round_index() const { return round_index_; }  // ogd only
  double beta() const { return beta_; }                      // ons only
  const Mat& matrix() const { return matrix_; }              // ons only

  void update(const LossFunction& f) {
    const Vec g = f.gradient(current_);
    if (!g.allFinite()) throw NumericOverflow("non-finite gradient in learner update");
    if (kind_ == Kind::ogd) {
      const double eta = 1.0 / (lambda_ * static_cast<double>(round_index_));
      current_ = domain_.project(current_ - eta * g);
      ++round_index_;
      return;
    }
    matrix_ += g * g.transpose();
    // relative solve error here is at machine precision, far below the
    // 1e-10 contract for the A^{-1} gradient direction
    const Vec dir = matrix_.ldlt().solve(g);
    current_ = project_mahalanobis(domain_, matrix_, current_ - dir / beta_);
  }

 private:
  explicit Learner(Domain domain) : domain_(std::move(domain)) {}

  static void check_start(const Domain& domain, const Vec& start) {
    if (start.size() != domain.dim() || !start.allFinite() || !domain.contains(start)) {
      throw InvalidParameter("learner start point must lie in the domain");
    }
  }

  Kind kind_ = Kind::ogd;
  Domain domain_;
  Vec current_;
  double lambda_ = 0.0;
  std::int64_t round_index_ = 1;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  Mat matrix_;
};

}  // namespace iflh
