#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "iflh/iflh.hpp"
#include "iflh/losses.hpp"

namespace iflh {

// Closed interval of rounds, 1-based inclusive.
struct Interval {
  std::int64_t first = 0;
  std::int64_t last = 0;
};

namespace detail {

inline double numeric_sum_min(const std::vector<LossFunction>& losses, const Domain& domain,
                              std::int64_t s, std::int64_t q, const NumericPolicy& pol) {
  double lips = 1e-12;
  for (std::int64_t t = s; t <= q; ++t) {
    const LossFunction& f = losses[static_cast<std::size_t>(t - 1)];
    lips += f.has_quad_form() ? f.scale() : 0.25 * f.param().squaredNorm();
  }
  const double step = 1.0 / lips;
  Vec w = domain.center();
  auto grad = [&](const Vec& x) {
    Vec g = Vec::Zero(domain.dim());
    for (std::int64_t t = s; t <= q; ++t) g += losses[static_cast<std::size_t>(t - 1)].gradient(x);
    return g;
  };
  for (std::int64_t it = 0; it < 200000; ++it) {
    Vec next = domain.project(w - step * grad(w));
    const double gmap = (w - next).norm() / step;
    w = next;
    if (gmap <= pol.solver_tol) break;
    if (it + 1 == 200000) throw NoConvergence("interval minimizer exceeded its budget");
  }
  double v = 0.0;
  for (std::int64_t t = s; t <= q; ++t) v += losses[static_cast<std::size_t>(t - 1)].value(w);
  return v;
}

}  // namespace detail

// Prefix statistics of one finished trial: cumulative learner loss,
// cumulative canonical-quadratic coefficients (when every loss has
// one), and cumulative consecutive variation. Interval minimization
// and interval regret become O(d) lookups on top of these.
class StreamStats {
 public:
  StreamStats(const std::vector<LossFunction>& losses, Domain domain,
              const std::vector<Vec>& predictions,
              const NumericPolicy& pol = default_policy())
      : losses_(losses), domain_(std::move(domain)), pol_(pol) {
    const std::int64_t t_max = static_cast<std::int64_t>(losses.size());
    if (static_cast<std::int64_t>(predictions.size()) != t_max) {
      throw InvalidParameter("trace and loss sequence lengths differ");
    }
    closed_form_ = true;
    for (const LossFunction& f : losses) closed_form_ = closed_form_ && f.has_quad_form();

    loss_pre_.assign(t_max + 1, 0.0);
    var_pre_.assign(t_max + 1, 0.0);
    variation_exact_ = true;
    if (closed_form_) {
      mu_pre_.assign(t_max + 1, 0.0);
      kap_pre_.assign(t_max + 1, 0.0);
      const int d = domain_.dim();
      v_pre_.assign(t_max + 1, Vec::Zero(d));
    }
    for (std::int64_t t = 1; t <= t_max; ++t) {
      const LossFunction& f = losses[static_cast<std::size_t>(t - 1)];
      loss_pre_[t] = loss_pre_[t - 1] + f.value(predictions[static_cast<std::size_t>(t - 1)]);
      if (closed_form_) {
        const QuadForm q = f.quad_form();
        mu_pre_[t] = mu_pre_[t - 1] + q.mu;
        v_pre_[t] = v_pre_[t - 1] + q.v;
        kap_pre_[t] = kap_pre_[t - 1] + q.kappa;
      }
      if (t >= 2) {
        const Variation var =
            pairwise_variation(f, losses[static_cast<std::size_t>(t - 2)], domain_);
        var_pre_[t] = var_pre_[t - 1] + var.value;
        variation_exact_ = variation_exact_ && var.exact;
      }
    }
  }

  std::int64_t rounds() const { return static_cast<std::int64_t>(losses_.size()); }
  bool closed_form() const { return closed_form_; }
  const Domain& domain() const { return domain_; }
  const std::vector<LossFunction>& losses() const { return losses_; }
  const NumericPolicy& policy() const { return pol_; }

  double interval_learner_loss(std::int64_t s, std::int64_t q) const {
    check_interval(s, q);
    return loss_pre_[q] - loss_pre_[s - 1];
  }

  // min over the domain of the interval's summed loss
  double interval_min(std::int64_t s, std::int64_t q) const {
    check_interval(s, q);
    if (!closed_form_) return detail::numeric_sum_min(losses_, domain_, s, q, pol_);
    const double mu = mu_pre_[q] - mu_pre_[s - 1];
    const Vec v = v_pre_[q] - v_pre_[s - 1];
    const double kap = kap_pre_[q] - kap_pre_[s - 1];
    const Vec w = domain_.project(Vec(-v / mu));
    return 0.5 * mu * w.squaredNorm() + v.dot(w) + kap;
  }

  double interval_regret(std::int64_t s, std::int64_t q) const {
    return interval_learner_loss(s, q) - interval_min(s, q);
  }

  // sum of consecutive variation inside [s, q]; boundary pairs excluded
  double local_variation(std::int64_t s, std::int64_t q) const {
    check_interval(s, q);
    return var_pre_[q] - var_pre_[s];
  }

  double total_variation() const { return rounds() >= 1 ? var_pre_[rounds()] : 0.0; }
  bool variation_exact() const { return variation_exact_; }

 private:
  void check_interval(std::int64_t s, std::int64_t q) const {
    if (s < 1 || q < s || q > rounds()) throw InvalidParameter("interval out of range");
  }

  const std::vector<LossFunction>& losses_;
  Domain domain_;
  NumericPolicy pol_;
  bool closed_form_ = false;
  bool variation_exact_ = true;
  std::vector<double> loss_pre_, var_pre_, mu_pre_, kap_pre_;
  std::vector<Vec> v_pre_;
};

inline double static_regret(const StreamStats& stats) {
  if (stats.rounds() < 1) throw InvalidParameter("static regret needs at least one round");
  return stats.interval_regret(1, stats.rounds());
}

// worst interval regret at one fixed length; exact enumeration
inline double sa_regret(const StreamStats& stats, std::int64_t tau) {
  const std::int64_t t_max = stats.rounds();
  if (tau < 1 || tau > t_max) throw InvalidParameter("interval length out of range");
  double worst = -std::numeric_limits<double>::infinity();
  for (std::int64_t s = 1; s + tau - 1 <= t_max; ++s) {
    worst = std::max(worst, stats.interval_regret(s, s + tau - 1));
  }
  return worst;
}

// worst interval regret for every length 1..T. Quadratic cost, gated
// behind a desk-scale limit unless explicitly overridden.
inline std::vector<double> sa_regret_all_lengths(const StreamStats& stats,
                                                 bool allow_quadratic_cost = false) {
  const std::int64_t t_max = stats.rounds();
  if (t_max > 20000 && !allow_quadratic_cost) {
    throw InvalidParameter("length-wise enumeration is quadratic; pass the override for T > 2e4");
  }
  std::vector<double> sa(static_cast<std::size_t>(t_max) + 1, 0.0);
  for (std::int64_t tau = 1; tau <= t_max; ++tau) {
    sa[static_cast<std::size_t>(tau)] = sa_regret(stats, tau);
  }
  return sa;
}

inline double per_round_minimum(const LossFunction& f, const Domain& domain,
                                const NumericPolicy& pol = default_policy()) {
  return f.value(loss_minimizer(f, domain, pol));
}

// learner loss minus the per-round minimizers' loss
inline double dynamic_regret(const StreamStats& stats) {
  double comparator = 0.0;
  for (const LossFunction& f : stats.losses()) {
    comparator += per_round_minimum(f, stats.domain(), stats.policy());
  }
  return stats.interval_learner_loss(1, stats.rounds()) - comparator;
}

struct VariationReport {
  double total = 0.0;
  std::vector<double> locals;
  bool exact = true;
};

inline VariationReport functional_variation(const std::vector<LossFunction>& losses,
                                            const Domain& domain) {
  VariationReport rep;
  for (std::size_t t = 1; t < losses.size(); ++t) {
    const Variation v = pairwise_variation(losses[t], losses[t - 1], domain);
    rep.total += v.value;
    rep.exact = rep.exact && v.exact;
  }
  return rep;
}

// Partitioned form: locals sum consecutive variation strictly inside
// each interval, so boundary terms drop and sum(locals) <= total.
inline VariationReport functional_variation(const std::vector<LossFunction>& losses,
                                            const Domain& domain,
                                            const std::vector<Interval>& partition) {
  const std::int64_t t_max = static_cast<std::int64_t>(losses.size());
  if (partition.empty() || partition.front().first != 1 || partition.back().last != t_max) {
    throw InvalidPartition("partition must start at 1 and end at the horizon");
  }
  for (std::size_t i = 0; i < partition.size(); ++i) {
    if (partition[i].last < partition[i].first) throw InvalidPartition("empty interval");
    if (i + 1 < partition.size() && partition[i].last + 1 != partition[i + 1].first) {
      throw InvalidPartition("intervals must chain with no gap or overlap");
    }
  }
  VariationReport rep = functional_variation(losses, domain);
  rep.locals.reserve(partition.size());
  for (const Interval& iv : partition) {
    double local = 0.0;
    for (std::int64_t t = iv.first + 1; t <= iv.last; ++t) {
      local += pairwise_variation(losses[static_cast<std::size_t>(t - 1)],
                                  losses[static_cast<std::size_t>(t - 2)], domain)
                   .value;
    }
    rep.locals.push_back(local);
  }
  return rep;
}

// Adaptive-to-dynamic conversion value: the exact minimum over all
// chained partitions of sum_i [ SA(|I_i|) + 2 |I_i| V(I_i) ], by
// dynamic programming over interval endpoints. `by_length` uses the
// length-wise worst regret SA(tau) (the conversion statement as
// printed); `by_interval` substitutes each interval's own measured
// regret, which can only be tighter.
struct ConversionBound {
  double by_length = std::numeric_limits<double>::quiet_NaN();
  double by_interval = std::numeric_limits<double>::quiet_NaN();
};

inline ConversionBound adaptive_to_dynamic_bound(const StreamStats& stats,
                                                 const std::vector<double>* sa_all = nullptr,
                                                 bool allow_quadratic_cost = false) {
  const std::int64_t t_max = stats.rounds();
  if (t_max > 20000 && !allow_quadratic_cost) {
    throw InvalidParameter("conversion DP is quadratic; pass the override for T > 2e4");
  }
  std::vector<double> sa_local;
  if (sa_all == nullptr) {
    sa_local = sa_regret_all_lengths(stats, allow_quadratic_cost);
    sa_all = &sa_local;
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best_len(static_cast<std::size_t>(t_max) + 1, inf);
  std::vector<double> best_int(static_cast<std::size_t>(t_max) + 1, inf);
  best_len[0] = best_int[0] = 0.0;
  for (std::int64_t q = 1; q <= t_max; ++q) {
    for (std::int64_t s = 1; s <= q; ++s) {
      const std::int64_t len = q - s + 1;
      const double pair_var = 2.0 * static_cast<double>(len) * stats.local_variation(s, q);
      const double c_len = best_len[static_cast<std::size_t>(s - 1)] +
                           (*sa_all)[static_cast<std::size_t>(len)] + pair_var;
      best_len[static_cast<std::size_t>(q)] =
          std::min(best_len[static_cast<std::size_t>(q)], c_len);
      const double c_int = best_int[static_cast<std::size_t>(s - 1)] +
                           stats.interval_regret(s, q) + pair_var;
      best_int[static_cast<std::size_t>(q)] =
          std::min(best_int[static_cast<std::size_t>(q)], c_int);
    }
  }
  return ConversionBound{best_len[static_cast<std::size_t>(t_max)],
                         best_int[static_cast<std::size_t>(t_max)]};
}

// Same DP with a constant in place of the measured SA values, for
// evaluating the conversion with a theoretical adaptive-regret bound.
inline double adaptive_to_dynamic_bound_formula(const StreamStats& stats, double sa_constant,
                                                bool allow_quadratic_cost = false) {
  const std::int64_t t_max = stats.rounds();
  if (t_max > 20000 && !allow_quadratic_cost) {
    throw InvalidParameter("conversion DP is quadratic; pass the override for T > 2e4");
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(static_cast<std::size_t>(t_max) + 1, inf);
  best[0] = 0.0;
  for (std::int64_t q = 1; q <= t_max; ++q) {
    for (std::int64_t s = 1; s <= q; ++s) {
      const double cand = best[static_cast<std::size_t>(s - 1)] + sa_constant +
                          2.0 * static_cast<double>(q - s + 1) * stats.local_variation(s, q);
      best[static_cast<std::size_t>(q)] = std::min(best[static_cast<std::size_t>(q)], cand);
    }
  }
  return best[static_cast<std::size_t>(t_max)];
}

// ---- closed-form bound formulas -------------------------------------

// floor(log_K t) + 1 without floating point
inline std::int64_t digits_bound(std::int64_t k, std::int64_t t) {
  if (k < 2 || t < 1) throw InvalidParameter("digits_bound requires K >= 2 and t >= 1");
  std::int64_t digits = 0;
  for (std::int64_t rest = t; rest > 0; rest /= k) ++digits;
  return digits;
}

namespace detail {
inline void check_horizon(std::int64_t t) {
  if (t < 2) throw InvalidParameter("bound formulas need a horizon of at least 2 rounds");
}
}  // namespace detail

// adaptive regret of the meta-learner with the ons subroutine
inline double ons_adaptive_bound(int d, double alpha, double grad_bound, double diameter,
                                 std::int64_t m_bar, std::int64_t t) {
  detail::check_horizon(t);
  if (d < 1 || !(alpha > 0.0) || !(grad_bound > 0.0) || !(diameter > 0.0) || m_bar < 1) {
    throw InvalidParameter("ons_adaptive_bound given non-positive constants");
  }
  const double dd = static_cast<double>(d);
  const double m = static_cast<double>(m_bar);
  return (((5.0 * dd + 1.0) * m + 2.0) / alpha + 5.0 * dd * m * grad_bound * diameter) *
         std::log(static_cast<double>(t));
}

// adaptive regret of the meta-learner with the ogd subroutine
inline double ogd_adaptive_bound(double lambda, double grad_bound, std::int64_t m_bar,
                                 std::int64_t t) {
  detail::check_horizon(t);
  if (!(lambda > 0.0) || !(grad_bound > 0.0) || m_bar < 1) {
    throw InvalidParameter("ogd_adaptive_bound given non-positive constants");
  }
  const double m = static_cast<double>(m_bar);
  const double log_t = std::log(static_cast<double>(t));
  return grad_bound * grad_bound / (2.0 * lambda) * (m + (3.0 * m + 4.0) * log_t);
}

// dynamic regret via the conversion, ons subroutine, K = T^{1/gamma}
inline double ons_dynamic_bound(int d, double alpha, double grad_bound, double diameter,
                                double gamma, std::int64_t t, double variation) {
  detail::check_horizon(t);
  if (d < 1 || !(alpha > 0.0) || !(grad_bound > 0.0) || !(diameter > 0.0) || !(gamma > 1.0) ||
      variation < 0.0) {
    throw InvalidParameter("ons_dynamic_bound given invalid constants");
  }
  const double dd = static_cast<double>(d);
  const double tt = static_cast<double>(t);
  const double log_t = std::log(tt);
  const double lead = ((5.0 * dd + 1.0) * (gamma + 1.0) + 2.0) / alpha +
                      5.0 * dd * (gamma + 1.0) * grad_bound * diameter + 2.0;
  return lead * std::max(log_t, std::sqrt(tt * variation * log_t));
}

// dynamic regret via the conversion, ogd subroutine, K = T^{1/gamma}
inline double ogd_dynamic_bound(double lambda, double grad_bound, double gamma, std::int64_t t,
                                double variation) {
  detail::check_horizon(t);
  if (!(lambda > 0.0) || !(grad_bound > 0.0) || !(gamma > 1.0) || variation < 0.0) {
    throw InvalidParameter("ogd_dynamic_bound given invalid constants");
  }
  const double tt = static_cast<double>(t);
  const double log_t = std::log(tt);
  const double ratio = gamma * grad_bound * grad_bound / lambda;
  const double low = ratio + (5.0 * ratio + 2.0) * log_t;
  const double high = ratio * std::sqrt(tt * variation / log_t) +
                      (5.0 * ratio + 2.0) * std::sqrt(tt * variation * log_t);
  return std::max(low, high);
}

// static regret of the bare subroutines over t rounds
inline double ogd_static_bound(double lambda, double grad_bound, std::int64_t t) {
  detail::check_horizon(t);
  if (!(lambda > 0.0) || !(grad_bound > 0.0)) {
    throw InvalidParameter("ogd_static_bound given non-positive constants");
  }
  return grad_bound * grad_bound / (2.0 * lambda) * (1.0 + std::log(static_cast<double>(t)));
}

inline double ons_static_bound(int d, double alpha, double grad_bound, double diameter,
                               std::int64_t t) {
  detail::check_horizon(t);
  if (d < 1 || !(alpha > 0.0) || !(grad_bound > 0.0) || !(diameter > 0.0)) {
    throw InvalidParameter("ons_static_bound given non-positive constants");
  }
  return 5.0 * static_cast<double>(d) * (1.0 / alpha + grad_bound * diameter) *
         std::log(static_cast<double>(t));
}

// meta loss minus expert loss over one expert's lifespan is at most
// (log birth + 2 sum_{t>birth} 1/t) / alpha
inline double expert_tracking_bound(double meta_alpha, std::int64_t birth, std::int64_t last) {
  if (!(meta_alpha > 0.0) || birth < 1 || last < birth) {
    throw InvalidParameter("expert_tracking_bound given an invalid span");
  }
  double harmonic = 0.0;
  for (std::int64_t t = birth + 1; t <= last; ++t) harmonic += 1.0 / static_cast<double>(t);
  return (std::log(static_cast<double>(birth)) + 2.0 * harmonic) / meta_alpha;
}

}  // namespace iflh
