#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "iflh/learners.hpp"
#include "iflh/schedule.hpp"

namespace iflh {

struct MetaOptions {
  std::int64_t k = 2;             // base of the ending-time rule
  double meta_alpha = 0.0;        // exponent of the weight update
  Learner::Kind subroutine = Learner::Kind::ogd;
  double lambda = 0.0;            // ogd subroutine parameter
  double alpha = 0.0;             // ons subroutine parameter
  double grad_bound = 0.0;        // ons subroutine parameter
};

struct Expert {
  std::int64_t birth = 0;
  std::int64_t ending = 0;        // ending_time(birth); alive while birth <= t < ending
  double log_weight = 0.0;
  double lifetime_loss = 0.0;     // sum of this expert's own losses while alive
  Learner learner;
};

// Completed lifespan of one expert, kept for meta-regret diagnostics.
struct ExpertSpan {
  std::int64_t birth = 0;
  std::int64_t last = 0;          // last round the expert received a loss
  double expert_loss = 0.0;
};

// Expert-pool meta-learner. Each round: retire experts whose ending
// time has arrived, rescale the survivors to total mass 1 - 1/t, inject
// a fresh expert with mass 1/t, predict the weighted average, then run
// the exponential weight update and feed the loss to every expert.
// Weights live in log space; normalization subtracts the running max
// before exponentiation so long streams cannot underflow.
class MetaLearner {
 public:
  MetaLearner(MetaOptions opt, Domain domain)
      : opt_(opt), domain_(std::move(domain)), schedule_(opt.k) {
    if (opt_.subroutine == Learner::Kind::ogd && !(opt_.lambda > 0.0)) {
      throw InvalidParameter("ogd subroutine requires positive lambda");
    }
    if (opt_.subroutine == Learner::Kind::ons &&
        (!(opt_.alpha > 0.0) || !(opt_.grad_bound > 0.0))) {
      throw InvalidParameter("ons subroutine requires positive alpha and gradient bound");
    }
    if (!(opt_.meta_alpha > 0.0)) {
      throw InvalidParameter("meta weight update requires positive alpha");
    }
  }

  // One full round; returns the combined prediction, which is formed
  // before the loss value at that point is inspected.
  Vec step(const LossFunction& f) {
    const std::int64_t t = ++round_;
    if (opt_.subroutine == Learner::Kind::ogd && !(f.strong_convexity() > 0.0)) {
      throw CurvatureMismatch("ogd subroutine fed a loss without strong convexity");
    }
    if (opt_.subroutine == Learner::Kind::ons && !(f.exp_concavity() > 0.0)) {
      throw CurvatureMismatch("ons subroutine fed a loss without exp-concavity");
    }

    // retire experts whose ending time has arrived
    std::size_t keep = 0;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      if (pool_[i].ending <= t) {
        retired_.push_back(ExpertSpan{pool_[i].birth, t - 1, pool_[i].lifetime_loss});
      } else {
        if (keep != i) pool_[keep] = std::move(pool_[i]);
        ++keep;
      }
    }
    pool_.erase(pool_.begin() + static_cast<std::ptrdiff_t>(keep), pool_.end());

    // survivors share mass 1 - 1/t; the newcomer takes 1/t, or all the
    // mass when it is alone (t = 1, and the rounds where every previous
    // expert retires at once)
    if (!pool_.empty()) {
      const double log_z = log_sum_weights();
      const double shift = std::log1p(-1.0 / static_cast<double>(t)) - log_z;
      for (Expert& e : pool_) e.log_weight += shift;
    }
    Expert fresh{t, schedule_.ending_time(t),
                 pool_.empty() ? 0.0 : -std::log(static_cast<double>(t)), 0.0,
                 make_learner()};
    pool_.push_back(std::move(fresh));

    // combined prediction
    Vec prediction = Vec::Zero(domain_.dim());
    for (const Expert& e : pool_) {
      prediction += std::exp(e.log_weight) * e.learner.predict();
    }

    // exponential weight update on each expert's own prediction, then
    // renormalize and pass the loss to the subroutines
    for (Expert& e : pool_) {
      const double own = f.value(e.learner.predict());
      if (!std::isfinite(own)) throw NumericOverflow("non-finite expert loss");
      e.lifetime_loss += own;
      e.log_weight -= opt_.meta_alpha * own;
    }
    const double log_z = log_sum_weights();
    for (Expert& e : pool_) {
      e.log_weight -= log_z;
      e.learner.update(f);
    }
    return prediction;
  }

  std::int64_t round() const { return round_; }
  const std::vector<Expert>& pool() const { return pool_; }
  const std::vector<ExpertSpan>& retired() const { return retired_; }
  const BaseKSchedule& schedule() const { return schedule_; }

  std::vector<double> weights() const {
    std::vector<double> w;
    w.reserve(pool_.size());
    for (const Expert& e : pool_) w.push_back(std::exp(e.log_weight));
    return w;
  }

  // retired spans plus the experts still alive, closed at the current round
  std::vector<ExpertSpan> all_spans() const {
    std::vector<ExpertSpan> spans = retired_;
    for (const Expert& e : pool_) {
      spans.push_back(ExpertSpan{e.birth, round_, e.lifetime_loss});
    }
    return spans;
  }

 private:
  Learner make_learner() const {
    if (opt_.subroutine == Learner::Kind::ogd) {
      return Learner::ogd(opt_.lambda, domain_, domain_.center());
    }
    return Learner::ons(opt_.alpha, opt_.grad_bound, domain_, domain_.center());
  }

  double log_sum_weights() const {
    double mx = -std::numeric_limits<double>::infinity();
    for (const Expert& e : pool_) mx = std::max(mx, e.log_weight);
    double s = 0.0;
    for (const Expert& e : pool_) s += std::exp(e.log_weight - mx);
    return mx + std::log(s);
  }

  MetaOptions opt_;
  Domain domain_;
  BaseKSchedule schedule_;
  std::vector<Expert> pool_;
  std::vector<ExpertSpan> retired_;
  std::int64_t round_ = 0;
};

struct RoundRecord {
  Vec prediction;
  double loss = 0.0;
  std::int64_t pool_size = 0;
};

struct StreamTrace {
  std::vector<RoundRecord> rounds;
  std::vector<ExpertSpan> expert_spans;

  std::vector<Vec> predictions() const {
    std::vector<Vec> p;
    p.reserve(rounds.size());
    for (const RoundRecord& r : rounds) p.push_back(r.prediction);
    return p;
  }
};

// Drives the meta-learner over a whole loss sequence. `step_micros`,
// when given, receives one wall-clock measurement per round.
inline StreamTrace run_stream(const MetaOptions& opt, const Domain& domain,
                              const std::vector<LossFunction>& losses,
                              std::vector<double>* step_micros = nullptr);

}  // namespace iflh

#include <chrono>

namespace iflh {

inline StreamTrace run_stream(const MetaOptions& opt, const Domain& domain,
                              const std::vector<LossFunction>& losses,
                              std::vector<double>* step_micros) {
  MetaLearner meta(opt, domain);
  StreamTrace trace;
  trace.rounds.reserve(losses.size());
  for (std::size_t i = 0; i < losses.size(); ++i) {
    try {
      const auto t0 = std::chrono::steady_clock::now();
      Vec w = meta.step(losses[i]);
      const auto t1 = std::chrono::steady_clock::now();
      if (step_micros != nullptr) {
        step_micros->push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
      }
      RoundRecord rec;
      rec.loss = losses[i].value(w);
      rec.prediction = std::move(w);
      rec.pool_size = static_cast<std::int64_t>(meta.pool().size());
      trace.rounds.push_back(std::move(rec));
    } catch (const std::exception& ex) {
      throw std::runtime_error("round " + std::to_string(i + 1) + ": " + ex.what());
    }
  }
  trace.expert_spans = meta.all_spans();
  return trace;
}

}  // namespace iflh
