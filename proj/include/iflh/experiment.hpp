#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "iflh/config.hpp"
#include "iflh/regret.hpp"
#include "iflh/stream.hpp"

namespace iflh {

struct BoundCheck {
  std::string name;
  double bound = 0.0;
  double measured = 0.0;
  double margin = 0.0;  // bound - measured
  bool pass = false;
};

struct TrialResult {
  ExperimentConfig cfg;
  StreamData stream;
  StreamTrace trace;

  std::int64_t realized_k = 0;
  double realized_gamma = 0.0;  // only meaningful when > 1
  double meta_alpha = 0.0;
  std::int64_t m_bar = 0;

  double static_regret_value = 0.0;
  double dynamic_regret_value = 0.0;
  std::vector<std::pair<std::int64_t, double>> sa_values;
  double variation_total = 0.0;
  bool variation_exact = true;
  double conversion_by_length = std::numeric_limits<double>::quiet_NaN();
  double conversion_by_interval = std::numeric_limits<double>::quiet_NaN();
  double adaptive_bound = std::numeric_limits<double>::quiet_NaN();
  double dynamic_bound = std::numeric_limits<double>::quiet_NaN();

  std::int64_t pool_max = 0;
  double pool_mean = 0.0;
  std::vector<double> cum_loss;
  std::vector<double> inst_dynamic;

  std::vector<BoundCheck> checks;
  bool all_checks_pass = true;
};

inline std::int64_t resolve_schedule_base(const ExperimentConfig& cfg) {
  if (cfg.schedule_k != 0) return cfg.schedule_k;
  // smallest integer base with K^gamma >= T, so the digit count stays
  // within gamma + 1
  const double p = std::pow(static_cast<double>(cfg.rounds), 1.0 / cfg.gamma);
  const auto k = static_cast<std::int64_t>(std::ceil(p - 1e-9));
  return std::max<std::int64_t>(2, k);
}

namespace detail {

inline void add_check(TrialResult& r, const std::string& name, double bound, double measured) {
  BoundCheck c;
  c.name = name;
  c.bound = bound;
  c.measured = measured;
  c.margin = bound - measured;
  c.pass = measured <= bound;
  r.all_checks_pass = r.all_checks_pass && c.pass;
  r.checks.push_back(std::move(c));
}

inline StreamTrace run_bare(const ExperimentConfig& cfg, const StreamData& stream) {
  const Domain& dom = stream.domain;
  Learner learner = cfg.algorithm == AlgorithmKind::bare_ogd
                        ? Learner::ogd(stream.lambda, dom, dom.center())
                        : Learner::ons(stream.alpha, stream.grad_bound, dom, dom.center());
  StreamTrace trace;
  trace.rounds.reserve(stream.losses.size());
  for (std::size_t i = 0; i < stream.losses.size(); ++i) {
    try {
      RoundRecord rec;
      rec.prediction = learner.predict();
      rec.loss = stream.losses[i].value(rec.prediction);
      rec.pool_size = 1;
      learner.update(stream.losses[i]);
      trace.rounds.push_back(std::move(rec));
    } catch (const std::exception& ex) {
      throw std::runtime_error("round " + std::to_string(i + 1) + ": " + ex.what());
    }
  }
  return trace;
}

}  // namespace detail

inline MetaOptions meta_options_for(const ExperimentConfig& cfg, const StreamData& stream) {
  MetaOptions opt;
  opt.k = resolve_schedule_base(cfg);
  opt.subroutine = cfg.subroutine;
  opt.lambda = stream.lambda;
  opt.alpha = stream.alpha;
  opt.grad_bound = stream.grad_bound;
  opt.meta_alpha = cfg.subroutine == Learner::Kind::ogd
                       ? derive_expconcavity(stream.lambda, stream.grad_bound)
                       : stream.alpha;
  return opt;
}

// One full experiment: synthesize the stream, run the algorithm,
// evaluate every enabled regret notion and bound check.
inline TrialResult run_trial(const ExperimentConfig& cfg) {
  validate_config(cfg);
  TrialResult r;
  r.cfg = cfg;
  r.stream = generate_stream(cfg);
  const std::int64_t t_max = cfg.rounds;

  if (cfg.algorithm == AlgorithmKind::iflh) {
    const MetaOptions opt = meta_options_for(cfg, r.stream);
    r.realized_k = opt.k;
    r.meta_alpha = opt.meta_alpha;
    r.m_bar = digits_bound(opt.k, t_max);
    r.realized_gamma = cfg.gamma > 0.0
                           ? cfg.gamma
                           : std::log(static_cast<double>(t_max)) /
                                 std::log(static_cast<double>(opt.k));
    r.trace = run_stream(opt, r.stream.domain, r.stream.losses);
  } else {
    r.trace = detail::run_bare(cfg, r.stream);
    r.meta_alpha = r.stream.alpha;
  }

  const std::vector<Vec> predictions = r.trace.predictions();
  StreamStats stats(r.stream.losses, r.stream.domain, predictions);

  r.static_regret_value = static_regret(stats);
  r.dynamic_regret_value = dynamic_regret(stats);
  r.variation_total = stats.total_variation();
  r.variation_exact = stats.variation_exact();

  std::vector<std::int64_t> taus = cfg.sa_taus;
  taus.push_back(t_max);
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  for (std::int64_t tau : taus) {
    if (tau >= 1 && tau <= t_max) r.sa_values.emplace_back(tau, sa_regret(stats, tau));
  }

  r.cum_loss.resize(static_cast<std::size_t>(t_max));
  r.inst_dynamic.resize(static_cast<std::size_t>(t_max));
  double acc = 0.0;
  for (std::int64_t t = 1; t <= t_max; ++t) {
    const double lt = r.trace.rounds[static_cast<std::size_t>(t - 1)].loss;
    acc += lt;
    r.cum_loss[static_cast<std::size_t>(t - 1)] = acc;
    r.inst_dynamic[static_cast<std::size_t>(t - 1)] =
        lt - per_round_minimum(r.stream.losses[static_cast<std::size_t>(t - 1)], r.stream.domain);
  }

  r.pool_max = 0;
  double pool_sum = 0.0;
  for (const RoundRecord& rec : r.trace.rounds) {
    r.pool_max = std::max(r.pool_max, rec.pool_size);
    pool_sum += static_cast<double>(rec.pool_size);
  }
  r.pool_mean = t_max > 0 ? pool_sum / static_cast<double>(t_max) : 0.0;

  if (cfg.eval_conversion && t_max >= 1) {
    const ConversionBound cb = adaptive_to_dynamic_bound(stats, nullptr, cfg.allow_quadratic_cost);
    r.conversion_by_length = cb.by_length;
    r.conversion_by_interval = cb.by_interval;
  }

  const bool is_iflh = cfg.algorithm == AlgorithmKind::iflh;
  if (is_iflh && t_max >= 2) {
    r.adaptive_bound =
        cfg.subroutine == Learner::Kind::ogd
            ? ogd_adaptive_bound(r.stream.lambda, r.stream.grad_bound, r.m_bar, t_max)
            : ons_adaptive_bound(cfg.dim, r.stream.alpha, r.stream.grad_bound,
                                 r.stream.domain.diameter(), r.m_bar, t_max);
    if (r.realized_gamma > 1.0) {
      r.dynamic_bound =
          cfg.subroutine == Learner::Kind::ogd
              ? ogd_dynamic_bound(r.stream.lambda, r.stream.grad_bound, r.realized_gamma, t_max,
                                  r.variation_total)
              : ons_dynamic_bound(cfg.dim, r.stream.alpha, r.stream.grad_bound,
                                  r.stream.domain.diameter(), r.realized_gamma, t_max,
                                  r.variation_total);
    }
  }

  // ---- bound checks ----
  if (is_iflh) {
    // the pool can never exceed the alive-set size bound
    BaseKSchedule sched(r.realized_k);
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (std::int64_t t = 1; t <= t_max; ++t) {
      const double excess =
          static_cast<double>(r.trace.rounds[static_cast<std::size_t>(t - 1)].pool_size -
                              sched.alive_bound(t));
      worst_excess = std::max(worst_excess, excess);
    }
    detail::add_check(r, "pool_excess", 0.0, worst_excess);

    if (cfg.check_adaptive && !std::isnan(r.adaptive_bound)) {
      double worst_sa = -std::numeric_limits<double>::infinity();
      for (const auto& [tau, value] : r.sa_values) worst_sa = std::max(worst_sa, value);
      detail::add_check(r, "adaptive_regret", r.adaptive_bound, worst_sa);
    }
    if (cfg.check_dynamic && !std::isnan(r.dynamic_bound)) {
      detail::add_check(r, "dynamic_regret", r.dynamic_bound, r.dynamic_regret_value);
    }
    if (cfg.check_conversion && !std::isnan(r.conversion_by_length)) {
      detail::add_check(r, "conversion",
                        r.conversion_by_length + 1e-6 * static_cast<double>(t_max),
                        r.dynamic_regret_value);
    }
    if (cfg.check_meta_regret && cfg.meta_regret_samples > 0 && !r.trace.expert_spans.empty()) {
      std::vector<std::size_t> idx(r.trace.expert_spans.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      Rng rng(cfg.seed ^ 0x6d657461u);
      for (std::size_t i = idx.size(); i > 1; --i) {  // Fisher-Yates
        std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng.uniform_int(
                      0, static_cast<std::int64_t>(i) - 1))]);
      }
      const std::size_t n =
          std::min<std::size_t>(idx.size(), static_cast<std::size_t>(cfg.meta_regret_samples));
      double worst_margin = std::numeric_limits<double>::infinity();
      double worst_bound = 0.0, worst_measured = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const ExpertSpan& span = r.trace.expert_spans[idx[i]];
        const double meta_loss = stats.interval_learner_loss(span.birth, span.last);
        const double measured = meta_loss - span.expert_loss;
        const double bound = expert_tracking_bound(r.meta_alpha, span.birth, span.last);
        if (bound - measured < worst_margin) {
          worst_margin = bound - measured;
          worst_bound = bound;
          worst_measured = measured;
        }
      }
      detail::add_check(r, "meta_regret", worst_bound, worst_measured);
    }
  } else if (t_max >= 2) {
    const double bound =
        cfg.algorithm == AlgorithmKind::bare_ogd
            ? ogd_static_bound(r.stream.lambda, r.stream.grad_bound, t_max)
            : ons_static_bound(cfg.dim, r.stream.alpha, r.stream.grad_bound,
                               r.stream.domain.diameter(), t_max);
    detail::add_check(r, "static_regret", bound, r.static_regret_value);
  }

  return r;
}

// ---- CSV emission ----------------------------------------------------

inline void write_trial_csv(std::ostream& out, const TrialResult& r) {
  out << "# iflh-trial v1\n";
  out << "# t,loss,pool_size,cum_loss,inst_dynamic_regret\n";
  for (std::size_t i = 0; i < r.trace.rounds.size(); ++i) {
    const RoundRecord& rec = r.trace.rounds[i];
    out << (i + 1) << ',' << format_double(rec.loss) << ',' << rec.pool_size << ','
        << format_double(r.cum_loss[i]) << ',' << format_double(r.inst_dynamic[i]) << "\n";
  }
  out << "# summary: rounds,k,gamma,meta_alpha,grad_bound,lambda,alpha,static_regret,"
         "dynamic_regret,variation_total,variation_exact,conversion_by_length,"
         "conversion_by_interval,adaptive_bound,dynamic_bound,pool_max,pool_mean";
  for (const auto& [tau, value] : r.sa_values) {
    (void)value;
    out << ",sa@" << tau;
  }
  out << "\n";
  out << "summary," << r.cfg.rounds << ',' << r.realized_k << ','
      << format_double(r.realized_gamma) << ',' << format_double(r.meta_alpha) << ','
      << format_double(r.stream.grad_bound) << ',' << format_double(r.stream.lambda) << ','
      << format_double(r.stream.alpha) << ',' << format_double(r.static_regret_value) << ','
      << format_double(r.dynamic_regret_value) << ',' << format_double(r.variation_total) << ','
      << (r.variation_exact ? "exact" : "approx") << ','
      << format_double(r.conversion_by_length) << ',' << format_double(r.conversion_by_interval)
      << ',' << format_double(r.adaptive_bound) << ',' << format_double(r.dynamic_bound) << ','
      << r.pool_max << ',' << format_double(r.pool_mean);
  for (const auto& [tau, value] : r.sa_values) {
    (void)tau;
    out << ',' << format_double(value);
  }
  out << "\n";
  out << "# check: name,bound,measured,margin,status\n";
  for (const BoundCheck& c : r.checks) {
    out << "check," << c.name << ',' << format_double(c.bound) << ','
        << format_double(c.measured) << ',' << format_double(c.margin) << ','
        << (c.pass ? "pass" : "fail") << "\n";
  }
}

// ---- schedule-base sweep ----------------------------------------------

struct SweepRow {
  std::int64_t k = 0;
  std::int64_t pool_max = 0;
  double pool_mean = 0.0;
  double step_micros_median = 0.0;
  double dynamic_regret_value = 0.0;
  std::vector<std::pair<std::int64_t, double>> sa_values;
  std::vector<std::int64_t> pool_sizes;
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// Runs the same stream under several schedule bases. Trials execute in
// parallel, each owning its state; rows come back in input order.
inline std::vector<SweepRow> sweep_schedule_base(const ExperimentConfig& cfg,
                                                 const std::vector<std::int64_t>& bases) {
  if (bases.size() < 2) throw InvalidConfig("a sweep needs at least two schedule bases");
  validate_config(cfg);
  const StreamData stream = generate_stream(cfg);
  const std::int64_t t_max = cfg.rounds;

  auto one = [&](std::int64_t k) {
    ExperimentConfig local = cfg;
    local.schedule_k = k;
    local.gamma = 0.0;
    const MetaOptions opt = meta_options_for(local, stream);
    std::vector<double> micros;
    micros.reserve(static_cast<std::size_t>(t_max));
    const StreamTrace trace = run_stream(opt, stream.domain, stream.losses, &micros);
    StreamStats stats(stream.losses, stream.domain, trace.predictions());
    SweepRow row;
    row.k = k;
    row.step_micros_median = detail::median(micros);
    double pool_sum = 0.0;
    for (const RoundRecord& rec : trace.rounds) {
      row.pool_max = std::max(row.pool_max, rec.pool_size);
      pool_sum += static_cast<double>(rec.pool_size);
      row.pool_sizes.push_back(rec.pool_size);
    }
    row.pool_mean = t_max > 0 ? pool_sum / static_cast<double>(t_max) : 0.0;
    std::vector<std::int64_t> taus = cfg.sa_taus;
    taus.push_back(t_max);
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    for (std::int64_t tau : taus) {
      if (tau >= 1 && tau <= t_max) row.sa_values.emplace_back(tau, sa_regret(stats, tau));
    }
    row.dynamic_regret_value = dynamic_regret(stats);
    return row;
  };

  std::vector<std::future<SweepRow>> futures;
  futures.reserve(bases.size());
  for (std::int64_t k : bases) {
    futures.push_back(std::async(std::launch::async, one, k));
  }
  std::vector<SweepRow> rows;
  rows.reserve(bases.size());
  for (auto& f : futures) rows.push_back(f.get());
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "# iflh-sweep v1\n";
  out << "# k,pool_max,pool_mean,step_micros_median,dynamic_regret";
  if (!rows.empty()) {
    for (const auto& [tau, value] : rows.front().sa_values) {
      (void)value;
      out << ",sa@" << tau;
    }
  }
  out << "\n";
  for (const SweepRow& row : rows) {
    out << row.k << ',' << row.pool_max << ',' << format_double(row.pool_mean) << ','
        << format_double(row.step_micros_median) << ','
        << format_double(row.dynamic_regret_value);
    for (const auto& [tau, value] : row.sa_values) {
      (void)tau;
      out << ',' << format_double(value);
    }
    out << "\n";
  }
}

// ---- exhaustive schedule verification ----------------------------------

struct ScheduleCheckReport {
  std::int64_t k = 0;
  std::int64_t t_max = 0;
  std::int64_t progress_checked = 0, progress_violations = 0;
  std::int64_t bound_checked = 0, bound_violations = 0;
  std::int64_t consistency_checked = 0, consistency_violations = 0;
  std::int64_t brute_checked = 0, brute_mismatches = 0;
  std::int64_t cover_checked = 0, cover_violations = 0;
  bool decimal_examples_ok = true;

  bool pass() const {
    return progress_violations == 0 && bound_violations == 0 && consistency_violations == 0 &&
           brute_mismatches == 0 && cover_violations == 0 && decimal_examples_ok;
  }
};

inline ScheduleCheckReport verify_schedule(std::int64_t k, std::int64_t t_max,
                                           std::int64_t random_intervals = 10000) {
  if (t_max < 1) throw InvalidParameter("verify_schedule requires t_max >= 1");
  BaseKSchedule sched(k);  // rejects K < 2
  ScheduleCheckReport rep;
  rep.k = k;
  rep.t_max = t_max;

  for (std::int64_t t = 1; t <= t_max; ++t) {
    ++rep.progress_checked;
    if (sched.ending_time(t) <= t) ++rep.progress_violations;

    const std::vector<std::int64_t> alive = sched.alive_set(t);
    ++rep.bound_checked;
    if (static_cast<std::int64_t>(alive.size()) > sched.alive_bound(t)) ++rep.bound_violations;
    for (std::int64_t j : alive) {
      ++rep.consistency_checked;
      if (!(j <= t && t < sched.ending_time(j))) ++rep.consistency_violations;
    }

    if (t <= 2000) {
      std::vector<std::int64_t> brute;
      for (std::int64_t j = 1; j <= t; ++j) {
        if (sched.ending_time(j) > t) brute.push_back(j);
      }
      ++rep.brute_checked;
      if (brute != alive) ++rep.brute_mismatches;
    }
  }

  Rng rng(0xC0FFEEu + static_cast<std::uint64_t>(k));
  for (std::int64_t i = 0; i < random_intervals; ++i) {
    const std::int64_t r = rng.uniform_int(1, t_max);
    const std::int64_t s = rng.uniform_int(r, t_max);
    const std::vector<Segment> segs = sched.covering_segments(r, s);
    ++rep.cover_checked;
    bool ok = !segs.empty() && segs.front().start == r && segs.back().end_exclusive > s &&
              static_cast<std::int64_t>(segs.size()) <= digits_bound(k, s);
    for (std::size_t j = 0; ok && j < segs.size(); ++j) {
      ok = segs[j].end_exclusive == sched.ending_time(segs[j].start);
      if (ok && j + 1 < segs.size()) ok = segs[j + 1].start == segs[j].end_exclusive;
    }
    if (!ok) ++rep.cover_violations;
  }

  if (k == 10 && t_max >= 1000) {
    bool ok = true;
    for (std::int64_t t = 1; t <= 9; ++t) ok = ok && sched.ending_time(t) == 10;
    for (std::int64_t t = 11; t <= 19; ++t) ok = ok && sched.ending_time(t) == 20;
    for (std::int64_t t = 10; t <= 90; t += 10) ok = ok && sched.ending_time(t) == 100;
    ok = ok && sched.ending_time(111) == 120 && sched.ending_time(120) == 200 &&
         sched.ending_time(200) == 1000;

    std::vector<std::int64_t> expected;
    for (std::int64_t j = 481; j <= 486; ++j) expected.push_back(j);
    for (std::int64_t j = 410; j <= 480; j += 10) expected.push_back(j);
    for (std::int64_t j = 100; j <= 400; j += 100) expected.push_back(j);
    std::sort(expected.begin(), expected.end());
    ok = ok && sched.alive_set(486) == expected;

    const std::vector<Segment> cover = sched.covering_segments(111, 832);
    ok = ok && cover.size() == 3 && cover[0] == Segment{111, 120} &&
         cover[1] == Segment{120, 200} && cover[2] == Segment{200, 1000};
    rep.decimal_examples_ok = ok;
  }
  return rep;
}

inline void write_schedule_report(std::ostream& out, const ScheduleCheckReport& rep) {
  out << "schedule base K = " << rep.k << ", t_max = " << rep.t_max << "\n";
  out << "  progress      " << rep.progress_checked << " checked, " << rep.progress_violations
      << " violations\n";
  out << "  alive bound   " << rep.bound_checked << " checked, " << rep.bound_violations
      << " violations\n";
  out << "  consistency   " << rep.consistency_checked << " checked, "
      << rep.consistency_violations << " violations\n";
  out << "  brute force   " << rep.brute_checked << " checked, " << rep.brute_mismatches
      << " mismatches\n";
  out << "  covers        " << rep.cover_checked << " checked, " << rep.cover_violations
      << " violations\n";
  if (rep.k == 10 && rep.t_max >= 1000) {
    out << "  worked examples " << (rep.decimal_examples_ok ? "ok" : "FAILED") << "\n";
  }
  out << (rep.pass() ? "PASS" : "FAIL") << "\n";
}

}  // namespace iflh
