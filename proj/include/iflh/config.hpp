#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "iflh/geometry.hpp"
#include "iflh/learners.hpp"
#include "iflh/losses.hpp"

namespace iflh {

// Formats a double with 17 significant digits, enough to round-trip
// the exact bit pattern through text.
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

enum class DriftKind { stationary, piecewise, continuous };
enum class AlgorithmKind { iflh, bare_ogd, bare_ons };

// Flat key = value experiment description. One file describes one
// trial: the environment, the algorithm, and which evaluators and
// bound checks to run on the finished trace.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::int64_t rounds = 1000;  // horizon T
  int dim = 2;

  Domain::Kind domain_kind = Domain::Kind::ball;
  Vec domain_center;  // ball
  double domain_radius = 1.0;
  Vec box_lower, box_upper;  // box

  LossFunction::Family family = LossFunction::Family::shifted_quadratic;
  double scale = 1.0;  // strong convexity of the quadratic families

  DriftKind drift = DriftKind::stationary;
  int num_switches = 0;
  double jump_size = 0.0;
  double step_size = 0.0;
  double center_radius = 0.0;  // 0 means half the ball radius

  AlgorithmKind algorithm = AlgorithmKind::iflh;
  Learner::Kind subroutine = Learner::Kind::ogd;
  std::int64_t schedule_k = 0;  // one of schedule_k / gamma must be set for iflh
  double gamma = 0.0;

  std::vector<std::int64_t> sa_taus;  // horizon is always appended
  bool eval_conversion = true;
  int meta_regret_samples = 50;
  bool check_adaptive = true;
  bool check_dynamic = true;
  bool check_conversion = true;
  bool check_meta_regret = true;
  bool allow_quadratic_cost = false;

  std::string output_path = "trial.csv";

  Domain make_domain() const {
    if (domain_kind == Domain::Kind::ball) return Domain::ball(domain_center, domain_radius);
    return Domain::box(box_lower, box_upper);
  }

  double drift_radius() const {
    return center_radius > 0.0 ? center_radius : 0.5 * domain_radius;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw InvalidConfig("empty element in list: " + s);
    std::size_t pos = 0;
    out.push_back(std::stod(item, &pos));
    if (pos != item.size()) throw InvalidConfig("bad number: " + item);
  }
  return out;
}

inline Vec to_vec(const std::vector<double>& v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
  return x;
}

inline std::string vec_to_string(const Vec& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_double(v[i]);
  }
  return s;
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw InvalidConfig("expected a boolean, got: " + s);
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string val = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) throw InvalidConfig("line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw InvalidConfig("duplicate key: " + key);
    kv[key] = val;
  }

  ExperimentConfig cfg;
  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) return std::string();
    const std::string v = it->second;
    kv.erase(it);
    return v;
  };

  std::string v;
  if (!(v = take("seed")).empty()) cfg.seed = std::stoull(v);
  if (!(v = take("rounds")).empty()) cfg.rounds = std::stoll(v);
  if (!(v = take("dim")).empty()) cfg.dim = std::stoi(v);

  if (!(v = take("domain")).empty()) {
    if (v == "ball") cfg.domain_kind = Domain::Kind::ball;
    else if (v == "box") cfg.domain_kind = Domain::Kind::box;
    else throw InvalidConfig("unknown domain kind: " + v);
  }
  if (!(v = take("domain.center")).empty()) cfg.domain_center = detail::to_vec(detail::parse_reals(v));
  if (!(v = take("domain.radius")).empty()) cfg.domain_radius = std::stod(v);
  if (!(v = take("domain.lower")).empty()) cfg.box_lower = detail::to_vec(detail::parse_reals(v));
  if (!(v = take("domain.upper")).empty()) cfg.box_upper = detail::to_vec(detail::parse_reals(v));

  if (!(v = take("loss")).empty()) {
    if (v == "quadratic") cfg.family = LossFunction::Family::shifted_quadratic;
    else if (v == "reglinear") cfg.family = LossFunction::Family::regularized_linear;
    else if (v == "logloss") cfg.family = LossFunction::Family::log_loss;
    else throw InvalidConfig("unknown loss family: " + v);
  }
  if (!(v = take("loss.scale")).empty()) cfg.scale = std::stod(v);

  if (!(v = take("drift")).empty()) {
    if (v == "stationary") cfg.drift = DriftKind::stationary;
    else if (v == "piecewise") cfg.drift = DriftKind::piecewise;
    else if (v == "continuous") cfg.drift = DriftKind::continuous;
    else throw InvalidConfig("unknown drift kind: " + v);
  }
  if (!(v = take("drift.switches")).empty()) cfg.num_switches = std::stoi(v);
  if (!(v = take("drift.jump")).empty()) cfg.jump_size = std::stod(v);
  if (!(v = take("drift.step")).empty()) cfg.step_size = std::stod(v);
  if (!(v = take("drift.center_radius")).empty()) cfg.center_radius = std::stod(v);

  if (!(v = take("algorithm")).empty()) {
    if (v == "iflh") cfg.algorithm = AlgorithmKind::iflh;
    else if (v == "ogd") cfg.algorithm = AlgorithmKind::bare_ogd;
    else if (v == "ons") cfg.algorithm = AlgorithmKind::bare_ons;
    else throw InvalidConfig("unknown algorithm: " + v);
  }
  if (!(v = take("iflh.subroutine")).empty()) {
    if (v == "ogd") cfg.subroutine = Learner::Kind::ogd;
    else if (v == "ons") cfg.subroutine = Learner::Kind::ons;
    else throw InvalidConfig("unknown subroutine: " + v);
  }
  if (!(v = take("iflh.k")).empty()) cfg.schedule_k = std::stoll(v);
  if (!(v = take("iflh.gamma")).empty()) cfg.gamma = std::stod(v);

  if (!(v = take("eval.sa_taus")).empty()) {
    cfg.sa_taus.clear();
    for (double x : detail::parse_reals(v)) cfg.sa_taus.push_back(static_cast<std::int64_t>(x));
  }
  if (!(v = take("eval.conversion_bound")).empty()) cfg.eval_conversion = detail::parse_bool(v);
  if (!(v = take("eval.meta_regret_samples")).empty()) cfg.meta_regret_samples = std::stoi(v);
  if (!(v = take("check.adaptive")).empty()) cfg.check_adaptive = detail::parse_bool(v);
  if (!(v = take("check.dynamic")).empty()) cfg.check_dynamic = detail::parse_bool(v);
  if (!(v = take("check.conversion")).empty()) cfg.check_conversion = detail::parse_bool(v);
  if (!(v = take("check.meta_regret")).empty()) cfg.check_meta_regret = detail::parse_bool(v);
  if (!(v = take("allow_quadratic_cost")).empty()) cfg.allow_quadratic_cost = detail::parse_bool(v);
  if (!(v = take("output")).empty()) cfg.output_path = v;

  if (!kv.empty()) throw InvalidConfig("unknown key: " + kv.begin()->first);

  if (cfg.domain_center.size() == 0) cfg.domain_center = Vec::Zero(cfg.dim);
  return cfg;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file: " + path);
  return parse_config(in);
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "seed = " << cfg.seed << "\n";
  out << "rounds = " << cfg.rounds << "\n";
  out << "dim = " << cfg.dim << "\n";
  out << "domain = " << (cfg.domain_kind == Domain::Kind::ball ? "ball" : "box") << "\n";
  if (cfg.domain_kind == Domain::Kind::ball) {
    out << "domain.center = " << detail::vec_to_string(cfg.domain_center) << "\n";
    out << "domain.radius = " << format_double(cfg.domain_radius) << "\n";
  } else {
    out << "domain.lower = " << detail::vec_to_string(cfg.box_lower) << "\n";
    out << "domain.upper = " << detail::vec_to_string(cfg.box_upper) << "\n";
  }
  switch (cfg.family) {
    case LossFunction::Family::shifted_quadratic: out << "loss = quadratic\n"; break;
    case LossFunction::Family::regularized_linear: out << "loss = reglinear\n"; break;
    case LossFunction::Family::log_loss: out << "loss = logloss\n"; break;
  }
  out << "loss.scale = " << format_double(cfg.scale) << "\n";
  switch (cfg.drift) {
    case DriftKind::stationary: out << "drift = stationary\n"; break;
    case DriftKind::piecewise: out << "drift = piecewise\n"; break;
    case DriftKind::continuous: out << "drift = continuous\n"; break;
  }
  out << "drift.switches = " << cfg.num_switches << "\n";
  out << "drift.jump = " << format_double(cfg.jump_size) << "\n";
  out << "drift.step = " << format_double(cfg.step_size) << "\n";
  out << "drift.center_radius = " << format_double(cfg.center_radius) << "\n";
  switch (cfg.algorithm) {
    case AlgorithmKind::iflh: out << "algorithm = iflh\n"; break;
    case AlgorithmKind::bare_ogd: out << "algorithm = ogd\n"; break;
    case AlgorithmKind::bare_ons: out << "algorithm = ons\n"; break;
  }
  out << "iflh.subroutine = " << (cfg.subroutine == Learner::Kind::ogd ? "ogd" : "ons") << "\n";
  out << "iflh.k = " << cfg.schedule_k << "\n";
  out << "iflh.gamma = " << format_double(cfg.gamma) << "\n";
  if (!cfg.sa_taus.empty()) {
    out << "eval.sa_taus = ";
    for (std::size_t i = 0; i < cfg.sa_taus.size(); ++i) {
      if (i) out << ",";
      out << cfg.sa_taus[i];
    }
    out << "\n";
  }
  out << "eval.conversion_bound = " << (cfg.eval_conversion ? "true" : "false") << "\n";
  out << "eval.meta_regret_samples = " << cfg.meta_regret_samples << "\n";
  out << "check.adaptive = " << (cfg.check_adaptive ? "true" : "false") << "\n";
  out << "check.dynamic = " << (cfg.check_dynamic ? "true" : "false") << "\n";
  out << "check.conversion = " << (cfg.check_conversion ? "true" : "false") << "\n";
  out << "check.meta_regret = " << (cfg.check_meta_regret ? "true" : "false") << "\n";
  out << "allow_quadratic_cost = " << (cfg.allow_quadratic_cost ? "true" : "false") << "\n";
  out << "output = " << cfg.output_path << "\n";
  return out.str();
}

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.rounds < 1) throw InvalidConfig("rounds must be >= 1");
  if (cfg.dim < 1) throw InvalidConfig("dim must be >= 1");
  if (cfg.domain_kind == Domain::Kind::ball) {
    if (!(cfg.domain_radius > 0.0)) throw InvalidConfig("domain radius must be positive");
    if (cfg.domain_center.size() != cfg.dim) throw InvalidConfig("domain center has wrong dimension");
    if (cfg.drift_radius() >= cfg.domain_radius) {
      throw InvalidConfig("drift center radius must leave a margin inside the domain");
    }
  } else {
    if (cfg.box_lower.size() != cfg.dim || cfg.box_upper.size() != cfg.dim) {
      throw InvalidConfig("box bounds have wrong dimension");
    }
  }
  if (!(cfg.scale > 0.0)) throw InvalidConfig("loss scale must be positive");
  if (cfg.drift == DriftKind::piecewise) {
    if (cfg.num_switches < 0) throw InvalidConfig("switch count must be nonnegative");
    if (cfg.num_switches > 0 && !(cfg.jump_size > 0.0)) {
      throw InvalidConfig("piecewise drift needs a positive jump size");
    }
  }
  if (cfg.drift == DriftKind::continuous && !(cfg.step_size > 0.0)) {
    throw InvalidConfig("continuous drift needs a positive step size");
  }
  if (cfg.drift != DriftKind::stationary && cfg.dim < 2 &&
      cfg.domain_kind == Domain::Kind::ball) {
    throw InvalidConfig("drifting ball environments need dim >= 2");
  }
  if (cfg.domain_kind == Domain::Kind::ball) {
    const double reach = 2.0 * cfg.drift_radius();
    if (cfg.drift == DriftKind::piecewise && cfg.num_switches > 0 && cfg.jump_size > reach) {
      throw InvalidConfig("jump size exceeds the drift sphere");
    }
    if (cfg.drift == DriftKind::continuous && cfg.step_size > reach) {
      throw InvalidConfig("step size exceeds the drift sphere");
    }
  }
  if (cfg.algorithm == AlgorithmKind::iflh) {
    if (cfg.schedule_k == 0 && cfg.gamma == 0.0) {
      throw InvalidConfig("iflh needs iflh.k or iflh.gamma");
    }
    if (cfg.schedule_k != 0 && cfg.schedule_k < 2) throw InvalidConfig("iflh.k must be >= 2");
    if (cfg.gamma != 0.0 && !(cfg.gamma > 1.0)) throw InvalidConfig("iflh.gamma must be > 1");
  }
  if ((cfg.algorithm == AlgorithmKind::bare_ons ||
       (cfg.algorithm == AlgorithmKind::iflh && cfg.subroutine == Learner::Kind::ons)) &&
      cfg.domain_kind != Domain::Kind::ball) {
    throw InvalidConfig("the ons subroutine requires a ball domain");
  }
  if (cfg.family == LossFunction::Family::log_loss &&
      (cfg.algorithm == AlgorithmKind::bare_ogd ||
       (cfg.algorithm == AlgorithmKind::iflh && cfg.subroutine == Learner::Kind::ogd))) {
    throw InvalidConfig("log-loss streams are not strongly convex; use the ons subroutine");
  }
  if (cfg.meta_regret_samples < 0) throw InvalidConfig("meta_regret_samples must be >= 0");
  for (std::int64_t tau : cfg.sa_taus) {
    if (tau < 1) throw InvalidConfig("sa_taus entries must be >= 1");
  }
}

}  // namespace iflh
