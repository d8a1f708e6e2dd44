// Experiment driver. Subcommands:
//   run <config>                  one trial, CSV trace + bound checks
//   sweep <config> --k-values ... same stream under several schedule bases
//   verify-schedule --k K --t-max N   exhaustive ending-time checks
//
// Exit codes: 0 all enabled checks pass, 1 bound violation, 2 config or
// runtime error. IFLH_OUTPUT_DIR overrides the output directory.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iflh/experiment.hpp"

namespace {

std::string resolve_output(const std::string& configured) {
  const char* dir = std::getenv("IFLH_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0') return configured;
  const std::size_t slash = configured.find_last_of('/');
  const std::string base = slash == std::string::npos ? configured : configured.substr(slash + 1);
  return std::string(dir) + "/" + base;
}

int do_run(const std::string& config_path) {
  const iflh::ExperimentConfig cfg = iflh::load_config_file(config_path);
  const iflh::TrialResult result = iflh::run_trial(cfg);
  const std::string out_path = resolve_output(cfg.output_path);
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot open output file: " << out_path << "\n";
    return 2;
  }
  iflh::write_trial_csv(out, result);
  std::cout << "trace written to " << out_path << "\n";
  for (const iflh::BoundCheck& c : result.checks) {
    std::cout << (c.pass ? "  pass  " : "  FAIL  ") << c.name
              << "  bound=" << iflh::format_double(c.bound)
              << "  measured=" << iflh::format_double(c.measured)
              << "  margin=" << iflh::format_double(c.margin) << "\n";
  }
  return result.all_checks_pass ? 0 : 1;
}

int do_sweep(const std::string& config_path, const std::vector<std::int64_t>& ks,
             const std::vector<double>& gammas) {
  iflh::ExperimentConfig cfg = iflh::load_config_file(config_path);
  std::vector<std::int64_t> bases = ks;
  for (double g : gammas) {
    iflh::ExperimentConfig probe = cfg;
    probe.schedule_k = 0;
    probe.gamma = g;
    bases.push_back(iflh::resolve_schedule_base(probe));
  }
  if (bases.size() < 2) {
    std::cerr << "sweep needs at least two schedule bases\n";
    return 2;
  }
  const std::vector<iflh::SweepRow> rows = iflh::sweep_schedule_base(cfg, bases);
  const std::string out_path = resolve_output(cfg.output_path);
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot open output file: " << out_path << "\n";
    return 2;
  }
  iflh::write_sweep_csv(out, rows);
  std::cout << "sweep written to " << out_path << "\n";

  bool pool_ok = true;
  for (const iflh::SweepRow& row : rows) {
    iflh::BaseKSchedule sched(row.k);
    for (std::size_t t = 0; t < row.pool_sizes.size(); ++t) {
      pool_ok = pool_ok &&
                row.pool_sizes[t] <= sched.alive_bound(static_cast<std::int64_t>(t) + 1);
    }
    std::cout << "  K=" << row.k << "  pool_max=" << row.pool_max
              << "  pool_mean=" << iflh::format_double(row.pool_mean)
              << "  step_us=" << iflh::format_double(row.step_micros_median) << "\n";
  }
  if (!pool_ok) {
    std::cout << "  FAIL  pool size exceeded the alive-set bound\n";
    return 1;
  }
  return 0;
}

int do_verify(std::int64_t k, std::int64_t t_max) {
  const iflh::ScheduleCheckReport rep = iflh::verify_schedule(k, t_max);
  iflh::write_schedule_report(std::cout, rep);
  return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"expert-pool meta-learner experiment harness"};
  app.require_subcommand(1);

  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "run one trial from a config file");
  run->add_option("config", run_config, "config file")->required();

  std::string sweep_config;
  std::vector<std::int64_t> k_values;
  std::vector<double> gamma_values;
  CLI::App* sweep = app.add_subcommand("sweep", "run one stream under several schedule bases");
  sweep->add_option("config", sweep_config, "config file")->required();
  sweep->add_option("--k-values", k_values, "schedule bases")->delimiter(',');
  sweep->add_option("--gamma-values", gamma_values, "bases given as T^(1/gamma)")->delimiter(',');

  std::int64_t verify_k = 0;
  std::int64_t verify_t_max = 100000;
  CLI::App* verify = app.add_subcommand("verify-schedule", "exhaustive ending-time checks");
  verify->add_option("--k", verify_k, "schedule base")->required();
  verify->add_option("--t-max", verify_t_max, "largest round to check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return do_run(run_config);
    if (sweep->parsed()) return do_sweep(sweep_config, k_values, gamma_values);
    if (verify->parsed()) return do_verify(verify_k, verify_t_max);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
