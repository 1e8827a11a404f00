// Command-line front end: seeded Monte Carlo runs, parameter sweeps and
// single-run convergence traces for the cell-free XL-MIMO uplink simulator.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cfxl/baselines.hpp"
#include "cfxl/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitTrialFailures = 2;
constexpr int kExitIoError = 3;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string mode;
  int trials = -1;
  long long seed = -1;
  int threads = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_trials) {
  cmd->add_option("--config", opts.config_path, "config file (key = value, [afp]/[experiment])");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--mode", opts.mode, "centralized|decentralized")
      ->check(CLI::IsMember({"centralized", "decentralized"}));
  if (with_trials) cmd->add_option("--trials", opts.trials, "Monte Carlo trial count");
  cmd->add_option("--seed", opts.seed, "base seed");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
}

cfxl::FileConfig load_or_default(const CommonOpts& opts) {
  cfxl::FileConfig cfg =
      opts.config_path.empty() ? cfxl::FileConfig{} : cfxl::load_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (!opts.mode.empty()) cfg.mode = opts.mode;
  if (opts.trials >= 0) cfg.trials = opts.trials;
  if (opts.seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(opts.seed);
  if (opts.threads >= 0) cfg.threads = opts.threads;
  return cfg;
}

int run_spec(const cfxl::ExperimentSpec& spec) {
  const cfxl::AggregateResult result = cfxl::run_experiment(spec);
  cfxl::emit_outputs(result, spec);
  for (const auto& cell : result.cells)
    std::printf("%-12s %s=%-8g mean_sum_rate=%.4f stderr=%.4f trials=%d\n",
                cell.scheme_label.c_str(), cfxl::sweep_var_name(spec.var), cell.value,
                cell.mean_sum_rate, cell.std_error, cell.ok_count);
  const int failed = result.failed_trials();
  if (failed > 0) {
    std::fprintf(stderr, "%d trial(s) failed; see manifest.json\n", failed);
    return kExitTrialFailures;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cell-free XL-MIMO uplink reception simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts, trace_opts;

  auto* run_cmd = app.add_subcommand("run", "Monte Carlo run at the configured parameters");
  add_common(run_cmd, run_opts, true);
  std::string run_schemes;
  run_cmd->add_option("--schemes", run_schemes, "comma list: afp[:init],evd,mf,random");

  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one variable over a value list");
  add_common(sweep_cmd, sweep_opts, true);
  std::string sweep_var, sweep_values, sweep_schemes;
  sweep_cmd->add_option("--var", sweep_var, "cf|m|n|l|k");
  sweep_cmd->add_option("--values", sweep_values, "comma list, e.g. 1,2,4,8,16");
  sweep_cmd->add_option("--schemes", sweep_schemes, "comma list: afp[:init],evd,mf,random");

  auto* trace_cmd = app.add_subcommand("trace", "single-trial convergence trace");
  add_common(trace_cmd, trace_opts, false);
  std::string trace_scheme = "afp", trace_init, trace_solution_path;
  trace_cmd->add_option("--scheme", trace_scheme, "afp (iterative schemes only)");
  trace_cmd->add_option("--init", trace_init, "evd|random");
  trace_cmd->add_option("--save-solution", trace_solution_path,
                        "also write the final solution as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      cfxl::FileConfig cfg = load_or_default(run_opts);
      if (!run_schemes.empty()) {
        cfg.scheme_tokens.clear();
        std::stringstream ss(run_schemes);
        std::string tok;
        while (std::getline(ss, tok, ',')) cfg.scheme_tokens.push_back(tok);
      }
      cfg.sweep_values.clear();  // run = single point at the configured params
      return run_spec(cfxl::spec_from_config(cfg));
    }

    if (sweep_cmd->parsed()) {
      cfxl::FileConfig cfg = load_or_default(sweep_opts);
      if (!sweep_var.empty()) cfg.sweep_var = sweep_var;
      if (!sweep_values.empty()) cfg.sweep_values = cfxl::parse_value_list(sweep_values);
      if (!sweep_schemes.empty()) {
        cfg.scheme_tokens.clear();
        std::stringstream ss(sweep_schemes);
        std::string tok;
        while (std::getline(ss, tok, ',')) cfg.scheme_tokens.push_back(tok);
      }
      return run_spec(cfxl::spec_from_config(cfg));
    }

    // trace
    cfxl::FileConfig cfg = load_or_default(trace_opts);
    if (!trace_init.empty()) cfg.default_init = trace_init;
    const cfxl::SchemeSpec scheme = cfxl::parse_scheme(trace_scheme, cfg.default_init);
    if (!scheme.is_afp())
      throw cfxl::ConfigError("trace requires an iterative scheme (afp)");
    cfxl::ExperimentSpec spec = cfxl::spec_from_config(cfg);
    spec.validate();

    const cfxl::SystemParams params = spec.params;
    const std::uint64_t seed = cfxl::trial_seed(spec.base_seed, 0, params.C_F);
    const auto placement = cfxl::draw_placement(params, seed);
    const auto chan = cfxl::draw_channel(params, placement, seed);
    const cfxl::Solution init = cfxl::baseline_solution(
        scheme.init == "evd" ? cfxl::BaselineKind::EVD : cfxl::BaselineKind::RANDOM, params, chan,
        seed);

    cfxl::ConvergenceTrace trace;
    cfxl::Solution final_sol;
    std::vector<cfxl::Message> messages;
    if (spec.decentralized) {
      auto r = cfxl::run_decentralized(params, chan, init, spec.afp);
      trace = std::move(r.trace);
      final_sol = std::move(r.solution);
      messages = std::move(r.messages);
    } else {
      auto r = cfxl::run_afp(params, chan, init, spec.afp);
      trace = std::move(r.trace);
      final_sol = std::move(r.solution);
    }

    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);
    if (ec) throw cfxl::IoError("cannot create output directory: " + ec.message());
    const auto path =
        std::filesystem::path(spec.out_dir) / ("trace_" + scheme.name + "_" + scheme.init + ".csv");
    std::ofstream f(path);
    if (!f) throw cfxl::IoError("cannot open " + path.string());
    trace.to_csv(f);
    if (!messages.empty()) {
      std::ofstream mf(std::filesystem::path(spec.out_dir) / "messages.csv");
      if (!mf) throw cfxl::IoError("cannot open messages.csv");
      cfxl::messages_to_csv(messages, mf);
    }
    if (!trace_solution_path.empty()) cfxl::save_solution(final_sol, trace_solution_path);
    std::printf("trace: %zu outer iterations, final sum-rate %.6f bits/s/Hz -> %s\n",
                trace.rows.size(),
                trace.rows.empty() ? trace.initial_sum_rate : trace.rows.back().sum_rate,
                path.string().c_str());
    return kExitOk;
  } catch (const cfxl::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIoError;
  } catch (const cfxl::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitTrialFailures;
  }
}
