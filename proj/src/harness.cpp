#include "cfxl/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "cfxl/baselines.hpp"
#include "cfxl/linalg.hpp"
#include "cfxl/rng.hpp"
#include "json.hpp"

namespace cfxl {
namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string sanitize_label(const std::string& label) {
  std::string out = label;
  for (auto& c : out)
    if (c == ':' || c == '/' || c == ' ') c = '-';
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

SchemeSpec parse_scheme(const std::string& token, const std::string& default_init) {
  SchemeSpec s;
  const std::size_t colon = token.find(':');
  s.name = token.substr(0, colon);
  s.init = colon == std::string::npos ? default_init : token.substr(colon + 1);
  if (s.name != "afp" && s.name != "evd" && s.name != "mf" && s.name != "random")
    throw ConfigError("unknown scheme '" + s.name + "' (expected afp, evd, mf or random)");
  if (s.is_afp() && s.init != "evd" && s.init != "random")
    throw ConfigError("unknown afp init '" + s.init + "' (expected evd or random)");
  if (!s.is_afp() && colon != std::string::npos)
    throw ConfigError("scheme '" + s.name + "' does not take an init");
  return s;
}

SweepVar sweep_var_from_string(const std::string& name) {
  if (name == "cf") return SweepVar::CF;
  if (name == "m") return SweepVar::M;
  if (name == "n") return SweepVar::N;
  if (name == "l") return SweepVar::L;
  if (name == "k") return SweepVar::K;
  throw ConfigError("unknown sweep variable '" + name + "' (expected cf, m, n, l or k)");
}

const char* sweep_var_name(SweepVar var) {
  switch (var) {
    case SweepVar::CF: return "cf";
    case SweepVar::M: return "m";
    case SweepVar::N: return "n";
    case SweepVar::L: return "l";
    case SweepVar::K: return "k";
  }
  return "?";
}

SystemParams ExperimentSpec::params_for(double value) const {
  SystemParams p = params;
  switch (var) {
    case SweepVar::CF: p.C_F = value; break;
    case SweepVar::M: p.M = static_cast<int>(std::llround(value)); break;
    case SweepVar::N: p.N = static_cast<int>(std::llround(value)); break;
    case SweepVar::L: p.L = static_cast<int>(std::llround(value)); break;
    case SweepVar::K: p.K = static_cast<int>(std::llround(value)); break;
  }
  return p;
}

void ExperimentSpec::validate() const {
  if (schemes.empty()) throw ConfigError("no schemes configured");
  if (values.empty()) throw ConfigError("sweep value list is empty");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  afp.validate();
  for (const double v : values) {
    const SystemParams p = params_for(v);
    p.validate();
    for (const auto& s : schemes)
      if (s.name == "mf" && p.N > p.K)
        throw ConfigError("mf scheme requires N <= K at every sweep value");
  }
}

ExperimentSpec spec_from_config(const FileConfig& cfg) {
  ExperimentSpec spec;
  spec.params = cfg.params;
  spec.afp = cfg.afp;
  spec.var = sweep_var_from_string(cfg.sweep_var);
  spec.values = cfg.sweep_values;
  if (spec.values.empty()) {
    switch (spec.var) {
      case SweepVar::CF: spec.values = {cfg.params.C_F}; break;
      case SweepVar::M: spec.values = {static_cast<double>(cfg.params.M)}; break;
      case SweepVar::N: spec.values = {static_cast<double>(cfg.params.N)}; break;
      case SweepVar::L: spec.values = {static_cast<double>(cfg.params.L)}; break;
      case SweepVar::K: spec.values = {static_cast<double>(cfg.params.K)}; break;
    }
  }
  for (const auto& tok : cfg.scheme_tokens)
    spec.schemes.push_back(parse_scheme(tok, cfg.default_init));
  spec.trials = cfg.trials;
  spec.base_seed = cfg.base_seed;
  spec.out_dir = cfg.out_dir;
  if (cfg.mode != "centralized" && cfg.mode != "decentralized")
    throw ConfigError("mode must be centralized or decentralized");
  spec.decentralized = cfg.mode == "decentralized";
  spec.threads = cfg.threads;
  return spec;
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial, double value) {
  std::uint64_t vbits = 0;
  std::memcpy(&vbits, &value, sizeof(double));
  return base_seed ^ splitmix64(splitmix64(static_cast<std::uint64_t>(trial)) ^ vbits);
}

const CellResult& AggregateResult::cell(const std::string& scheme_label, double value) const {
  for (const auto& c : cells)
    if (c.scheme_label == scheme_label && c.value == value) return c;
  throw ConfigError("no result cell for " + scheme_label + " at value " + fmt("%g", value));
}

int AggregateResult::failed_trials() const {
  int n = 0;
  for (const auto& c : cells)
    for (const auto& t : c.trials)
      if (!t.ok) ++n;
  return n;
}

namespace {

TrialOutcome run_scheme_on(const SchemeSpec& scheme, const SystemParams& params,
                           const ChannelRealization& chan, std::uint64_t seed,
                           const AfpConfig& afp, bool decentralized) {
  TrialOutcome out;
  out.channel_digest = channel_digest(chan);
  if (!scheme.is_afp()) {
    const Solution sol =
        baseline_solution(baseline_kind_from_string(scheme.name), params, chan, seed);
    out.sum_rate = sum_rate(sol, chan);
    out.ok = true;
    return out;
  }
  const Solution init = baseline_solution(
      scheme.init == "evd" ? BaselineKind::EVD : BaselineKind::RANDOM, params, chan, seed);
  if (decentralized) {
    DecentralResult r = run_decentralized(params, chan, init, afp);
    out.sum_rate = r.trace.rows.empty() ? r.trace.initial_sum_rate : r.trace.rows.back().sum_rate;
    out.trace = std::move(r.trace);
  } else {
    AfpResult r = run_afp(params, chan, init, afp);
    out.sum_rate = r.trace.rows.empty() ? r.trace.initial_sum_rate : r.trace.rows.back().sum_rate;
    out.trace = std::move(r.trace);
  }
  out.ok = true;
  return out;
}

}  // namespace

AggregateResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const int n_values = static_cast<int>(spec.values.size());
  const int n_schemes = static_cast<int>(spec.schemes.size());

  AggregateResult agg;
  agg.cells.resize(static_cast<std::size_t>(n_schemes) * n_values);
  for (int s = 0; s < n_schemes; ++s)
    for (int v = 0; v < n_values; ++v) {
      auto& cell = agg.cells[static_cast<std::size_t>(s) * n_values + v];
      cell.scheme_label = spec.schemes[s].label();
      cell.value = spec.values[v];
      cell.trials.resize(spec.trials);
    }

  // One job per (sweep value, trial); every scheme inside a job sees the same
  // channel realization. Results land in preallocated slots, so the merge
  // order is deterministic regardless of thread scheduling.
  const int n_jobs = n_values * spec.trials;
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int job = next.fetch_add(1);
      if (job >= n_jobs) break;
      const int v = job / spec.trials;
      const int t = job % spec.trials;
      const double value = spec.values[v];
      const SystemParams params = spec.params_for(value);
      const std::uint64_t seed = trial_seed(spec.base_seed, t, value);

      ChannelRealization chan;
      bool chan_ok = true;
      std::string chan_err;
      try {
        chan = draw_channel(params, draw_placement(params, seed), seed);
      } catch (const std::exception& e) {
        chan_ok = false;
        chan_err = e.what();
      }
      for (int s = 0; s < n_schemes; ++s) {
        auto& slot = agg.cells[static_cast<std::size_t>(s) * n_values + v].trials[t];
        if (!chan_ok) {
          slot.ok = false;
          slot.error = chan_err;
          continue;
        }
        try {
          slot = run_scheme_on(spec.schemes[s], params, chan, seed, spec.afp,
                               spec.decentralized);
        } catch (const std::exception& e) {
          slot.ok = false;
          slot.error = e.what();
        }
      }
    }
  };

  int n_threads = spec.threads > 0 ? spec.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, n_jobs));
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  for (auto& cell : agg.cells) {
    double sum = 0.0;
    int n = 0;
    for (const auto& t : cell.trials)
      if (t.ok) {
        sum += t.sum_rate;
        ++n;
      }
    cell.ok_count = n;
    cell.mean_sum_rate = n > 0 ? sum / n : 0.0;
    if (n > 1) {
      double ss = 0.0;
      for (const auto& t : cell.trials)
        if (t.ok) ss += (t.sum_rate - cell.mean_sum_rate) * (t.sum_rate - cell.mean_sum_rate);
      cell.std_error = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
    }
  }
  return agg;
}

namespace {

void write_mean_trace(const CellResult& cell, const std::string& path) {
  int max_len = 0;
  for (const auto& t : cell.trials)
    if (t.ok) max_len = std::max(max_len, static_cast<int>(t.trace.rows.size()));
  if (max_len == 0) return;

  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << "outer_iter,mean_sum_rate_bps_hz,mean_elapsed_s,trials_at_iter\n";
  for (int it = 0; it < max_len; ++it) {
    double rate_sum = 0.0, time_sum = 0.0;
    int live = 0, n = 0;
    for (const auto& t : cell.trials) {
      if (!t.ok || t.trace.rows.empty()) continue;
      // shorter traces are padded with their final (converged) value
      const auto& row = t.trace.rows[std::min<std::size_t>(it, t.trace.rows.size() - 1)];
      rate_sum += row.sum_rate;
      time_sum += row.elapsed_s;
      ++n;
      if (static_cast<int>(t.trace.rows.size()) > it) ++live;
    }
    f << (it + 1) << ',' << fmt("%.10g", rate_sum / n) << ',' << fmt("%.6g", time_sum / n) << ','
      << live << '\n';
  }
  if (!f) throw IoError("write failed: " + path);
}

nlohmann::json system_to_json(const SystemParams& p) {
  return {{"K", p.K},
          {"L", p.L},
          {"M", p.M},
          {"N", p.N},
          {"C_F", p.C_F},
          {"fc", p.fc},
          {"bandwidth", p.bandwidth},
          {"tx_power_dbm", p.tx_power_dbm},
          {"noise_psd_dbm_hz", p.noise_psd_dbm_hz},
          {"area_radius_m", p.area_radius_m},
          {"min_dist_m", p.min_dist_m},
          {"shadowing_sigma_db", p.shadowing_sigma_db}};
}

nlohmann::json afp_to_json(const AfpConfig& a) {
  return {{"delta0", a.delta0},
          {"decay_r", a.decay_r},
          {"delta_in", a.delta_in},
          {"delta_out", a.delta_out},
          {"max_outer", a.max_outer},
          {"max_inner", a.max_inner},
          {"mu_floor", a.mu_floor},
          {"ridge", a.ridge},
          {"bisect_tol", a.bisect_tol}};
}

}  // namespace

void emit_outputs(const AggregateResult& result, const ExperimentSpec& spec) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(spec.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + spec.out_dir + ": " + ec.message());
  const std::filesystem::path dir(spec.out_dir);

  {
    std::ofstream f(dir / "summary.csv");
    if (!f) throw IoError("cannot open summary.csv for writing");
    f << "scheme,sweep_var,sweep_value,mean_sum_rate,stderr,trials\n";
    for (const auto& cell : result.cells)
      f << cell.scheme_label << ',' << sweep_var_name(spec.var) << ',' << fmt("%g", cell.value)
        << ',' << fmt("%.10g", cell.mean_sum_rate) << ',' << fmt("%.10g", cell.std_error) << ','
        << cell.ok_count << '\n';
    if (!f) throw IoError("write failed: summary.csv");
  }

  for (const auto& cell : result.cells) {
    std::string name = "trace_" + sanitize_label(cell.scheme_label);
    if (spec.values.size() > 1)
      name += std::string("_") + sweep_var_name(spec.var) + fmt("%g", cell.value);
    write_mean_trace(cell, (dir / (name + ".csv")).string());
  }

  nlohmann::json manifest;
  manifest["artifact_version"] = "1.0.0";
  manifest["system"] = system_to_json(spec.params);
  manifest["afp"] = afp_to_json(spec.afp);
  nlohmann::json schemes = nlohmann::json::array();
  for (const auto& s : spec.schemes) schemes.push_back(s.label());
  manifest["experiment"] = {{"sweep_var", sweep_var_name(spec.var)},
                            {"sweep_values", spec.values},
                            {"schemes", schemes},
                            {"trials", spec.trials},
                            {"base_seed", spec.base_seed},
                            {"out_dir", spec.out_dir},
                            {"mode", spec.decentralized ? "decentralized" : "centralized"},
                            {"threads", spec.threads}};

  nlohmann::json seeds, digests;
  for (const double v : spec.values) {
    std::vector<std::uint64_t> s;
    for (int t = 0; t < spec.trials; ++t) s.push_back(trial_seed(spec.base_seed, t, v));
    seeds[fmt("%g", v)] = s;
    // channel digests are per trial and identical across schemes (pairing)
    std::vector<std::string> d;
    for (int t = 0; t < spec.trials; ++t) {
      std::uint64_t dg = 0;
      for (const auto& cell : result.cells)
        if (cell.value == v && cell.trials[t].ok) {
          dg = cell.trials[t].channel_digest;
          break;
        }
      d.push_back(hex64(dg));
    }
    digests[fmt("%g", v)] = d;
  }
  manifest["seeds"] = seeds;
  manifest["channel_digests"] = digests;

  nlohmann::json errors = nlohmann::json::array();
  for (const auto& cell : result.cells)
    for (std::size_t t = 0; t < cell.trials.size(); ++t)
      if (!cell.trials[t].ok)
        errors.push_back({{"scheme", cell.scheme_label},
                          {"value", cell.value},
                          {"trial", t},
                          {"message", cell.trials[t].error}});
  manifest["errors"] = errors;

  std::ofstream mf(dir / "manifest.json");
  if (!mf) throw IoError("cannot open manifest.json for writing");
  mf << manifest.dump(2) << "\n";
  if (!mf) throw IoError("write failed: manifest.json");
}

ExperimentSpec spec_from_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest parse error: ") + e.what());
  }

  ExperimentSpec spec;
  const auto& sys = j.at("system");
  spec.params.K = sys.at("K");
  spec.params.L = sys.at("L");
  spec.params.M = sys.at("M");
  spec.params.N = sys.at("N");
  spec.params.C_F = sys.at("C_F");
  spec.params.fc = sys.at("fc");
  spec.params.bandwidth = sys.at("bandwidth");
  spec.params.tx_power_dbm = sys.at("tx_power_dbm");
  spec.params.noise_psd_dbm_hz = sys.at("noise_psd_dbm_hz");
  spec.params.area_radius_m = sys.at("area_radius_m");
  spec.params.min_dist_m = sys.at("min_dist_m");
  spec.params.shadowing_sigma_db = sys.at("shadowing_sigma_db");

  const auto& afp = j.at("afp");
  spec.afp.delta0 = afp.at("delta0");
  spec.afp.decay_r = afp.at("decay_r");
  spec.afp.delta_in = afp.at("delta_in");
  spec.afp.delta_out = afp.at("delta_out");
  spec.afp.max_outer = afp.at("max_outer");
  spec.afp.max_inner = afp.at("max_inner");
  spec.afp.mu_floor = afp.at("mu_floor");
  spec.afp.ridge = afp.at("ridge");
  spec.afp.bisect_tol = afp.at("bisect_tol");

  const auto& exp = j.at("experiment");
  spec.var = sweep_var_from_string(exp.at("sweep_var"));
  spec.values = exp.at("sweep_values").get<std::vector<double>>();
  for (const auto& tok : exp.at("schemes"))
    spec.schemes.push_back(parse_scheme(tok.get<std::string>(), "evd"));
  spec.trials = exp.at("trials");
  spec.base_seed = exp.at("base_seed").get<std::uint64_t>();
  spec.out_dir = exp.at("out_dir");
  spec.decentralized = exp.at("mode").get<std::string>() == "decentralized";
  spec.threads = exp.at("threads");
  return spec;
}

}  // namespace cfxl
