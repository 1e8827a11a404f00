#ifndef CFXL_HARNESS_HPP
#define CFXL_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cfxl/config.hpp"
#include "cfxl/decentral.hpp"

namespace cfxl {

struct SchemeSpec {
  std::string name;         // afp | evd | mf | random
  std::string init = "evd"; // evd | random; meaningful for afp only

  bool is_afp() const { return name == "afp"; }
  std::string label() const { return is_afp() ? name + ":" + init : name; }
};

// "afp", "afp:random", "evd", ... -> SchemeSpec; validates both parts.
SchemeSpec parse_scheme(const std::string& token, const std::string& default_init);

enum class SweepVar { CF, M, N, L, K };
SweepVar sweep_var_from_string(const std::string& name);
const char* sweep_var_name(SweepVar var);

struct ExperimentSpec {
  SystemParams params;
  AfpConfig afp;
  SweepVar var = SweepVar::CF;
  std::vector<double> values;  // non-empty sweep values
  std::vector<SchemeSpec> schemes;
  int trials = 200;
  std::uint64_t base_seed = 1;
  std::string out_dir = "results";
  bool decentralized = false;
  int threads = 0;

  void validate() const;
  SystemParams params_for(double value) const;
};

// Builds the spec from a parsed config file; sweep values default to the base
// parameter value when none are configured.
ExperimentSpec spec_from_config(const FileConfig& cfg);

// Stable per-trial seed: base_seed xor hash(trial, value). All schemes in a
// trial share the seed, hence the channel realization (paired comparison).
std::uint64_t trial_seed(std::uint64_t base_seed, int trial, double value);

struct TrialOutcome {
  bool ok = false;
  double sum_rate = 0.0;
  std::string error;
  std::uint64_t channel_digest = 0;
  ConvergenceTrace trace;  // present for afp schemes
};

struct CellResult {  // one (scheme, sweep value) aggregate
  std::string scheme_label;
  double value = 0.0;
  std::vector<TrialOutcome> trials;
  int ok_count = 0;
  double mean_sum_rate = 0.0;
  double std_error = 0.0;  // sample std / sqrt(n); 0 when n < 2
};

struct AggregateResult {
  std::vector<CellResult> cells;  // schemes outer, sweep values inner
  const CellResult& cell(const std::string& scheme_label, double value) const;
  int failed_trials() const;
};

AggregateResult run_experiment(const ExperimentSpec& spec);

// Writes summary.csv, per-scheme mean trace CSVs and manifest.json into
// spec.out_dir. Output bytes are deterministic except for wall-clock columns
// in trace files.
void emit_outputs(const AggregateResult& result, const ExperimentSpec& spec);

// Rebuilds the spec recorded in a manifest.json, for reproduction runs.
ExperimentSpec spec_from_manifest(const std::string& path);

}  // namespace cfxl

#endif  // CFXL_HARNESS_HPP
