#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tvha/analysis.hpp"
#include "tvha/optimize.hpp"
#include "tvha/problem.hpp"

namespace tvha {

enum class InitKind { hf_adiabatic, random };

struct ExperimentConfig {
  std::string hamiltonian_path;
  double truncation_p = 0.999;
  int depth = 1;
  InitKind init = InitKind::hf_adiabatic;
  double tau = 1.0;
  EnergyBackend backend = EnergyBackend::statevector;
  int shots_per_group = 1024;
  int repeats = 10;
  std::uint64_t base_seed = 42;
  double chemical_accuracy = 1.6e-3;
  OptimizerConfig optimizer;
  // Stall settings resolve per backend unless the config set them:
  // statevector (10 iterations, 1e-8), sampling (20 iterations, one
  // noise-floor estimated at the reference state). Likewise the
  // finite-difference step: 1e-6 statevector, 1e-3 sampling.
  bool stall_overridden = false;
  bool fd_overridden = false;
};

// Flat key/value text, '#' comments. Unknown keys are rejected.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig parse_experiment_config_file(const std::string& path);
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);  // FNV-1a 64, hex

enum class Verdict { converged, stalled, budget_exhausted, failed };
const char* to_string(Verdict v);

struct RunRecord {
  std::string hash;
  ExperimentConfig config;
  int replica = 0;
  std::uint64_t seed = 0;
  OptimizerTrace trace;  // parameter storage thinned beyond 32 dimensions
  std::vector<double> variances;           // per-FE Var[C], sampling only
  std::vector<std::uint64_t> eval_seeds;   // per-FE stream keys, sampling only
  std::optional<double> e0;
  std::vector<double> error_series;  // |best-so-far - e0| per FE
  Verdict verdict = Verdict::failed;
  std::string failure_reason;
  double wall_ms = 0.0;
};

// Executes `repeats` independent replicas (seeds base_seed + replica index)
// over a worker pool. A failing replica yields a `failed` record, not a
// batch failure. Results are deterministic regardless of `jobs`.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg,
                                      int jobs = 1);

// JSON-Lines persistence: a header line with the config snapshot, one line
// per evaluation, iteration summaries, and a final line.
void write_record(std::ostream& out, const RunRecord& record);
RunRecord read_record(std::istream& in);
std::string record_to_string(const RunRecord& record);

struct SummaryTable {
  std::string hash;
  int n_records = 0;
  int success_count = 0;
  double chemical_accuracy = 1.6e-3;
  double mean_fe_to_accuracy = 0.0;  // unconverged runs count the full budget
  double mean_final_error = 0.0;
  std::vector<double> mean_error_curve;  // per FE, last value carried forward
};

SummaryTable summarize(const std::vector<RunRecord>& records);
std::string summary_csv(const SummaryTable& table);
std::string summary_json(const SummaryTable& table);

// Subcommands: run, summarize, landscape, noisefloor, exact, inspect.
// Exit codes: 0 success, 1 usage, 2 data/validation, 3 runtime failure.
int cli_main(int argc, char** argv);

}  // namespace tvha
