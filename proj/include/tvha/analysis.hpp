#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvha/optimize.hpp"
#include "tvha/problem.hpp"

namespace tvha {

struct NoiseFloorReport {
  double err_nf = 0.0;                     // Hartree
  std::vector<double> per_step_variances;  // raw Var[C(theta_i)] in Ha^2
  int shots_per_group = 0;
  int n_evaluations = 0;
};

// err_nf = sqrt(mean(variances) / shots).
NoiseFloorReport noise_floor(std::vector<double> variances,
                             int shots_per_group);

// P(estimate < e0) for a Gaussian estimator centered at e with deviation
// sigma: erfc((e - e0) / (sqrt(2) sigma)) / 2. The sigma = 0 limit returns
// 0 / 0.5 / 1 for e above / at / below e0.
double violation_probability(double e, double e0, double sigma);

struct ScalingFit {
  double prefactor = 0.0;
  double exponent = 0.0;
};

// Least-squares fit of log(error) = log(prefactor) + exponent*log(shots).
ScalingFit fit_scaling(std::span<const double> errors,
                       std::span<const int> shots);

struct EstimatorComparison {
  std::vector<double> iteration_means;  // population mean cost per iteration
  std::vector<double> iteration_bests;  // population minimum per iteration
  double avg_abs_error_mean = 0.0;      // avg |mean - e0|
  double avg_abs_error_best = 0.0;      // avg |min - e0|
  int best_iteration = -1;              // lowest population mean
  double best_iteration_error = 0.0;    // |mean at that iteration - e0|
  // Filled by multi-budget studies.
  std::vector<int> shots_series;
  std::optional<ScalingFit> fit_mean;
  std::optional<ScalingFit> fit_best;
};

// Requires per-iteration population summaries in the trace.
EstimatorComparison compare_estimators(const OptimizerTrace& trace, double e0);

struct LandscapeGrid {
  std::vector<double> center;
  int axis_i = 0;
  int axis_j = 1;
  double delta = 0.5;
  int resolution = 41;
  std::vector<double> values;  // row-major, i-displacement major
  std::optional<int> shots_per_group;  // absent = statevector backend
  double e0 = 0.0;
  std::uint64_t base_seed = 0;

  double at(int gi, int gj) const {
    return values[static_cast<std::size_t>(gi) * resolution + gj];
  }
};

// Energy estimates over the displacement grid [-delta, delta]^2 applied to
// parameters (axis_i, axis_j), the rest pinned at `center`. Cells use
// independent RNG substreams keyed by their linear index.
LandscapeGrid landscape_slice(const Problem& problem,
                              std::span<const double> center, int axis_i,
                              int axis_j, double delta, int resolution,
                              std::optional<int> shots_per_group,
                              std::uint64_t seed);

// High-precision reference parameters: runs the configured optimizer and
// returns the best iteration's population-mean parameters (best point for
// non-population algorithms). Sampling mode requires a total budget of at
// least 1e6 shots per evaluation; pass nullopt for the statevector
// substitute.
std::vector<double> find_reference_parameters(
    const Problem& problem, const OptimizerConfig& cfg,
    std::optional<int> shots_per_group, std::uint64_t seed);

// Plot-ready exports.
std::string landscape_csv(const LandscapeGrid& grid);
std::string landscape_sidecar_json(const LandscapeGrid& grid);
std::string noise_floor_csv(const NoiseFloorReport& report);
std::string estimator_comparison_csv(const EstimatorComparison& cmp);

}  // namespace tvha
