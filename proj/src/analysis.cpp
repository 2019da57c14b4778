#include "tvha/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tvha/rng.hpp"

namespace tvha {

namespace {

void append_number(std::ostringstream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  os << buf;
}

}  // namespace

NoiseFloorReport noise_floor(std::vector<double> variances,
                             int shots_per_group) {
  if (variances.empty()) {
    throw ValidationError("noise_floor requires at least one variance");
  }
  if (shots_per_group < 1) {
    throw DomainError("shots_per_group must be at least 1");
  }
  double sum = 0.0;
  for (const double v : variances) {
    if (!(v >= 0.0)) {
      throw DomainError("variances must be non-negative");
    }
    sum += v;
  }
  NoiseFloorReport report;
  report.n_evaluations = static_cast<int>(variances.size());
  report.shots_per_group = shots_per_group;
  report.err_nf =
      std::sqrt(sum / static_cast<double>(variances.size()) / shots_per_group);
  report.per_step_variances = std::move(variances);
  return report;
}

double violation_probability(double e, double e0, double sigma) {
  if (sigma < 0.0) throw DomainError("sigma must be non-negative");
  if (sigma == 0.0) {
    if (e > e0) return 0.0;
    if (e < e0) return 1.0;
    return 0.5;
  }
  return 0.5 * std::erfc((e - e0) / (std::sqrt(2.0) * sigma));
}

ScalingFit fit_scaling(std::span<const double> errors,
                       std::span<const int> shots) {
  if (errors.size() != shots.size()) {
    throw DimensionError("fit_scaling requires matched series");
  }
  if (errors.size() < 3) {
    throw ValidationError("fit_scaling requires at least three points");
  }
  std::vector<double> xs(errors.size()), ys(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || shots[i] < 1) {
      throw DomainError("fit_scaling requires positive errors and shots");
    }
    xs[i] = std::log(static_cast<double>(shots[i]));
    ys[i] = std::log(errors[i]);
  }
  double x_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x_mean += xs[i];
    y_mean += ys[i];
  }
  x_mean /= static_cast<double>(xs.size());
  y_mean /= static_cast<double>(ys.size());
  double cov = 0.0, var = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cov += (xs[i] - x_mean) * (ys[i] - y_mean);
    var += (xs[i] - x_mean) * (xs[i] - x_mean);
  }
  if (var == 0.0) {
    throw DomainError("fit_scaling requires at least two distinct budgets");
  }
  ScalingFit fit;
  fit.exponent = cov / var;
  fit.prefactor = std::exp(y_mean - fit.exponent * x_mean);
  return fit;
}

EstimatorComparison compare_estimators(const OptimizerTrace& trace,
                                       double e0) {
  EstimatorComparison cmp;
  for (const auto& it : trace.iterations) {
    if (!it.population_mean || !it.population_min) continue;
    cmp.iteration_means.push_back(*it.population_mean);
    cmp.iteration_bests.push_back(*it.population_min);
  }
  if (cmp.iteration_means.empty()) {
    throw ValidationError(
        "compare_estimators requires a population trace with per-iteration "
        "summaries");
  }
  double err_mean = 0.0, err_best = 0.0;
  double lowest_mean = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cmp.iteration_means.size(); ++i) {
    err_mean += std::abs(cmp.iteration_means[i] - e0);
    err_best += std::abs(cmp.iteration_bests[i] - e0);
    if (cmp.iteration_means[i] < lowest_mean) {
      lowest_mean = cmp.iteration_means[i];
      cmp.best_iteration = static_cast<int>(i);
    }
  }
  const double n = static_cast<double>(cmp.iteration_means.size());
  cmp.avg_abs_error_mean = err_mean / n;
  cmp.avg_abs_error_best = err_best / n;
  cmp.best_iteration_error =
      std::abs(cmp.iteration_means[static_cast<std::size_t>(
                   cmp.best_iteration)] -
               e0);
  return cmp;
}

LandscapeGrid landscape_slice(const Problem& problem,
                              std::span<const double> center, int axis_i,
                              int axis_j, double delta, int resolution,
                              std::optional<int> shots_per_group,
                              std::uint64_t seed) {
  const int n_params = problem.circuit.parameter_count();
  if (static_cast<int>(center.size()) != n_params) {
    throw DimensionError("center length must match the parameter count");
  }
  if (axis_i == axis_j || axis_i < 0 || axis_j < 0 || axis_i >= n_params ||
      axis_j >= n_params) {
    throw DomainError("landscape axes must be distinct valid parameter indices");
  }
  if (resolution < 2) {
    throw DomainError("landscape resolution must be at least 2");
  }

  LandscapeGrid grid;
  grid.center.assign(center.begin(), center.end());
  grid.axis_i = axis_i;
  grid.axis_j = axis_j;
  grid.delta = delta;
  grid.resolution = resolution;
  grid.shots_per_group = shots_per_group;
  grid.base_seed = seed;
  grid.e0 = problem.exact_ground.value_or(0.0);
  grid.values.resize(static_cast<std::size_t>(resolution) * resolution);

  std::vector<double> params(center.begin(), center.end());
  for (int gi = 0; gi < resolution; ++gi) {
    const double di = -delta + 2.0 * delta * gi / (resolution - 1);
    for (int gj = 0; gj < resolution; ++gj) {
      const double dj = -delta + 2.0 * delta * gj / (resolution - 1);
      params[static_cast<std::size_t>(axis_i)] = center[axis_i] + di;
      params[static_cast<std::size_t>(axis_j)] = center[axis_j] + dj;
      const std::size_t cell =
          static_cast<std::size_t>(gi) * resolution + gj;
      if (shots_per_group) {
        grid.values[cell] =
            evaluate_energy(problem, params, *shots_per_group,
                            derive_seed(seed, cell))
                .value;
      } else {
        grid.values[cell] = evaluate_energy(problem, params).value;
      }
    }
  }
  return grid;
}

std::vector<double> find_reference_parameters(
    const Problem& problem, const OptimizerConfig& cfg,
    std::optional<int> shots_per_group, std::uint64_t seed) {
  if (shots_per_group) {
    const long long total = static_cast<long long>(*shots_per_group) *
                            static_cast<long long>(
                                problem.measurement_groups.groups.size());
    if (total < 1000000) {
      throw DomainError(
          "reference location requires at least 1e6 total shots per "
          "evaluation (or the statevector substitute)");
    }
  }

  std::uint64_t eval_counter = 0;
  const CostFn cost = [&](std::span<const double> params) {
    if (shots_per_group) {
      return evaluate_energy(problem, params, *shots_per_group,
                             derive_seed(seed, 1, eval_counter++))
          .value;
    }
    return evaluate_energy(problem, params).value;
  };

  const auto x0 = init_adiabatic(problem.circuit, problem.ham,
                                 {InitStrategy::adiabatic, 1.0, 0});
  OptimizerConfig run_cfg = cfg;
  run_cfg.rng_seed = derive_seed(seed, 2);
  const OptimizerTrace trace = minimize(cost, x0, run_cfg);

  if (is_population(cfg.algorithm)) {
    int best_iteration = -1;
    double lowest_mean = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
      const auto& it = trace.iterations[i];
      if (it.population_mean && *it.population_mean < lowest_mean &&
          !it.mean_params.empty()) {
        lowest_mean = *it.population_mean;
        best_iteration = static_cast<int>(i);
      }
    }
    if (best_iteration >= 0) {
      return trace.iterations[static_cast<std::size_t>(best_iteration)]
          .mean_params;
    }
  }
  return trace.best_params;
}

std::string landscape_csv(const LandscapeGrid& grid) {
  std::ostringstream os;
  for (int gi = 0; gi < grid.resolution; ++gi) {
    for (int gj = 0; gj < grid.resolution; ++gj) {
      if (gj) os << ',';
      append_number(os, grid.at(gi, gj));
    }
    os << '\n';
  }
  return os.str();
}

std::string landscape_sidecar_json(const LandscapeGrid& grid) {
  std::ostringstream os;
  os << "{\"axis_i\":" << grid.axis_i << ",\"axis_j\":" << grid.axis_j
     << ",\"delta\":";
  append_number(os, grid.delta);
  os << ",\"resolution\":" << grid.resolution << ",\"e0\":";
  append_number(os, grid.e0);
  os << ",\"backend\":\""
     << (grid.shots_per_group ? "sampling" : "statevector") << "\"";
  if (grid.shots_per_group) {
    os << ",\"shots_per_group\":" << *grid.shots_per_group;
  }
  os << ",\"seed\":" << grid.base_seed << ",\"center\":[";
  for (std::size_t i = 0; i < grid.center.size(); ++i) {
    if (i) os << ',';
    append_number(os, grid.center[i]);
  }
  os << "]}";
  return os.str();
}

std::string noise_floor_csv(const NoiseFloorReport& report) {
  std::ostringstream os;
  os << "# err_nf = ";
  append_number(os, report.err_nf);
  os << ", shots_per_group = " << report.shots_per_group
     << ", n_evaluations = " << report.n_evaluations << "\n";
  os << "step,variance\n";
  for (std::size_t i = 0; i < report.per_step_variances.size(); ++i) {
    os << i << ',';
    append_number(os, report.per_step_variances[i]);
    os << '\n';
  }
  return os.str();
}

std::string estimator_comparison_csv(const EstimatorComparison& cmp) {
  std::ostringstream os;
  os << "# avg_abs_error_mean = ";
  append_number(os, cmp.avg_abs_error_mean);
  os << ", avg_abs_error_best = ";
  append_number(os, cmp.avg_abs_error_best);
  os << ", best_iteration = " << cmp.best_iteration
     << ", best_iteration_error = ";
  append_number(os, cmp.best_iteration_error);
  os << "\n";
  if (cmp.fit_mean) {
    os << "# fit_mean: prefactor = ";
    append_number(os, cmp.fit_mean->prefactor);
    os << ", exponent = ";
    append_number(os, cmp.fit_mean->exponent);
    os << "\n";
  }
  os << "iteration,population_mean,population_best\n";
  for (std::size_t i = 0; i < cmp.iteration_means.size(); ++i) {
    os << i << ',';
    append_number(os, cmp.iteration_means[i]);
    os << ',';
    append_number(os, cmp.iteration_bests[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace tvha
