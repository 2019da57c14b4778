#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvha/errors.hpp"

namespace tvha {

enum class OptimizerAlgorithm { gd, bfgs, nelder_mead, spsa, cma_es, pso };

OptimizerAlgorithm parse_algorithm(std::string_view name);
const char* to_string(OptimizerAlgorithm a);
bool is_population(OptimizerAlgorithm a);

struct OptimizerConfig {
  OptimizerAlgorithm algorithm = OptimizerAlgorithm::bfgs;
  int max_function_evaluations = 10000;
  std::uint64_t rng_seed = 0;

  // Convergence: `tolerance` bounds the best-so-far improvement over a
  // window of `stall_iterations` iterations (0 disables stall detection).
  double tolerance = 1e-8;
  int stall_iterations = 10;

  // Gradient methods.
  double finite_difference_step = 1e-6;
  double gd_step = 0.1;

  // Population methods. population == 0 picks the algorithm default:
  // cma_es 7 for dimension <= 6 else 4 + floor(3 ln n); pso 30.
  int population = 0;
  double cma_initial_sigma = 0.3;
  double pso_inertia = 0.7298;
  double pso_cognitive = 1.49618;
  double pso_social = 1.49618;
  double pso_span = 1.0;  // initial swarm spread around x0

  // SPSA gain sequences: a_k = a/(k+1+A)^alpha, c_k = c/(k+1)^gamma.
  // stability < 0 resolves A to one tenth of the iteration budget.
  double spsa_a = 0.1;
  double spsa_c = 0.1;
  double spsa_stability = -1.0;
  double spsa_alpha = 0.602;
  double spsa_gamma = 0.101;

  double nm_initial_step = 0.1;  // simplex construction offset
};

struct Evaluation {
  int fe_index = 0;  // 0-based position in the evaluation stream
  std::vector<double> params;
  double cost = 0.0;
};

struct IterationSummary {
  int iteration = 0;
  double best_so_far = std::numeric_limits<double>::quiet_NaN();
  int evaluations_used = 0;
  std::optional<double> population_mean;
  std::optional<double> population_min;
  std::vector<double> mean_params;  // population algorithms only
};

enum class Termination { tolerance, stalled, budget_exhausted };

const char* to_string(Termination t);

struct OptimizerTrace {
  std::vector<Evaluation> evaluations;
  std::vector<IterationSummary> iterations;
  std::vector<double> best_params;
  double best_cost = std::numeric_limits<double>::infinity();
  std::optional<double> final_population_mean;
  Termination termination = Termination::budget_exhausted;
};

using CostFn = std::function<double(std::span<const double>)>;

// Runs the configured algorithm until tolerance/stall/budget. The budget is
// a hard cap enforced on the oracle itself; stochastic algorithms draw only
// from the seeded stream, so identical inputs give identical traces. NaN
// costs are recorded and rank as +infinity.
OptimizerTrace minimize(const CostFn& cost, std::vector<double> x0,
                        const OptimizerConfig& cfg);

}  // namespace tvha
