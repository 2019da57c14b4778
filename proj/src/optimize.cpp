#include "tvha/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "linalg.hpp"
#include "tvha/rng.hpp"

namespace tvha {

OptimizerAlgorithm parse_algorithm(std::string_view name) {
  if (name == "gd") return OptimizerAlgorithm::gd;
  if (name == "bfgs") return OptimizerAlgorithm::bfgs;
  if (name == "nelder_mead") return OptimizerAlgorithm::nelder_mead;
  if (name == "spsa") return OptimizerAlgorithm::spsa;
  if (name == "cma_es") return OptimizerAlgorithm::cma_es;
  if (name == "pso") return OptimizerAlgorithm::pso;
  throw ConfigError("unknown optimizer: " + std::string(name));
}

const char* to_string(OptimizerAlgorithm a) {
  switch (a) {
    case OptimizerAlgorithm::gd: return "gd";
    case OptimizerAlgorithm::bfgs: return "bfgs";
    case OptimizerAlgorithm::nelder_mead: return "nelder_mead";
    case OptimizerAlgorithm::spsa: return "spsa";
    case OptimizerAlgorithm::cma_es: return "cma_es";
    case OptimizerAlgorithm::pso: return "pso";
  }
  return "?";
}

bool is_population(OptimizerAlgorithm a) {
  return a == OptimizerAlgorithm::cma_es || a == OptimizerAlgorithm::pso;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::tolerance: return "tolerance";
    case Termination::stalled: return "stalled";
    case Termination::budget_exhausted: return "budget-exhausted";
  }
  return "?";
}

namespace {

// NaN ranks as +infinity.
bool better(double a, double b) {
  if (std::isnan(a)) return false;
  if (std::isnan(b)) return true;
  return a < b;
}

struct BudgetExhausted {};

// Counting oracle wrapper; owns the trace bookkeeping and enforces the
// hard evaluation cap.
class Evaluator {
 public:
  Evaluator(const CostFn& fn, OptimizerTrace& trace, int budget)
      : fn_(fn), trace_(trace), budget_(budget) {}

  double operator()(std::span<const double> x) {
    if (static_cast<int>(trace_.evaluations.size()) >= budget_) {
      throw BudgetExhausted{};
    }
    const double cost = fn_(x);
    trace_.evaluations.push_back(
        {static_cast<int>(trace_.evaluations.size()),
         std::vector<double>(x.begin(), x.end()), cost});
    if (better(cost, trace_.best_cost)) {
      trace_.best_cost = cost;
      trace_.best_params.assign(x.begin(), x.end());
    }
    return cost;
  }

  int used() const { return static_cast<int>(trace_.evaluations.size()); }
  int remaining() const { return budget_ - used(); }

 private:
  const CostFn& fn_;
  OptimizerTrace& trace_;
  int budget_;
};

// Best-so-far improvement watcher over a fixed iteration window.
class StallTracker {
 public:
  StallTracker(int window, double tol) : window_(window), tol_(tol) {}

  bool stalled(double current_best) {
    history_.push_back(current_best);
    if (window_ <= 0) return false;
    if (static_cast<int>(history_.size()) <= window_) return false;
    const double past = history_[history_.size() - 1 - window_];
    if (std::isnan(past) || std::isnan(current_best)) return false;
    return past - current_best <= tol_;
  }

 private:
  int window_;
  double tol_;
  std::vector<double> history_;
};

struct IterationRecorder {
  OptimizerTrace& trace;
  int counter = 0;

  void scalar(double best_so_far, int evaluations_used) {
    IterationSummary s;
    s.iteration = counter++;
    s.best_so_far = best_so_far;
    s.evaluations_used = evaluations_used;
    trace.iterations.push_back(std::move(s));
  }

  void population(double best_so_far, int evaluations_used,
                  std::span<const double> costs,
                  std::span<const double> mean_params) {
    IterationSummary s;
    s.iteration = counter++;
    s.best_so_far = best_so_far;
    s.evaluations_used = evaluations_used;
    double sum = 0.0;
    double min = std::numeric_limits<double>::infinity();
    for (const double c : costs) {
      sum += c;
      if (better(c, min)) min = c;
    }
    s.population_mean = sum / static_cast<double>(costs.size());
    s.population_min = min;
    s.mean_params.assign(mean_params.begin(), mean_params.end());
    trace.iterations.push_back(std::move(s));
  }
};

std::vector<double> central_gradient(Evaluator& eval,
                                     std::span<const double> x, double step) {
  std::vector<double> grad(x.size());
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double plus = eval(probe);
    probe[i] = x[i] - step;
    const double minus = eval(probe);
    probe[i] = x[i];
    grad[i] = (plus - minus) / (2.0 * step);
  }
  return grad;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

Termination run_gd(Evaluator& eval, std::vector<double> x,
                   const OptimizerConfig& cfg, OptimizerTrace& trace,
                   IterationRecorder& rec) {
  StallTracker stall(cfg.stall_iterations, cfg.tolerance);
  eval(x);
  while (true) {
    const auto grad = central_gradient(eval, x, cfg.finite_difference_step);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] -= cfg.gd_step * grad[i];
    }
    eval(x);
    rec.scalar(trace.best_cost, eval.used());
    if (inf_norm(grad) < cfg.tolerance) return Termination::tolerance;
    if (stall.stalled(trace.best_cost)) return Termination::stalled;
  }
}

Termination run_bfgs(Evaluator& eval, std::vector<double> x,
                     const OptimizerConfig& cfg, OptimizerTrace& trace,
                     IterationRecorder& rec) {
  const std::size_t n = x.size();
  StallTracker stall(cfg.stall_iterations, cfg.tolerance);
  std::vector<double> inv_hessian(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv_hessian[i * n + i] = 1.0;

  double fx = eval(x);
  std::vector<double> grad = central_gradient(eval, x, cfg.finite_difference_step);

  while (true) {
    if (inf_norm(grad) < cfg.tolerance) return Termination::tolerance;

    std::vector<double> direction(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        direction[i] -= inv_hessian[i * n + j] * grad[j];
      }
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += direction[i] * grad[i];
    if (!(slope < 0.0)) {
      // Curvature information went bad; restart from steepest descent.
      for (std::size_t i = 0; i < n * n; ++i) inv_hessian[i] = 0.0;
      for (std::size_t i = 0; i < n; ++i) inv_hessian[i * n + i] = 1.0;
      slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        direction[i] = -grad[i];
        slope += direction[i] * grad[i];
      }
      if (!(slope < 0.0)) return Termination::tolerance;  // zero gradient
    }

    // Armijo backtracking.
    const double c1 = 1e-4;
    double t = 1.0;
    std::vector<double> candidate(n);
    double f_candidate = std::numeric_limits<double>::quiet_NaN();
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t i = 0; i < n; ++i) candidate[i] = x[i] + t * direction[i];
      f_candidate = eval(candidate);
      if (!std::isnan(f_candidate) && f_candidate <= fx + c1 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    rec.scalar(trace.best_cost, eval.used());
    if (!accepted) return Termination::stalled;

    const auto grad_new =
        central_gradient(eval, candidate, cfg.finite_difference_step);
    std::vector<double> s(n), y(n);
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = candidate[i] - x[i];
      y[i] = grad_new[i] - grad[i];
      sy += s[i] * y[i];
    }
    if (sy > 1e-12) {
      // H <- (I - s y^T / sy) H (I - y s^T / sy) + s s^T / sy
      const double rho = 1.0 / sy;
      std::vector<double> hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) hy[i] += inv_hessian[i * n + j] * y[j];
      }
      double yhy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yhy += y[i] * hy[i];
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          inv_hessian[i * n + j] +=
              -rho * (s[i] * hy[j] + hy[i] * s[j]) +
              rho * (1.0 + rho * yhy) * s[i] * s[j];
        }
      }
    }
    x = candidate;
    fx = f_candidate;
    grad = grad_new;
    if (stall.stalled(trace.best_cost)) return Termination::stalled;
  }
}

Termination run_nelder_mead(Evaluator& eval, std::vector<double> x0,
                            const OptimizerConfig& cfg, OptimizerTrace& trace,
                            IterationRecorder& rec) {
  const std::size_t n = x0.size();
  StallTracker stall(cfg.stall_iterations, cfg.tolerance);

  std::vector<std::vector<double>> simplex;
  std::vector<double> costs;
  simplex.push_back(x0);
  costs.push_back(eval(x0));
  for (std::size_t i = 0; i < n; ++i) {
    auto vertex = x0;
    vertex[i] += cfg.nm_initial_step;
    simplex.push_back(vertex);
    costs.push_back(eval(simplex.back()));
  }

  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  while (true) {
    std::vector<std::size_t> order(simplex.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return better(costs[a], costs[b]);
    });
    std::vector<std::vector<double>> sorted_simplex;
    std::vector<double> sorted_costs;
    for (const std::size_t idx : order) {
      sorted_simplex.push_back(std::move(simplex[idx]));
      sorted_costs.push_back(costs[idx]);
    }
    simplex = std::move(sorted_simplex);
    costs = std::move(sorted_costs);

    const double spread = std::isnan(costs.back())
                              ? std::numeric_limits<double>::infinity()
                              : costs.back() - costs.front();
    rec.scalar(trace.best_cost, eval.used());
    if (spread < cfg.tolerance) return Termination::tolerance;
    if (stall.stalled(trace.best_cost)) return Termination::stalled;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v][i];
    }
    for (auto& c : centroid) c /= static_cast<double>(n);

    const auto blend = [&](double factor) {
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = centroid[i] + factor * (simplex.back()[i] - centroid[i]);
      }
      return out;
    };

    const auto reflected = blend(-alpha);
    const double f_reflected = eval(reflected);
    if (better(f_reflected, costs.front())) {
      const auto expanded = blend(-alpha * gamma);
      const double f_expanded = eval(expanded);
      if (better(f_expanded, f_reflected)) {
        simplex.back() = expanded;
        costs.back() = f_expanded;
      } else {
        simplex.back() = reflected;
        costs.back() = f_reflected;
      }
      continue;
    }
    if (better(f_reflected, costs[costs.size() - 2])) {
      simplex.back() = reflected;
      costs.back() = f_reflected;
      continue;
    }
    const bool outside = better(f_reflected, costs.back());
    const auto contracted = blend(outside ? -alpha * rho : rho);
    const double f_contracted = eval(contracted);
    if (better(f_contracted, outside ? f_reflected : costs.back())) {
      simplex.back() = contracted;
      costs.back() = f_contracted;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t v = 1; v < simplex.size(); ++v) {
      for (std::size_t i = 0; i < n; ++i) {
        simplex[v][i] = simplex[0][i] + sigma * (simplex[v][i] - simplex[0][i]);
      }
      costs[v] = eval(simplex[v]);
    }
  }
}

Termination run_spsa(Evaluator& eval, std::vector<double> x,
                     const OptimizerConfig& cfg, OptimizerTrace& trace,
                     IterationRecorder& rec, Rng& rng) {
  const std::size_t n = x.size();
  StallTracker stall(cfg.stall_iterations, cfg.tolerance);
  const double stability =
      cfg.spsa_stability >= 0.0
          ? cfg.spsa_stability
          : static_cast<double>(cfg.max_function_evaluations) / 2.0 / 10.0;

  std::vector<double> plus(n), minus(n), delta(n);
  for (int k = 0;; ++k) {
    const double ck = cfg.spsa_c / std::pow(k + 1.0, cfg.spsa_gamma);
    const double ak =
        cfg.spsa_a / std::pow(k + 1.0 + stability, cfg.spsa_alpha);
    for (std::size_t i = 0; i < n; ++i) {
      delta[i] = rng.sign();
      plus[i] = x[i] + ck * delta[i];
      minus[i] = x[i] - ck * delta[i];
    }
    const double f_plus = eval(plus);
    const double f_minus = eval(minus);
    if (!std::isnan(f_plus) && !std::isnan(f_minus)) {
      const double diff = (f_plus - f_minus) / (2.0 * ck);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] -= ak * diff * delta[i];  // delta_i in {-1,+1} is its own inverse
      }
    }
    // The gradient step only ever samples offset points; evaluate the
    // iterate itself now and then so the trace sees the converged value.
    if (k % 10 == 9) eval(x);
    rec.scalar(trace.best_cost, eval.used());
    if (stall.stalled(trace.best_cost)) {
      eval(x);
      return Termination::stalled;
    }
  }
}

Termination run_cma_es(Evaluator& eval, std::vector<double> x0,
                       const OptimizerConfig& cfg, OptimizerTrace& trace,
                       IterationRecorder& rec, Rng& rng) {
  const int n = static_cast<int>(x0.size());
  const int lambda = cfg.population > 0
                         ? cfg.population
                         : (n <= 6 ? 7 : 4 + static_cast<int>(3.0 * std::log(n)));
  if (lambda < 2) throw ConfigError("cma_es population must be at least 2");
  const int mu = lambda / 2;

  std::vector<double> weights(mu);
  double weight_sum = 0.0;
  for (int i = 0; i < mu; ++i) {
    weights[i] = std::log(lambda / 2.0 + 0.5) - std::log(i + 1.0);
    weight_sum += weights[i];
  }
  double mu_eff_den = 0.0;
  for (auto& w : weights) {
    w /= weight_sum;
    mu_eff_den += w * w;
  }
  const double mu_eff = 1.0 / mu_eff_den;

  const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) +
      c_sigma;
  const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
  const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
  const double c_mu =
      std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                              ((n + 2.0) * (n + 2.0) + mu_eff));
  const double expected_norm =
      std::sqrt(double(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  std::vector<double> mean = x0;
  double sigma = cfg.cma_initial_sigma;
  std::vector<double> cov(n * n, 0.0);
  for (int i = 0; i < n; ++i) cov[i * n + i] = 1.0;
  std::vector<double> path_sigma(n, 0.0), path_c(n, 0.0);

  StallTracker stall(cfg.stall_iterations, cfg.tolerance);

  std::vector<std::vector<double>> samples(lambda, std::vector<double>(n));
  std::vector<std::vector<double>> unit_draws(lambda, std::vector<double>(n));
  std::vector<double> costs(lambda);

  for (int iteration = 0;; ++iteration) {
    // C = B diag(d^2) B^T
    std::vector<double> basis;
    const std::vector<double> eigs =
        linalg::jacobi_eigen_sym(cov, static_cast<std::size_t>(n), &basis);
    std::vector<double> scale(n);
    for (int i = 0; i < n; ++i) scale[i] = std::sqrt(std::max(eigs[i], 1e-30));

    for (int s = 0; s < lambda; ++s) {
      for (int i = 0; i < n; ++i) unit_draws[s][i] = rng.gaussian();
      for (int i = 0; i < n; ++i) {
        double y = 0.0;
        for (int j = 0; j < n; ++j) {
          y += basis[i * n + j] * scale[j] * unit_draws[s][j];
        }
        samples[s][i] = mean[i] + sigma * y;
      }
      costs[s] = eval(samples[s]);
    }

    std::vector<int> order(lambda);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return better(costs[a], costs[b]); });

    std::vector<double> new_mean(n, 0.0);
    for (int r = 0; r < mu; ++r) {
      for (int i = 0; i < n; ++i) {
        new_mean[i] += weights[r] * samples[order[r]][i];
      }
    }
    std::vector<double> y_w(n);
    for (int i = 0; i < n; ++i) y_w[i] = (new_mean[i] - mean[i]) / sigma;

    // C^{-1/2} y_w = B diag(1/d) B^T y_w
    std::vector<double> tmp(n, 0.0), whitened(n, 0.0);
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += basis[i * n + j] * y_w[i];
      tmp[j] = acc / scale[j];
    }
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += basis[i * n + j] * tmp[j];
      whitened[i] = acc;
    }

    double ps_norm_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      path_sigma[i] = (1.0 - c_sigma) * path_sigma[i] +
                      std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * whitened[i];
      ps_norm_sq += path_sigma[i] * path_sigma[i];
    }
    const double ps_norm = std::sqrt(ps_norm_sq);
    const double normalizer =
        std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * (iteration + 1)));
    const bool h_sigma =
        ps_norm / normalizer < (1.4 + 2.0 / (n + 1.0)) * expected_norm;

    for (int i = 0; i < n; ++i) {
      path_c[i] = (1.0 - c_c) * path_c[i] +
                  (h_sigma ? std::sqrt(c_c * (2.0 - c_c) * mu_eff) * y_w[i]
                           : 0.0);
    }

    const double c1_effective =
        c_1 * (h_sigma ? 1.0 : 1.0 - c_c * (2.0 - c_c));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double rank_mu = 0.0;
        for (int r = 0; r < mu; ++r) {
          const auto& xs = samples[order[r]];
          rank_mu += weights[r] * (xs[i] - mean[i]) * (xs[j] - mean[j]) /
                     (sigma * sigma);
        }
        cov[i * n + j] = (1.0 - c1_effective - c_mu) * cov[i * n + j] +
                         c1_effective * path_c[i] * path_c[j] +
                         c_mu * rank_mu;
      }
    }
    // Symmetrize against drift.
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double v = 0.5 * (cov[i * n + j] + cov[j * n + i]);
        cov[i * n + j] = cov[j * n + i] = v;
      }
    }

    sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / expected_norm - 1.0));
    sigma = std::min(sigma, 1e6);
    mean = new_mean;

    rec.population(trace.best_cost, eval.used(), costs, mean);
    trace.final_population_mean = trace.iterations.back().population_mean;
    if (stall.stalled(trace.best_cost)) return Termination::stalled;
  }
}

Termination run_pso(Evaluator& eval, std::vector<double> x0,
                    const OptimizerConfig& cfg, OptimizerTrace& trace,
                    IterationRecorder& rec, Rng& rng) {
  const std::size_t n = x0.size();
  const int swarm = cfg.population > 0 ? cfg.population : 30;
  if (swarm < 2) throw ConfigError("pso population must be at least 2");
  StallTracker stall(cfg.stall_iterations, cfg.tolerance);

  std::vector<std::vector<double>> position(swarm, x0);
  std::vector<std::vector<double>> velocity(swarm, std::vector<double>(n, 0.0));
  for (int p = 1; p < swarm; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      position[p][i] = x0[i] + rng.uniform(-cfg.pso_span, cfg.pso_span);
    }
  }

  std::vector<std::vector<double>> personal_best = position;
  std::vector<double> personal_cost(swarm,
                                    std::numeric_limits<double>::infinity());
  std::vector<double> global_best = x0;
  double global_cost = std::numeric_limits<double>::infinity();
  std::vector<double> costs(swarm);
  std::vector<double> mean_params(n);

  while (true) {
    for (int p = 0; p < swarm; ++p) {
      costs[p] = eval(position[p]);
      if (better(costs[p], personal_cost[p])) {
        personal_cost[p] = costs[p];
        personal_best[p] = position[p];
      }
      if (better(costs[p], global_cost)) {
        global_cost = costs[p];
        global_best = position[p];
      }
    }
    std::fill(mean_params.begin(), mean_params.end(), 0.0);
    for (int p = 0; p < swarm; ++p) {
      for (std::size_t i = 0; i < n; ++i) mean_params[i] += position[p][i];
    }
    for (auto& m : mean_params) m /= swarm;

    rec.population(trace.best_cost, eval.used(), costs, mean_params);
    trace.final_population_mean = trace.iterations.back().population_mean;
    if (stall.stalled(trace.best_cost)) return Termination::stalled;

    for (int p = 0; p < swarm; ++p) {
      for (std::size_t i = 0; i < n; ++i) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        velocity[p][i] =
            cfg.pso_inertia * velocity[p][i] +
            cfg.pso_cognitive * r1 * (personal_best[p][i] - position[p][i]) +
            cfg.pso_social * r2 * (global_best[i] - position[p][i]);
        position[p][i] += velocity[p][i];
      }
    }
  }
}

}  // namespace

OptimizerTrace minimize(const CostFn& cost, std::vector<double> x0,
                        const OptimizerConfig& cfg) {
  if (cfg.max_function_evaluations < 1) {
    throw ConfigError("max_function_evaluations must be positive");
  }
  for (const double v : x0) {
    if (!std::isfinite(v)) {
      throw ConfigError("initial parameters must be finite");
    }
  }
  if (x0.empty()) throw ConfigError("empty parameter vector");

  OptimizerTrace trace;
  trace.best_params = x0;
  Evaluator eval(cost, trace, cfg.max_function_evaluations);
  IterationRecorder rec{trace};
  Rng rng(derive_seed(cfg.rng_seed, 0x09F));

  try {
    Termination reason;
    switch (cfg.algorithm) {
      case OptimizerAlgorithm::gd:
        reason = run_gd(eval, std::move(x0), cfg, trace, rec);
        break;
      case OptimizerAlgorithm::bfgs:
        reason = run_bfgs(eval, std::move(x0), cfg, trace, rec);
        break;
      case OptimizerAlgorithm::nelder_mead:
        reason = run_nelder_mead(eval, std::move(x0), cfg, trace, rec);
        break;
      case OptimizerAlgorithm::spsa:
        reason = run_spsa(eval, std::move(x0), cfg, trace, rec, rng);
        break;
      case OptimizerAlgorithm::cma_es:
        reason = run_cma_es(eval, std::move(x0), cfg, trace, rec, rng);
        break;
      case OptimizerAlgorithm::pso:
        reason = run_pso(eval, std::move(x0), cfg, trace, rec, rng);
        break;
      default:
        throw ConfigError("unhandled optimizer");
    }
    trace.termination = reason;
  } catch (const BudgetExhausted&) {
    trace.termination = Termination::budget_exhausted;
  }
  return trace;
}

}  // namespace tvha
