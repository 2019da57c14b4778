#include "tvha/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "tvha/rng.hpp"

namespace tvha {

namespace {

using nlohmann::json;

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_g12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::stalled: return "stalled";
    case Verdict::budget_exhausted: return "budget-exhausted";
    case Verdict::failed: return "failed";
  }
  return "?";
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  bool have_hamiltonian = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected `key = value` (line " +
                        std::to_string(line_no) + ")");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("empty key or value (line " + std::to_string(line_no) +
                        ")");
    }

    const auto as_double = [&] {
      try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw ConfigError("numeric value expected for " + key + " (line " +
                          std::to_string(line_no) + ")");
      }
    };
    const auto as_int = [&] {
      const double v = as_double();
      if (v != std::floor(v)) {
        throw ConfigError("integer value expected for " + key);
      }
      return static_cast<long long>(v);
    };

    if (key == "hamiltonian") {
      cfg.hamiltonian_path = value;
      have_hamiltonian = true;
    } else if (key == "truncation_p") {
      cfg.truncation_p = as_double();
    } else if (key == "depth") {
      cfg.depth = static_cast<int>(as_int());
    } else if (key == "init") {
      if (value == "hf-adiabatic") {
        cfg.init = InitKind::hf_adiabatic;
      } else if (value == "random") {
        cfg.init = InitKind::random;
      } else {
        throw ConfigError("init must be hf-adiabatic or random");
      }
    } else if (key == "tau") {
      cfg.tau = as_double();
    } else if (key == "backend") {
      if (value == "statevector") {
        cfg.backend = EnergyBackend::statevector;
      } else if (value == "sampling") {
        cfg.backend = EnergyBackend::sampling;
      } else {
        throw ConfigError("backend must be statevector or sampling");
      }
    } else if (key == "shots_per_group") {
      cfg.shots_per_group = static_cast<int>(as_int());
    } else if (key == "repeats") {
      cfg.repeats = static_cast<int>(as_int());
    } else if (key == "base_seed") {
      cfg.base_seed = static_cast<std::uint64_t>(as_int());
    } else if (key == "chemical_accuracy") {
      cfg.chemical_accuracy = as_double();
    } else if (key == "optimizer") {
      cfg.optimizer.algorithm = parse_algorithm(value);
    } else if (key == "max_function_evaluations") {
      cfg.optimizer.max_function_evaluations = static_cast<int>(as_int());
    } else if (key == "tolerance") {
      cfg.optimizer.tolerance = as_double();
      cfg.stall_overridden = true;
    } else if (key == "stall_iterations") {
      cfg.optimizer.stall_iterations = static_cast<int>(as_int());
      cfg.stall_overridden = true;
    } else if (key == "population") {
      cfg.optimizer.population = static_cast<int>(as_int());
    } else if (key == "fd_step") {
      cfg.optimizer.finite_difference_step = as_double();
      cfg.fd_overridden = true;
    } else if (key == "gd_step") {
      cfg.optimizer.gd_step = as_double();
    } else if (key == "cma_sigma") {
      cfg.optimizer.cma_initial_sigma = as_double();
    } else if (key == "pso_inertia") {
      cfg.optimizer.pso_inertia = as_double();
    } else if (key == "pso_cognitive") {
      cfg.optimizer.pso_cognitive = as_double();
    } else if (key == "pso_social") {
      cfg.optimizer.pso_social = as_double();
    } else if (key == "pso_span") {
      cfg.optimizer.pso_span = as_double();
    } else if (key == "spsa_a") {
      cfg.optimizer.spsa_a = as_double();
    } else if (key == "spsa_c") {
      cfg.optimizer.spsa_c = as_double();
    } else if (key == "spsa_A") {
      cfg.optimizer.spsa_stability = as_double();
    } else if (key == "spsa_alpha") {
      cfg.optimizer.spsa_alpha = as_double();
    } else if (key == "spsa_gamma") {
      cfg.optimizer.spsa_gamma = as_double();
    } else if (key == "nm_step") {
      cfg.optimizer.nm_initial_step = as_double();
    } else {
      throw ConfigError("unknown configuration key: " + key + " (line " +
                        std::to_string(line_no) + ")");
    }
  }

  if (!have_hamiltonian) {
    throw ConfigError("configuration must name a hamiltonian file");
  }
  if (cfg.repeats < 1) throw ConfigError("repeats must be at least 1");
  if (!(cfg.truncation_p >= 0.0 && cfg.truncation_p <= 1.0)) {
    throw ConfigError("truncation_p must lie in [0, 1]");
  }
  if (cfg.depth < 1) throw ConfigError("depth must be at least 1");
  if (cfg.backend == EnergyBackend::sampling && cfg.shots_per_group < 1) {
    throw ConfigError("shots_per_group must be at least 1");
  }
  if (is_population(cfg.optimizer.algorithm) && cfg.optimizer.population == 1) {
    throw ConfigError("population must be at least 2");
  }
  return cfg;
}

ExperimentConfig parse_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  return parse_experiment_config(in);
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["hamiltonian"] = cfg.hamiltonian_path;
  kv["truncation_p"] = format_g17(cfg.truncation_p);
  kv["depth"] = std::to_string(cfg.depth);
  kv["init"] = cfg.init == InitKind::hf_adiabatic ? "hf-adiabatic" : "random";
  kv["tau"] = format_g17(cfg.tau);
  kv["backend"] =
      cfg.backend == EnergyBackend::statevector ? "statevector" : "sampling";
  kv["shots_per_group"] = std::to_string(cfg.shots_per_group);
  kv["repeats"] = std::to_string(cfg.repeats);
  kv["base_seed"] = std::to_string(cfg.base_seed);
  kv["chemical_accuracy"] = format_g17(cfg.chemical_accuracy);
  kv["optimizer"] = to_string(cfg.optimizer.algorithm);
  kv["max_function_evaluations"] =
      std::to_string(cfg.optimizer.max_function_evaluations);
  kv["tolerance"] = format_g17(cfg.optimizer.tolerance);
  kv["stall_iterations"] = std::to_string(cfg.optimizer.stall_iterations);
  kv["population"] = std::to_string(cfg.optimizer.population);
  kv["fd_step"] = format_g17(cfg.optimizer.finite_difference_step);
  kv["gd_step"] = format_g17(cfg.optimizer.gd_step);
  kv["cma_sigma"] = format_g17(cfg.optimizer.cma_initial_sigma);
  kv["pso_inertia"] = format_g17(cfg.optimizer.pso_inertia);
  kv["pso_cognitive"] = format_g17(cfg.optimizer.pso_cognitive);
  kv["pso_social"] = format_g17(cfg.optimizer.pso_social);
  kv["pso_span"] = format_g17(cfg.optimizer.pso_span);
  kv["spsa_a"] = format_g17(cfg.optimizer.spsa_a);
  kv["spsa_c"] = format_g17(cfg.optimizer.spsa_c);
  kv["spsa_A"] = format_g17(cfg.optimizer.spsa_stability);
  kv["spsa_alpha"] = format_g17(cfg.optimizer.spsa_alpha);
  kv["spsa_gamma"] = format_g17(cfg.optimizer.spsa_gamma);
  kv["nm_step"] = format_g17(cfg.optimizer.nm_initial_step);
  kv["stall_overridden"] = cfg.stall_overridden ? "1" : "0";
  kv["fd_overridden"] = cfg.fd_overridden ? "1" : "0";

  std::ostringstream os;
  for (const auto& [key, value] : kv) os << key << " = " << value << '\n';
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string canon = canonical_config(cfg);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const unsigned char c : canon) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

json config_to_json(const ExperimentConfig& cfg) {
  json opt = {
      {"algorithm", to_string(cfg.optimizer.algorithm)},
      {"max_function_evaluations", cfg.optimizer.max_function_evaluations},
      {"rng_seed", cfg.optimizer.rng_seed},
      {"tolerance", cfg.optimizer.tolerance},
      {"stall_iterations", cfg.optimizer.stall_iterations},
      {"finite_difference_step", cfg.optimizer.finite_difference_step},
      {"gd_step", cfg.optimizer.gd_step},
      {"population", cfg.optimizer.population},
      {"cma_initial_sigma", cfg.optimizer.cma_initial_sigma},
      {"pso_inertia", cfg.optimizer.pso_inertia},
      {"pso_cognitive", cfg.optimizer.pso_cognitive},
      {"pso_social", cfg.optimizer.pso_social},
      {"pso_span", cfg.optimizer.pso_span},
      {"spsa_a", cfg.optimizer.spsa_a},
      {"spsa_c", cfg.optimizer.spsa_c},
      {"spsa_stability", cfg.optimizer.spsa_stability},
      {"spsa_alpha", cfg.optimizer.spsa_alpha},
      {"spsa_gamma", cfg.optimizer.spsa_gamma},
      {"nm_initial_step", cfg.optimizer.nm_initial_step},
  };
  return json{
      {"hamiltonian", cfg.hamiltonian_path},
      {"truncation_p", cfg.truncation_p},
      {"depth", cfg.depth},
      {"init", cfg.init == InitKind::hf_adiabatic ? "hf-adiabatic" : "random"},
      {"tau", cfg.tau},
      {"backend", cfg.backend == EnergyBackend::statevector ? "statevector"
                                                            : "sampling"},
      {"shots_per_group", cfg.shots_per_group},
      {"repeats", cfg.repeats},
      {"base_seed", cfg.base_seed},
      {"chemical_accuracy", cfg.chemical_accuracy},
      {"stall_overridden", cfg.stall_overridden},
      {"fd_overridden", cfg.fd_overridden},
      {"optimizer", std::move(opt)},
  };
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.hamiltonian_path = j.at("hamiltonian").get<std::string>();
  cfg.truncation_p = j.at("truncation_p").get<double>();
  cfg.depth = j.at("depth").get<int>();
  cfg.init = j.at("init").get<std::string>() == "random"
                 ? InitKind::random
                 : InitKind::hf_adiabatic;
  cfg.tau = j.at("tau").get<double>();
  cfg.backend = j.at("backend").get<std::string>() == "sampling"
                    ? EnergyBackend::sampling
                    : EnergyBackend::statevector;
  cfg.shots_per_group = j.at("shots_per_group").get<int>();
  cfg.repeats = j.at("repeats").get<int>();
  cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
  cfg.chemical_accuracy = j.at("chemical_accuracy").get<double>();
  cfg.stall_overridden = j.at("stall_overridden").get<bool>();
  cfg.fd_overridden = j.at("fd_overridden").get<bool>();
  const json& opt = j.at("optimizer");
  cfg.optimizer.algorithm =
      parse_algorithm(opt.at("algorithm").get<std::string>());
  cfg.optimizer.max_function_evaluations =
      opt.at("max_function_evaluations").get<int>();
  cfg.optimizer.rng_seed = opt.at("rng_seed").get<std::uint64_t>();
  cfg.optimizer.tolerance = opt.at("tolerance").get<double>();
  cfg.optimizer.stall_iterations = opt.at("stall_iterations").get<int>();
  cfg.optimizer.finite_difference_step =
      opt.at("finite_difference_step").get<double>();
  cfg.optimizer.gd_step = opt.at("gd_step").get<double>();
  cfg.optimizer.population = opt.at("population").get<int>();
  cfg.optimizer.cma_initial_sigma = opt.at("cma_initial_sigma").get<double>();
  cfg.optimizer.pso_inertia = opt.at("pso_inertia").get<double>();
  cfg.optimizer.pso_cognitive = opt.at("pso_cognitive").get<double>();
  cfg.optimizer.pso_social = opt.at("pso_social").get<double>();
  cfg.optimizer.pso_span = opt.at("pso_span").get<double>();
  cfg.optimizer.spsa_a = opt.at("spsa_a").get<double>();
  cfg.optimizer.spsa_c = opt.at("spsa_c").get<double>();
  cfg.optimizer.spsa_stability = opt.at("spsa_stability").get<double>();
  cfg.optimizer.spsa_alpha = opt.at("spsa_alpha").get<double>();
  cfg.optimizer.spsa_gamma = opt.at("spsa_gamma").get<double>();
  cfg.optimizer.nm_initial_step = opt.at("nm_initial_step").get<double>();
  return cfg;
}

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double cost_from_json(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

}  // namespace

void write_record(std::ostream& out, const RunRecord& record) {
  json header = {
      {"record", "header"},
      {"hash", record.hash},
      {"replica", record.replica},
      {"seed", record.seed},
      {"config", config_to_json(record.config)},
  };
  header["e0"] = record.e0 ? json(*record.e0) : json(nullptr);
  out << header.dump() << '\n';

  const bool sampling = !record.variances.empty();
  for (std::size_t i = 0; i < record.trace.evaluations.size(); ++i) {
    const auto& e = record.trace.evaluations[i];
    json line = {{"record", "eval"}, {"fe", e.fe_index}};
    line["cost"] = finite_or_null(e.cost);
    if (!e.params.empty()) line["params"] = e.params;
    if (sampling && i < record.variances.size()) {
      line["variance"] = record.variances[i];
      line["seed"] = record.eval_seeds[i];
    }
    out << line.dump() << '\n';
  }
  for (const auto& it : record.trace.iterations) {
    json line = {{"record", "iteration"},
                 {"it", it.iteration},
                 {"best", finite_or_null(it.best_so_far)},
                 {"fes", it.evaluations_used}};
    if (it.population_mean) line["mean"] = finite_or_null(*it.population_mean);
    if (it.population_min) line["min"] = finite_or_null(*it.population_min);
    if (!it.mean_params.empty()) line["mean_params"] = it.mean_params;
    out << line.dump() << '\n';
  }
  json final_line = {
      {"record", "final"},
      {"verdict", to_string(record.verdict)},
      {"termination", to_string(record.trace.termination)},
      {"best_cost", finite_or_null(record.trace.best_cost)},
      {"best_params", record.trace.best_params},
      {"wall_ms", record.wall_ms},
  };
  if (record.trace.final_population_mean) {
    final_line["final_population_mean"] =
        finite_or_null(*record.trace.final_population_mean);
  }
  if (!record.failure_reason.empty()) {
    final_line["failure"] = record.failure_reason;
  }
  out << final_line.dump() << '\n';
}

std::string record_to_string(const RunRecord& record) {
  std::ostringstream os;
  write_record(os, record);
  return os.str();
}

RunRecord read_record(std::istream& in) {
  RunRecord record;
  bool have_header = false;
  bool have_final = false;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad record line: ") + e.what());
    }
    const std::string kind = j.at("record").get<std::string>();
    if (kind == "header") {
      record.hash = j.at("hash").get<std::string>();
      record.replica = j.at("replica").get<int>();
      record.seed = j.at("seed").get<std::uint64_t>();
      record.config = config_from_json(j.at("config"));
      if (!j.at("e0").is_null()) record.e0 = j.at("e0").get<double>();
      have_header = true;
    } else if (kind == "eval") {
      Evaluation e;
      e.fe_index = j.at("fe").get<int>();
      e.cost = cost_from_json(j.at("cost"));
      if (j.contains("params")) {
        e.params = j.at("params").get<std::vector<double>>();
      }
      if (j.contains("variance")) {
        record.variances.push_back(j.at("variance").get<double>());
        record.eval_seeds.push_back(j.at("seed").get<std::uint64_t>());
      }
      record.trace.evaluations.push_back(std::move(e));
    } else if (kind == "iteration") {
      IterationSummary s;
      s.iteration = j.at("it").get<int>();
      s.best_so_far = cost_from_json(j.at("best"));
      s.evaluations_used = j.at("fes").get<int>();
      if (j.contains("mean")) s.population_mean = cost_from_json(j.at("mean"));
      if (j.contains("min")) s.population_min = cost_from_json(j.at("min"));
      if (j.contains("mean_params")) {
        s.mean_params = j.at("mean_params").get<std::vector<double>>();
      }
      record.trace.iterations.push_back(std::move(s));
    } else if (kind == "final") {
      const std::string verdict = j.at("verdict").get<std::string>();
      if (verdict == "converged") record.verdict = Verdict::converged;
      else if (verdict == "stalled") record.verdict = Verdict::stalled;
      else if (verdict == "budget-exhausted")
        record.verdict = Verdict::budget_exhausted;
      else record.verdict = Verdict::failed;
      const std::string term = j.at("termination").get<std::string>();
      if (term == "tolerance") record.trace.termination = Termination::tolerance;
      else if (term == "stalled") record.trace.termination = Termination::stalled;
      else record.trace.termination = Termination::budget_exhausted;
      record.trace.best_cost = j.at("best_cost").is_null()
                                   ? std::numeric_limits<double>::infinity()
                                   : j.at("best_cost").get<double>();
      record.trace.best_params =
          j.at("best_params").get<std::vector<double>>();
      record.wall_ms = j.at("wall_ms").get<double>();
      if (j.contains("final_population_mean")) {
        record.trace.final_population_mean =
            cost_from_json(j.at("final_population_mean"));
      }
      if (j.contains("failure")) {
        record.failure_reason = j.at("failure").get<std::string>();
      }
      have_final = true;
    } else {
      throw ParseError("unknown record kind: " + kind);
    }
  }
  if (!have_header || !have_final) {
    throw ParseError("record stream is missing its header or final line");
  }
  // Rebuild the derived error series.
  if (record.e0) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : record.trace.evaluations) {
      if (!std::isnan(e.cost)) best = std::min(best, e.cost);
      record.error_series.push_back(std::abs(best - *record.e0));
    }
  }
  return record;
}

namespace {

RunRecord execute_replica(const ExperimentConfig& cfg, const Problem& problem,
                          const OptimizerConfig& resolved, int replica,
                          const std::string& hash) {
  RunRecord record;
  record.hash = hash;
  record.config = cfg;
  record.replica = replica;
  record.seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(replica));
  record.e0 = problem.exact_ground;

  const auto start = std::chrono::steady_clock::now();
  try {
    std::vector<double> x0;
    if (cfg.init == InitKind::hf_adiabatic) {
      x0 = init_adiabatic(problem.circuit, problem.ham,
                          {InitStrategy::adiabatic, cfg.tau, 0});
    } else {
      x0 = init_random(problem.circuit,
                       {InitStrategy::random, cfg.tau,
                        derive_seed(record.seed, 1)});
    }

    std::vector<double> variances;
    std::vector<std::uint64_t> eval_seeds;
    std::uint64_t eval_counter = 0;
    const CostFn cost = [&](std::span<const double> params) {
      if (cfg.backend == EnergyBackend::sampling) {
        const std::uint64_t seed = derive_seed(record.seed, 2, eval_counter++);
        const EnergyEstimate est =
            evaluate_energy(problem, params, cfg.shots_per_group, seed);
        variances.push_back(*est.variance_theoretical *
                            static_cast<double>(cfg.shots_per_group));
        eval_seeds.push_back(seed);
        return est.value;
      }
      return evaluate_energy(problem, params).value;
    };

    OptimizerConfig opt = resolved;
    opt.rng_seed = derive_seed(record.seed, 3);
    record.trace = minimize(cost, std::move(x0), opt);
    record.variances = std::move(variances);
    record.eval_seeds = std::move(eval_seeds);

    if (record.e0) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& e : record.trace.evaluations) {
        if (!std::isnan(e.cost)) best = std::min(best, e.cost);
        record.error_series.push_back(std::abs(best - *record.e0));
      }
    }

    const bool converged = record.e0 && !record.error_series.empty() &&
                           record.error_series.back() <= cfg.chemical_accuracy;
    if (converged) {
      record.verdict = Verdict::converged;
    } else if (record.trace.termination == Termination::budget_exhausted) {
      record.verdict = Verdict::budget_exhausted;
    } else {
      record.verdict = Verdict::stalled;
    }

    // Parameter storage: full vectors up to 32 entries, every 10th plus the
    // final evaluation above that.
    if (problem.circuit.parameter_count() > 32) {
      for (std::size_t i = 0; i + 1 < record.trace.evaluations.size(); ++i) {
        if (record.trace.evaluations[i].fe_index % 10 != 0) {
          record.trace.evaluations[i].params.clear();
        }
      }
    }
  } catch (const std::exception& e) {
    record.verdict = Verdict::failed;
    record.failure_reason = e.what();
  }
  record.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return record;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, int jobs) {
  ProblemOptions options;
  options.truncation_p = cfg.truncation_p;
  options.depth = cfg.depth;
  options.prepare_sampling = cfg.backend == EnergyBackend::sampling;
  options.compute_exact_ground = true;
  const Problem problem = build_problem_file(cfg.hamiltonian_path, options);

  OptimizerConfig resolved = cfg.optimizer;
  if (!cfg.fd_overridden) {
    resolved.finite_difference_step =
        cfg.backend == EnergyBackend::sampling ? 1e-3 : 1e-6;
  }
  if (!cfg.stall_overridden) {
    if (cfg.backend == EnergyBackend::sampling) {
      const Statevector hf =
          hf_state(problem.ham.n_qubits, problem.ham.n_electrons);
      const double var =
          hamiltonian_variance(hf, problem.ham, problem.ham_squared);
      resolved.stall_iterations = 20;
      resolved.tolerance = std::sqrt(var / cfg.shots_per_group);
    } else {
      resolved.stall_iterations = 10;
      resolved.tolerance = 1e-8;
    }
  }

  const std::string hash = config_hash(cfg);
  std::vector<RunRecord> records(static_cast<std::size_t>(cfg.repeats));
  const int workers = std::max(1, std::min(jobs, cfg.repeats));
  std::atomic<int> next{0};
  const auto worker = [&] {
    while (true) {
      const int replica = next.fetch_add(1);
      if (replica >= cfg.repeats) break;
      records[static_cast<std::size_t>(replica)] =
          execute_replica(cfg, problem, resolved, replica, hash);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

SummaryTable summarize(const std::vector<RunRecord>& records) {
  if (records.empty()) {
    throw ValidationError("summarize requires at least one record");
  }
  SummaryTable table;
  table.hash = records.front().hash;
  table.chemical_accuracy = records.front().config.chemical_accuracy;
  for (const auto& r : records) {
    if (r.hash != table.hash) {
      throw ValidationError("records come from different configurations");
    }
  }
  table.n_records = static_cast<int>(records.size());

  std::size_t max_len = 0;
  for (const auto& r : records) {
    max_len = std::max(max_len, r.error_series.size());
  }
  table.mean_error_curve.assign(max_len, 0.0);
  double fe_sum = 0.0;
  double final_sum = 0.0;
  int final_count = 0;
  for (const auto& r : records) {
    if (r.verdict == Verdict::converged) ++table.success_count;

    const int budget = r.config.optimizer.max_function_evaluations;
    int fe_to_accuracy = budget;
    for (std::size_t i = 0; i < r.error_series.size(); ++i) {
      if (r.error_series[i] <= table.chemical_accuracy) {
        fe_to_accuracy = static_cast<int>(i) + 1;
        break;
      }
    }
    fe_sum += fe_to_accuracy;

    if (!r.error_series.empty()) {
      final_sum += r.error_series.back();
      ++final_count;
    }
    for (std::size_t i = 0; i < max_len; ++i) {
      const double value =
          r.error_series.empty()
              ? std::numeric_limits<double>::quiet_NaN()
              : (i < r.error_series.size() ? r.error_series[i]
                                           : r.error_series.back());
      table.mean_error_curve[i] += value / static_cast<double>(records.size());
    }
  }
  table.mean_fe_to_accuracy = fe_sum / static_cast<double>(records.size());
  table.mean_final_error =
      final_count ? final_sum / final_count
                  : std::numeric_limits<double>::quiet_NaN();
  return table;
}

std::string summary_csv(const SummaryTable& table) {
  std::ostringstream os;
  os << "# hash = " << table.hash << ", records = " << table.n_records
     << ", success = " << table.success_count << "/" << table.n_records
     << ", mean_fe_to_accuracy = " << format_g12(table.mean_fe_to_accuracy)
     << ", mean_final_error = " << format_g12(table.mean_final_error)
     << ", chemical_accuracy = " << format_g12(table.chemical_accuracy)
     << "\n";
  os << "fe,mean_abs_error\n";
  for (std::size_t i = 0; i < table.mean_error_curve.size(); ++i) {
    os << (i + 1) << ',' << format_g12(table.mean_error_curve[i]) << '\n';
  }
  return os.str();
}

std::string summary_json(const SummaryTable& table) {
  json j = {
      {"hash", table.hash},
      {"records", table.n_records},
      {"success", table.success_count},
      {"chemical_accuracy", table.chemical_accuracy},
      {"mean_fe_to_accuracy", table.mean_fe_to_accuracy},
      {"mean_final_error", finite_or_null(table.mean_final_error)},
      {"mean_error_curve", table.mean_error_curve},
  };
  return j.dump();
}

namespace {

std::vector<std::string> expand_record_paths(
    const std::vector<std::string>& args) {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  for (const auto& arg : args) {
    if (fs::is_directory(arg)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(arg)) {
        if (entry.path().extension() == ".jsonl") {
          found.push_back(entry.path().string());
        }
      }
      std::sort(found.begin(), found.end());
      paths.insert(paths.end(), found.begin(), found.end());
    } else if (fs::exists(arg)) {
      paths.push_back(arg);
    } else {
      throw ValidationError("no such records file: " + arg);
    }
  }
  if (paths.empty()) {
    throw ValidationError("no record files to read");
  }
  return paths;
}

std::vector<RunRecord> load_records(const std::vector<std::string>& args) {
  std::vector<RunRecord> records;
  for (const auto& path : expand_record_paths(args)) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open records file: " + path);
    records.push_back(read_record(in));
  }
  return records;
}

int resolve_jobs(int cli_jobs) {
  if (const char* env = std::getenv("TVHA_BENCH_JOBS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
      // fall through to the CLI value
    }
  }
  return std::max(1, cli_jobs);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"tVHA small-molecule optimization benchmark"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  int jobs = 1;
  std::string out_dir = ".";
  std::string format = "csv";
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  app.add_option("--jobs", jobs, "replica parallelism (TVHA_BENCH_JOBS wins)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "summary format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--seed", seed_override, "override the configured base seed")
      ->each([&](const std::string&) { seed_set = true; });

  auto* cmd_run = app.add_subcommand("run", "execute an experiment config");
  std::string run_config;
  cmd_run->add_option("config", run_config, "config file")->required();

  auto* cmd_summarize =
      app.add_subcommand("summarize", "aggregate run records into a table");
  std::vector<std::string> summarize_paths;
  cmd_summarize->add_option("records", summarize_paths, "records or dirs")
      ->required();

  auto* cmd_landscape =
      app.add_subcommand("landscape", "energy slice around the optimum");
  std::string landscape_config;
  std::vector<int> axes{0, 1};
  double delta = 0.5;
  int resolution = 41;
  std::string center_text;
  cmd_landscape->add_option("config", landscape_config, "config file")
      ->required();
  cmd_landscape->add_option("--axes", axes, "parameter indices i j")
      ->expected(2);
  cmd_landscape->add_option("--delta", delta, "half-width in radians");
  cmd_landscape->add_option("--res", resolution, "grid points per axis");
  cmd_landscape->add_option("--center", center_text,
                            "comma-separated reference parameters");

  auto* cmd_noisefloor = app.add_subcommand(
      "noisefloor", "noise-floor report and shot-scaling fit");
  std::vector<std::string> noisefloor_paths;
  cmd_noisefloor->add_option("records", noisefloor_paths, "records or dirs")
      ->required();

  auto* cmd_exact =
      app.add_subcommand("exact", "dense-oracle ground energy of a file");
  std::string exact_path;
  double exact_p = 0.999;
  cmd_exact->add_option("hamiltonian", exact_path, "FCIDUMP file")->required();
  cmd_exact->add_option("--truncation", exact_p, "gamma truncation threshold");

  auto* cmd_inspect =
      app.add_subcommand("inspect", "term/group/parameter counts");
  std::string inspect_path;
  double inspect_p = 0.999;
  int inspect_depth = 1;
  bool dump_terms = false;
  cmd_inspect->add_option("hamiltonian", inspect_path, "FCIDUMP file")
      ->required();
  cmd_inspect->add_option("--truncation", inspect_p, "gamma truncation");
  cmd_inspect->add_option("--depth", inspect_depth, "circuit depth");
  cmd_inspect->add_flag("--dump-terms", dump_terms,
                        "print the qubit Hamiltonian in textual Pauli form");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  namespace fs = std::filesystem;

  if (cmd_run->parsed()) {
    ExperimentConfig cfg = parse_experiment_config_file(run_config);
    if (seed_set) cfg.base_seed = seed_override;
    const auto records = run_experiment(cfg, resolve_jobs(jobs));
    fs::create_directories(out_dir);
    const std::string hash = config_hash(cfg);
    for (const auto& record : records) {
      char name[64];
      std::snprintf(name, sizeof(name), "run_%s_r%03d.jsonl", hash.c_str(),
                    record.replica);
      std::ofstream out(fs::path(out_dir) / name);
      write_record(out, record);
    }
    std::cout << "wrote " << records.size() << " records for config " << hash
              << " to " << out_dir << "\n";
    for (const auto& record : records) {
      std::cout << "replica " << record.replica << ": "
                << to_string(record.verdict);
      if (!record.error_series.empty()) {
        std::cout << ", final_error = "
                  << format_g12(record.error_series.back());
      }
      if (record.verdict == Verdict::failed) {
        std::cout << " (" << record.failure_reason << ")";
      }
      std::cout << "\n";
    }
    return 0;
  }

  if (cmd_summarize->parsed()) {
    const auto records = load_records(summarize_paths);
    const SummaryTable table = summarize(records);
    std::cout << (format == "jsonl" ? summary_json(table) + "\n"
                                    : summary_csv(table));
    return 0;
  }

  if (cmd_landscape->parsed()) {
    ExperimentConfig cfg = parse_experiment_config_file(landscape_config);
    if (seed_set) cfg.base_seed = seed_override;
    ProblemOptions options;
    options.truncation_p = cfg.truncation_p;
    options.depth = cfg.depth;
    options.prepare_sampling = cfg.backend == EnergyBackend::sampling;
    const Problem problem = build_problem_file(cfg.hamiltonian_path, options);

    std::vector<double> center;
    if (!center_text.empty()) {
      std::istringstream cs(center_text);
      std::string token;
      while (std::getline(cs, token, ',')) center.push_back(std::stod(token));
    } else {
      OptimizerConfig ref_cfg;
      ref_cfg.algorithm = OptimizerAlgorithm::bfgs;
      ref_cfg.max_function_evaluations = 5000;
      center = find_reference_parameters(problem, ref_cfg, std::nullopt,
                                         cfg.base_seed);
    }

    const std::optional<int> shots =
        cfg.backend == EnergyBackend::sampling
            ? std::optional<int>(cfg.shots_per_group)
            : std::nullopt;
    const LandscapeGrid grid =
        landscape_slice(problem, center, axes[0], axes[1], delta, resolution,
                        shots, cfg.base_seed);
    fs::create_directories(out_dir);
    const std::string stem = "landscape_" + config_hash(cfg);
    {
      std::ofstream csv(fs::path(out_dir) / (stem + ".csv"));
      csv << landscape_csv(grid);
    }
    {
      std::ofstream sidecar(fs::path(out_dir) / (stem + ".json"));
      sidecar << landscape_sidecar_json(grid) << "\n";
    }
    std::cout << "wrote " << stem << ".csv and " << stem << ".json to "
              << out_dir << "\n";
    return 0;
  }

  if (cmd_noisefloor->parsed()) {
    const auto records = load_records(noisefloor_paths);
    std::map<int, std::vector<const RunRecord*>> by_shots;
    for (const auto& record : records) {
      if (record.variances.empty()) {
        throw ValidationError(
            "noisefloor requires sampling-backend records with variances");
      }
      by_shots[record.config.shots_per_group].push_back(&record);
    }
    std::vector<double> mean_errors;
    std::vector<int> budgets;
    std::ostringstream body;
    body << "shots,err_nf,mean_estimator_error,best_estimator_error,"
            "n_records\n";
    for (const auto& [shots, group] : by_shots) {
      std::vector<double> variances;
      double mean_err = 0.0, best_err = 0.0;
      int populated = 0;
      for (const auto* record : group) {
        variances.insert(variances.end(), record->variances.begin(),
                         record->variances.end());
        if (record->e0) {
          try {
            const auto cmp = compare_estimators(record->trace, *record->e0);
            mean_err += cmp.avg_abs_error_mean;
            best_err += cmp.avg_abs_error_best;
            ++populated;
          } catch (const ValidationError&) {
            // non-population record; skipped in the estimator columns
          }
        }
      }
      const auto report = noise_floor(std::move(variances), shots);
      body << shots << ',' << format_g12(report.err_nf) << ',';
      if (populated) {
        mean_err /= populated;
        best_err /= populated;
        body << format_g12(mean_err) << ',' << format_g12(best_err);
        mean_errors.push_back(mean_err);
        budgets.push_back(shots);
      } else {
        body << ",";
      }
      body << ',' << group.size() << '\n';
    }
    std::ostringstream head;
    if (mean_errors.size() >= 3) {
      const auto fit = fit_scaling(mean_errors, budgets);
      head << "# fit_mean: prefactor = " << format_g12(fit.prefactor)
           << ", exponent = " << format_g12(fit.exponent) << "\n";
    }
    std::cout << head.str() << body.str();
    return 0;
  }

  if (cmd_exact->parsed()) {
    ProblemOptions options;
    options.truncation_p = exact_p;
    options.compute_exact_ground = true;
    const Problem problem = build_problem_file(exact_path, options);
    std::cout << format_g12(*problem.exact_ground) << "\n";
    return 0;
  }

  if (cmd_inspect->parsed()) {
    ProblemOptions options;
    options.truncation_p = inspect_p;
    options.depth = inspect_depth;
    options.compute_exact_ground = false;
    const Problem problem = build_problem_file(inspect_path, options);
    std::size_t alpha = 0, beta = 0, gamma = 0;
    for (const auto f : problem.ham.fragment_of) {
      if (f == Fragment::alpha) ++alpha;
      if (f == Fragment::beta) ++beta;
      if (f == Fragment::gamma) ++gamma;
    }
    std::cout << "n_qubits = " << problem.ham.n_qubits << "\n"
              << "n_electrons = " << problem.ham.n_electrons << "\n"
              << "terms = " << problem.ham.size() << " (alpha " << alpha
              << ", beta " << beta << ", gamma " << gamma << ")\n"
              << "constant = " << format_g12(problem.ham.constant) << "\n"
              << "truncation: kept " << problem.truncation.s_cut << " of "
              << (problem.truncation.kept.size() +
                  problem.truncation.dropped.size())
              << " gamma terms, weight "
              << format_g12(problem.truncation.p_achieved) << "\n"
              << "measurement groups = "
              << problem.measurement_groups.groups.size() << "\n"
              << "circuit: " << problem.circuit.summary_json() << "\n";
    if (dump_terms) {
      std::cout << "# constant " << format_g12(problem.ham.constant) << "\n"
                << format_terms(problem.ham.terms);
    }
    return 0;
  }

  return 1;
}

}  // namespace

int cli_main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace tvha
