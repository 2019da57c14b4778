#include "tvha/problem.hpp"

namespace tvha {

Problem build_problem(const FermionicIntegrals& ints,
                      const ProblemOptions& options) {
  Problem out;
  auto [frag, report] = truncate_gamma(fragment(ints), options.truncation_p);
  out.truncation = std::move(report);
  out.ham = jordan_wigner(frag);
  out.ansatz_groups = fragment_groups(out.ham);
  out.circuit = build_circuit(out.ham, out.ansatz_groups, options.depth);
  out.measurement_groups =
      group_commuting(out.ham.terms, CommutationMode::qubit_wise);
  if (options.compute_exact_ground) {
    out.exact_ground = exact_ground_energy(out.ham);
  }
  if (options.prepare_sampling) {
    out.ham_squared = squared(out.ham);
    out.has_squared = true;
  }
  return out;
}

Problem build_problem_file(const std::string& hamiltonian_path,
                           const ProblemOptions& options) {
  return build_problem(parse_integrals_file(hamiltonian_path), options);
}

EnergyEstimate evaluate_energy(const Problem& problem,
                               std::span<const double> params) {
  return evaluate(problem.circuit, params, problem.ham);
}

EnergyEstimate evaluate_energy(const Problem& problem,
                               std::span<const double> params,
                               int shots_per_group, std::uint64_t seed) {
  const SamplingConfig cfg{shots_per_group, seed};
  if (problem.has_squared) {
    return evaluate(problem.circuit, params, problem.ham,
                    problem.measurement_groups, cfg, problem.ham_squared);
  }
  return evaluate(problem.circuit, params, problem.ham,
                  problem.measurement_groups, cfg);
}

}  // namespace tvha
