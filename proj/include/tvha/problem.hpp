#pragma once

#include <array>
#include <optional>
#include <string>

#include "tvha/ansatz.hpp"
#include "tvha/hamiltonian.hpp"
#include "tvha/simulator.hpp"

namespace tvha {

struct ProblemOptions {
  double truncation_p = 0.999;
  int depth = 1;
  bool compute_exact_ground = true;  // dense oracle, <= 14 qubits
  bool prepare_sampling = false;     // precompute H^2 for variance reports
};

// Fully assembled optimization problem: parse -> fragment -> truncate ->
// Jordan-Wigner -> group -> circuit.
struct Problem {
  QubitHamiltonian ham;
  TvhaCircuit circuit;
  std::array<CommutingGroups, 3> ansatz_groups;
  CommutingGroups measurement_groups;  // qubit-wise partition of ham.terms
  QubitHamiltonian ham_squared;        // valid when has_squared
  bool has_squared = false;
  std::optional<double> exact_ground;
  TruncationReport truncation;
};

Problem build_problem(const FermionicIntegrals& ints,
                      const ProblemOptions& options);
Problem build_problem_file(const std::string& hamiltonian_path,
                           const ProblemOptions& options);

// Uniform evaluation surface over both backends.
EnergyEstimate evaluate_energy(const Problem& problem,
                               std::span<const double> params);
EnergyEstimate evaluate_energy(const Problem& problem,
                               std::span<const double> params,
                               int shots_per_group, std::uint64_t seed);

}  // namespace tvha
