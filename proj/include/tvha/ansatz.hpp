#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tvha/hamiltonian.hpp"
#include "tvha/pauli.hpp"
#include "tvha/simulator.hpp"

namespace tvha {

// Layered circuit built from the Hamiltonian's own terms: per layer, all
// alpha-group exponentials share one angle, then beta groups, then gamma
// groups. The fragment plan is identical across layers; only the angle
// index changes.
struct TvhaCircuit {
  struct FragmentPlan {
    Fragment fragment;
    // Groups in deterministic construction order; terms carry their own
    // coefficients (exponent = angle * coefficient).
    std::vector<std::vector<PauliTerm>> groups;
  };

  int depth = 1;
  int n_qubits = 0;
  int n_electrons = 0;
  enum class Reference { hartree_fock, custom } reference =
      Reference::hartree_fock;
  std::uint64_t custom_occupation = 0;
  std::vector<FragmentPlan> fragments;  // non-empty fragments, alpha..gamma

  int params_per_layer() const { return static_cast<int>(fragments.size()); }
  int parameter_count() const { return depth * params_per_layer(); }

  // Position of (layer d in [0, depth), fragment) in the flat parameter
  // vector. Throws DomainError for fragments absent from the plan.
  int param_index(int layer, Fragment f) const;

  // Depth, per-fragment group counts and parameter count as a JSON object
  // string (run provenance).
  std::string summary_json() const;
};

// Groups each fragment's terms for the circuit: terms sharing an x-mask are
// kept together (their sum is exactly the particle-conserving piece of the
// fragment), and whole x-mask classes are then greedily packed into
// general-commuting groups, heaviest class first. Index space is global
// over ham.terms.
std::array<CommutingGroups, 3> fragment_groups(const QubitHamiltonian& ham);

TvhaCircuit build_circuit(const QubitHamiltonian& ham,
                          const std::array<CommutingGroups, 3>& groups_by_fragment,
                          int depth);

// Reference state followed by all layer exponentials.
Statevector prepare_state(const TvhaCircuit& circuit,
                          std::span<const double> params);

// Statevector-backend energy of the circuit at the given parameters.
EnergyEstimate evaluate(const TvhaCircuit& circuit,
                        std::span<const double> params,
                        const QubitHamiltonian& ham);

// Sampling-backend energy; `groups` must partition ham's terms qubit-wise.
EnergyEstimate evaluate(const TvhaCircuit& circuit,
                        std::span<const double> params,
                        const QubitHamiltonian& ham,
                        const CommutingGroups& groups,
                        const SamplingConfig& cfg);
EnergyEstimate evaluate(const TvhaCircuit& circuit,
                        std::span<const double> params,
                        const QubitHamiltonian& ham,
                        const CommutingGroups& groups,
                        const SamplingConfig& cfg,
                        const QubitHamiltonian& ham_squared);

enum class InitStrategy { adiabatic, random };

struct InitConfig {
  InitStrategy strategy = InitStrategy::adiabatic;
  double tau = 1.0;             // total adiabatic time
  std::uint64_t rng_seed = 0;   // random strategy
};

// alpha_d = (tau/D) <H_alpha>_HF; beta_d = gamma_d = (tau/D)(d/D) <V>_HF
// with V the beta+gamma fragments. Expectations exclude the constant.
std::vector<double> init_adiabatic(const TvhaCircuit& circuit,
                                   const QubitHamiltonian& ham,
                                   const InitConfig& cfg);

// Each parameter independently uniform on [0, 1).
std::vector<double> init_random(const TvhaCircuit& circuit,
                                const InitConfig& cfg);

}  // namespace tvha
