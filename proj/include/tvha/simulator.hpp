#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tvha/hamiltonian.hpp"
#include "tvha/pauli.hpp"

namespace tvha {

enum class EnergyBackend { statevector, sampling };

// Unit record of every cost evaluation.
struct EnergyEstimate {
  double value = 0.0;  // Hartree
  EnergyBackend backend = EnergyBackend::statevector;
  std::optional<int> shots_per_group;
  std::optional<double> variance_theoretical;  // Ha^2, Var[H]/shots_per_group
  std::optional<std::uint64_t> seed_stamp;
};

struct SamplingConfig {
  int shots_per_group = 1024;
  std::uint64_t rng_seed = 0;
};

// Dense amplitude vector over 2^n basis states; qubit q lives in bit q of
// the basis index.
class Statevector {
 public:
  explicit Statevector(int n_qubits);  // |0...0>

  int n_qubits() const { return n_; }
  std::size_t dim() const { return amp_.size(); }
  std::span<std::complex<double>> amplitudes() { return amp_; }
  std::span<const std::complex<double>> amplitudes() const { return amp_; }

  double norm() const;

 private:
  int n_;
  std::vector<std::complex<double>> amp_;
};

// Computational-basis state with the lowest n_electrons qubits occupied
// (interleaved spin-orbital convention).
Statevector hf_state(int n_qubits, int n_electrons);

// In-place exp(i * angle * coefficient * P). Norm-preserving.
void apply_pauli_exp(Statevector& state, const PauliTerm& term, double angle);

// In-place single-qubit measurement-basis change for a whole register.
void apply_basis_rotation(Statevector& state,
                          std::span<const BasisRotation> rotation);

// <psi| P |psi> for a single string.
double pauli_expectation(const Statevector& state, const PauliString& s);

// Termwise exact energy; never materializes the dense Hamiltonian.
EnergyEstimate expectation_exact(const Statevector& state,
                                 const QubitHamiltonian& ham);

// <H^2> - <H>^2, clamped into [max(0, -1e-10), inf). The two-argument form
// expands the square on the fly; pass a precomputed square on hot paths.
double hamiltonian_variance(const Statevector& state,
                            const QubitHamiltonian& ham);
double hamiltonian_variance(const Statevector& state,
                            const QubitHamiltonian& ham,
                            const QubitHamiltonian& ham_squared);

// Shot-sampled energy: each group is rotated to its measurement basis,
// sampled shots_per_group times by inverse-CDF over |amplitudes|^2, and all
// of the group's terms are read off the same samples. Groups draw from
// substreams keyed (rng_seed, group index). Unbiased for the exact energy.
EnergyEstimate expectation_sampled(const Statevector& state,
                                   const QubitHamiltonian& ham,
                                   const CommutingGroups& groups,
                                   const SamplingConfig& cfg);
EnergyEstimate expectation_sampled(const Statevector& state,
                                   const QubitHamiltonian& ham,
                                   const CommutingGroups& groups,
                                   const SamplingConfig& cfg,
                                   const QubitHamiltonian& ham_squared);

// Dense-diagonalization oracle. Capped at 14 qubits.
double exact_ground_energy(const QubitHamiltonian& ham);

// Full spectrum of the dense matrix (constant included), ascending.
std::vector<double> dense_eigenvalues(const QubitHamiltonian& ham);

// Dense matrix of the Hamiltonian, row-major, column index is the input
// basis state. Exposed for oracle-style checks.
std::vector<std::complex<double>> dense_matrix(const QubitHamiltonian& ham);

}  // namespace tvha
