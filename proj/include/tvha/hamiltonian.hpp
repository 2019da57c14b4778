#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "tvha/pauli.hpp"

namespace tvha {

// One second-quantized operator with its coefficient (Hartree). The index
// pattern is a_i^dag a_j for one-body and a_i^dag a_j^dag a_k a_l for
// two-body terms. Prefactors are already folded into `coefficient`.
struct FermionicTerm {
  double coefficient = 0.0;
  std::array<int, 4> indices{-1, -1, -1, -1};  // one-body uses slots 0..1
  bool two_body = false;
};

// Raw molecular problem in a spin-orbital basis. Spatial orbital q maps to
// spin orbitals 2q (up) and 2q+1 (down).
struct FermionicIntegrals {
  int n_spin_orbitals = 0;
  int n_electrons = 0;
  double core_energy = 0.0;
  // h_ij, keyed (i, j)
  std::map<std::array<int, 2>, double> one_body;
  // coefficient of a_i^dag a_j^dag a_k a_l (one half of the doubled sum is
  // implied; fragment() folds the global 1/2)
  std::map<std::array<int, 4>, double> two_body;
};

enum class IntegralFormat { fcidump };

// Reads an FCIDUMP-convention file: `&FCI NORB=..,NELEC=..` header, then
// `value i j k l` records with 1-based spatial indices, chemists' ordering
// and 8-fold symmetry; zero indices flag lower-rank terms.
FermionicIntegrals parse_integrals(std::istream& in,
                                   IntegralFormat format = IntegralFormat::fcidump);
FermionicIntegrals parse_integrals_file(const std::string& path);

// Molecular Hamiltonian split into one-body (alpha), Coulomb two-body
// (beta) and non-Coulomb two-body (gamma) parts.
struct FragmentedHamiltonian {
  int n_spin_orbitals = 0;
  int n_electrons = 0;
  double core_energy = 0.0;
  std::vector<FermionicTerm> alpha;
  std::vector<FermionicTerm> beta;   // pattern a_i^dag a_j^dag a_j a_i, i != j
  std::vector<FermionicTerm> gamma;  // everything else
};

FragmentedHamiltonian fragment(const FermionicIntegrals& ints);

struct TruncationReport {
  double p_requested = 0.0;
  double p_achieved = 0.0;
  std::size_t s_cut = 0;
  std::vector<FermionicTerm> kept;
  std::vector<FermionicTerm> dropped;
};

// Sorts gamma by descending |coefficient| (ties by index tuple) and keeps
// the shortest prefix whose cumulative weight fraction reaches p. Alpha and
// beta pass through untouched.
std::pair<FragmentedHamiltonian, TruncationReport> truncate_gamma(
    const FragmentedHamiltonian& frag, double p);

// Sum of weighted Pauli strings. Terms are merged within each source
// fragment; the same string may appear once per fragment. The identity
// component lives in `constant` together with the core energy.
struct QubitHamiltonian {
  int n_qubits = 0;
  int n_electrons = 0;
  double constant = 0.0;
  std::vector<PauliTerm> terms;
  std::vector<Fragment> fragment_of;  // parallel to terms

  std::size_t size() const { return terms.size(); }
  std::vector<PauliTerm> fragment_terms(Fragment f) const;
};

// Jordan-Wigner mapping: a_i -> Z-chain * (X_i + iY_i)/2. Coefficients
// below 1e-12 Ha are dropped; residual imaginary parts above that floor
// raise a ValidationError.
QubitHamiltonian jordan_wigner(const FragmentedHamiltonian& frag);

// Termwise product expansion of H*H with like strings merged. Used for
// variance computations; fragments are tagged mixed.
QubitHamiltonian squared(const QubitHamiltonian& ham);

// Total-occupation operator of the same width, sum_q (I - Z_q)/2.
QubitHamiltonian number_operator(int n_qubits);

}  // namespace tvha
