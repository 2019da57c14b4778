#include "tvha/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>

#include "linalg.hpp"
#include "tvha/kernels.hpp"
#include "tvha/rng.hpp"

namespace tvha {

namespace {

using cplx = std::complex<double>;

constexpr int kDenseQubitCap = 14;

cplx i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Leading phase of the permutation action: P|b> = mu * (-1)^|b & z| |b ^ x>
// with mu = i^|x & z|.
cplx string_mu(const PauliString& s) {
  return i_power(std::popcount(s.x_mask() & s.z_mask()));
}

void check_dims(const Statevector& state, int n_qubits, const char* what) {
  if (state.n_qubits() != n_qubits) {
    throw DimensionError(std::string(what) + ": qubit count mismatch");
  }
}

}  // namespace

Statevector::Statevector(int n_qubits) : n_(n_qubits) {
  if (n_qubits <= 0 || n_qubits > 30) {
    throw DomainError("statevector supports 1..30 qubits");
  }
  amp_.assign(std::size_t{1} << n_qubits, cplx(0.0, 0.0));
  amp_[0] = 1.0;
}

double Statevector::norm() const {
  return std::sqrt(kernels::active().norm_sq(amp_.data(), amp_.size()));
}

Statevector hf_state(int n_qubits, int n_electrons) {
  if (n_electrons < 0 || n_electrons > n_qubits) {
    throw DomainError("electron count must lie in [0, n_qubits]");
  }
  Statevector state(n_qubits);
  const std::size_t occupied =
      n_electrons == 0 ? 0 : ((std::size_t{1} << n_electrons) - 1);
  state.amplitudes()[0] = 0.0;
  state.amplitudes()[occupied] = 1.0;
  return state;
}

void apply_pauli_exp(Statevector& state, const PauliTerm& term, double angle) {
  check_dims(state, term.string.n_qubits(), "apply_pauli_exp");
  const double phi = angle * term.coefficient;
  if (phi == 0.0 || term.string.is_identity()) {
    if (term.string.is_identity() && phi != 0.0) {
      const cplx phase(std::cos(phi), std::sin(phi));
      kernels::active().apply_phase(state.amplitudes().data(), state.dim(), 0,
                                    phase, phase);
    }
    return;
  }
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const std::uint64_t x = term.string.x_mask();
  const std::uint64_t z = term.string.z_mask();
  auto* amps = state.amplitudes().data();
  if (x == 0) {
    kernels::active().apply_phase(amps, state.dim(), z, cplx(c, s),
                                  cplx(c, -s));
    return;
  }
  const cplx mu = string_mu(term.string);
  const cplx i_sin(0.0, s);
  kernels::active().apply_pairs(amps, state.dim(), x, z, c,
                                i_sin * std::conj(mu), i_sin * mu);
}

void apply_basis_rotation(Statevector& state,
                          std::span<const BasisRotation> rotation) {
  if (static_cast<int>(rotation.size()) != state.n_qubits()) {
    throw DimensionError("rotation length must match qubit count");
  }
  const double inv_sqrt2 = 0.70710678118654752440;
  // X basis: H.  Y basis: H * S^dag, applied as one 2x2 gate.
  const cplx hadamard[4] = {inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2};
  const cplx h_sdg[4] = {cplx(inv_sqrt2, 0.0), cplx(0.0, -inv_sqrt2),
                         cplx(inv_sqrt2, 0.0), cplx(0.0, inv_sqrt2)};
  for (int q = 0; q < state.n_qubits(); ++q) {
    switch (rotation[static_cast<std::size_t>(q)]) {
      case BasisRotation::none:
        break;
      case BasisRotation::x_basis:
        kernels::active().apply_single_qubit(state.amplitudes().data(),
                                             state.dim(), q, hadamard);
        break;
      case BasisRotation::y_basis:
        kernels::active().apply_single_qubit(state.amplitudes().data(),
                                             state.dim(), q, h_sdg);
        break;
    }
  }
}

double pauli_expectation(const Statevector& state, const PauliString& s) {
  check_dims(state, s.n_qubits(), "pauli_expectation");
  const auto* amps = state.amplitudes().data();
  if (s.x_mask() == 0) {
    return kernels::active().expval_diag(amps, state.dim(), s.z_mask());
  }
  return kernels::active().expval_offdiag(amps, state.dim(), s.x_mask(),
                                          s.z_mask(), string_mu(s));
}

EnergyEstimate expectation_exact(const Statevector& state,
                                 const QubitHamiltonian& ham) {
  check_dims(state, ham.n_qubits, "expectation_exact");
  double value = ham.constant;
  for (const auto& term : ham.terms) {
    value += term.coefficient * pauli_expectation(state, term.string);
  }
  EnergyEstimate out;
  out.value = value;
  out.backend = EnergyBackend::statevector;
  return out;
}

double hamiltonian_variance(const Statevector& state,
                            const QubitHamiltonian& ham,
                            const QubitHamiltonian& ham_squared) {
  const double mean = expectation_exact(state, ham).value;
  const double second = expectation_exact(state, ham_squared).value;
  const double var = second - mean * mean;
  if (var < -1e-10) {
    throw Error("variance computation lost positivity");
  }
  return std::max(var, 0.0);
}

double hamiltonian_variance(const Statevector& state,
                            const QubitHamiltonian& ham) {
  return hamiltonian_variance(state, ham, squared(ham));
}

namespace {

EnergyEstimate sampled_impl(const Statevector& state,
                            const QubitHamiltonian& ham,
                            const CommutingGroups& groups,
                            const SamplingConfig& cfg, double variance) {
  check_dims(state, ham.n_qubits, "expectation_sampled");
  if (cfg.shots_per_group < 1) {
    throw DomainError("shots_per_group must be at least 1");
  }
  std::vector<bool> covered(ham.terms.size(), false);
  for (const auto& group : groups.groups) {
    for (const std::size_t idx : group) {
      if (idx >= ham.terms.size() || covered[idx]) {
        throw InvalidGroupError("groups must partition the Hamiltonian terms");
      }
      covered[idx] = true;
    }
  }
  if (!std::all_of(covered.begin(), covered.end(), [](bool b) { return b; })) {
    throw InvalidGroupError("groups must partition the Hamiltonian terms");
  }

  const std::size_t dim = state.dim();
  std::vector<double> cdf(dim);
  std::vector<std::uint32_t> counts(dim);

  double value = ham.constant;
  for (std::size_t g = 0; g < groups.groups.size(); ++g) {
    const auto& group = groups.groups[g];
    std::vector<PauliString> strings;
    strings.reserve(group.size());
    for (const std::size_t idx : group) strings.push_back(ham.terms[idx].string);
    const std::vector<BasisRotation> rotation = measurement_rotation(strings);

    Statevector rotated = state;
    apply_basis_rotation(rotated, rotation);
    kernels::active().probabilities(rotated.amplitudes().data(), dim,
                                    cdf.data());
    double cum = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
      cum += cdf[b];
      cdf[b] = cum;
    }
    const double total = cdf[dim - 1];

    Rng rng(derive_seed(cfg.rng_seed, g));
    std::fill(counts.begin(), counts.end(), 0);
    for (int shot = 0; shot < cfg.shots_per_group; ++shot) {
      const double u = rng.uniform() * total;
      const std::size_t b = static_cast<std::size_t>(
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      ++counts[std::min(b, dim - 1)];
    }

    for (std::size_t k = 0; k < group.size(); ++k) {
      const PauliString diag = rotated_to_diagonal(strings[k], rotation);
      const std::uint64_t z = diag.z_mask();
      long long sum = 0;
      for (std::size_t b = 0; b < dim; ++b) {
        if (counts[b] == 0) continue;
        const long long sign = (std::popcount(b & z) & 1) ? -1 : 1;
        sum += sign * static_cast<long long>(counts[b]);
      }
      const double mean =
          static_cast<double>(sum) / static_cast<double>(cfg.shots_per_group);
      value += ham.terms[group[k]].coefficient * mean;
    }
  }

  EnergyEstimate out;
  out.value = value;
  out.backend = EnergyBackend::sampling;
  out.shots_per_group = cfg.shots_per_group;
  out.variance_theoretical = variance / cfg.shots_per_group;
  out.seed_stamp = cfg.rng_seed;
  return out;
}

}  // namespace

EnergyEstimate expectation_sampled(const Statevector& state,
                                   const QubitHamiltonian& ham,
                                   const CommutingGroups& groups,
                                   const SamplingConfig& cfg) {
  return sampled_impl(state, ham, groups, cfg,
                      hamiltonian_variance(state, ham));
}

EnergyEstimate expectation_sampled(const Statevector& state,
                                   const QubitHamiltonian& ham,
                                   const CommutingGroups& groups,
                                   const SamplingConfig& cfg,
                                   const QubitHamiltonian& ham_squared) {
  return sampled_impl(state, ham, groups, cfg,
                      hamiltonian_variance(state, ham, ham_squared));
}

std::vector<cplx> dense_matrix(const QubitHamiltonian& ham) {
  if (ham.n_qubits > kDenseQubitCap) {
    throw CapacityError("dense construction available up to 14 qubits");
  }
  const std::size_t dim = std::size_t{1} << ham.n_qubits;
  std::vector<cplx> m(dim * dim, cplx(0.0, 0.0));
  for (std::size_t b = 0; b < dim; ++b) m[b * dim + b] += ham.constant;
  for (const auto& term : ham.terms) {
    const std::uint64_t x = term.string.x_mask();
    const std::uint64_t z = term.string.z_mask();
    const cplx mu = string_mu(term.string);
    for (std::size_t col = 0; col < dim; ++col) {
      const double sign = (std::popcount(col & z) & 1) ? -1.0 : 1.0;
      const std::size_t row = col ^ x;
      m[row * dim + col] += term.coefficient * mu * sign;
    }
  }
  return m;
}

std::vector<double> dense_eigenvalues(const QubitHamiltonian& ham) {
  const std::vector<cplx> m = dense_matrix(ham);
  const std::size_t dim = std::size_t{1} << ham.n_qubits;

  double max_imag = 0.0;
  for (const auto& entry : m) max_imag = std::max(max_imag, std::abs(entry.imag()));

  if (max_imag < 1e-12) {
    std::vector<double> real(dim * dim);
    for (std::size_t i = 0; i < dim * dim; ++i) real[i] = m[i].real();
    return linalg::jacobi_eigen_sym(std::move(real), dim);
  }

  // Hermitian A + iB embeds as the real symmetric [[A, -B], [B, A]]; every
  // eigenvalue of H appears exactly twice.
  const std::size_t n2 = 2 * dim;
  std::vector<double> embedded(n2 * n2, 0.0);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      const cplx entry = m[r * dim + c];
      embedded[r * n2 + c] = entry.real();
      embedded[(r + dim) * n2 + (c + dim)] = entry.real();
      embedded[r * n2 + (c + dim)] = -entry.imag();
      embedded[(r + dim) * n2 + c] = entry.imag();
    }
  }
  const std::vector<double> doubled =
      linalg::jacobi_eigen_sym(std::move(embedded), n2);
  std::vector<double> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = doubled[2 * i];
  return out;
}

double exact_ground_energy(const QubitHamiltonian& ham) {
  if (ham.terms.empty()) return ham.constant;
  return dense_eigenvalues(ham).front();
}

}  // namespace tvha
