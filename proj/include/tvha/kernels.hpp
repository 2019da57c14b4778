#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace tvha::kernels {

using cplx = std::complex<double>;

// Data-parallel statevector primitives. Every entry has a scalar reference
// implementation and, on x86-64 with AVX2, a vectorized variant selected at
// runtime. The two lanes are equivalence-tested against each other.
//
// Conventions: amplitudes are indexed by basis state b with qubit q stored
// in bit q. A Pauli string (x, z) acts as P|b> = mu * sign(b) |b ^ x> with
// mu = i^popcount(x & z) and sign(b) = (-1)^popcount(b & z).
struct Ops {
  const char* name;

  // amps[b] *= (popcount(b & z_mask) even ? phase_even : phase_odd)
  void (*apply_phase)(cplx* amps, std::size_t dim, std::uint64_t z_mask,
                      cplx phase_even, cplx phase_odd);

  // In-place exp(i phi P) for off-diagonal P (x_mask != 0):
  //   new[b] = cos_phi*a[b] + s(b)*w_fwd*a[b^x]
  //   new[b^x] = cos_phi*a[b^x] + s(b)*w_bwd*a[b]
  // over pairs with the pivot bit of x_mask clear in b, where
  // w_fwd = i*sin(phi)*conj(mu), w_bwd = i*sin(phi)*mu.
  void (*apply_pairs)(cplx* amps, std::size_t dim, std::uint64_t x_mask,
                      std::uint64_t z_mask, double cos_phi, cplx w_fwd,
                      cplx w_bwd);

  // Generic single-qubit gate, row-major m = {m00, m01, m10, m11}.
  void (*apply_single_qubit)(cplx* amps, std::size_t dim, int qubit,
                             const cplx m[4]);

  double (*norm_sq)(const cplx* amps, std::size_t dim);

  // <psi| P |psi> for diagonal P (x_mask == 0): sum s(b) |a[b]|^2.
  double (*expval_diag)(const cplx* amps, std::size_t dim,
                        std::uint64_t z_mask);

  // <psi| P |psi> for off-diagonal P: 2 Re sum_pairs mu*s(b)*a[b]*conj(a[b^x]).
  double (*expval_offdiag)(const cplx* amps, std::size_t dim,
                           std::uint64_t x_mask, std::uint64_t z_mask,
                           cplx mu);

  // probs[b] = |a[b]|^2
  void (*probabilities)(const cplx* amps, std::size_t dim, double* probs);
};

const Ops& scalar_ops();

// Null when the binary was built without AVX2 support or the CPU lacks it.
const Ops* avx2_ops();

// Lane in use; resolved once at startup (best available, overridable with
// the TVHA_KERNELS environment variable: "scalar" or "avx2").
const Ops& active();

// Force a lane by name. Throws tvha::DomainError for unknown/unavailable
// lanes. Intended for tests and benchmarking.
void select(std::string_view name);

}  // namespace tvha::kernels
