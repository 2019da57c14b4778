#include <bit>

#include "tvha/kernels.hpp"

namespace tvha::kernels {

namespace {

inline double parity_sign(std::uint64_t bits) {
  return (std::popcount(bits) & 1) ? -1.0 : 1.0;
}

void apply_phase_scalar(cplx* amps, std::size_t dim, std::uint64_t z_mask,
                        cplx phase_even, cplx phase_odd) {
  for (std::size_t b = 0; b < dim; ++b) {
    amps[b] *= (std::popcount(b & z_mask) & 1) ? phase_odd : phase_even;
  }
}

void apply_pairs_scalar(cplx* amps, std::size_t dim, std::uint64_t x_mask,
                        std::uint64_t z_mask, double cos_phi, cplx w_fwd,
                        cplx w_bwd) {
  const int pivot = 63 - std::countl_zero(x_mask);
  const std::uint64_t pivot_bit = std::uint64_t{1} << pivot;
  const std::uint64_t block = pivot_bit << 1;
  for (std::size_t base = 0; base < dim; base += block) {
    for (std::size_t b = base; b < base + pivot_bit; ++b) {
      const std::size_t p = b ^ x_mask;
      const double s = parity_sign(b & z_mask);
      const cplx ab = amps[b];
      const cplx ap = amps[p];
      amps[b] = cos_phi * ab + s * w_fwd * ap;
      amps[p] = cos_phi * ap + s * w_bwd * ab;
    }
  }
}

void apply_single_qubit_scalar(cplx* amps, std::size_t dim, int qubit,
                               const cplx m[4]) {
  const std::size_t stride = std::size_t{1} << qubit;
  const std::size_t block = stride << 1;
  for (std::size_t base = 0; base < dim; base += block) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const cplx a0 = amps[i];
      const cplx a1 = amps[i + stride];
      amps[i] = m[0] * a0 + m[1] * a1;
      amps[i + stride] = m[2] * a0 + m[3] * a1;
    }
  }
}

double norm_sq_scalar(const cplx* amps, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t b = 0; b < dim; ++b) {
    acc += amps[b].real() * amps[b].real() + amps[b].imag() * amps[b].imag();
  }
  return acc;
}

double expval_diag_scalar(const cplx* amps, std::size_t dim,
                          std::uint64_t z_mask) {
  double acc = 0.0;
  for (std::size_t b = 0; b < dim; ++b) {
    const double p =
        amps[b].real() * amps[b].real() + amps[b].imag() * amps[b].imag();
    acc += (std::popcount(b & z_mask) & 1) ? -p : p;
  }
  return acc;
}

double expval_offdiag_scalar(const cplx* amps, std::size_t dim,
                             std::uint64_t x_mask, std::uint64_t z_mask,
                             cplx mu) {
  const int pivot = 63 - std::countl_zero(x_mask);
  const std::uint64_t pivot_bit = std::uint64_t{1} << pivot;
  const std::uint64_t block = pivot_bit << 1;
  double acc = 0.0;
  for (std::size_t base = 0; base < dim; base += block) {
    for (std::size_t b = base; b < base + pivot_bit; ++b) {
      const std::size_t p = b ^ x_mask;
      const double s = parity_sign(b & z_mask);
      const cplx contrib = mu * amps[b] * std::conj(amps[p]);
      acc += 2.0 * s * contrib.real();
    }
  }
  return acc;
}

void probabilities_scalar(const cplx* amps, std::size_t dim, double* probs) {
  for (std::size_t b = 0; b < dim; ++b) {
    probs[b] =
        amps[b].real() * amps[b].real() + amps[b].imag() * amps[b].imag();
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      "scalar",
      apply_phase_scalar,
      apply_pairs_scalar,
      apply_single_qubit_scalar,
      norm_sq_scalar,
      expval_diag_scalar,
      expval_offdiag_scalar,
      probabilities_scalar,
  };
  return ops;
}

}  // namespace tvha::kernels
