// AVX2 lane. This translation unit is compiled with -mavx2 -mfma and only
// entered after a runtime cpuid check (see dispatch.cpp).

#include "tvha/kernels.hpp"

#if defined(__AVX2__) && defined(__x86_64__)

#include <immintrin.h>

#include <bit>

namespace tvha::kernels {

namespace {

inline double parity_sign(std::uint64_t bits) {
  return (std::popcount(bits) & 1) ? -1.0 : 1.0;
}

// [re0, im0, re1, im1] -> [im0, re0, im1, re1]
inline __m256d swap_re_im(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

// Swap the two complex numbers in a register.
inline __m256d swap_complex(__m256d v) {
  return _mm256_permute2f128_pd(v, v, 0x01);
}

// Lanewise complex multiply of v by (w_re, w_im) given as per-lane vectors.
inline __m256d cmul_lanes(__m256d v, __m256d w_re, __m256d w_im) {
  const __m256d t1 = _mm256_mul_pd(v, w_re);
  const __m256d t2 = _mm256_mul_pd(swap_re_im(v), w_im);
  return _mm256_addsub_pd(t1, t2);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_pd(s, _mm_unpackhi_pd(s, s)));
}

void apply_phase_avx2(cplx* amps, std::size_t dim, std::uint64_t z_mask,
                      cplx phase_even, cplx phase_odd) {
  double* d = reinterpret_cast<double*>(amps);
  const double pe_re = phase_even.real(), pe_im = phase_even.imag();
  const double po_re = phase_odd.real(), po_im = phase_odd.imag();
  std::size_t b = 0;
  for (; b + 2 <= dim; b += 2) {
    const bool odd0 = std::popcount(b & z_mask) & 1;
    const bool odd1 = std::popcount((b + 1) & z_mask) & 1;
    const __m256d w_re = _mm256_set_pd(odd1 ? po_re : pe_re,
                                       odd1 ? po_re : pe_re,
                                       odd0 ? po_re : pe_re,
                                       odd0 ? po_re : pe_re);
    const __m256d w_im = _mm256_set_pd(odd1 ? po_im : pe_im,
                                       odd1 ? po_im : pe_im,
                                       odd0 ? po_im : pe_im,
                                       odd0 ? po_im : pe_im);
    const __m256d v = _mm256_loadu_pd(d + 2 * b);
    _mm256_storeu_pd(d + 2 * b, cmul_lanes(v, w_re, w_im));
  }
  for (; b < dim; ++b) {
    amps[b] *= (std::popcount(b & z_mask) & 1) ? phase_odd : phase_even;
  }
}

void apply_pairs_avx2(cplx* amps, std::size_t dim, std::uint64_t x_mask,
                      std::uint64_t z_mask, double cos_phi, cplx w_fwd,
                      cplx w_bwd) {
  double* d = reinterpret_cast<double*>(amps);
  const __m256d cosv = _mm256_set1_pd(cos_phi);
  const int pivot = 63 - std::countl_zero(x_mask);
  const std::uint64_t pivot_bit = std::uint64_t{1} << pivot;

  if (x_mask == 1) {
    // Pairs live inside a single register: [a_b, a_{b+1}] with p = b + 1.
    const __m256d w_re = _mm256_set_pd(w_bwd.real(), w_bwd.real(),
                                       w_fwd.real(), w_fwd.real());
    const __m256d w_im = _mm256_set_pd(w_bwd.imag(), w_bwd.imag(),
                                       w_fwd.imag(), w_fwd.imag());
    for (std::size_t b = 0; b < dim; b += 2) {
      const double s = parity_sign(b & z_mask);
      const __m256d sv = _mm256_set1_pd(s);
      const __m256d v = _mm256_loadu_pd(d + 2 * b);
      const __m256d partner = swap_complex(v);  // [a_p, a_b]
      const __m256d rot = cmul_lanes(partner, w_re, w_im);
      const __m256d out = _mm256_fmadd_pd(cosv, v, _mm256_mul_pd(sv, rot));
      _mm256_storeu_pd(d + 2 * b, out);
    }
    return;
  }

  // pivot >= 1: runs of at least two b's with contiguous partners.
  const bool partner_swapped = (x_mask & 1) != 0;
  const __m256d wf_re = _mm256_set1_pd(w_fwd.real());
  const __m256d wf_im = _mm256_set1_pd(w_fwd.imag());
  const __m256d wb_re = _mm256_set1_pd(w_bwd.real());
  const __m256d wb_im = _mm256_set1_pd(w_bwd.imag());
  const std::uint64_t block = pivot_bit << 1;
  for (std::size_t base = 0; base < dim; base += block) {
    for (std::size_t b = base; b < base + pivot_bit; b += 2) {
      const std::size_t p0 = b ^ x_mask;
      const std::size_t p_lo = partner_swapped ? (p0 - 1) : p0;
      const double s0 = parity_sign(b & z_mask);
      const double s1 = parity_sign((b + 1) & z_mask);
      const __m256d sv = _mm256_set_pd(s1, s1, s0, s0);

      const __m256d va = _mm256_loadu_pd(d + 2 * b);
      __m256d vp = _mm256_loadu_pd(d + 2 * p_lo);
      if (partner_swapped) vp = swap_complex(vp);  // order as [a_p(b), a_p(b+1)]

      const __m256d rot_a = cmul_lanes(vp, wf_re, wf_im);
      const __m256d rot_p = cmul_lanes(va, wb_re, wb_im);
      const __m256d out_a =
          _mm256_fmadd_pd(cosv, va, _mm256_mul_pd(sv, rot_a));
      __m256d out_p = _mm256_fmadd_pd(cosv, vp, _mm256_mul_pd(sv, rot_p));
      if (partner_swapped) out_p = swap_complex(out_p);

      _mm256_storeu_pd(d + 2 * b, out_a);
      _mm256_storeu_pd(d + 2 * p_lo, out_p);
    }
  }
}

void apply_single_qubit_avx2(cplx* amps, std::size_t dim, int qubit,
                             const cplx m[4]) {
  double* d = reinterpret_cast<double*>(amps);
  const __m256d m00_re = _mm256_set1_pd(m[0].real());
  const __m256d m00_im = _mm256_set1_pd(m[0].imag());
  const __m256d m01_re = _mm256_set1_pd(m[1].real());
  const __m256d m01_im = _mm256_set1_pd(m[1].imag());
  const __m256d m10_re = _mm256_set1_pd(m[2].real());
  const __m256d m10_im = _mm256_set1_pd(m[2].imag());
  const __m256d m11_re = _mm256_set1_pd(m[3].real());
  const __m256d m11_im = _mm256_set1_pd(m[3].imag());

  if (qubit == 0) {
    // [a0, a1] both in one register: out0 = m00 a0 + m01 a1,
    // out1 = m11 a1 + m10 a0. The direct factor multiplies v = [a0, a1],
    // the cross factor multiplies the swapped register [a1, a0].
    const __m256d direct_re = _mm256_set_pd(m[3].real(), m[3].real(),
                                            m[0].real(), m[0].real());
    const __m256d direct_im = _mm256_set_pd(m[3].imag(), m[3].imag(),
                                            m[0].imag(), m[0].imag());
    const __m256d cross_re = _mm256_set_pd(m[2].real(), m[2].real(),
                                           m[1].real(), m[1].real());
    const __m256d cross_im = _mm256_set_pd(m[2].imag(), m[2].imag(),
                                           m[1].imag(), m[1].imag());
    for (std::size_t b = 0; b < dim; b += 2) {
      const __m256d v = _mm256_loadu_pd(d + 2 * b);       // [a0, a1]
      const __m256d sw = swap_complex(v);                 // [a1, a0]
      const __m256d out =
          _mm256_add_pd(cmul_lanes(v, direct_re, direct_im),
                        cmul_lanes(sw, cross_re, cross_im));
      _mm256_storeu_pd(d + 2 * b, out);
    }
    return;
  }

  const std::size_t stride = std::size_t{1} << qubit;
  const std::size_t block = stride << 1;
  for (std::size_t base = 0; base < dim; base += block) {
    for (std::size_t i = base; i < base + stride; i += 2) {
      const __m256d a0 = _mm256_loadu_pd(d + 2 * i);
      const __m256d a1 = _mm256_loadu_pd(d + 2 * (i + stride));
      const __m256d out0 = _mm256_add_pd(cmul_lanes(a0, m00_re, m00_im),
                                         cmul_lanes(a1, m01_re, m01_im));
      const __m256d out1 = _mm256_add_pd(cmul_lanes(a0, m10_re, m10_im),
                                         cmul_lanes(a1, m11_re, m11_im));
      _mm256_storeu_pd(d + 2 * i, out0);
      _mm256_storeu_pd(d + 2 * (i + stride), out1);
    }
  }
}

double norm_sq_avx2(const cplx* amps, std::size_t dim) {
  const double* d = reinterpret_cast<const double*>(amps);
  __m256d acc = _mm256_setzero_pd();
  std::size_t b = 0;
  for (; b + 2 <= dim; b += 2) {
    const __m256d v = _mm256_loadu_pd(d + 2 * b);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double tail = 0.0;
  for (; b < dim; ++b) {
    tail += amps[b].real() * amps[b].real() + amps[b].imag() * amps[b].imag();
  }
  return hsum(acc) + tail;
}

double expval_diag_avx2(const cplx* amps, std::size_t dim,
                        std::uint64_t z_mask) {
  const double* d = reinterpret_cast<const double*>(amps);
  __m256d acc = _mm256_setzero_pd();
  std::size_t b = 0;
  for (; b + 2 <= dim; b += 2) {
    const double s0 = parity_sign(b & z_mask);
    const double s1 = parity_sign((b + 1) & z_mask);
    const __m256d sv = _mm256_set_pd(s1, s1, s0, s0);
    const __m256d v = _mm256_loadu_pd(d + 2 * b);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(v, v), sv, acc);
  }
  double tail = 0.0;
  for (; b < dim; ++b) {
    const double p =
        amps[b].real() * amps[b].real() + amps[b].imag() * amps[b].imag();
    tail += (std::popcount(b & z_mask) & 1) ? -p : p;
  }
  return hsum(acc) + tail;
}

double expval_offdiag_avx2(const cplx* amps, std::size_t dim,
                           std::uint64_t x_mask, std::uint64_t z_mask,
                           cplx mu) {
  const double* d = reinterpret_cast<const double*>(amps);
  const int pivot = 63 - std::countl_zero(x_mask);
  const std::uint64_t pivot_bit = std::uint64_t{1} << pivot;
  const __m256d mu_re = _mm256_set1_pd(mu.real());
  const __m256d mu_im = _mm256_set1_pd(mu.imag());

  if (x_mask == 1) {
    // One pair per register; contribution 2*s*Re(mu * a_b * conj(a_{b+1})).
    double acc = 0.0;
    for (std::size_t b = 0; b < dim; b += 2) {
      const double s = parity_sign(b & z_mask);
      const cplx z = mu * amps[b] * std::conj(amps[b + 1]);
      acc += 2.0 * s * z.real();
    }
    return acc;
  }

  const bool partner_swapped = (x_mask & 1) != 0;
  const std::uint64_t block = pivot_bit << 1;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t base = 0; base < dim; base += block) {
    for (std::size_t b = base; b < base + pivot_bit; b += 2) {
      const std::size_t p0 = b ^ x_mask;
      const std::size_t p_lo = partner_swapped ? (p0 - 1) : p0;
      const double s0 = parity_sign(b & z_mask);
      const double s1 = parity_sign((b + 1) & z_mask);
      const __m256d sv = _mm256_set_pd(s1, s1, s0, s0);

      const __m256d va = _mm256_loadu_pd(d + 2 * b);
      __m256d vp = _mm256_loadu_pd(d + 2 * p_lo);
      if (partner_swapped) vp = swap_complex(vp);

      // z_k = a_b * conj(a_p): Re = ar*pr + ai*pi, Im = ai*pr - ar*pi.
      const __m256d t1 = _mm256_mul_pd(va, vp);
      const __m256d t2 = _mm256_mul_pd(swap_re_im(va), vp);
      const __m256d re_z = _mm256_hadd_pd(t1, t1);  // [Re0,Re0,Re1,Re1]
      const __m256d im_z = _mm256_hsub_pd(t2, t2);  // [Im0,Im0,Im1,Im1]
      const __m256d val = _mm256_fmsub_pd(mu_re, re_z,
                                          _mm256_mul_pd(mu_im, im_z));
      acc = _mm256_fmadd_pd(sv, val, acc);
    }
  }
  // Each pair's value occupies two lanes, so the plain horizontal sum
  // already carries the factor of two from Hermitian pairing.
  return hsum(acc);
}

void probabilities_avx2(const cplx* amps, std::size_t dim, double* probs) {
  const double* d = reinterpret_cast<const double*>(amps);
  std::size_t b = 0;
  for (; b + 2 <= dim; b += 2) {
    const __m256d v = _mm256_loadu_pd(d + 2 * b);
    const __m256d sq = _mm256_mul_pd(v, v);
    const __m256d h = _mm256_hadd_pd(sq, sq);
    probs[b] = _mm256_cvtsd_f64(h);
    probs[b + 1] = _mm_cvtsd_f64(_mm256_extractf128_pd(h, 1));
  }
  for (; b < dim; ++b) {
    probs[b] =
        amps[b].real() * amps[b].real() + amps[b].imag() * amps[b].imag();
  }
}

}  // namespace

const Ops* avx2_ops_impl() {
  static const Ops ops = {
      "avx2",
      apply_phase_avx2,
      apply_pairs_avx2,
      apply_single_qubit_avx2,
      norm_sq_avx2,
      expval_diag_avx2,
      expval_offdiag_avx2,
      probabilities_avx2,
  };
  return &ops;
}

}  // namespace tvha::kernels

#endif  // __AVX2__ && __x86_64__
