#include <complex>
#include <vector>

#include "doctest.h"
#include "tvha/kernels.hpp"
#include "tvha/rng.hpp"

using tvha::Rng;
using tvha::kernels::cplx;

namespace {

std::vector<cplx> random_state(Rng& rng, std::size_t dim) {
  std::vector<cplx> amps(dim);
  for (auto& a : amps) a = {rng.gaussian(), rng.gaussian()};
  return amps;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace

TEST_CASE("scalar and avx2 lanes agree on every kernel") {
  const tvha::kernels::Ops* vec = tvha::kernels::avx2_ops();
  if (!vec) {
    MESSAGE("avx2 lane unavailable; equivalence suite skipped");
    return;
  }
  const tvha::kernels::Ops& ref = tvha::kernels::scalar_ops();

  Rng rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_index(9));
    const std::size_t dim = std::size_t{1} << n;
    const std::uint64_t mask_all = dim - 1;
    const std::uint64_t z = rng.next_u64() & mask_all;
    std::uint64_t x = rng.next_u64() & mask_all;
    if (x == 0) x = 1 + (rng.next_u64() % mask_all);

    const std::vector<cplx> base = random_state(rng, dim);

    {
      auto a = base;
      auto b = base;
      const cplx pe(rng.gaussian(), rng.gaussian());
      const cplx po(rng.gaussian(), rng.gaussian());
      ref.apply_phase(a.data(), dim, z, pe, po);
      vec->apply_phase(b.data(), dim, z, pe, po);
      CHECK(max_diff(a, b) < 1e-12);
    }
    {
      auto a = base;
      auto b = base;
      const double c = rng.uniform(-1.0, 1.0);
      const cplx wf(rng.gaussian(), rng.gaussian());
      const cplx wb(rng.gaussian(), rng.gaussian());
      ref.apply_pairs(a.data(), dim, x, z, c, wf, wb);
      vec->apply_pairs(b.data(), dim, x, z, c, wf, wb);
      CHECK(max_diff(a, b) < 1e-12);
    }
    {
      auto a = base;
      auto b = base;
      const cplx m[4] = {{rng.gaussian(), rng.gaussian()},
                         {rng.gaussian(), rng.gaussian()},
                         {rng.gaussian(), rng.gaussian()},
                         {rng.gaussian(), rng.gaussian()}};
      const int qubit = static_cast<int>(rng.uniform_index(n));
      ref.apply_single_qubit(a.data(), dim, qubit, m);
      vec->apply_single_qubit(b.data(), dim, qubit, m);
      CHECK(max_diff(a, b) < 1e-12);
    }
    {
      const double na = ref.norm_sq(base.data(), dim);
      const double nb = vec->norm_sq(base.data(), dim);
      CHECK(na == doctest::Approx(nb).epsilon(1e-12));
    }
    {
      const double ea = ref.expval_diag(base.data(), dim, z);
      const double eb = vec->expval_diag(base.data(), dim, z);
      CHECK(ea == doctest::Approx(eb).epsilon(1e-10));
    }
    {
      const cplx mu(rng.gaussian(), rng.gaussian());
      const double ea = ref.expval_offdiag(base.data(), dim, x, z, mu);
      const double eb = vec->expval_offdiag(base.data(), dim, x, z, mu);
      CHECK(ea == doctest::Approx(eb).epsilon(1e-10));
    }
    {
      std::vector<double> pa(dim), pb(dim);
      ref.probabilities(base.data(), dim, pa.data());
      vec->probabilities(base.data(), dim, pb.data());
      for (std::size_t i = 0; i < dim; ++i) {
        CHECK(pa[i] == doctest::Approx(pb[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("kernel lane selection") {
  tvha::kernels::select("scalar");
  CHECK(std::string(tvha::kernels::active().name) == "scalar");
  if (tvha::kernels::avx2_ops()) {
    tvha::kernels::select("avx2");
    CHECK(std::string(tvha::kernels::active().name) == "avx2");
  }
  CHECK_THROWS(tvha::kernels::select("never-a-lane"));
  // Restore the default for other suites in this binary.
  if (tvha::kernels::avx2_ops()) {
    tvha::kernels::select("avx2");
  } else {
    tvha::kernels::select("scalar");
  }
}
