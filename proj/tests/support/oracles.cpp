#include "support/oracles.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "linalg.hpp"

namespace oracles {

namespace {

// Row-major 2x2 matrices for I, X, Y, Z.
const cplx kSingle[4][4] = {
    {{1, 0}, {0, 0}, {0, 0}, {1, 0}},    // I
    {{0, 0}, {1, 0}, {1, 0}, {0, 0}},    // X
    {{0, 0}, {0, -1}, {0, 1}, {0, 0}},   // Y
    {{1, 0}, {0, 0}, {0, 0}, {-1, 0}},   // Z
};

}  // namespace

std::size_t matrix_dim(const Matrix& m) {
  std::size_t dim = 1;
  while (dim * dim < m.size()) dim <<= 1;
  if (dim * dim != m.size()) throw std::logic_error("non-square matrix");
  return dim;
}

Matrix pauli_matrix(const tvha::PauliString& s) {
  const int n = s.n_qubits();
  const std::size_t dim = std::size_t{1} << n;
  Matrix m(dim * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      cplx entry(1.0, 0.0);
      for (int q = 0; q < n && entry != cplx(0.0, 0.0); ++q) {
        const int rq = static_cast<int>((r >> q) & 1);
        const int cq = static_cast<int>((c >> q) & 1);
        entry *= kSingle[static_cast<int>(s.axis(q))][rq * 2 + cq];
      }
      m[r * dim + c] = entry;
    }
  }
  return m;
}

Matrix hamiltonian_matrix(const tvha::QubitHamiltonian& ham) {
  const std::size_t dim = std::size_t{1} << ham.n_qubits;
  Matrix m(dim * dim, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] = ham.constant;
  for (const auto& term : ham.terms) {
    const Matrix p = pauli_matrix(term.string);
    for (std::size_t i = 0; i < dim * dim; ++i) {
      m[i] += term.coefficient * p[i];
    }
  }
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  const std::size_t dim = matrix_dim(a);
  Matrix out(dim * dim, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      const cplx aik = a[i * dim + k];
      if (aik == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        out[i * dim + j] += aik * b[k * dim + j];
      }
    }
  }
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  Matrix out(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Matrix scale(const Matrix& a, cplx factor) {
  Matrix out(a);
  for (auto& v : out) v *= factor;
  return out;
}

Matrix dagger(const Matrix& a) {
  const std::size_t dim = matrix_dim(a);
  Matrix out(dim * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      out[c * dim + r] = std::conj(a[r * dim + c]);
    }
  }
  return out;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

Matrix commutator(const Matrix& a, const Matrix& b) {
  const Matrix ab = matmul(a, b);
  const Matrix ba = matmul(b, a);
  Matrix out(ab);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= ba[i];
  return out;
}

Matrix matrix_exp(const Matrix& a) {
  const std::size_t dim = matrix_dim(a);
  Matrix sum(dim * dim, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < dim; ++i) sum[i * dim + i] = 1.0;
  Matrix term = sum;
  for (int k = 1; k < 80; ++k) {
    term = scale(matmul(term, a), cplx(1.0 / k, 0.0));
    sum = add(sum, term);
    if (max_abs(term) < 1e-18) break;
  }
  return sum;
}

std::vector<cplx> apply(const Matrix& m, const std::vector<cplx>& v) {
  const std::size_t dim = matrix_dim(m);
  std::vector<cplx> out(dim, cplx(0.0, 0.0));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      out[r] += m[r * dim + c] * v[c];
    }
  }
  return out;
}

cplx bra_op_ket(const std::vector<cplx>& v, const Matrix& m) {
  const std::vector<cplx> mv = apply(m, v);
  cplx acc(0.0, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) acc += std::conj(v[i]) * mv[i];
  return acc;
}

namespace {

// Destroys orbital `site` in basis state `b`; returns false when the result
// vanishes. Accumulates the fermionic parity sign.
bool annihilate(std::uint64_t& b, int site, double& sign) {
  const std::uint64_t bit = std::uint64_t{1} << site;
  if (!(b & bit)) return false;
  if (std::popcount(b & (bit - 1)) & 1) sign = -sign;
  b &= ~bit;
  return true;
}

bool create(std::uint64_t& b, int site, double& sign) {
  const std::uint64_t bit = std::uint64_t{1} << site;
  if (b & bit) return false;
  if (std::popcount(b & (bit - 1)) & 1) sign = -sign;
  b |= bit;
  return true;
}

void add_term(Matrix& m, std::size_t dim, const tvha::FermionicTerm& t,
              double coefficient) {
  for (std::uint64_t col = 0; col < dim; ++col) {
    std::uint64_t b = col;
    double sign = 1.0;
    bool alive = true;
    if (t.two_body) {
      alive = annihilate(b, t.indices[3], sign) &&
              annihilate(b, t.indices[2], sign) &&
              create(b, t.indices[1], sign) && create(b, t.indices[0], sign);
    } else {
      alive = annihilate(b, t.indices[1], sign) &&
              create(b, t.indices[0], sign);
    }
    if (alive) m[b * dim + col] += coefficient * sign;
  }
}

}  // namespace

Matrix fock_matrix(const tvha::FermionicIntegrals& ints) {
  const std::size_t dim = std::size_t{1} << ints.n_spin_orbitals;
  Matrix m(dim * dim, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] = ints.core_energy;
  for (const auto& [key, value] : ints.one_body) {
    tvha::FermionicTerm t;
    t.indices = {key[0], key[1], -1, -1};
    t.two_body = false;
    add_term(m, dim, t, value);
  }
  for (const auto& [key, value] : ints.two_body) {
    tvha::FermionicTerm t;
    t.indices = key;
    t.two_body = true;
    add_term(m, dim, t, 0.5 * value);
  }
  return m;
}

Matrix fock_matrix(const tvha::FragmentedHamiltonian& frag) {
  const std::size_t dim = std::size_t{1} << frag.n_spin_orbitals;
  Matrix m(dim * dim, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] = frag.core_energy;
  for (const auto* terms : {&frag.alpha, &frag.beta, &frag.gamma}) {
    for (const auto& t : *terms) add_term(m, dim, t, t.coefficient);
  }
  return m;
}

std::vector<double> eigenvalues(const Matrix& m) {
  const std::size_t dim = matrix_dim(m);
  double max_imag = 0.0;
  for (const auto& v : m) max_imag = std::max(max_imag, std::abs(v.imag()));
  if (max_imag < 1e-12) {
    std::vector<double> real(dim * dim);
    for (std::size_t i = 0; i < dim * dim; ++i) real[i] = m[i].real();
    return tvha::linalg::jacobi_eigen_sym(std::move(real), dim);
  }
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
      tvha::linalg::jacobi_eigen_sym(std::move(embedded), n2);
  std::vector<double> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = doubled[2 * i];
  return out;
}

}  // namespace oracles
