#include "tvha/hamiltonian.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <sstream>

namespace tvha {

namespace {

constexpr double kCoefficientFloor = 1e-12;  // Ha

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(c));
  return s;
}

// Extracts `KEY=<int>` from a header blob.
long header_int(const std::string& blob, const std::string& key,
                std::size_t line_no) {
  const auto pos = blob.find(key + "=");
  if (pos == std::string::npos) {
    throw ParseError("FCIDUMP header missing " + key, line_no);
  }
  const char* begin = blob.c_str() + pos + key.size() + 1;
  char* end = nullptr;
  const long value = std::strtol(begin, &end, 10);
  if (end == begin) {
    throw ParseError("FCIDUMP header has malformed " + key, line_no);
  }
  return value;
}

struct SpatialIntegrals {
  int n_orb = 0;
  int n_elec = 0;
  double core = 0.0;
  std::map<std::array<int, 2>, double> h;    // canonical i >= j, 0-based
  std::map<std::array<int, 4>, double> eri;  // canonical chemists' key
};

std::array<int, 4> canonical_eri_key(int i, int j, int k, int l) {
  if (i < j) std::swap(i, j);
  if (k < l) std::swap(k, l);
  if (i < k || (i == k && j < l)) {
    std::swap(i, k);
    std::swap(j, l);
  }
  return {i, j, k, l};
}

void store_checked(std::map<std::array<int, 4>, double>& m,
                   std::array<int, 4> key, double value, std::size_t line_no) {
  const auto [it, inserted] = m.emplace(key, value);
  if (!inserted && std::abs(it->second - value) > 1e-10) {
    throw ParseError("conflicting duplicate integral record", line_no);
  }
}

SpatialIntegrals parse_fcidump(std::istream& in) {
  SpatialIntegrals out;
  std::string line;
  std::size_t line_no = 0;

  // Header: everything from &FCI to &END (or a bare '/'), possibly spanning
  // several lines.
  std::string header;
  bool header_done = false;
  std::size_t header_line = 0;
  while (!header_done && std::getline(in, line)) {
    ++line_no;
    const std::string up = upper(line);
    if (header.empty()) {
      if (up.find("&FCI") == std::string::npos) {
        if (up.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError("FCIDUMP must start with an &FCI header", line_no);
      }
      header_line = line_no;
    }
    header += up + " ";
    if (up.find("&END") != std::string::npos ||
        up.find('/') != std::string::npos) {
      header_done = true;
    }
  }
  if (!header_done) {
    throw ParseError("unterminated FCIDUMP header", header_line ? header_line : 1);
  }

  out.n_orb = static_cast<int>(header_int(header, "NORB", header_line));
  out.n_elec = static_cast<int>(header_int(header, "NELEC", header_line));
  if (out.n_orb <= 0) {
    throw ParseError("NORB must be positive", header_line);
  }
  if (out.n_elec < 0 || out.n_elec > 2 * out.n_orb) {
    throw ValidationError("NELEC out of range for NORB");
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double value;
    int i, j, k, l;
    if (!(ls >> value >> i >> j >> k >> l)) {
      throw ParseError("expected `value i j k l` record", line_no);
    }
    const auto in_range = [&](int idx) { return idx >= 0 && idx <= out.n_orb; };
    if (!in_range(i) || !in_range(j) || !in_range(k) || !in_range(l)) {
      throw ValidationError("orbital index out of declared range (line " +
                            std::to_string(line_no) + ")");
    }
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      out.core = value;
    } else if (j == 0 && k == 0 && l == 0) {
      // Orbital energy record; not used here.
    } else if (k == 0 && l == 0) {
      std::array<int, 2> key{std::max(i, j) - 1, std::min(i, j) - 1};
      const auto [it, inserted] = out.h.emplace(key, value);
      if (!inserted && std::abs(it->second - value) > 1e-10) {
        throw ParseError("conflicting duplicate one-body record", line_no);
      }
    } else if (i > 0 && j > 0 && k > 0 && l > 0) {
      store_checked(out.eri, canonical_eri_key(i - 1, j - 1, k - 1, l - 1),
                    value, line_no);
    } else {
      throw ParseError("unsupported zero-index pattern", line_no);
    }
  }
  return out;
}

}  // namespace

FermionicIntegrals parse_integrals(std::istream& in, IntegralFormat format) {
  if (format != IntegralFormat::fcidump) {
    throw DomainError("unsupported integral format");
  }
  const SpatialIntegrals sp = parse_fcidump(in);

  FermionicIntegrals out;
  out.n_spin_orbitals = 2 * sp.n_orb;
  out.n_electrons = sp.n_elec;
  out.core_energy = sp.core;

  // One-body: h_{pq} with interleaved spin (spatial q -> 2q, 2q+1).
  for (const auto& [key, value] : sp.h) {
    if (std::abs(value) < kCoefficientFloor) continue;
    const int p = key[0], q = key[1];
    for (int spin = 0; spin < 2; ++spin) {
      out.one_body[{2 * p + spin, 2 * q + spin}] = value;
      out.one_body[{2 * q + spin, 2 * p + spin}] = value;
    }
  }

  // Two-body: chemists' (pq|rs) lookup across all 8 symmetry images.
  const auto eri = [&](int p, int q, int r, int s) -> double {
    const auto it = sp.eri.find(canonical_eri_key(p, q, r, s));
    return it == sp.eri.end() ? 0.0 : it->second;
  };

  // Coefficient of a_i^dag a_j^dag a_k a_l is (I L | J K) over spatial
  // parts, nonzero only when spins match within each contraction.
  const int n = out.n_spin_orbitals;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          if (k == l) continue;
          if ((i & 1) != (l & 1) || (j & 1) != (k & 1)) continue;
          const double v = eri(i >> 1, l >> 1, j >> 1, k >> 1);
          if (std::abs(v) < kCoefficientFloor) continue;
          out.two_body[{i, j, k, l}] = v;
        }
      }
    }
  }
  return out;
}

FermionicIntegrals parse_integrals_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open integral file: " + path);
  }
  return parse_integrals(in);
}

FragmentedHamiltonian fragment(const FermionicIntegrals& ints) {
  if (ints.n_spin_orbitals <= 0) {
    throw ValidationError("integrals declare no spin orbitals");
  }
  if (ints.n_electrons > ints.n_spin_orbitals) {
    throw ValidationError("more electrons than spin orbitals");
  }
  for (const auto& [key, value] : ints.one_body) {
    const auto it = ints.one_body.find({key[1], key[0]});
    if (it == ints.one_body.end() || std::abs(it->second - value) > 1e-10) {
      throw ValidationError("one-body integrals are not Hermitian");
    }
    if (!std::isfinite(value)) {
      throw ValidationError("non-finite one-body integral");
    }
  }

  FragmentedHamiltonian out;
  out.n_spin_orbitals = ints.n_spin_orbitals;
  out.n_electrons = ints.n_electrons;
  out.core_energy = ints.core_energy;

  for (const auto& [key, value] : ints.one_body) {
    FermionicTerm t;
    t.coefficient = value;
    t.indices = {key[0], key[1], -1, -1};
    t.two_body = false;
    out.alpha.push_back(t);
  }
  for (const auto& [key, value] : ints.two_body) {
    if (!std::isfinite(value)) {
      throw ValidationError("non-finite two-body integral");
    }
    FermionicTerm t;
    t.coefficient = 0.5 * value;  // global two-body prefactor folded in
    t.indices = key;
    t.two_body = true;
    const bool coulomb = key[2] == key[1] && key[3] == key[0] &&
                         key[0] != key[1];
    (coulomb ? out.beta : out.gamma).push_back(t);
  }
  return out;
}

std::pair<FragmentedHamiltonian, TruncationReport> truncate_gamma(
    const FragmentedHamiltonian& frag, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("truncation threshold must lie in [0, 1]");
  }
  std::vector<FermionicTerm> sorted = frag.gamma;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const FermionicTerm& a, const FermionicTerm& b) {
                     const double ma = std::abs(a.coefficient);
                     const double mb = std::abs(b.coefficient);
                     if (ma != mb) return ma > mb;
                     return a.indices < b.indices;
                   });

  double total = 0.0;
  for (const auto& t : sorted) total += std::abs(t.coefficient);

  TruncationReport report;
  report.p_requested = p;

  std::size_t cut = 0;
  double cum = 0.0;
  if (p >= 1.0 || total == 0.0) {
    cut = (p >= 1.0) ? sorted.size() : 0;
    cum = (cut == sorted.size()) ? total : 0.0;
  } else {
    while (cut < sorted.size() && cum < p * total) {
      cum += std::abs(sorted[cut].coefficient);
      ++cut;
    }
    // Close the tie run: Hermitian-conjugate index tuples carry equal
    // magnitudes, and cutting between them would leave a non-Hermitian
    // operator.
    while (cut > 0 && cut < sorted.size() &&
           std::abs(sorted[cut].coefficient) ==
               std::abs(sorted[cut - 1].coefficient)) {
      cum += std::abs(sorted[cut].coefficient);
      ++cut;
    }
  }
  report.s_cut = cut;
  report.p_achieved = total == 0.0 ? 1.0 : std::min(cum / total, 1.0);
  if (p >= 1.0) report.p_achieved = 1.0;
  report.kept.assign(sorted.begin(), sorted.begin() + static_cast<long>(cut));
  report.dropped.assign(sorted.begin() + static_cast<long>(cut), sorted.end());

  FragmentedHamiltonian out = frag;
  out.gamma = report.kept;
  return {std::move(out), std::move(report)};
}

namespace {

using cplx = std::complex<double>;

struct WeightedString {
  cplx coefficient;
  std::uint64_t x;
  std::uint64_t z;
};

// Ladder operator as two weighted strings: Z-chain below the site, X or Y
// at the site.
std::array<WeightedString, 2> ladder(int site, bool creator) {
  const std::uint64_t chain = (std::uint64_t{1} << site) - 1;
  const std::uint64_t bit = std::uint64_t{1} << site;
  const cplx y_coeff = creator ? cplx(0.0, -0.5) : cplx(0.0, 0.5);
  return {WeightedString{cplx(0.5, 0.0), bit, chain},
          WeightedString{y_coeff, bit, chain | bit}};
}

// Multiply accumulated strings by one ladder factor, tracking phases.
void multiply_in(std::vector<WeightedString>& acc, int n_qubits,
                 const std::array<WeightedString, 2>& factor) {
  std::vector<WeightedString> next;
  next.reserve(acc.size() * 2);
  for (const auto& a : acc) {
    for (const auto& f : factor) {
      const PauliString pa(n_qubits, a.x, a.z);
      const PauliString pf(n_qubits, f.x, f.z);
      const PauliProduct prod = multiply(pa, pf);
      cplx phase(1.0, 0.0);
      switch (prod.phase_power) {
        case 0: phase = {1.0, 0.0}; break;
        case 1: phase = {0.0, 1.0}; break;
        case 2: phase = {-1.0, 0.0}; break;
        case 3: phase = {0.0, -1.0}; break;
      }
      next.push_back({a.coefficient * f.coefficient * phase,
                      prod.string.x_mask(), prod.string.z_mask()});
    }
  }
  acc = std::move(next);
}

using StringKey = std::pair<std::uint64_t, std::uint64_t>;  // (x, z)

void map_fragment(const std::vector<FermionicTerm>& terms, int n_qubits,
                  std::map<StringKey, cplx>& merged) {
  for (const auto& term : terms) {
    std::vector<WeightedString> acc = {{cplx(term.coefficient, 0.0), 0, 0}};
    if (term.two_body) {
      multiply_in(acc, n_qubits, ladder(term.indices[0], true));
      multiply_in(acc, n_qubits, ladder(term.indices[1], true));
      multiply_in(acc, n_qubits, ladder(term.indices[2], false));
      multiply_in(acc, n_qubits, ladder(term.indices[3], false));
    } else {
      multiply_in(acc, n_qubits, ladder(term.indices[0], true));
      multiply_in(acc, n_qubits, ladder(term.indices[1], false));
    }
    for (const auto& ws : acc) {
      merged[{ws.x, ws.z}] += ws.coefficient;
    }
  }
}

void emit_fragment(const std::map<StringKey, cplx>& merged, int n_qubits,
                   Fragment tag, QubitHamiltonian& out) {
  for (const auto& [key, coeff] : merged) {
    if (std::abs(coeff.imag()) > kCoefficientFloor) {
      throw ValidationError(
          "Jordan-Wigner produced a non-Hermitian coefficient");
    }
    const double real = coeff.real();
    if (std::abs(real) < kCoefficientFloor) continue;
    if (key.first == 0 && key.second == 0) {
      out.constant += real;
      continue;
    }
    out.terms.emplace_back(real, PauliString(n_qubits, key.first, key.second));
    out.fragment_of.push_back(tag);
  }
}

}  // namespace

QubitHamiltonian jordan_wigner(const FragmentedHamiltonian& frag) {
  const int n = frag.n_spin_orbitals;
  QubitHamiltonian out;
  out.n_qubits = n;
  out.n_electrons = frag.n_electrons;
  out.constant = frag.core_energy;

  for (const auto& [terms, tag] :
       {std::pair{&frag.alpha, Fragment::alpha},
        std::pair{&frag.beta, Fragment::beta},
        std::pair{&frag.gamma, Fragment::gamma}}) {
    std::map<StringKey, cplx> merged;
    map_fragment(*terms, n, merged);
    emit_fragment(merged, n, tag, out);
  }
  return out;
}

std::vector<PauliTerm> QubitHamiltonian::fragment_terms(Fragment f) const {
  std::vector<PauliTerm> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (fragment_of[i] == f) out.push_back(terms[i]);
  }
  return out;
}

QubitHamiltonian squared(const QubitHamiltonian& ham) {
  std::map<StringKey, cplx> acc;
  double constant = ham.constant * ham.constant;

  // Cross terms with the scalar part.
  for (const auto& t : ham.terms) {
    acc[{t.string.x_mask(), t.string.z_mask()}] +=
        cplx(2.0 * ham.constant * t.coefficient, 0.0);
  }
  // Pairwise string products with phase tracking.
  for (const auto& a : ham.terms) {
    for (const auto& b : ham.terms) {
      const PauliProduct prod = multiply(a.string, b.string);
      cplx phase(1.0, 0.0);
      switch (prod.phase_power) {
        case 0: phase = {1.0, 0.0}; break;
        case 1: phase = {0.0, 1.0}; break;
        case 2: phase = {-1.0, 0.0}; break;
        case 3: phase = {0.0, -1.0}; break;
      }
      const cplx c = phase * a.coefficient * b.coefficient;
      if (prod.string.is_identity()) {
        constant += c.real();  // imaginary parts cancel pairwise
      } else {
        acc[{prod.string.x_mask(), prod.string.z_mask()}] += c;
      }
    }
  }

  QubitHamiltonian out;
  out.n_qubits = ham.n_qubits;
  out.n_electrons = ham.n_electrons;
  out.constant = constant;
  for (const auto& [key, coeff] : acc) {
    if (std::abs(coeff.imag()) > 1e-9) {
      throw ValidationError("H^2 expansion produced a complex coefficient");
    }
    if (std::abs(coeff.real()) < kCoefficientFloor) continue;
    out.terms.emplace_back(coeff.real(),
                           PauliString(ham.n_qubits, key.first, key.second));
    out.fragment_of.push_back(Fragment::mixed);
  }
  return out;
}

QubitHamiltonian number_operator(int n_qubits) {
  QubitHamiltonian out;
  out.n_qubits = n_qubits;
  out.constant = 0.5 * n_qubits;
  for (int q = 0; q < n_qubits; ++q) {
    PauliString s(n_qubits);
    s.set_axis(q, Axis::Z);
    out.terms.emplace_back(-0.5, std::move(s));
    out.fragment_of.push_back(Fragment::mixed);
  }
  return out;
}

}  // namespace tvha
