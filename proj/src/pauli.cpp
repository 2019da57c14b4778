#include "tvha/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <sstream>

namespace tvha {

namespace {

constexpr int kMaxQubits = 64;

void check_qubit_count(int n) {
  if (n <= 0 || n > kMaxQubits) {
    throw DomainError("qubit count must be in [1, 64], got " +
                      std::to_string(n));
  }
}

}  // namespace

const char* to_string(Fragment f) {
  switch (f) {
    case Fragment::alpha: return "alpha";
    case Fragment::beta: return "beta";
    case Fragment::gamma: return "gamma";
    case Fragment::identity: return "identity";
    case Fragment::mixed: return "mixed";
  }
  return "?";
}

const char* to_string(CommutationMode m) {
  return m == CommutationMode::qubit_wise ? "qubit-wise" : "general";
}

PauliString::PauliString(int n_qubits) : n_(n_qubits) {
  check_qubit_count(n_qubits);
}

PauliString::PauliString(int n_qubits, std::uint64_t x_mask,
                         std::uint64_t z_mask)
    : x_(x_mask), z_(z_mask), n_(n_qubits) {
  check_qubit_count(n_qubits);
  if (n_qubits < kMaxQubits) {
    const std::uint64_t valid = (std::uint64_t{1} << n_qubits) - 1;
    if ((x_ | z_) & ~valid) {
      throw DomainError("Pauli mask addresses qubits beyond n_qubits");
    }
  }
}

PauliString PauliString::parse(std::string_view text) {
  if (text.empty()) throw ParseError("empty Pauli string");
  const int n = static_cast<int>(text.size());
  check_qubit_count(n);
  PauliString out(n);
  for (int i = 0; i < n; ++i) {
    const int qubit = n - 1 - i;  // leftmost letter is the top qubit
    switch (text[i]) {
      case 'I': break;
      case 'X': out.set_axis(qubit, Axis::X); break;
      case 'Y': out.set_axis(qubit, Axis::Y); break;
      case 'Z': out.set_axis(qubit, Axis::Z); break;
      default:
        throw ParseError(std::string("invalid Pauli axis letter '") +
                         text[i] + "'");
    }
  }
  return out;
}

Axis PauliString::axis(int qubit) const {
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  const int code = ((x_ & bit) ? 1 : 0) | ((z_ & bit) ? 2 : 0);
  // code: 0 = I, 1 = X, 3 = Z, 2|1 -> Y when both bits set
  switch (code) {
    case 0: return Axis::I;
    case 1: return Axis::X;
    case 2: return Axis::Z;
    default: return Axis::Y;
  }
}

PauliString& PauliString::set_axis(int qubit, Axis a) {
  if (qubit < 0 || qubit >= n_) {
    throw DomainError("qubit index out of range");
  }
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  x_ &= ~bit;
  z_ &= ~bit;
  if (a == Axis::X || a == Axis::Y) x_ |= bit;
  if (a == Axis::Z || a == Axis::Y) z_ |= bit;
  return *this;
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

std::string PauliString::str() const {
  std::string out(static_cast<std::size_t>(n_), 'I');
  for (int q = 0; q < n_; ++q) {
    const char axes[] = {'I', 'X', 'Y', 'Z'};
    out[static_cast<std::size_t>(n_ - 1 - q)] =
        axes[static_cast<int>(axis(q))];
  }
  return out;
}

bool PauliString::lex_less(const PauliString& a, const PauliString& b) {
  if (a.n_ != b.n_) return a.n_ < b.n_;
  for (int q = a.n_ - 1; q >= 0; --q) {
    const char axes[] = {'I', 'X', 'Y', 'Z'};
    const char ca = axes[static_cast<int>(a.axis(q))];
    const char cb = axes[static_cast<int>(b.axis(q))];
    if (ca != cb) return ca < cb;
  }
  return false;
}

PauliProduct multiply(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw DimensionError("Pauli product requires equal qubit counts");
  }
  PauliString out(a.n_qubits(), a.x_mask() ^ b.x_mask(),
                  a.z_mask() ^ b.z_mask());
  // Per-qubit single-Pauli products accumulate a power of i:
  // XY = iZ, YZ = iX, ZX = iY (cyclic +1), reversed order -1 (i.e. +3).
  int phase = 0;
  std::uint64_t both = (a.x_mask() | a.z_mask()) & (b.x_mask() | b.z_mask());
  while (both) {
    const int q = std::countr_zero(both);
    both &= both - 1;
    const int pa = static_cast<int>(a.axis(q));
    const int pb = static_cast<int>(b.axis(q));
    if (pa == pb) continue;
    // Axis codes X=1, Y=2, Z=3: cyclic order (1,2), (2,3), (3,1) gives +i.
    const bool cyclic = (pa == 1 && pb == 2) || (pa == 2 && pb == 3) ||
                        (pa == 3 && pb == 1);
    phase += cyclic ? 1 : 3;
  }
  return {phase & 3, out};
}

bool commutes(const PauliString& a, const PauliString& b,
              CommutationMode mode) {
  if (a.n_qubits() != b.n_qubits()) {
    throw DimensionError("commutation test requires equal qubit counts");
  }
  const std::uint64_t support =
      (a.x_mask() | a.z_mask()) & (b.x_mask() | b.z_mask());
  const std::uint64_t differ =
      support & ((a.x_mask() ^ b.x_mask()) | (a.z_mask() ^ b.z_mask()));
  if (mode == CommutationMode::qubit_wise) return differ == 0;
  return (std::popcount(differ) & 1) == 0;
}

CommutingGroups group_commuting(std::span<const PauliTerm> terms,
                                CommutationMode mode, Fragment tag) {
  if (terms.empty()) {
    throw ValidationError("group_commuting requires a non-empty term list");
  }
  const int n = terms.front().string.n_qubits();
  for (const auto& t : terms) {
    if (t.string.n_qubits() != n) {
      throw DimensionError("group_commuting requires uniform qubit counts");
    }
  }

  std::vector<std::size_t> order(terms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) {
                     const double ai = std::abs(terms[i].coefficient);
                     const double aj = std::abs(terms[j].coefficient);
                     if (ai != aj) return ai > aj;
                     return PauliString::lex_less(terms[i].string,
                                                  terms[j].string);
                   });

  CommutingGroups out;
  out.mode = mode;
  out.fragment = tag;
  for (const std::size_t idx : order) {
    bool placed = false;
    for (auto& group : out.groups) {
      const bool fits = std::all_of(
          group.begin(), group.end(), [&](std::size_t member) {
            return commutes(terms[idx].string, terms[member].string, mode);
          });
      if (fits) {
        group.push_back(idx);
        placed = true;
        break;
      }
    }
    if (!placed) out.groups.push_back({idx});
  }
  return out;
}

std::vector<BasisRotation> measurement_rotation(
    std::span<const PauliString> group) {
  if (group.empty()) {
    throw ValidationError("measurement_rotation requires a non-empty group");
  }
  const int n = group.front().n_qubits();
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (std::size_t j = i + 1; j < group.size(); ++j) {
      if (!commutes(group[i], group[j], CommutationMode::qubit_wise)) {
        throw InvalidGroupError(
            "measurement_rotation requires a qubit-wise commuting group");
      }
    }
  }
  std::vector<BasisRotation> rotation(static_cast<std::size_t>(n),
                                      BasisRotation::none);
  for (int q = 0; q < n; ++q) {
    for (const auto& s : group) {
      const Axis a = s.axis(q);
      if (a == Axis::X) {
        rotation[static_cast<std::size_t>(q)] = BasisRotation::x_basis;
        break;
      }
      if (a == Axis::Y) {
        rotation[static_cast<std::size_t>(q)] = BasisRotation::y_basis;
        break;
      }
      // I and Z need no rotation; qubit-wise commutation guarantees no
      // other string puts a conflicting axis on this qubit.
    }
  }
  return rotation;
}

PauliString rotated_to_diagonal(const PauliString& s,
                                std::span<const BasisRotation> rotation) {
  if (static_cast<int>(rotation.size()) != s.n_qubits()) {
    throw DimensionError("rotation length must match qubit count");
  }
  PauliString out(s.n_qubits());
  for (int q = 0; q < s.n_qubits(); ++q) {
    const Axis a = s.axis(q);
    const BasisRotation r = rotation[static_cast<std::size_t>(q)];
    switch (a) {
      case Axis::I: break;
      case Axis::Z:
        if (r != BasisRotation::none) {
          throw InvalidGroupError("rotation does not diagonalize the string");
        }
        out.set_axis(q, Axis::Z);
        break;
      case Axis::X:
        if (r != BasisRotation::x_basis) {
          throw InvalidGroupError("rotation does not diagonalize the string");
        }
        out.set_axis(q, Axis::Z);
        break;
      case Axis::Y:
        if (r != BasisRotation::y_basis) {
          throw InvalidGroupError("rotation does not diagonalize the string");
        }
        out.set_axis(q, Axis::Z);
        break;
    }
  }
  return out;
}

std::string format_terms(std::span<const PauliTerm> terms) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& t : terms) {
    os << t.coefficient << ' ' << t.string.str() << '\n';
  }
  return os.str();
}

std::vector<PauliTerm> parse_terms(std::istream& in) {
  std::vector<PauliTerm> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double coeff;
    std::string axes;
    if (!(ls >> coeff)) {
      throw ParseError("expected a coefficient", line_no);
    }
    if (!(ls >> axes)) {
      throw ParseError("missing Pauli axes after coefficient", line_no);
    }
    std::string trailing;
    if (ls >> trailing) {
      throw ParseError("unexpected trailing token '" + trailing + "'",
                       line_no);
    }
    try {
      out.emplace_back(coeff, PauliString::parse(axes));
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

}  // namespace tvha
