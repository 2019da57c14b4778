#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvha/errors.hpp"

namespace tvha {

enum class Axis : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

enum class CommutationMode { qubit_wise, general };

// Which part of the molecular Hamiltonian a term or group came from.
enum class Fragment : std::uint8_t { alpha, beta, gamma, identity, mixed };

const char* to_string(Fragment f);
const char* to_string(CommutationMode m);

// Tensor product of single-qubit Pauli operators, stored as an (X, Z)
// bitmask pair: X at qubit q -> x bit set, Z -> z bit set, Y -> both.
// Qubit count is capped at 64, far beyond the dense-simulation range.
class PauliString {
 public:
  explicit PauliString(int n_qubits);
  PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask);

  // Parses axis letters, most significant qubit first ("ZIII" = Z on qubit 3).
  static PauliString parse(std::string_view text);

  int n_qubits() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }

  Axis axis(int qubit) const;
  PauliString& set_axis(int qubit, Axis a);

  bool is_identity() const { return (x_ | z_) == 0; }
  int weight() const;

  // Axis letters, most significant qubit first.
  std::string str() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

  // Orders by the textual representation (used for deterministic tie-breaks).
  static bool lex_less(const PauliString& a, const PauliString& b);

 private:
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  int n_ = 0;
};

struct PauliTerm {
  double coefficient = 0.0;
  PauliString string;

  PauliTerm(double c, PauliString s) : coefficient(c), string(std::move(s)) {}

  friend bool operator==(const PauliTerm&, const PauliTerm&) = default;
};

// Product of two Pauli strings: a * b = i^phase_power * string.
struct PauliProduct {
  int phase_power = 0;  // exponent of i, reduced mod 4
  PauliString string;
};

PauliProduct multiply(const PauliString& a, const PauliString& b);

// General mode: true iff the strings commute as operators (symplectic test).
// Qubit-wise mode: true iff at every position one axis is I or both agree.
bool commutes(const PauliString& a, const PauliString& b, CommutationMode mode);

// Partition of a term list into simultaneously measurable groups.
struct CommutingGroups {
  std::vector<std::vector<std::size_t>> groups;  // indices into the term list
  CommutationMode mode = CommutationMode::qubit_wise;
  Fragment fragment = Fragment::mixed;
};

// Greedy first-fit coloring of the anti-commutation graph. Terms are visited
// in descending |coefficient| (ties by textual order) and placed in the first
// group they commute with pairwise. Deterministic for a fixed input.
CommutingGroups group_commuting(std::span<const PauliTerm> terms,
                                CommutationMode mode,
                                Fragment tag = Fragment::mixed);

// Single-qubit basis change that maps a qubit-wise commuting group onto
// Z/I strings: none for I/Z columns, x_basis (H) for X, y_basis (S^dag
// then H) for Y.
enum class BasisRotation : std::uint8_t { none, x_basis, y_basis };

std::vector<BasisRotation> measurement_rotation(
    std::span<const PauliString> group);

// Rewrites a string under a basis rotation (X/Y columns become Z). Only
// valid for rotations produced by measurement_rotation over a group that
// contains the string.
PauliString rotated_to_diagonal(const PauliString& s,
                                std::span<const BasisRotation> rotation);

// Textual term I/O: one `coefficient axes` pair per line, '#' starts a
// comment. Axes are most-significant-qubit-first.
std::string format_terms(std::span<const PauliTerm> terms);
std::vector<PauliTerm> parse_terms(std::istream& in);

}  // namespace tvha
