#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tvha/hamiltonian.hpp"
#include "tvha/rng.hpp"
#include "tvha/simulator.hpp"

using namespace tvha;

namespace {

FermionicIntegrals random_integrals(Rng& rng, int n_spin_orbitals) {
  FermionicIntegrals ints;
  ints.n_spin_orbitals = n_spin_orbitals;
  ints.n_electrons = n_spin_orbitals / 2;
  ints.core_energy = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < n_spin_orbitals; ++i) {
    for (int j = i; j < n_spin_orbitals; ++j) {
      const double v = rng.uniform(-1.0, 1.0);
      ints.one_body[{i, j}] = v;
      ints.one_body[{j, i}] = v;
    }
  }
  // A handful of two-body terms; Hermiticity needs g_lkji = g_ijkl.
  const int n_terms = 4 + static_cast<int>(rng.uniform_index(6));
  for (int t = 0; t < n_terms; ++t) {
    const int i = static_cast<int>(rng.uniform_index(n_spin_orbitals));
    const int j = static_cast<int>(rng.uniform_index(n_spin_orbitals));
    const int k = static_cast<int>(rng.uniform_index(n_spin_orbitals));
    const int l = static_cast<int>(rng.uniform_index(n_spin_orbitals));
    if (i == j || k == l) continue;
    const double v = rng.uniform(-0.8, 0.8);
    ints.two_body[{i, j, k, l}] = v;
    ints.two_body[{l, k, j, i}] = v;
  }
  return ints;
}

std::vector<double> jw_spectrum(const FermionicIntegrals& ints) {
  return dense_eigenvalues(jordan_wigner(fragment(ints)));
}

}  // namespace

TEST_CASE("parse_integrals: single-orbital expansion and core handling") {
  std::istringstream in(
      "&FCI NORB=1,NELEC=2,MS2=0,\n ORBSYM=1,\n ISYM=1,\n&END\n"
      "-1.0 1 1 0 0\n"
      "0.5 0 0 0 0\n");
  const auto ints = parse_integrals(in);
  CHECK(ints.n_spin_orbitals == 2);
  CHECK(ints.n_electrons == 2);
  CHECK(ints.core_energy == doctest::Approx(0.5));
  CHECK(ints.one_body.at({0, 0}) == doctest::Approx(-1.0));
  CHECK(ints.one_body.at({1, 1}) == doctest::Approx(-1.0));
  CHECK(ints.two_body.empty());
}

TEST_CASE("parse_integrals: core-only file") {
  std::istringstream in("&FCI NORB=2,NELEC=0\n&END\n-3.25 0 0 0 0\n");
  const auto ints = parse_integrals(in);
  CHECK(ints.one_body.empty());
  CHECK(ints.two_body.empty());
  CHECK(ints.core_energy == doctest::Approx(-3.25));
}

TEST_CASE("parse_integrals: malformed input") {
  std::istringstream no_header("1.0 1 1 0 0\n");
  CHECK_THROWS_AS(parse_integrals(no_header), ParseError);

  std::istringstream no_norb("&FCI NELEC=2\n&END\n");
  CHECK_THROWS_AS(parse_integrals(no_norb), ParseError);

  std::istringstream bad_index("&FCI NORB=1,NELEC=2\n&END\n1.0 3 1 0 0\n");
  CHECK_THROWS_AS(parse_integrals(bad_index), ValidationError);

  std::istringstream bad_record("&FCI NORB=1,NELEC=2\n&END\n1.0 1\n");
  CHECK_THROWS_AS(parse_integrals(bad_record), ParseError);
}

TEST_CASE("fragment: classification of stated patterns") {
  SUBCASE("one-body only") {
    FermionicIntegrals ints;
    ints.n_spin_orbitals = 2;
    ints.n_electrons = 1;
    ints.one_body[{0, 0}] = -1.0;
    const auto frag = fragment(ints);
    CHECK(frag.alpha.size() == 1);
    CHECK(frag.beta.empty());
    CHECK(frag.gamma.empty());
  }

  SUBCASE("Coulomb pattern goes to beta") {
    FermionicIntegrals ints;
    ints.n_spin_orbitals = 2;
    ints.two_body[{0, 1, 1, 0}] = 0.8;
    const auto frag = fragment(ints);
    REQUIRE(frag.beta.size() == 1);
    CHECK(frag.gamma.empty());
    CHECK(frag.beta[0].coefficient == doctest::Approx(0.4));  // 1/2 folded
  }

  SUBCASE("generic two-body goes to gamma") {
    FermionicIntegrals ints;
    ints.n_spin_orbitals = 4;
    ints.two_body[{0, 1, 2, 3}] = 0.8;
    const auto frag = fragment(ints);
    CHECK(frag.beta.empty());
    REQUIRE(frag.gamma.size() == 1);
  }

  SUBCASE("i=k residual pattern is gamma, not beta") {
    FermionicIntegrals ints;
    ints.n_spin_orbitals = 4;
    ints.two_body[{0, 2, 0, 2}] = 0.8;
    const auto frag = fragment(ints);
    CHECK(frag.beta.empty());
    CHECK(frag.gamma.size() == 1);
  }
}

TEST_CASE("truncate_gamma: stated example with prefix-scan oracle") {
  FermionicIntegrals ints;
  ints.n_spin_orbitals = 6;
  ints.two_body[{0, 1, 2, 3}] = 1.0;    // |coef| 0.5 after folding
  ints.two_body[{0, 1, 2, 5}] = 0.6;    // 0.3
  ints.two_body[{0, 3, 2, 1}] = 0.3;    // 0.15
  ints.two_body[{1, 2, 3, 0}] = 0.1;    // 0.05
  const auto frag = fragment(ints);
  REQUIRE(frag.gamma.size() == 4);

  const auto [truncated, report] = truncate_gamma(frag, 0.9);
  CHECK(report.s_cut == 3);
  CHECK(report.kept.size() == 3);
  CHECK(report.dropped.size() == 1);
  CHECK(report.p_achieved == doctest::Approx(0.95));
  CHECK(truncated.gamma.size() == 3);

  // Exhaustive prefix scan: the reported cut must be the smallest prefix
  // reaching the threshold.
  std::vector<double> mags = {0.5, 0.3, 0.15, 0.05};
  double total = 0.0;
  for (double m : mags) total += m;
  std::size_t expected_cut = 0;
  double cum = 0.0;
  while (expected_cut < mags.size() && cum < 0.9 * total) {
    cum += mags[expected_cut++];
  }
  CHECK(report.s_cut == expected_cut);

  SUBCASE("p=1 keeps everything") {
    const auto [all, rep] = truncate_gamma(frag, 1.0);
    CHECK(rep.dropped.empty());
    CHECK(rep.s_cut == 4);
    CHECK(rep.p_achieved == doctest::Approx(1.0));
  }
  SUBCASE("p=0 drops everything") {
    const auto [none, rep] = truncate_gamma(frag, 0.0);
    CHECK(rep.s_cut == 0);
    CHECK(none.gamma.empty());
    CHECK(rep.kept.empty());
  }
  SUBCASE("domain check") {
    CHECK_THROWS_AS(truncate_gamma(frag, 1.5), DomainError);
    CHECK_THROWS_AS(truncate_gamma(frag, -0.1), DomainError);
  }
}

TEST_CASE("truncate_gamma: monotone kept sets over a p sweep") {
  Rng rng(83);
  const auto ints = random_integrals(rng, 6);
  const auto frag = fragment(ints);

  const auto key = [](const FermionicTerm& t) { return t.indices; };
  std::vector<std::set<std::array<int, 4>>> kept_sets;
  for (int step = 0; step <= 20; ++step) {
    const double p = step / 20.0;
    const auto [_, report] = truncate_gamma(frag, p);
    CHECK(report.p_achieved >= doctest::Approx(p));
    std::set<std::array<int, 4>> kept;
    for (const auto& t : report.kept) kept.insert(key(t));
    if (!kept_sets.empty()) {
      const auto& prev = kept_sets.back();
      CHECK(std::includes(kept.begin(), kept.end(), prev.begin(), prev.end()));
    }
    kept_sets.push_back(std::move(kept));
  }
}

TEST_CASE("jordan_wigner: analytic identities") {
  SUBCASE("number operator") {
    FermionicIntegrals ints;
    ints.n_spin_orbitals = 1;
    // n_spin_orbitals must describe at least one qubit; use the raw maps.
    ints.one_body[{0, 0}] = 1.0;
    const auto ham = jordan_wigner(fragment(ints));
    CHECK(ham.constant == doctest::Approx(0.5));
    REQUIRE(ham.terms.size() == 1);
    CHECK(ham.terms[0].coefficient == doctest::Approx(-0.5));
    CHECK(ham.terms[0].string.axis(0) == Axis::Z);
    CHECK(ham.fragment_of[0] == Fragment::alpha);
  }

  SUBCASE("hopping pair") {
    FermionicIntegrals ints;
    ints.n_spin_orbitals = 2;
    ints.one_body[{0, 1}] = 0.5;
    ints.one_body[{1, 0}] = 0.5;
    const auto ham = jordan_wigner(fragment(ints));
    CHECK(ham.constant == doctest::Approx(0.0));
    REQUIRE(ham.terms.size() == 2);
    for (const auto& t : ham.terms) {
      CHECK(t.coefficient == doctest::Approx(0.25));
      CHECK(t.string.weight() == 2);
    }
    const std::set<std::string> strings = {ham.terms[0].string.str(),
                                           ham.terms[1].string.str()};
    CHECK(strings == std::set<std::string>{"XX", "YY"});
  }
}

TEST_CASE("jordan_wigner preserves the spectrum of random small systems") {
  Rng rng(97);
  for (int trial = 0; trial < 12; ++trial) {
    const int n_so = 2 + 2 * static_cast<int>(rng.uniform_index(3));  // 2,4,6
    const auto ints = random_integrals(rng, n_so);
    const auto qubit_spectrum = jw_spectrum(ints);
    const auto fock_spectrum = oracles::eigenvalues(oracles::fock_matrix(ints));
    REQUIRE(qubit_spectrum.size() == fock_spectrum.size());
    for (std::size_t i = 0; i < qubit_spectrum.size(); ++i) {
      CHECK(qubit_spectrum[i] ==
            doctest::Approx(fock_spectrum[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("fixtures: spectrum preservation and H2 reference energy") {
  for (const char* path :
       {"fixtures/h2.fcidump", "fixtures/lih_active.fcidump"}) {
    const auto ints = parse_integrals_file(path);
    REQUIRE(ints.n_spin_orbitals <= 6);
    const auto qubit_spectrum = jw_spectrum(ints);
    const auto fock_spectrum = oracles::eigenvalues(oracles::fock_matrix(ints));
    for (std::size_t i = 0; i < qubit_spectrum.size(); ++i) {
      CHECK(qubit_spectrum[i] ==
            doctest::Approx(fock_spectrum[i]).epsilon(1e-9));
    }
  }

  const auto h2 = parse_integrals_file("fixtures/h2.fcidump");
  CHECK(h2.n_spin_orbitals == 4);
  CHECK(h2.n_electrons == 2);
  const double e0 = jw_spectrum(h2).front();
  // Frozen reference: full-CI energy of the bundled fixture, computed once
  // with the independent Fock-space oracle.
  CHECK(e0 == doctest::Approx(-1.137269844715).epsilon(1e-8));
  const double fock_e0 =
      oracles::eigenvalues(oracles::fock_matrix(h2)).front();
  CHECK(e0 == doctest::Approx(fock_e0).epsilon(1e-10));
}

TEST_CASE("jordan_wigner merges within fragments and floors tiny terms") {
  Rng rng(101);
  const auto ints = random_integrals(rng, 4);
  const auto ham = jordan_wigner(fragment(ints));
  // No duplicate strings within one fragment; coefficients all real and
  // above the floor.
  for (const Fragment f :
       {Fragment::alpha, Fragment::beta, Fragment::gamma}) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < ham.terms.size(); ++i) {
      if (ham.fragment_of[i] != f) continue;
      CHECK(seen.insert(ham.terms[i].string.str()).second);
      CHECK(std::abs(ham.terms[i].coefficient) >= 1e-12);
      CHECK(std::isfinite(ham.terms[i].coefficient));
    }
  }
}

TEST_CASE("squared matches the dense square") {
  Rng rng(103);
  const auto ints = random_integrals(rng, 4);
  const auto ham = jordan_wigner(fragment(ints));
  const auto ham_sq = squared(ham);

  const auto dense = oracles::hamiltonian_matrix(ham);
  const auto dense_sq = oracles::matmul(dense, dense);
  const auto rebuilt = oracles::hamiltonian_matrix(ham_sq);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < dense_sq.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(dense_sq[i] - rebuilt[i]));
  }
  CHECK(max_diff < 1e-10);
}
