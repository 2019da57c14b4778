#include "tvha/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "tvha/rng.hpp"

namespace tvha {

int TvhaCircuit::param_index(int layer, Fragment f) const {
  if (layer < 0 || layer >= depth) {
    throw DomainError("layer index out of range");
  }
  for (std::size_t k = 0; k < fragments.size(); ++k) {
    if (fragments[k].fragment == f) {
      return layer * params_per_layer() + static_cast<int>(k);
    }
  }
  throw DomainError("fragment contributes no parameters to this circuit");
}

std::string TvhaCircuit::summary_json() const {
  std::ostringstream os;
  os << "{\"depth\":" << depth << ",\"n_qubits\":" << n_qubits
     << ",\"parameter_count\":" << parameter_count() << ",\"groups\":{";
  for (std::size_t k = 0; k < fragments.size(); ++k) {
    os << (k ? "," : "") << '"' << to_string(fragments[k].fragment)
       << "\":" << fragments[k].groups.size();
  }
  os << "}}";
  return os.str();
}

std::array<CommutingGroups, 3> fragment_groups(const QubitHamiltonian& ham) {
  std::array<CommutingGroups, 3> out;
  const Fragment tags[3] = {Fragment::alpha, Fragment::beta, Fragment::gamma};

  for (int f = 0; f < 3; ++f) {
    out[f].mode = CommutationMode::general;
    out[f].fragment = tags[f];

    // x-mask classes: members mutually commute and sum to the fragment's
    // particle-conserving component for that mask.
    std::map<std::uint64_t, std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < ham.terms.size(); ++i) {
      if (ham.fragment_of[i] != tags[f]) continue;
      classes[ham.terms[i].string.x_mask()].push_back(i);
    }
    if (classes.empty()) continue;

    struct ClassRef {
      double max_abs;
      std::vector<std::size_t> members;  // sorted |c| desc, then lex
    };
    std::vector<ClassRef> refs;
    for (auto& [mask, members] : classes) {
      std::stable_sort(members.begin(), members.end(),
                       [&](std::size_t a, std::size_t b) {
                         const double ma = std::abs(ham.terms[a].coefficient);
                         const double mb = std::abs(ham.terms[b].coefficient);
                         if (ma != mb) return ma > mb;
                         return PauliString::lex_less(ham.terms[a].string,
                                                      ham.terms[b].string);
                       });
      refs.push_back({std::abs(ham.terms[members.front()].coefficient),
                      std::move(members)});
    }
    std::stable_sort(refs.begin(), refs.end(),
                     [&](const ClassRef& a, const ClassRef& b) {
                       if (a.max_abs != b.max_abs) return a.max_abs > b.max_abs;
                       return PauliString::lex_less(
                           ham.terms[a.members.front()].string,
                           ham.terms[b.members.front()].string);
                     });

    for (const auto& ref : refs) {
      bool placed = false;
      for (auto& group : out[f].groups) {
        const bool fits = std::all_of(
            ref.members.begin(), ref.members.end(), [&](std::size_t cand) {
              return std::all_of(group.begin(), group.end(),
                                 [&](std::size_t member) {
                                   return commutes(ham.terms[cand].string,
                                                   ham.terms[member].string,
                                                   CommutationMode::general);
                                 });
            });
        if (fits) {
          group.insert(group.end(), ref.members.begin(), ref.members.end());
          placed = true;
          break;
        }
      }
      if (!placed) out[f].groups.push_back(ref.members);
    }
  }
  return out;
}

TvhaCircuit build_circuit(
    const QubitHamiltonian& ham,
    const std::array<CommutingGroups, 3>& groups_by_fragment, int depth) {
  if (depth < 1) throw DomainError("circuit depth must be at least 1");
  if (ham.terms.empty()) {
    throw ValidationError("cannot build a circuit from an empty Hamiltonian");
  }

  TvhaCircuit circuit;
  circuit.depth = depth;
  circuit.n_qubits = ham.n_qubits;
  circuit.n_electrons = ham.n_electrons;

  std::vector<bool> covered(ham.terms.size(), false);
  for (const auto& groups : groups_by_fragment) {
    if (groups.groups.empty()) continue;
    TvhaCircuit::FragmentPlan plan;
    plan.fragment = groups.fragment;
    for (const auto& group : groups.groups) {
      std::vector<PauliTerm> terms;
      for (const std::size_t idx : group) {
        if (idx >= ham.terms.size()) {
          throw ValidationError("group index beyond the term list");
        }
        covered[idx] = true;
        terms.push_back(ham.terms[idx]);
      }
      plan.groups.push_back(std::move(terms));
    }
    circuit.fragments.push_back(std::move(plan));
  }
  for (std::size_t i = 0; i < ham.terms.size(); ++i) {
    if (!covered[i]) {
      throw ValidationError("fragment groups must cover every term");
    }
  }
  return circuit;
}

Statevector prepare_state(const TvhaCircuit& circuit,
                          std::span<const double> params) {
  if (static_cast<int>(params.size()) != circuit.parameter_count()) {
    throw DimensionError("parameter vector length mismatch");
  }
  Statevector state = [&] {
    if (circuit.reference == TvhaCircuit::Reference::hartree_fock) {
      return hf_state(circuit.n_qubits, circuit.n_electrons);
    }
    Statevector custom(circuit.n_qubits);
    custom.amplitudes()[0] = 0.0;
    custom.amplitudes()[circuit.custom_occupation] = 1.0;
    return custom;
  }();

  // The layer unitary is the written product [alpha][beta][gamma]; the
  // rightmost factor acts on the state first, so fragments and the groups
  // inside them apply in reverse plan order. Layers follow the adiabatic
  // time ordering, d = 1 first.
  for (int layer = 0; layer < circuit.depth; ++layer) {
    for (std::size_t k = circuit.fragments.size(); k-- > 0;) {
      const double angle =
          params[static_cast<std::size_t>(layer) * circuit.fragments.size() +
                 k];
      const auto& groups = circuit.fragments[k].groups;
      for (std::size_t g = groups.size(); g-- > 0;) {
        for (const auto& term : groups[g]) {
          apply_pauli_exp(state, term, angle);
        }
      }
    }
    if (std::abs(state.norm() - 1.0) > 1e-10) {
      throw Error("state norm drifted during circuit evaluation");
    }
  }
  return state;
}

EnergyEstimate evaluate(const TvhaCircuit& circuit,
                        std::span<const double> params,
                        const QubitHamiltonian& ham) {
  return expectation_exact(prepare_state(circuit, params), ham);
}

EnergyEstimate evaluate(const TvhaCircuit& circuit,
                        std::span<const double> params,
                        const QubitHamiltonian& ham,
                        const CommutingGroups& groups,
                        const SamplingConfig& cfg) {
  return expectation_sampled(prepare_state(circuit, params), ham, groups, cfg);
}

EnergyEstimate evaluate(const TvhaCircuit& circuit,
                        std::span<const double> params,
                        const QubitHamiltonian& ham,
                        const CommutingGroups& groups,
                        const SamplingConfig& cfg,
                        const QubitHamiltonian& ham_squared) {
  return expectation_sampled(prepare_state(circuit, params), ham, groups, cfg,
                             ham_squared);
}

namespace {

double hf_fragment_expectation(const QubitHamiltonian& ham,
                               std::initializer_list<Fragment> fragments,
                               const Statevector& hf) {
  double value = 0.0;
  for (std::size_t i = 0; i < ham.terms.size(); ++i) {
    for (const Fragment f : fragments) {
      if (ham.fragment_of[i] == f) {
        value += ham.terms[i].coefficient *
                 pauli_expectation(hf, ham.terms[i].string);
        break;
      }
    }
  }
  return value;
}

}  // namespace

std::vector<double> init_adiabatic(const TvhaCircuit& circuit,
                                   const QubitHamiltonian& ham,
                                   const InitConfig& cfg) {
  if (cfg.strategy != InitStrategy::adiabatic) {
    throw ConfigError("init_adiabatic called with a non-adiabatic strategy");
  }
  if (!(cfg.tau > 0.0)) {
    throw DomainError("adiabatic tau must be positive");
  }
  const Statevector hf = hf_state(circuit.n_qubits, circuit.n_electrons);
  const double mean_alpha =
      hf_fragment_expectation(ham, {Fragment::alpha}, hf);
  const double mean_interaction =
      hf_fragment_expectation(ham, {Fragment::beta, Fragment::gamma}, hf);

  const double depth = circuit.depth;
  std::vector<double> params(
      static_cast<std::size_t>(circuit.parameter_count()), 0.0);
  for (int layer = 0; layer < circuit.depth; ++layer) {
    for (std::size_t k = 0; k < circuit.fragments.size(); ++k) {
      const std::size_t idx =
          static_cast<std::size_t>(layer) * circuit.fragments.size() + k;
      if (circuit.fragments[k].fragment == Fragment::alpha) {
        params[idx] = cfg.tau / depth * mean_alpha;
      } else {
        params[idx] =
            cfg.tau / depth * mean_interaction * ((layer + 1) / depth);
      }
    }
  }
  return params;
}

std::vector<double> init_random(const TvhaCircuit& circuit,
                                const InitConfig& cfg) {
  Rng rng(cfg.rng_seed);
  std::vector<double> params(
      static_cast<std::size_t>(circuit.parameter_count()));
  for (auto& p : params) p = rng.uniform();
  return params;
}

}  // namespace tvha
