#pragma once

// Reference tables and a cached lambda = 100, a = 1 pole set shared by the
// unit tests and the acceptance runner.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bornres/bornres.hpp"

namespace bornres::testing {

inline std::string fixture_path(const std::string &name) { return std::string(BORNRES_FIXTURE_DIR) + "/" + name; }

inline std::vector<FaddeevaRecord> faddeeva_reference() {
  std::ifstream in(fixture_path("faddeeva_reference.txt"));
  if (!in) throw std::runtime_error("missing fixture faddeeva_reference.txt");
  return read_faddeeva_table(in);
}

struct MoshinskyRecord {
  MoshinskyArgs args;
  cplx value;
};

// `x re(kappa) im(kappa) t re(M) im(M)` per line.
inline std::vector<MoshinskyRecord> moshinsky_reference() {
  std::ifstream in(fixture_path("moshinsky_reference.txt"));
  if (!in) throw std::runtime_error("missing fixture moshinsky_reference.txt");
  std::vector<MoshinskyRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream f(line);
    double x, kr, ki, t, mr, mi;
    if (!(f >> x >> kr >> ki >> t >> mr >> mi)) throw std::runtime_error("malformed moshinsky record: " + line);
    out.push_back({{x, {kr, ki}, t}, {mr, mi}});
  }
  return out;
}

inline const Model &reference_model() {
  static const Model m = Model::delta_shell(100.0, 1.0);
  return m;
}

// The first 200 states at lambda = 100, a = 1, computed once.
inline const std::vector<ResonanceStateData> &reference_states_all() {
  static const std::vector<ResonanceStateData> states = [] {
    SolverConfig cfg;
    cfg.n_poles = 200;
    return make_resonance_states(reference_model(), find_poles(reference_model().params, cfg));
  }();
  return states;
}

inline std::vector<ResonanceStateData> reference_states(std::size_t n) { return truncate(reference_states_all(), {n}); }

inline double relative_error(cplx value, cplx reference) {
  return std::abs(value - reference) / std::abs(reference);
}

}  // namespace bornres::testing
