#pragma once

// Zeros of J+(k) in the fourth quadrant: analytic seeds, a branch-indexed
// fixed-point polish, and Newton refinement.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bornres/model.hpp"

namespace bornres {

enum class SolverErrorKind { non_convergence, wrong_quadrant, duplicate_collapse };

inline const char *to_string(SolverErrorKind kind) {
  switch (kind) {
    case SolverErrorKind::non_convergence: return "non_convergence";
    case SolverErrorKind::wrong_quadrant: return "wrong_quadrant";
    case SolverErrorKind::duplicate_collapse: return "duplicate_collapse";
  }
  return "unknown";
}

class SolverError : public std::runtime_error {
 public:
  SolverError(SolverErrorKind kind, int index, const std::string &detail)
      : std::runtime_error(std::string("pole solver: ") + to_string(kind) + " at n = " +
                           std::to_string(index) + ": " + detail),
        kind_(kind),
        index_(index) {}

  [[nodiscard]] SolverErrorKind kind() const { return kind_; }
  [[nodiscard]] int index() const { return index_; }

 private:
  SolverErrorKind kind_;
  int index_;
};

struct SolverConfig {
  std::size_t n_poles = 40;
  int max_iterations = 60;
  // Newton stops when |dk| < step_tolerance (1 + |k|) ...
  double step_tolerance = 1e-13;
  // ... and |J+(k)| is below this, or below the roundoff floor of J+ at k
  // when that is larger (high-lying poles, where |J+| terms reach lambda e^{2 beta a}).
  double residual_tolerance = 1e-10;
  // Poles closer than this are treated as one.
  double duplicate_radius = 1e-6;
  std::size_t soft_cap = 500;
  std::function<void(std::string_view)> warn;
};

/// First-order seeds kappa_n ~ (n pi / a)(1 - 1/(lambda a)) - i (1/a)(n pi / (lambda a))^2,
/// valid while n pi << lambda a.
inline cplx seed_pole(const ModelParams &p, int n) {
  const double x = n * std::numbers::pi / (p.lambda * p.a);
  return {(n * std::numbers::pi / p.a) * (1.0 - 1.0 / (p.lambda * p.a)), -(x * x) / p.a};
}

inline std::vector<cplx> seed_poles(const ModelParams &p, int first, int last,
                                    const std::function<void(std::string_view)> &warn = {}) {
  if (warn && p.lambda * p.a < 10.0) {
    warn("lambda a < 10: first-order pole seeds are unreliable in this regime");
  }
  std::vector<cplx> seeds;
  for (int n = first; n <= last; ++n) seeds.push_back(seed_pole(p, n));
  return seeds;
}

/// Branch index of a zero: J+(k) = 0 is equivalent to
/// k = n pi / a - (i / 2a) Log(1 - 2ik / lambda) with principal Log.
inline double branch_index(const ModelParams &p, cplx k) {
  const cplx log_term = std::log(1.0 - 2.0 * imag_unit * k / p.lambda);
  return ((k + imag_unit / (2.0 * p.a) * log_term) * p.a / std::numbers::pi).real();
}

/// Fixed-point iteration on the branch-n form of J+(k) = 0. It contracts with
/// ratio about 1 / (lambda a) and moves first-order seeds onto the right
/// branch for n pi beyond lambda a, where the seed formula is poor.
inline cplx polish_seed(const ModelParams &p, int n, cplx seed, int iterations = 200) {
  cplx k = seed;
  for (int i = 0; i < iterations; ++i) {
    const cplx next =
        n * std::numbers::pi / p.a - imag_unit / (2.0 * p.a) * std::log(1.0 - 2.0 * imag_unit * k / p.lambda);
    const bool done = std::abs(next - k) < 1e-14 * (1.0 + std::abs(k));
    k = next;
    if (done) break;
  }
  return k;
}

namespace detail {

inline double jost_roundoff_floor(const ModelParams &p, cplx k) {
  const double growth = std::abs(p.lambda) * std::exp(-2.0 * k.imag() * p.a);
  const double eps = std::numeric_limits<double>::epsilon();
  return 64.0 * eps * (2.0 * std::abs(k) + growth * (1.0 + 2.0 * std::abs(k) * p.a) + std::abs(p.lambda));
}

inline bool in_fourth_quadrant(cplx k) { return k.real() > 0.0 && k.imag() < 0.0; }

}  // namespace detail

/// Newton refinement of a single zero from `seed`. Throws SolverError on
/// non-convergence or if an iterate leaves the fourth quadrant.
inline ResonancePole refine_pole(const ModelParams &p, cplx seed, const SolverConfig &cfg = {}, int index = 0) {
  p.validate();
  if (!detail::in_fourth_quadrant(seed)) {
    throw SolverError(SolverErrorKind::wrong_quadrant, index, "seed outside the fourth quadrant");
  }
  cplx k = seed;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const cplx j = jost_plus(p, k);
    const cplx dj = jost_plus_derivative(p, k);
    if (dj == 0.0) {
      throw SolverError(SolverErrorKind::non_convergence, index, "vanishing derivative");
    }
    const cplx step = j / dj;
    k -= step;
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) {
      throw SolverError(SolverErrorKind::non_convergence, index, "iterate became non-finite");
    }
    if (!detail::in_fourth_quadrant(k)) {
      throw SolverError(SolverErrorKind::wrong_quadrant, index,
                        "iterate left the fourth quadrant (k = " + std::to_string(k.real()) + " " +
                            std::to_string(k.imag()) + "i)");
    }
    const double residual = std::abs(jost_plus(p, k));
    const double tol = std::max(cfg.residual_tolerance, detail::jost_roundoff_floor(p, k));
    if (std::abs(step) < cfg.step_tolerance * (1.0 + std::abs(k)) && residual < tol) {
      return ResonancePole{index, k, seed, residual};
    }
    // A step at roundoff level with the residual at its floor is as good as it gets.
    if (std::abs(step) < 4.0 * std::numeric_limits<double>::epsilon() * std::abs(k) && residual < tol) {
      return ResonancePole{index, k, seed, residual};
    }
  }
  throw SolverError(SolverErrorKind::non_convergence, index,
                    "no convergence in " + std::to_string(cfg.max_iterations) + " iterations");
}

namespace detail {

inline ResonancePole solve_branch(const ModelParams &p, int n, const SolverConfig &cfg) {
  const cplx seed = seed_pole(p, n);
  cplx start = seed;
  if (p.lambda * p.a > 1.0) start = polish_seed(p, n, seed);
  ResonancePole pole = refine_pole(p, start, cfg, n);
  pole.seed = seed;
  return pole;
}

inline bool on_branch(const ModelParams &p, const ResonancePole &pole, int n) {
  return std::abs(branch_index(p, pole.kappa) - n) < 1e-6;
}

}  // namespace detail

/// The first cfg.n_poles resonance poles, ordered by increasing |kappa|.
/// Each root is checked against its branch index; collisions or off-branch
/// roots are retried from eight perturbed seeds before a duplicate_collapse
/// error is raised.
inline std::vector<ResonancePole> find_poles(const ModelParams &p, const SolverConfig &cfg = {}) {
  p.validate();
  if (!(p.lambda > 0.0)) throw DomainError("find_poles: resonance poles require lambda > 0");
  if (cfg.n_poles == 0) return {};
  if (cfg.n_poles > cfg.soft_cap && cfg.warn) {
    cfg.warn("requested " + std::to_string(cfg.n_poles) + " poles, above the soft cap of " +
             std::to_string(cfg.soft_cap) + "; high poles are dominated by roundoff in J+");
  }
  const int n_max = static_cast<int>(cfg.n_poles);
  if (cfg.warn && p.lambda * p.a < 10.0) {
    cfg.warn("lambda a < 10: first-order pole seeds are unreliable in this regime");
  } else if (cfg.warn && n_max * std::numbers::pi > p.lambda * p.a) {
    cfg.warn("seeds for n > lambda a / pi are outside the first-order regime; polished by fixed-point iteration");
  }

  std::vector<ResonancePole> poles;
  poles.reserve(cfg.n_poles);
  for (int n = 1; n <= n_max; ++n) {
    auto collides = [&](const ResonancePole &cand) {
      return std::any_of(poles.begin(), poles.end(), [&](const ResonancePole &q) {
        return std::abs(q.kappa - cand.kappa) < cfg.duplicate_radius;
      });
    };
    ResonancePole pole;
    bool accepted = false;
    bool converged_somewhere = false;
    std::optional<SolverError> first_error;
    auto attempt = [&](auto &&solve) {
      try {
        pole = solve();
        converged_somewhere = true;
        accepted = detail::on_branch(p, pole, n) && !collides(pole);
      } catch (const SolverError &e) {
        if (!first_error) first_error = e;
      }
    };
    attempt([&] { return detail::solve_branch(p, n, cfg); });
    if (!accepted) {
      const cplx base = polish_seed(p, n, seed_pole(p, n));
      const double radius = std::numbers::pi / (2.0 * p.lambda * p.a * p.a);
      for (int j = 0; j < 8 && !accepted; ++j) {
        const cplx trial = base + std::polar(radius, 2.0 * std::numbers::pi * j / 8.0);
        attempt([&] {
          ResonancePole r = refine_pole(p, trial, cfg, n);
          r.seed = seed_pole(p, n);
          return r;
        });
      }
      if (!accepted) {
        if (!converged_somewhere && first_error) throw *first_error;
        throw SolverError(SolverErrorKind::duplicate_collapse, n,
                          "no distinct root on this branch after perturbed restarts");
      }
    }
    poles.push_back(pole);
  }
  std::sort(poles.begin(), poles.end(),
            [](const ResonancePole &x, const ResonancePole &y) { return std::abs(x.kappa) < std::abs(y.kappa); });
  return poles;
}

inline std::vector<ResonanceStateData> make_resonance_states(const Model &m, const std::vector<ResonancePole> &poles) {
  std::vector<ResonanceStateData> states;
  states.reserve(poles.size());
  for (const auto &pole : poles) states.push_back(make_resonance_state(m, pole));
  return states;
}

}  // namespace bornres
