#pragma once

// Time-dependent wavefunction, survival amplitude and nonescape probability
// in the resonance and continuum bases, and the two-regime asymptotic form.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bornres/compensated_sum.hpp"
#include "bornres/model.hpp"
#include "bornres/quadrature.hpp"
#include "bornres/resonance_expansion.hpp"
#include "bornres/special_functions.hpp"

namespace bornres {

enum class Basis { continuum, resonance, asymptotic };

inline const char *to_string(Basis b) {
  switch (b) {
    case Basis::continuum: return "continuum";
    case Basis::resonance: return "resonance";
    case Basis::asymptotic: return "asymptotic";
  }
  return "unknown";
}

struct EvolutionSample {
  std::optional<double> r;
  double t = 0.0;
  cplx value{};
  Basis basis = Basis::resonance;
};

/// M(y_n) for a state at offset x = r - a (x = 0 gives M(y_n°)), with the
/// t -> 0+ limit at t = 0.
inline cplx propagator(cplx kappa, double x, double t) {
  if (t < 0.0) throw DomainError("propagator: requires t >= 0");
  if (t == 0.0) return moshinsky_limit_at_zero(x, kappa);
  return moshinsky_m({x, kappa, t});
}

// ---------------------------------------------------------------------------
// Resonance basis.

/// Psi(r, t) = Sum_{+-n} C_n u_n(r) M(y_n°) for r <= a and
/// Sum_{+-n} C_n u_n(a) M(y_n) for r >= a.
inline cplx wavefunction_resonance(const Model &m, const std::vector<ResonanceStateData> &states, double r,
                                   double t) {
  if (!(t > 0.0)) throw DomainError("wavefunction_resonance: requires t > 0");
  if (r < 0.0) throw DomainError("wavefunction_resonance: requires r >= 0");
  const double a = m.params.a;
  CompensatedComplexSum sum;
  for (const auto &s : states) {
    for (const auto &state : {s, s.mirror()}) {
      if (r <= a) {
        sum += state.overlap * state(r) * propagator(state.kappa(), 0.0, t);
      } else {
        sum += state.overlap * state.edge_value * propagator(state.kappa(), r - a, t);
      }
    }
  }
  return sum.value();
}

/// Correction for the finite pole set in the survival amplitude.
///
/// The truncated sum Sum_{+-n} C_n Cbar_n M(y_n°) carries a spurious t^{-1/2}
/// term proportional to Sum_{+-n} C_n Cbar_n / kappa_n, which the omitted poles
/// would cancel. `effective_pole` adds one term W M(0, -iQ, t) that restores
/// A(0) = 1 (W = 2 (1 - Re Sum C_n Cbar_n)) and cancels that t^{-1/2} term
/// (Q = -W / s with Sum C_n Cbar_n / kappa_n = i s).
enum class TailClosure { none, effective_pole };

struct EffectivePole {
  cplx kappa{};
  double weight = 0.0;
};

inline EffectivePole effective_tail_pole(const std::vector<ResonanceStateData> &states) {
  if (states.empty()) throw std::invalid_argument("effective_tail_pole: no resonance states");
  CompensatedSum strength;
  CompensatedSum inverse_moment;  // imaginary part of the signed sum of C Cbar / kappa
  for (const auto &s : states) {
    const cplx c2 = s.overlap * s.dual_overlap;
    strength += c2.real();
    inverse_moment += 2.0 * (c2 / s.kappa()).imag();
  }
  const double w = 2.0 * (1.0 - strength.value());
  const double s_im = inverse_moment.value();
  EffectivePole e;
  if (w * s_im < 0.0) {
    e.weight = w;
    e.kappa = {0.0, w / s_im};  // -i Q with Q = -w / s > 0
  } else {
    // Missing strength has the wrong sign to cancel the defect with a
    // lower-half-plane pole: keep A(0) as is and place the pole beyond the last one.
    const double q = std::abs(states.back().kappa());
    e.kappa = {0.0, -q};
    e.weight = -q * s_im;
  }
  return e;
}

/// A(t) = Sum_{+-n} C_n Cbar_n M(y_n°), optionally with the effective tail pole.
inline cplx survival_amplitude_resonance(const std::vector<ResonanceStateData> &states, double t,
                                         TailClosure closure = TailClosure::none) {
  if (t < 0.0) throw DomainError("survival_amplitude: requires t >= 0");
  CompensatedComplexSum sum;
  for (const auto &s : states) {
    const cplx c2 = s.overlap * s.dual_overlap;
    sum += c2 * propagator(s.kappa(), 0.0, t);
    const auto mirror = s.mirror();
    sum += std::conj(c2) * propagator(mirror.kappa(), 0.0, t);
  }
  if (closure == TailClosure::effective_pole) {
    const EffectivePole e = effective_tail_pole(states);
    sum += e.weight * propagator(e.kappa, 0.0, t);
  }
  return sum.value();
}

// ---------------------------------------------------------------------------
// Continuum basis (quadrature oracles).

struct ContinuumOptions {
  QuadratureSpec quadrature{1e-10, 1e-10, 4'000'000, TailPolicy::asymptotic_correction, 0.0};
  ChirpWindow window{};
  // Cutoff for t = 0, where nothing oscillates in k beyond the state itself.
  double static_cutoff = 2000.0;
};

/// A(t) = Int_0^inf |C(k)|^2 e^{-ik^2 t} dk.
inline QuadratureResult<cplx> survival_amplitude_continuum(const Model &m, double t,
                                                            const ContinuumOptions &opt = {}) {
  if (t < 0.0) throw DomainError("survival_amplitude: requires t >= 0");
  auto density = [&m](double k) { return born_density_continuum(m, k); };
  if (t == 0.0) {
    auto tail = [&m](double k) { return born_density_tail(m, k); };
    auto r = integrate_semi_infinite(density, tail, opt.quadrature, opt.static_cutoff);
    return {cplx(r.value), r.error_estimate, r.panels, r.cutoff};
  }
  return integrate_chirp_semi_infinite(density, ChirpPhase{0.0, t}, opt.quadrature, opt.window);
}

namespace detail {

// psi+(k, r) = P(k) e^{ikr} + Q(k) e^{-ikr} on either side of the shell.
struct PlaneWaveSplit {
  cplx forward;
  cplx backward;
};

inline PlaneWaveSplit plane_wave_split(const ModelParams &p, double k, double r) {
  const double norm = std::sqrt(2.0 / std::numbers::pi);
  if (k == 0.0) return {0.0, 0.0};
  if (r < p.a) {
    const cplx f = norm * k / jost_plus(p, k);
    return {f, -f};
  }
  const cplx s = s_matrix(p, k);
  return {-norm * 0.5 * imag_unit * s, norm * 0.5 * imag_unit};
}

}  // namespace detail

/// Psi(r, t) = Int_0^inf C(k) psi+(k, r) e^{-ik^2 t} dk.
///
/// For t > 0 the e^{+-ikr} parts of psi+ are integrated as separate chirps.
/// At t = 0 the integral is truncated at `static_cutoff`; for the box state
/// the remainder uses the large-k form
/// C psi+ ~ -(sqrt2 s / (pi sqrt a)) [cos((a - r)k) - cos((a + r)k)] / k^2, s = pi/a.
inline QuadratureResult<cplx> wavefunction_continuum(const Model &m, double r, double t,
                                                      const ContinuumOptions &opt = {}) {
  if (t < 0.0) throw DomainError("wavefunction_continuum: requires t >= 0");
  if (r < 0.0) throw DomainError("wavefunction_continuum: requires r >= 0");
  const ModelParams &p = m.params;
  if (t == 0.0) {
    auto integrand = [&](double k) -> cplx {
      if (k == 0.0) return 0.0;
      return born_coefficient_continuum(m, k) * continuum_wavefunction(p, k, r);
    };
    const double cutoff = opt.static_cutoff;
    QuadratureSpec spec = opt.quadrature;
    spec.oscillation_period_hint = std::numbers::pi / std::max(p.a, r + p.a);
    auto body = integrate(integrand, 0.0, cutoff, spec);
    if (m.initial.has_closed_form() && r < p.a) {
      const double a = p.a;
      const double s = std::numbers::pi / a;
      const double amp = -std::sqrt(2.0) * s / (std::numbers::pi * std::sqrt(a));
      // Int_K^inf cos(ck) / k^2 dk by integration by parts, to O(K^-4).
      auto cos_tail = [cutoff](double c) {
        if (c == 0.0) return 1.0 / cutoff;
        const double kc = cutoff;
        return -std::sin(c * kc) / (c * kc * kc) + 2.0 * std::cos(c * kc) / (c * c * kc * kc * kc);
      };
      body.value += amp * (cos_tail(a - r) - cos_tail(a + r));
      // Dropped orders: lambda / k from 4k^2 / |J+|^2, s^2 / k^2, and the next parts term.
      const double lam = std::abs(p.lambda);
      const double c_min = std::max(1e-3, a - r);
      const double k3 = cutoff * cutoff * cutoff;
      body.error_estimate +=
          std::abs(amp) * (lam / (c_min * k3) + s * s / k3 + 6.0 / (std::pow(c_min, 3) * k3 * cutoff));
    } else {
      // Crude bound on the truncated oscillatory remainder.
      body.error_estimate += 2.0 * cutoff * std::abs(integrand(cutoff));
    }
    return body;
  }
  auto forward = [&](double k) -> cplx {
    return born_coefficient_continuum(m, k) * detail::plane_wave_split(p, k, r).forward;
  };
  auto backward = [&](double k) -> cplx {
    return born_coefficient_continuum(m, k) * detail::plane_wave_split(p, k, r).backward;
  };
  auto f = integrate_chirp_semi_infinite(forward, ChirpPhase{r, t}, opt.quadrature, opt.window);
  auto b = integrate_chirp_semi_infinite(backward, ChirpPhase{-r, t}, opt.quadrature, opt.window);
  f.value += b.value;
  f.error_estimate += b.error_estimate;
  f.panels += b.panels;
  return f;
}

// ---------------------------------------------------------------------------
// Overlap matrix and nonescape probability.

/// I_{nl} = Int_0^a u_l^*(r) u_n(r) dr over the signed states
/// (ordering of signed_states: 1, -1, 2, -2, ...).
class OverlapMatrix {
 public:
  OverlapMatrix() = default;

  explicit OverlapMatrix(const std::vector<ResonanceStateData> &states) : signed_(signed_states(states)) {
    const std::size_t n = signed_.size();
    data_.assign(n * n, cplx{});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = i; l < n; ++l) {
        const auto &un = signed_[i];
        const auto &ul = signed_[l];
        cplx v = std::conj(ul.normalization) * un.normalization *
                 sine_product_integral(std::conj(ul.kappa()), un.kappa(), un.a);
        if (i == l) v = {v.real(), 0.0};
        data_[i * n + l] = v;
        data_[l * n + i] = std::conj(v);
      }
    }
  }

  [[nodiscard]] std::size_t size() const { return signed_.size(); }
  [[nodiscard]] cplx operator()(std::size_t n, std::size_t l) const { return data_[n * size() + l]; }
  [[nodiscard]] const std::vector<ResonanceStateData> &states() const { return signed_; }

  [[nodiscard]] double hermiticity_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t l = 0; l < size(); ++l)
        worst = std::max(worst, std::abs((*this)(i, l) - std::conj((*this)(l, i))));
    return worst;
  }

 private:
  std::vector<ResonanceStateData> signed_;
  std::vector<cplx> data_;
};

inline OverlapMatrix overlap_matrix(const Model &, const std::vector<ResonanceStateData> &states) {
  if (states.empty()) throw std::invalid_argument("overlap_matrix: no resonance states");
  return OverlapMatrix(states);
}

/// P(t) = Sum_{n,l} C_n C_l^* I_{nl} M(y_n°) M^*(y_l°), unclamped.
inline double nonescape_probability_resonance(const OverlapMatrix &overlaps, double t) {
  if (t < 0.0) throw DomainError("nonescape_probability: requires t >= 0");
  const auto &st = overlaps.states();
  std::vector<cplx> v(st.size());
  for (std::size_t i = 0; i < st.size(); ++i) v[i] = st[i].overlap * propagator(st[i].kappa(), 0.0, t);
  CompensatedSum sum;
  for (std::size_t i = 0; i < st.size(); ++i) {
    sum += (std::norm(v[i]) * overlaps(i, i)).real();
    for (std::size_t l = i + 1; l < st.size(); ++l) {
      sum += 2.0 * (v[i] * std::conj(v[l]) * overlaps(i, l)).real();
    }
  }
  return sum.value();
}

/// Continuum-basis P(t) = Int_0^a |Psi(r, t)|^2 dr with Psi from
/// wavefunction_continuum at Gauss-Legendre nodes in r. Oracle-grade only.
inline QuadratureResult<double> nonescape_probability_continuum(const Model &m, double t, std::size_t r_nodes = 24,
                                                                 const ContinuumOptions &opt = {}) {
  const auto rule = gauss_legendre(r_nodes);
  const double a = m.params.a;
  CompensatedSum sum;
  double err = 0.0;
  std::size_t panels = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = 0.5 * a * (rule.nodes[i] + 1.0);
    const auto psi = wavefunction_continuum(m, r, t, opt);
    const double w = 0.5 * a * rule.weights[i];
    sum += w * std::norm(psi.value);
    err += w * 2.0 * std::abs(psi.value) * psi.error_estimate;
    panels += psi.panels;
  }
  return {sum.value(), err, panels, 0.0};
}

// ---------------------------------------------------------------------------
// Asymptotic form.

struct AsymptoticParts {
  cplx exponential{};  // Sum_{n>=1} C_n Cbar_n e^{-i kappa_n^2 t}
  cplx power_law{};    // coefficient times t^{-3/2}
};

/// Exponential and long-time parts of A(t):
/// Sum_{n>=1} C_n Cbar_n e^{-i kappa_n^2 t} - i / (2 (pi i)^{1/2}) Im{Sum C_n Cbar_n / kappa_n^3} t^{-3/2}.
inline AsymptoticParts survival_asymptotic_parts(const std::vector<ResonanceStateData> &states, double t) {
  if (!(t > 0.0)) throw DomainError("survival_asymptotic: requires t > 0");
  CompensatedComplexSum expo;
  CompensatedSum moment;
  for (const auto &s : states) {
    const cplx c2 = s.overlap * s.dual_overlap;
    const cplx k = s.kappa();
    expo += c2 * std::exp(-imag_unit * k * k * t);
    moment += (c2 / (k * k * k)).imag();
  }
  const cplx prefactor = -imag_unit / (2.0 * std::sqrt(std::numbers::pi * imag_unit));
  return {expo.value(), prefactor * moment.value() * std::pow(t, -1.5)};
}

inline cplx survival_asymptotic(const std::vector<ResonanceStateData> &states, double t) {
  const auto parts = survival_asymptotic_parts(states, t);
  return parts.exponential + parts.power_law;
}

/// Survival amplitude in the requested basis. The continuum basis returns the
/// quadrature value; use survival_amplitude_continuum for its error estimate.
inline cplx survival_amplitude(const Model &m, const std::vector<ResonanceStateData> &states, double t, Basis basis,
                               TailClosure closure = TailClosure::none) {
  switch (basis) {
    case Basis::resonance: return survival_amplitude_resonance(states, t, closure);
    case Basis::continuum: return survival_amplitude_continuum(m, t).value;
    case Basis::asymptotic: return survival_asymptotic(states, t);
  }
  throw std::invalid_argument("survival_amplitude: unknown basis");
}

inline double nonescape_probability(const Model &m, const OverlapMatrix &overlaps, double t, Basis basis) {
  switch (basis) {
    case Basis::resonance: return nonescape_probability_resonance(overlaps, t);
    case Basis::continuum: return nonescape_probability_continuum(m, t).value;
    case Basis::asymptotic: break;
  }
  throw std::invalid_argument("nonescape_probability: no asymptotic form");
}

// ---------------------------------------------------------------------------
// Time grids and regime analysis.

/// Geometric grid from t_lo to t_hi with `per_decade` points per decade (both ends included).
inline std::vector<double> geometric_time_grid(double t_lo, double t_hi, double per_decade) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || !(per_decade > 0.0)) {
    throw std::invalid_argument("geometric_time_grid: requires 0 < t_lo < t_hi and per_decade > 0");
  }
  const double decades = std::log10(t_hi / t_lo);
  const auto steps = static_cast<std::size_t>(std::ceil(decades * per_decade - 1e-9));
  std::vector<double> grid;
  grid.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    grid.push_back(t_lo * std::pow(10.0, decades * static_cast<double>(i) / static_cast<double>(steps)));
  }
  grid.back() = t_hi;
  return grid;
}

/// Least-squares slope of y against x.
inline double least_squares_slope(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx.value() / n, my = sy.value() / n;
  CompensatedSum sxy, sxx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy.value() / sxx.value();
}

/// Decay rate from a least-squares fit of log S(t) on the given times.
inline double fit_exponential_rate(const std::vector<double> &times, const std::vector<double> &survival) {
  std::vector<double> logs;
  logs.reserve(survival.size());
  for (double s : survival) {
    if (!(s > 0.0)) throw DomainError("fit_exponential_rate: survival must be positive");
    logs.push_back(std::log(s));
  }
  return -least_squares_slope(times, logs);
}

/// Slope of log S against log t.
inline double loglog_slope(const std::vector<double> &times, const std::vector<double> &survival) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || !(survival[i] > 0.0)) throw DomainError("loglog_slope: values must be positive");
    lx.push_back(std::log(times[i]));
    ly.push_back(std::log(survival[i]));
  }
  return least_squares_slope(lx, ly);
}

/// Time at which |exponential part| = |power-law part| of the asymptotic form,
/// bracketed on a geometric grid over [t_lo, t_hi] and refined by bisection.
/// Returns every crossing found (sign changes of log|exp| - log|power|).
inline std::vector<double> asymptotic_crossovers(const std::vector<ResonanceStateData> &states, double t_lo,
                                                 double t_hi) {
  auto gap = [&states](double t) {
    const auto parts = survival_asymptotic_parts(states, t);
    const double e = std::abs(parts.exponential);
    const double p = std::abs(parts.power_law);
    // Deep in the power-law regime the exponential part underflows to 0.
    if (e == 0.0) return -1e300;
    return std::log(e) - std::log(p);
  };
  const auto grid = geometric_time_grid(t_lo, t_hi, 200.0);
  std::vector<double> roots;
  double prev = gap(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = gap(grid[i]);
    if ((prev > 0.0) != (cur > 0.0)) {
      double lo = grid[i - 1], hi = grid[i];
      const bool lo_positive = prev > 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        if ((gap(mid) > 0.0) == lo_positive) lo = mid; else hi = mid;
      }
      roots.push_back(std::sqrt(lo * hi));
    }
    prev = cur;
  }
  return roots;
}

}  // namespace bornres
