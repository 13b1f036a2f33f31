#pragma once

// Expansions over resonance states. Only fourth-quadrant states are stored;
// every sum runs over the signed set n = +-1..+-N, with the mirror of state n
// produced on the fly by ResonanceStateData::mirror().

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "bornres/compensated_sum.hpp"
#include "bornres/model.hpp"

namespace bornres {

/// Number of fourth-quadrant poles kept; mirror poles are implied.
struct Truncation {
  std::size_t n = 40;
};

inline std::vector<ResonanceStateData> truncate(const std::vector<ResonanceStateData> &states, Truncation t) {
  if (t.n < 1) throw std::invalid_argument("truncation: N must be at least 1");
  if (t.n > states.size()) {
    throw std::invalid_argument("truncation: N = " + std::to_string(t.n) + " exceeds the " +
                                std::to_string(states.size()) + " available poles");
  }
  return {states.begin(), states.begin() + static_cast<std::ptrdiff_t>(t.n)};
}

/// States followed by their mirrors: u_1, u_-1, u_2, u_-2, ...
inline std::vector<ResonanceStateData> signed_states(const std::vector<ResonanceStateData> &states) {
  std::vector<ResonanceStateData> out;
  out.reserve(2 * states.size());
  for (const auto &s : states) {
    out.push_back(s);
    out.push_back(s.mirror());
  }
  return out;
}

class PoleHit : public DomainError {
 public:
  PoleHit(int index, cplx kappa)
      : DomainError("greens_resonance: k coincides with the pole n = " + std::to_string(index)),
        index_(index),
        kappa_(kappa) {}
  [[nodiscard]] int index() const { return index_; }
  [[nodiscard]] cplx kappa() const { return kappa_; }

 private:
  int index_;
  cplx kappa_;
};

namespace detail {

inline void require_nonempty(const std::vector<ResonanceStateData> &states, const char *what) {
  if (states.empty()) throw std::invalid_argument(std::string(what) + ": no resonance states");
}

// (r, r') inside the region where the outgoing Green's function expands over
// resonance states: both in [0, a] and not both on the shell.
inline void require_interior_pair(double r, double r_prime, double a, const char *what) {
  const bool in_range = r >= 0.0 && r_prime >= 0.0 && r <= a && r_prime <= a;
  if (!in_range || (r == a && r_prime == a)) {
    throw DomainError(std::string(what) + ": (r, r') outside the expansion region");
  }
}

}  // namespace detail

/// psi+(k, r) = -sqrt(2/pi) (1/2) e^{-ika} Sum_{+-n} u_n(a) u_n(r) / (k - kappa_n), r < a.
inline cplx continuum_wavefunction_resonance(const Model &m, const std::vector<ResonanceStateData> &states,
                                             double k, double r) {
  const double a = m.params.a;
  if (r < 0.0 || r >= a) throw DomainError("continuum_wavefunction_resonance: requires 0 <= r < a");
  if (!(k > 0.0)) throw DomainError("continuum_wavefunction_resonance: requires k > 0");
  CompensatedComplexSum sum;
  for (const auto &s : states) {
    sum += s.edge_value * s(r) / (k - s.kappa());
    const auto mirror = s.mirror();
    sum += mirror.edge_value * mirror(r) / (k - mirror.kappa());
  }
  return -std::sqrt(2.0 / std::numbers::pi) * 0.5 * std::exp(-imag_unit * k * a) * sum.value();
}

/// C(k) = -[sqrt(2/pi) (1/2) e^{-ika} Sum_{+-n} Cbar_n u_n(a) / (k - kappa_n)]^*.
inline cplx born_coefficient_resonance(const Model &m, const std::vector<ResonanceStateData> &states, double k) {
  if (!(k > 0.0)) throw DomainError("born_coefficient_resonance: requires k > 0");
  CompensatedComplexSum sum;
  for (const auto &s : states) {
    sum += s.dual_overlap * s.edge_value / (k - s.kappa());
    sum += std::conj(s.dual_overlap * s.edge_value) / (k + std::conj(s.kappa()));
  }
  return -std::conj(std::sqrt(2.0 / std::numbers::pi) * 0.5 * std::exp(-imag_unit * k * m.params.a) *
                    sum.value());
}

struct BornSpectrumPoint {
  double k = 0.0;
  double density_continuum = 0.0;
  double density_resonance = 0.0;   // |C(k)|^2 from the resonance amplitude
  double lorentz_direct = 0.0;      // (1/pi) Sum |C_n|^2 I_n beta_n / ((k - alpha_n)^2 + beta_n^2)
  double lorentz_mirror = 0.0;      // same with k + alpha_n
  double interference = 0.0;        // cross terms between distinct signed states

  [[nodiscard]] double decomposition_residual() const {
    return density_resonance - (lorentz_direct + lorentz_mirror + interference);
  }
};

/// Splits |C(k)|^2 over the signed states. With Z_j = Cbar_j u_j(a) / (k - kappa_j),
/// |C|^2 = (1/2pi) |Sum Z_j|^2: the diagonal |Z_j|^2 / 2pi are the Lorentzians
/// and the interference is (1/pi) Re Sum_{i<j} Z_i Z_j^*. The Lorentzian weight
/// |C_n|^2 I_n beta_n / pi is evaluated as |C_n|^2 |u_n(a)|^2 / 2pi, its value
/// under beta = |u(a)|^2 / 2I; this keeps the split exact to roundoff at the
/// peak, where the weight is divided by beta^2.
inline BornSpectrumPoint born_density_decomposition(const Model &m, const std::vector<ResonanceStateData> &states,
                                                    double k) {
  if (!(k > 0.0)) throw DomainError("born_density_decomposition: requires k > 0");
  BornSpectrumPoint p;
  p.k = k;
  p.density_continuum = born_density_continuum(m, k);
  p.density_resonance = std::norm(born_coefficient_resonance(m, states, k));

  CompensatedSum direct, mirror;
  std::vector<cplx> z;
  z.reserve(2 * states.size());
  for (const auto &s : states) {
    const double alpha = s.pole.alpha();
    const double beta = s.pole.beta();
    const double weight = std::norm(s.overlap) * std::norm(s.edge_value) / (2.0 * std::numbers::pi);
    direct += weight / ((k - alpha) * (k - alpha) + beta * beta);
    mirror += weight / ((k + alpha) * (k + alpha) + beta * beta);
    z.push_back(s.dual_overlap * s.edge_value / (k - s.kappa()));
    z.push_back(std::conj(s.dual_overlap * s.edge_value) / (k + std::conj(s.kappa())));
  }
  CompensatedSum cross;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = i + 1; j < z.size(); ++j) cross += (z[i] * std::conj(z[j])).real();
  }
  p.lorentz_direct = direct.value();
  p.lorentz_mirror = mirror.value();
  p.interference = cross.value() / std::numbers::pi;
  return p;
}

struct BornNormIdentity {
  double direct_sum = 0.0;    // Sum_{n>=1} |C_n|^2 I_n
  double interference = 0.0;  // -Re Sum i C_n C_s u_n(a) u_s(a) / (kappa_n + kappa_s)
  double total = 0.0;         // direct_sum + interference; tends to 1
};

/// Int_0^inf |C(k)|^2 dk evaluated term by term over the resonance expansion.
/// The cross-term index set is n >= 1 with s over every signed index except
/// s = -n (that pair is the Lorentzian itself). This is the set for which the
/// total equals the k-integral of born_density_decomposition.
inline BornNormIdentity born_norm_identity(const Model &, const std::vector<ResonanceStateData> &states) {
  detail::require_nonempty(states, "born_norm_identity");
  const auto all = signed_states(states);
  CompensatedSum direct;
  CompensatedSum cross;
  for (std::size_t i = 0; i < all.size(); i += 2) {
    const auto &n = all[i];
    direct += std::norm(n.overlap) * n.interior_norm;
    const cplx xn = n.overlap * n.edge_value;
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (j == i + 1) continue;
      const auto &s = all[j];
      cross += -(imag_unit * xn * s.overlap * s.edge_value / (n.kappa() + s.kappa())).real();
    }
  }
  BornNormIdentity out;
  out.direct_sum = direct.value();
  out.interference = cross.value();
  out.total = out.direct_sum + out.interference;
  return out;
}

/// Re Sum_{n=1..N} C_n Cbar_n; tends to 1 for a unit-norm initial state.
inline double strength_sum(const Model &, const std::vector<ResonanceStateData> &states) {
  detail::require_nonempty(states, "strength_sum");
  CompensatedSum sum;
  for (const auto &s : states) sum += (s.overlap * s.dual_overlap).real();
  return sum.value();
}

/// |Psi(r, 0) - (1/2) Sum_{+-n} u_n(r) C_n| for 0 < r < a.
inline double closure_reconstruct(const Model &m, const std::vector<ResonanceStateData> &states, double r) {
  detail::require_nonempty(states, "closure_reconstruct");
  if (!(r > 0.0 && r < m.params.a)) throw DomainError("closure_reconstruct: requires 0 < r < a");
  // Each mirror term is the conjugate of its partner, so the half-sum is a real part.
  CompensatedSum sum;
  for (const auto &s : states) sum += (s(r) * s.overlap).real();
  return std::abs(m.initial(r) - sum.value());
}

/// (1/2) Sum_{+-n} u_n(r) u_n(r') / kappa_n; tends to 0 with N.
inline cplx sum_rule_residual(const Model &m, const std::vector<ResonanceStateData> &states, double r,
                              double r_prime) {
  detail::require_nonempty(states, "sum_rule_residual");
  detail::require_interior_pair(r, r_prime, m.params.a, "sum_rule_residual");
  CompensatedComplexSum sum;
  for (const auto &s : states) {
    sum += s(r) * s(r_prime) / s.kappa();
    const auto mirror = s.mirror();
    sum += mirror(r) * mirror(r_prime) / mirror.kappa();
  }
  return 0.5 * sum.value();
}

/// G+(r, r'; k) = (1 / 2k) Sum_{+-n} u_n(r) u_n(r') / (k - kappa_n).
inline cplx greens_resonance(const Model &m, const std::vector<ResonanceStateData> &states, cplx k, double r,
                             double r_prime) {
  detail::require_nonempty(states, "greens_resonance");
  detail::require_interior_pair(r, r_prime, m.params.a, "greens_resonance");
  if (k == 0.0) throw DomainError("greens_resonance: k = 0");
  CompensatedComplexSum sum;
  for (const auto &s : states) {
    for (const auto &state : {s, s.mirror()}) {
      const cplx gap = k - state.kappa();
      if (std::abs(gap) < 1e-12 * (1.0 + std::abs(state.kappa()))) throw PoleHit(state.pole.n, state.kappa());
      sum += state(r) * state(r_prime) / gap;
    }
  }
  return sum.value() / (2.0 * k);
}

/// psi+(k, r) from the Green's function: -sqrt(2/pi) k G+(r, a; k) e^{-ika}, r < a.
inline cplx continuum_wavefunction_from_greens(const Model &m, const std::vector<ResonanceStateData> &states,
                                               double k, double r) {
  const double a = m.params.a;
  return -std::sqrt(2.0 / std::numbers::pi) * k * greens_resonance(m, states, k, r, a) *
         std::exp(-imag_unit * k * a);
}

}  // namespace bornres
