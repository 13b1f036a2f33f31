#pragma once

// Radial s-wave delta-shell potential V(r) = lambda delta(r - a) in units
// hbar = 2m = 1 (E = k^2): Jost function, scattering states, initial state
// overlaps and resonance (Gamow) state data.

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "bornres/errors.hpp"
#include "bornres/quadrature.hpp"
#include "bornres/special_functions.hpp"

namespace bornres {

struct ModelParams {
  double lambda = 100.0;  // shell strength, 1/length
  double a = 1.0;         // shell radius

  void validate() const {
    if (!std::isfinite(lambda) || lambda < 0.0) throw DomainError("model: lambda must be finite and non-negative");
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("model: a must be positive and finite");
  }
};

namespace detail {

// sin(p a) / p, continuous at p = 0.
inline cplx sinc_scaled(cplx p, double a) {
  const cplx x = p * a;
  if (std::abs(x) < 1e-4) {
    const cplx x2 = x * x;
    return a * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0))));
  }
  return std::sin(x) / p;
}

}  // namespace detail

/// Int_0^a sin(p r) sin(q r) dr for complex p, q.
inline cplx sine_product_integral(cplx p, cplx q, double a) {
  return 0.5 * (detail::sinc_scaled(p - q, a) - detail::sinc_scaled(p + q, a));
}

/// Initial wavefunction Psi(r), supported on [0, a]. The box ground state
/// sqrt(2/a) sin(pi r / a) has closed-form overlaps; any other real profile
/// can be supplied as a function and its overlaps are computed numerically.
class InitialState {
 public:
  static InitialState box_ground_state(double a) {
    if (!(a > 0.0)) throw DomainError("initial state: a must be positive");
    InitialState s;
    s.a_ = a;
    s.name_ = "box_ground_state";
    s.closed_form_ = true;
    s.profile_ = [a](double r) { return std::sqrt(2.0 / a) * std::sin(std::numbers::pi * r / a); };
    return s;
  }

  static InitialState from_function(std::function<double(double)> profile, double a, std::string name,
                                    std::size_t gauss_order = 64) {
    if (!(a > 0.0)) throw DomainError("initial state: a must be positive");
    if (!profile) throw std::invalid_argument("initial state: empty profile");
    InitialState s;
    s.a_ = a;
    s.name_ = std::move(name);
    s.closed_form_ = false;
    s.profile_ = std::move(profile);
    s.rule_ = std::make_shared<GaussLegendreRule>(gauss_legendre(gauss_order));
    return s;
  }

  [[nodiscard]] double operator()(double r) const {
    if (r < 0.0 || r > a_) return 0.0;
    return profile_(r);
  }

  [[nodiscard]] double radius() const { return a_; }
  [[nodiscard]] bool has_closed_form() const { return closed_form_; }
  [[nodiscard]] const std::string &name() const { return name_; }

  /// Int_0^a Psi(r) sin(q r) dr for complex q.
  [[nodiscard]] cplx sine_overlap(cplx q) const {
    if (closed_form_) {
      const cplx s{std::numbers::pi / a_, 0.0};
      return std::sqrt(2.0 / a_) * sine_product_integral(s, q, a_);
    }
    // Enough panels to keep several nodes per half-oscillation of sin(q r).
    const double oscillations = std::abs(q.real()) * a_ / std::numbers::pi;
    const auto panels = static_cast<std::size_t>(4.0 + oscillations / 4.0);
    return integrate_fixed([this, q](double r) { return profile_(r) * std::sin(q * r); }, 0.0, a_,
                           *rule_, panels);
  }

  [[nodiscard]] double norm_squared() const {
    if (closed_form_) return 1.0;
    return integrate_fixed([this](double r) { return profile_(r) * profile_(r); }, 0.0, a_, *rule_, 8);
  }

 private:
  InitialState() = default;

  double a_ = 1.0;
  std::string name_;
  bool closed_form_ = false;
  std::function<double(double)> profile_;
  std::shared_ptr<const GaussLegendreRule> rule_;
};

struct Model {
  ModelParams params;
  InitialState initial = InitialState::box_ground_state(1.0);

  static Model delta_shell(double lambda, double a) {
    Model m{{lambda, a}, InitialState::box_ground_state(a)};
    m.params.validate();
    return m;
  }
};

// ---------------------------------------------------------------------------
// Jost function and scattering solutions.

/// J+(k) = 2ik + lambda (e^{2ika} - 1). Zeros in the lower half plane are the
/// resonance poles. J+(0) = 0 for every lambda.
inline cplx jost_plus(const ModelParams &p, cplx k) {
  return 2.0 * imag_unit * k + p.lambda * (std::exp(2.0 * imag_unit * k * p.a) - 1.0);
}

inline cplx jost_plus_derivative(const ModelParams &p, cplx k) {
  return 2.0 * imag_unit + 2.0 * imag_unit * p.a * p.lambda * std::exp(2.0 * imag_unit * k * p.a);
}

/// S(k) = -conj(J+(k)) / J+(k) for real k != 0. |S| = 1 and S = 1 at lambda = 0.
inline cplx s_matrix(const ModelParams &p, double k) {
  if (k == 0.0) throw DomainError("s_matrix: k = 0 is a zero of the Jost function");
  const cplx j = jost_plus(p, k);
  if (j == 0.0) throw DomainError("s_matrix: Jost function vanishes at real k");
  return -std::conj(j) / j;
}

/// Outgoing scattering state psi+(k, r), normalised to delta(k - k').
/// Inside: sqrt(2/pi) 2ik sin(kr) / J+(k). Outside:
/// sqrt(2/pi) (i/2) [e^{-ikr} - S(k) e^{ikr}].
inline cplx continuum_wavefunction(const ModelParams &p, double k, double r) {
  if (r < 0.0) throw DomainError("continuum_wavefunction: r must be non-negative");
  if (k == 0.0) return {0.0, 0.0};
  const double norm = std::sqrt(2.0 / std::numbers::pi);
  if (r < p.a) {
    return norm * 2.0 * imag_unit * k * std::sin(k * r) / jost_plus(p, k);
  }
  const cplx s = s_matrix(p, k);
  return norm * 0.5 * imag_unit * (std::exp(-imag_unit * k * r) - s * std::exp(imag_unit * k * r));
}

/// Born amplitude C(k) = Int psi+*(k, r) Psi(r) dr of the initial state.
inline cplx born_coefficient_continuum(const Model &m, double k) {
  if (k == 0.0) return {0.0, 0.0};
  const cplx j = jost_plus(m.params, k);
  const double norm = std::sqrt(2.0 / std::numbers::pi);
  return norm * (-2.0 * imag_unit * k) / std::conj(j) * m.initial.sine_overlap(k);
}

inline double born_density_continuum(const Model &m, double k) {
  return std::norm(born_coefficient_continuum(m, k));
}

/// Int_K^inf |C(k)|^2 dk for a cutoff K well above lambda and pi/a.
/// For the box state this is the averaged large-k expansion of
/// 16 s^2 k^2 sin^2(ka) / (pi a |J+|^2 (k^2 - s^2)^2), s = pi/a; other
/// states assume k^-4 decay fitted over a few periods at K.
inline TailEstimate<double> born_density_tail(const Model &m, double cutoff) {
  const double a = m.params.a;
  const double lam = std::abs(m.params.lambda);
  const double kc = cutoff;
  if (m.initial.has_closed_form()) {
    const double s = std::numbers::pi / a;
    const double s2 = s * s;
    const double pref = 4.0 * s2 / (std::numbers::pi * a);
    const double k3 = kc * kc * kc;
    const double k5 = k3 * kc * kc;
    const double k7 = k5 * kc * kc;
    const double inv_quartic = 1.0 / (3.0 * k3) + 2.0 * s2 / (5.0 * k5) + 3.0 * s2 * s2 / (7.0 * k7);
    const double inv_sextic = 1.0 / (5.0 * k5) + 2.0 * s2 / (7.0 * k7);
    TailEstimate<double> out;
    out.value = pref * (0.5 * inv_quartic - lam * lam / 8.0 * inv_sextic);
    // Unaveraged oscillatory parts and the next order in lambda / K.
    const double k4 = kc * kc * kc * kc;
    out.error_estimate =
        pref * ((1.0 + lam / kc) / (a * k4) + std::pow(lam / kc, 3) / (3.0 * k3) + 1.0 / (9.0 * k7));
    return out;
  }
  const double period = std::numbers::pi / a;
  constexpr int samples = 256;
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double k = kc + 4.0 * period * (i + 0.5) / samples;
    acc += born_density_continuum(m, k) * k * k * k * k;
  }
  const double c4 = acc / samples;
  TailEstimate<double> out;
  out.value = c4 / (3.0 * kc * kc * kc);
  out.error_estimate = 0.2 * out.value + 1e-16;
  return out;
}

// ---------------------------------------------------------------------------
// Resonance (Gamow) states.

struct ResonancePole {
  int n = 0;           // branch index; negative for the mirror pole -conj(kappa_n)
  cplx kappa{};        // alpha - i beta
  cplx seed{};         // starting point of the refinement
  double jost_residual = 0.0;

  [[nodiscard]] double alpha() const { return kappa.real(); }
  [[nodiscard]] double beta() const { return -kappa.imag(); }
  [[nodiscard]] cplx energy() const { return kappa * kappa; }
  /// Decay rate -2 Im(kappa^2) = 4 alpha beta.
  [[nodiscard]] double decay_rate() const { return -2.0 * energy().imag(); }
  [[nodiscard]] double lifetime() const { return 1.0 / decay_rate(); }
};

/// Everything the expansions need about one resonance state
/// u(r) = A sin(kappa r) (r <= a), u(a) e^{i kappa (r - a)} (r >= a).
struct ResonanceStateData {
  ResonancePole pole;
  double a = 1.0;
  cplx normalization{};   // A
  cplx edge_value{};      // u(a)
  cplx overlap{};         // Int u(r) Psi(r) dr
  cplx dual_overlap{};    // Int Psi*(r) u(r) dr; equals overlap for a real initial state
  double interior_norm = 0.0;  // Int_0^a |u|^2

  [[nodiscard]] cplx kappa() const { return pole.kappa; }

  [[nodiscard]] cplx operator()(double r) const {
    if (r < 0.0) throw DomainError("resonance state: r must be non-negative");
    if (r <= a) return normalization * std::sin(pole.kappa * r);
    return edge_value * std::exp(imag_unit * pole.kappa * (r - a));
  }

  /// Mirror state at -conj(kappa): u_{-n}(r) = conj(u_n(r)).
  [[nodiscard]] ResonanceStateData mirror() const {
    ResonanceStateData m = *this;
    m.pole.n = -pole.n;
    m.pole.kappa = -std::conj(pole.kappa);
    m.pole.seed = -std::conj(pole.seed);
    m.normalization = -std::conj(normalization);
    m.edge_value = std::conj(edge_value);
    m.overlap = std::conj(overlap);
    m.dual_overlap = std::conj(dual_overlap);
    return m;
  }
};

/// A = [2 lambda / (lambda a + e^{-2 i kappa a})]^{1/2}, principal branch.
inline cplx resonance_normalization(const ModelParams &p, cplx kappa) {
  return std::sqrt(2.0 * p.lambda / (p.lambda * p.a + std::exp(-2.0 * imag_unit * kappa * p.a)));
}

inline cplx resonance_state(const ResonanceStateData &s, double r) { return s(r); }

/// u'(r) on either side of the shell; at r = a, `outside` picks the one-sided limit.
inline cplx resonance_state_derivative(const ResonanceStateData &s, double r, bool outside) {
  const cplx k = s.pole.kappa;
  if (r < s.a || (r == s.a && !outside)) return s.normalization * k * std::cos(k * r);
  return imag_unit * k * s.edge_value * std::exp(imag_unit * k * (r - s.a));
}

/// Int_0^a |u(r)|^2 dr = |A|^2 / 4 [sinh(2 beta a) / beta - sin(2 alpha a) / alpha].
inline double interior_norm_in(const ResonanceStateData &s) {
  const double alpha = s.pole.alpha();
  const double beta = s.pole.beta();
  const double a = s.a;
  const double hyper = beta == 0.0 ? 2.0 * a : std::sinh(2.0 * beta * a) / beta;
  const double trig = alpha == 0.0 ? 2.0 * a : std::sin(2.0 * alpha * a) / alpha;
  return std::norm(s.normalization) / 4.0 * (hyper - trig);
}

/// Int u(r) Psi(r) dr = A Int_0^a sin(kappa r) Psi(r) dr.
inline cplx overlap_cn(const Model &m, cplx normalization, cplx kappa) {
  return normalization * m.initial.sine_overlap(kappa);
}

inline ResonanceStateData make_resonance_state(const Model &m, const ResonancePole &pole) {
  ResonanceStateData s;
  s.pole = pole;
  s.a = m.params.a;
  s.normalization = resonance_normalization(m.params, pole.kappa);
  s.edge_value = s.normalization * std::sin(pole.kappa * m.params.a);
  s.overlap = overlap_cn(m, s.normalization, pole.kappa);
  s.dual_overlap = s.overlap;
  s.interior_norm = interior_norm_in(s);
  return s;
}

/// Residual of the Zel'dovich-regularised normalisation
/// Int_0^a u^2 dr + i u(a)^2 / (2 kappa) - 1.
inline cplx normalization_residual(const ResonanceStateData &s) {
  const cplx k = s.pole.kappa;
  const cplx a2 = s.normalization * s.normalization;
  const cplx interior = a2 * (s.a / 2.0 - std::sin(2.0 * k * s.a) / (4.0 * k));
  return interior + imag_unit * s.edge_value * s.edge_value / (2.0 * k) - 1.0;
}

/// beta - |u(a)|^2 / (2 I): zero when the width equals the flux through the shell
/// over twice the interior probability.
inline double width_identity_residual(const ResonanceStateData &s) {
  return s.pole.beta() - std::norm(s.edge_value) / (2.0 * s.interior_norm);
}

}  // namespace bornres
