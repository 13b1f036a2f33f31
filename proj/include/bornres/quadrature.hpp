#pragma once

// Adaptive Gauss-Kronrod integration with oscillation-aware panelling and
// analytic tails for semi-infinite and real-line oscillatory integrals.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "bornres/compensated_sum.hpp"

namespace bornres {

enum class TailPolicy {
  asymptotic_correction,  // finite window plus an analytic tail estimate
  variable_map,           // k = u / (1 - u) onto [0, 1)
};

struct QuadratureSpec {
  double abs_tolerance = 1e-12;
  double rel_tolerance = 1e-10;
  std::size_t max_panels = 2'000'000;
  TailPolicy tail_policy = TailPolicy::asymptotic_correction;
  // Shortest oscillation period of the integrand in k; panels are kept at or
  // below half of it. Zero means no hint.
  double oscillation_period_hint = 0.0;
};

template <class T>
struct QuadratureResult {
  T value{};
  double error_estimate = 0.0;
  std::size_t panels = 0;
  double cutoff = 0.0;  // end of the explicitly integrated window, if any
};

// Thrown when the panel budget runs out before the tolerance is met. Carries
// the best estimate so callers can decide whether it is still usable.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string &what, std::complex<double> best_value, double error_estimate)
      : std::runtime_error(what), best_value_(best_value), error_estimate_(error_estimate) {}

  [[nodiscard]] std::complex<double> best_value() const { return best_value_; }
  [[nodiscard]] double error_estimate() const { return error_estimate_; }

 private:
  std::complex<double> best_value_;
  double error_estimate_;
};

template <class T>
struct TailEstimate {
  T value{};
  double error_estimate = 0.0;
};

namespace detail {

template <class T>
double magnitude(const T &v) {
  return std::abs(v);
}

template <class T>
std::complex<double> as_complex(const T &v) {
  return std::complex<double>(v);
}

template <class T>
struct Accumulator;

template <>
struct Accumulator<double> {
  CompensatedSum sum;
  void add(double v) { sum += v; }
  double value() const { return sum.value(); }
};

template <>
struct Accumulator<std::complex<double>> {
  CompensatedComplexSum sum;
  void add(std::complex<double> v) { sum += v; }
  std::complex<double> value() const { return sum.value(); }
};

// QUADPACK 15-point Kronrod nodes; odd indices are the embedded 7-point Gauss nodes.
inline constexpr std::array<double, 8> kronrod_nodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  T value{};
  double error = 0.0;
  double abs_integral = 0.0;
  bool operator<(const Panel &other) const { return error < other.error; }
};

template <class T, class F>
Panel<T> gauss_kronrod_15(F &f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const T f_center = f(center);
  T kronrod = f_center * kronrod_weights[7];
  T gauss = f_center * gauss_weights[3];
  double abs_sum = magnitude(f_center) * kronrod_weights[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_nodes[j];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    kronrod += (f1 + f2) * kronrod_weights[j];
    abs_sum += (magnitude(f1) + magnitude(f2)) * kronrod_weights[j];
    if (j % 2 == 1) gauss += (f1 + f2) * gauss_weights[j / 2];
  }
  Panel<T> p;
  p.lo = lo;
  p.hi = hi;
  p.value = kronrod * half;
  p.error = magnitude(kronrod - gauss) * std::abs(half);
  p.abs_integral = abs_sum * std::abs(half);
  return p;
}

// Adaptive refinement over [lo, hi]. `max_width(k)` bounds the width of the
// initial panel starting at k; the largest-error panel is then bisected until
// the total error estimate meets the tolerance (never below the roundoff floor).
template <class T, class F, class W>
QuadratureResult<T> adaptive(F &f, double lo, double hi, const QuadratureSpec &spec, W &&max_width,
                             double budget_tolerance) {
  std::priority_queue<Panel<T>> queue;
  double k = lo;
  std::size_t panels = 0;
  while (k < hi) {
    double w = std::min(max_width(k), hi - k);
    if (!(w > 0.0)) w = hi - k;
    double next = k + w;
    if (hi - next < 1e-3 * w) next = hi;
    queue.push(gauss_kronrod_15<T>(f, k, next));
    ++panels;
    if (panels > spec.max_panels) {
      throw QuadratureError("quadrature: initial panelling exceeds the panel budget", {}, 0.0);
    }
    k = next;
  }

  auto totals = [&queue] {
    Accumulator<T> acc;
    CompensatedSum err;
    CompensatedSum abs_total;
    // priority_queue exposes no iteration; copy is acceptable at this size.
    auto copy = queue;
    while (!copy.empty()) {
      acc.add(copy.top().value);
      err += copy.top().error;
      abs_total += copy.top().abs_integral;
      copy.pop();
    }
    return std::tuple{acc.value(), err.value(), abs_total.value()};
  };

  T value{};
  double error = 0.0;
  double abs_total = 0.0;
  std::tie(value, error, abs_total) = totals();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto target = [&](const T &v, double abs_int) {
    return std::max({budget_tolerance, spec.rel_tolerance * magnitude(v), 50.0 * eps * abs_int});
  };

  std::size_t since_resync = 0;
  while (error > target(value, abs_total)) {
    if (panels >= spec.max_panels) {
      throw QuadratureError("quadrature: panel budget exhausted before tolerance was met",
                            as_complex(value), error);
    }
    Panel<T> worst = queue.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi) ||
        (worst.hi - worst.lo) < 64.0 * eps * std::max(1.0, std::abs(mid))) {
      throw QuadratureError("quadrature: panel width reached machine resolution", as_complex(value),
                            error);
    }
    queue.pop();
    Panel<T> left = gauss_kronrod_15<T>(f, worst.lo, mid);
    Panel<T> right = gauss_kronrod_15<T>(f, mid, worst.hi);
    value = value - worst.value + left.value + right.value;
    error = error - worst.error + left.error + right.error;
    abs_total = abs_total - worst.abs_integral + left.abs_integral + right.abs_integral;
    queue.push(left);
    queue.push(right);
    ++panels;
    if (++since_resync == 4096) {
      std::tie(value, error, abs_total) = totals();
      since_resync = 0;
    }
  }
  std::tie(value, error, abs_total) = totals();

  QuadratureResult<T> result;
  result.value = value;
  result.error_estimate = std::max(error, 50.0 * eps * abs_total);
  result.panels = panels;
  result.cutoff = hi;
  return result;
}

template <class F>
using value_type_of = std::decay_t<std::invoke_result_t<F &, double>>;

inline double hint_width(const QuadratureSpec &spec, double interval) {
  double w = interval;
  if (spec.oscillation_period_hint > 0.0) w = std::min(w, 0.5 * spec.oscillation_period_hint);
  return w;
}

}  // namespace detail

/// Integral of f over the finite interval [lo, hi].
template <class F>
auto integrate(F &&f, double lo, double hi, const QuadratureSpec &spec = {})
    -> QuadratureResult<detail::value_type_of<F>> {
  using T = detail::value_type_of<F>;
  if (!(hi > lo)) {
    if (hi == lo) return {};
    throw std::invalid_argument("integrate: requires lo <= hi");
  }
  const double width = detail::hint_width(spec, hi - lo);
  return detail::adaptive<T>(f, lo, hi, spec, [width](double) { return width; },
                             spec.abs_tolerance);
}

/// Integral of f over [0, inf) with the variable_map policy: k = u / (1 - u).
/// The integrand must decay at least like k^-2.
template <class F>
auto integrate_semi_infinite(F &&f, const QuadratureSpec &spec = {})
    -> QuadratureResult<detail::value_type_of<F>> {
  using T = detail::value_type_of<F>;
  auto mapped = [&f](double u) -> T {
    const double one_minus = 1.0 - u;
    if (one_minus <= 0.0) return T{};
    return f(u / one_minus) * (1.0 / (one_minus * one_minus));
  };
  QuadratureSpec local = spec;
  double width = 1.0;
  if (spec.oscillation_period_hint > 0.0) {
    // Resolve the map-compressed oscillations: du = dk / (1 + k)^2.
    width = 0.5 * spec.oscillation_period_hint;
  }
  auto max_width = [width](double u) {
    const double one_minus = 1.0 - u;
    return std::max(width * one_minus * one_minus, 1e-9);
  };
  local.max_panels = spec.max_panels;
  auto result = detail::adaptive<T>(mapped, 0.0, 1.0, local, max_width, spec.abs_tolerance);
  result.cutoff = std::numeric_limits<double>::infinity();
  return result;
}

/// Integral of f over [0, inf) with the asymptotic_correction policy:
/// [0, K] is integrated adaptively and tail(K) supplies the remainder. K starts
/// at `initial_cutoff` and doubles until the tail's own error estimate is below
/// a tenth of the tolerance.
template <class F, class Tail>
auto integrate_semi_infinite(F &&f, Tail &&tail, const QuadratureSpec &spec, double initial_cutoff)
    -> QuadratureResult<detail::value_type_of<F>> {
  using T = detail::value_type_of<F>;
  if (spec.tail_policy == TailPolicy::variable_map) return integrate_semi_infinite(f, spec);
  if (!(initial_cutoff > 0.0)) throw std::invalid_argument("integrate_semi_infinite: cutoff must be positive");
  double cutoff = initial_cutoff;
  TailEstimate<T> tail_part = tail(cutoff);
  while (tail_part.error_estimate > 0.1 * spec.abs_tolerance && cutoff < 1e9) {
    cutoff *= 2.0;
    tail_part = tail(cutoff);
  }
  auto body = integrate(f, 0.0, cutoff, spec);
  body.value += tail_part.value;
  body.error_estimate += tail_part.error_estimate;
  body.cutoff = cutoff;
  return body;
}

// ---------------------------------------------------------------------------
// Chirped oscillatory integrals: Int g(k) exp(i phi(k)) dk with the free
// propagation phase phi(k) = x k - t k^2.

struct ChirpPhase {
  double x = 0.0;
  double t = 0.0;
  [[nodiscard]] double operator()(double k) const { return x * k - t * k * k; }
  [[nodiscard]] double derivative(double k) const { return x - 2.0 * t * k; }
  [[nodiscard]] double second_derivative() const { return -2.0 * t; }
  [[nodiscard]] double stationary_point() const { return t > 0.0 ? x / (2.0 * t) : 0.0; }
};

struct ChirpWindow {
  double min_window = 40.0;
  // Half-width beyond the stationary point grows like sqrt(scale / t).
  double window_scale = 2000.0;
  double max_panel_width = 0.25;
  // Fraction of a local period per initial panel.
  double period_fraction = 0.5;
};

/// Integration window [lo, hi] for a chirp: the stationary point (and the
/// origin) widened by max(min_window, sqrt(window_scale / t)) on each side.
/// The semi-infinite form uses [0, hi].
inline std::pair<double, double> chirp_window(const ChirpPhase &phase, const ChirpWindow &window) {
  const double ks = phase.stationary_point();
  const double half = std::max(window.min_window, std::sqrt(window.window_scale / phase.t));
  return {std::min(ks, 0.0) - half, std::max(ks, 0.0) + half};
}

namespace detail {

inline double chirp_panel_width(const ChirpPhase &phase, const ChirpWindow &window, const QuadratureSpec &spec,
                         double k) {
  double w = hint_width(spec, window.max_panel_width);
  // Use the steeper end of the tentative panel so the local period is never
  // underestimated.
  const double slope = std::max(std::abs(phase.derivative(k)), std::abs(phase.derivative(k + w)));
  if (slope > 0.0) w = std::min(w, window.period_fraction * 2.0 * std::numbers::pi / slope);
  return w;
}

// Two integration-by-parts terms at a cutoff. `direction` is +1 for the upper
// tail [K, inf), -1 for the lower tail (-inf, K].
template <class G>
auto chirp_tail(G &g, const ChirpPhase &phase, double cutoff, int direction)
    -> TailEstimate<std::complex<double>> {
  using C = std::complex<double>;
  const C i{0.0, 1.0};
  const double h = 1e-3 * std::max(1.0, std::abs(cutoff));
  const C g0 = C(g(cutoff));
  const C gp = C(g(cutoff + h));
  const C gm = C(g(cutoff - h));
  const C g1 = (gp - gm) / (2.0 * h);
  const C g2 = (gp - 2.0 * g0 + gm) / (h * h);
  const double d1 = phase.derivative(cutoff);
  const double d2 = phase.second_derivative();
  if (d1 == 0.0) throw std::domain_error("chirp tail: cutoff at a stationary point");
  const C id1 = i * d1;
  // f/(i phi'), then h1 = d/dk[f/(i phi')], h2 = d/dk[h1/(i phi')].
  const C term1 = g0 / id1;
  const C h1 = g1 / id1 - g0 * d2 / (i * d1 * d1);
  const C term2 = h1 / id1;
  const C h1p = g2 / id1 - 2.0 * g1 * d2 / (i * d1 * d1) + 2.0 * g0 * d2 * d2 / (i * d1 * d1 * d1);
  const C h2 = h1p / id1 - h1 * d2 / (i * d1 * d1);
  const C term3 = h2 / id1;
  const C e = std::polar(1.0, phase(cutoff));
  TailEstimate<C> out;
  const double sign = direction > 0 ? 1.0 : -1.0;
  out.value = sign * e * (-term1 + term2);
  out.error_estimate = 2.0 * std::abs(term3) + 1e-3 * std::abs(term2);
  return out;
}

}  // namespace detail

/// Int_0^inf g(k) e^{i(xk - tk^2)} dk for t > 0. The window [0, K] from
/// chirp_window is integrated adaptively with
/// panels at a fraction of the local period; the rest is closed by
/// integration by parts. g must be smooth and decay algebraically beyond K.
template <class G>
QuadratureResult<std::complex<double>> integrate_chirp_semi_infinite(G &&g, const ChirpPhase &phase,
                                                                    const QuadratureSpec &spec = {},
                                                                    const ChirpWindow &window = {}) {
  using C = std::complex<double>;
  if (!(phase.t > 0.0)) throw std::domain_error("integrate_chirp_semi_infinite: requires t > 0");
  const double cutoff = chirp_window(phase, window).second;
  auto f = [&g, &phase](double k) -> C { return C(g(k)) * std::polar(1.0, phase(k)); };
  auto tail = detail::chirp_tail(g, phase, cutoff, +1);
  const double body_tol = std::max(0.5 * spec.abs_tolerance, spec.abs_tolerance - tail.error_estimate);
  auto result = detail::adaptive<C>(
      f, 0.0, cutoff, spec,
      [&](double k) { return detail::chirp_panel_width(phase, window, spec, k); }, body_tol);
  result.value += tail.value;
  result.error_estimate += tail.error_estimate;
  result.cutoff = cutoff;
  return result;
}

/// Int_R g(k) e^{i(xk - tk^2)} dk for t > 0, windowed symmetrically about
/// the stationary point with integration-by-parts closure on both sides.
template <class G>
QuadratureResult<std::complex<double>> integrate_oscillatory_real_line(G &&g, const ChirpPhase &phase,
                                                                      const QuadratureSpec &spec = {},
                                                                      const ChirpWindow &window = {}) {
  using C = std::complex<double>;
  if (!(phase.t > 0.0)) throw std::domain_error("integrate_oscillatory_real_line: requires t > 0");
  const auto [lo, hi] = chirp_window(phase, window);
  auto f = [&g, &phase](double k) -> C { return C(g(k)) * std::polar(1.0, phase(k)); };
  auto upper = detail::chirp_tail(g, phase, hi, +1);
  auto lower = detail::chirp_tail(g, phase, lo, -1);
  const double tails_err = upper.error_estimate + lower.error_estimate;
  const double body_tol = std::max(0.5 * spec.abs_tolerance, spec.abs_tolerance - tails_err);
  auto result = detail::adaptive<C>(
      f, lo, hi, spec, [&](double k) { return detail::chirp_panel_width(phase, window, spec, k); },
      body_tol);
  result.value += upper.value + lower.value;
  result.error_estimate += tails_err;
  result.cutoff = hi;
  return result;
}

// ---------------------------------------------------------------------------
// Fixed-order Gauss-Legendre rules.

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

inline GaussLegendreRule gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: order must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
    }
    dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Composite Gauss-Legendre: `panels` equal panels on [lo, hi], each with `rule`.
template <class F>
auto integrate_fixed(F &&f, double lo, double hi, const GaussLegendreRule &rule, std::size_t panels = 1)
    -> detail::value_type_of<F> {
  using T = detail::value_type_of<F>;
  detail::Accumulator<T> acc;
  const double width = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = lo + width * static_cast<double>(p);
    const double half = 0.5 * width;
    const double center = a + half;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      acc.add(f(center + half * rule.nodes[i]) * (rule.weights[i] * half));
    }
  }
  return acc.value();
}

}  // namespace bornres
