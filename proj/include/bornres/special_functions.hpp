#pragma once

// Complex error function and the Moshinsky propagation kernel.

#include <cmath>
#include <complex>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bornres/errors.hpp"

namespace bornres {

using cplx = std::complex<double>;

inline constexpr cplx imag_unit{0.0, 1.0};

namespace detail {

// exp(-(x + iy)^2). The phase 2xy is carried as an fma-exact pair so that
// the result keeps full relative accuracy when |z| is in the hundreds.
inline cplx exp_minus_square(double x, double y) {
  const double log_magnitude = -(x - y) * (x + y);
  const double phase = 2.0 * x * y;
  const double phase_lo = std::fma(2.0 * x, y, -phase);
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  const double magnitude = std::exp(log_magnitude);
  return {magnitude * (c + phase_lo * s), -magnitude * (s + phase_lo * c)};
}

// w(z) for z = x + iy with x, y >= 0.
inline cplx faddeeva_first_quadrant(double x, double y) {
  constexpr double two_over_sqrt_pi = 1.12837916709551257388;
  const double xs = x / 6.3;
  const double ys = y / 4.4;
  double rho2 = xs * xs + ys * ys;

  if (rho2 < 0.085264) {
    // Power series for erfc inside the small ellipse, then multiply by exp(-z^2).
    const double xquad = (x - y) * (x + y);
    const double yquad = 2.0 * x * y;
    const double rho = (1.0 - 0.85 * ys) * std::sqrt(rho2);
    const int n_terms = static_cast<int>(std::lround(6.0 + 72.0 * rho));
    int j = 2 * n_terms + 1;
    double xsum = 1.0 / j;
    double ysum = 0.0;
    for (int i = n_terms; i >= 1; --i) {
      j -= 2;
      const double xaux = (xsum * xquad - ysum * yquad) / i;
      ysum = (xsum * yquad + ysum * xquad) / i;
      xsum = xaux + 1.0 / j;
    }
    const cplx erfc_part{1.0 - two_over_sqrt_pi * (xsum * y + ysum * x),
                         two_over_sqrt_pi * (xsum * x - ysum * y)};
    return erfc_part * exp_minus_square(x, y);
  }

  // Laplace continued fraction, accelerated by a truncated Taylor expansion
  // (Gautschi) when z is not far from the origin.
  double h = 0.0;
  int kapn = 0;
  int nu = 0;
  if (rho2 > 1.0) {
    const double rho = std::sqrt(rho2);
    nu = static_cast<int>(3.0 + 1442.0 / (26.0 * rho + 77.0));
  } else {
    const double q = (1.0 - ys) * std::sqrt(1.0 - rho2);
    h = 1.88 * q;
    kapn = static_cast<int>(std::lround(7.0 + 34.0 * q));
    nu = static_cast<int>(std::lround(16.0 + 26.0 * q));
  }
  const bool accelerated = h > 0.0;
  const double h2 = 2.0 * h;
  double qlambda = accelerated ? std::pow(h2, kapn) : 0.0;

  double rx = 0.0, ry = 0.0, sx = 0.0, sy = 0.0;
  for (int n = nu; n >= 0; --n) {
    const double np1 = n + 1.0;
    double tx = y + h + np1 * rx;
    const double ty = x - np1 * ry;
    const double c = 0.5 / (tx * tx + ty * ty);
    rx = c * tx;
    ry = c * ty;
    if (accelerated && n <= kapn) {
      tx = qlambda + sx;
      sx = rx * tx - ry * sy;
      sy = ry * tx + rx * sy;
      qlambda /= h2;
    }
  }
  double u = accelerated ? two_over_sqrt_pi * sx : two_over_sqrt_pi * rx;
  const double v = accelerated ? two_over_sqrt_pi * sy : two_over_sqrt_pi * ry;
  if (y == 0.0) u = std::exp(-x * x);
  return {u, v};
}

}  // namespace detail

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
///
/// Poppe-Wijers region split, evaluated in the first quadrant and mapped to the
/// others with w(-conj z) = conj w(z) and w(-z) = 2 exp(-z^2) - w(z). Relative
/// accuracy is a few ulps times 10 for |z| <= 10. Throws std::overflow_error
/// when Im z < 0 and the true value exceeds the double range
/// (roughly y^2 - x^2 > 709).
inline cplx faddeeva(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw DomainError("faddeeva: non-finite argument");
  }
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  const cplx w = detail::faddeeva_first_quadrant(ax, ay);
  if (y >= 0.0) {
    return x >= 0.0 ? w : std::conj(w);
  }
  if ((ay - ax) * (ay + ax) + std::numbers::ln2 > 709.0) {
    throw std::overflow_error("faddeeva: |w(z)| exceeds the double range");
  }
  const cplx reflected = 2.0 * detail::exp_minus_square(ax, ay) - w;
  return x > 0.0 ? std::conj(reflected) : reflected;
}

/// Arguments of the free propagation kernel: offset x = r - a, complex pole
/// momentum kappa, and time t (hbar = 2m = 1).
struct MoshinskyArgs {
  double x = 0.0;
  cplx kappa{};
  double t = 0.0;
};

/// M(x, kappa, t) = (i / 2pi) Int_R e^{ikx} e^{-ik^2 t} / (k - kappa) dk for
/// kappa off the real axis in the lower half plane or on the mirror side.
///
/// Closed form: M = 1/2 e^{i x^2 / 4t} w(iy), y = e^{-i pi/4} (x - 2 kappa t) / sqrt(4t).
/// When Im(iy) < 0 the reflection of w is applied analytically, so the
/// exponentially growing factor cancels against the prefactor and the
/// pole term e^{i kappa x - i kappa^2 t} is produced directly.
inline cplx moshinsky_m(const MoshinskyArgs &args) {
  const double t = args.t;
  if (!(t > 0.0)) {
    throw DomainError("moshinsky_m: requires t > 0");
  }
  const cplx rot = std::polar(1.0, -std::numbers::pi / 4.0);
  const cplx y = rot * (args.x - 2.0 * args.kappa * t) / std::sqrt(4.0 * t);
  const cplx iy = imag_unit * y;
  const cplx prefactor = std::polar(0.5, args.x * args.x / (4.0 * t));
  if (iy.imag() >= 0.0) {
    return prefactor * faddeeva(iy);
  }
  const cplx pole_term =
      std::exp(imag_unit * args.kappa * args.x - imag_unit * args.kappa * args.kappa * t);
  return pole_term - prefactor * faddeeva(-iy);
}

/// Limit of M as t -> 0+: e^{i kappa x} for x < 0, 1/2 at x = 0, 0 for x > 0
/// (kappa in the lower half plane).
inline cplx moshinsky_limit_at_zero(double x, cplx kappa) {
  if (x < 0.0) return std::exp(imag_unit * kappa * x);
  if (x == 0.0) return {0.5, 0.0};
  return {0.0, 0.0};
}

// Reference table: one record per line, `re(z) im(z) re(w) im(w)`, '#' comments.
struct FaddeevaRecord {
  cplx z;
  cplx w;
};

inline std::vector<FaddeevaRecord> read_faddeeva_table(std::istream &in) {
  std::vector<FaddeevaRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double zr, zi, wr, wi;
    if (!(fields >> zr >> zi >> wr >> wi)) {
      throw std::runtime_error("faddeeva table: malformed record on line " + std::to_string(line_no));
    }
    records.push_back({{zr, zi}, {wr, wi}});
  }
  return records;
}

inline void write_faddeeva_table(std::ostream &out, const std::vector<FaddeevaRecord> &records) {
  out << "# re(z) im(z) re(w) im(w)\n";
  const auto old_precision = out.precision(15);
  const auto old_flags = out.flags();
  out << std::scientific;
  for (const auto &r : records) {
    out << r.z.real() << ' ' << r.z.imag() << ' ' << r.w.real() << ' ' << r.w.imag() << '\n';
  }
  out.precision(old_precision);
  out.flags(old_flags);
}

}  // namespace bornres
