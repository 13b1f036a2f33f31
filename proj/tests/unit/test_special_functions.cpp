#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "shared_fixtures.hpp"

using namespace bornres;
using bornres::testing::relative_error;

namespace {

// Leading long-time behaviour of M(0, kappa, t) once the pole term has died
// out: w(z) ~ (i / sqrt(pi)) (1/z + 1/(2 z^3)) gives
// M ~ (1 / 2 sqrt(pi)) (1/y - 1/(2 y^3)) with y = -e^{-i pi/4} kappa sqrt(t).
cplx scaled_argument(cplx kappa, double t) { return -std::polar(1.0, -std::numbers::pi / 4.0) * kappa * std::sqrt(t); }

cplx long_time_leading(cplx kappa, double t) {
  return 1.0 / (2.0 * std::sqrt(std::numbers::pi) * scaled_argument(kappa, t));
}

cplx long_time_next(cplx kappa, double t) {
  const cplx y = scaled_argument(kappa, t);
  return -1.0 / (4.0 * std::sqrt(std::numbers::pi) * y * y * y);
}

}  // namespace

TEST_CASE("faddeeva matches the reference table", "[special_functions]") {
  const auto table = bornres::testing::faddeeva_reference();
  REQUIRE(table.size() == 30);
  double worst = 0.0;
  for (const auto &rec : table) {
    const cplx w = faddeeva(rec.z);
    const double err = rec.w == 0.0 ? std::abs(w) : relative_error(w, rec.w);
    const double tol = std::abs(rec.z) <= 10.0 ? 1e-13 : 1e-11;
    INFO("z = " << rec.z << " w = " << w << " reference " << rec.w);
    CHECK(err < tol);
    worst = std::max(worst, err);
  }
  WARN("worst relative error " << worst);
}

TEST_CASE("faddeeva special values", "[special_functions]") {
  CHECK(faddeeva({0.0, 0.0}) == cplx(1.0, 0.0));
  const cplx at_i = faddeeva({0.0, 1.0});
  CHECK(std::abs(at_i - cplx(0.427583576155807, 0.0)) < 1e-14);
  // On the imaginary axis w(iy) = e^{y^2} erfc(y) is real.
  for (double y : {0.1, 0.7, 2.5, 8.0}) {
    const cplx w = faddeeva({0.0, y});
    CHECK(std::abs(w.imag()) < 1e-15);
    CHECK(w.real() == Catch::Approx(std::exp(y * y) * std::erfc(y)).epsilon(1e-13));
  }
}

TEST_CASE("faddeeva reflection and conjugation identities", "[special_functions]") {
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);
  double worst_reflection = 0.0, worst_conjugation = 0.0;
  for (int i = 0; i < 400; ++i) {
    const cplx z{coord(rng), coord(rng)};
    const cplx wz = faddeeva(z);
    const cplx wmz = faddeeva(-z);
    const cplx twice = 2.0 * std::exp(-z * z);
    const double scale = std::max({1.0, std::abs(wz), std::abs(twice)});
    worst_reflection = std::max(worst_reflection, std::abs(wmz - (twice - wz)) / scale);
    const cplx wc = faddeeva(std::conj(z));
    worst_conjugation = std::max(worst_conjugation, std::abs(wc - std::conj(wmz)) / std::max(1.0, std::abs(wc)));
  }
  CHECK(worst_reflection < 1e-12);
  CHECK(worst_conjugation < 1e-12);
}

TEST_CASE("faddeeva modulus on the positive real axis", "[special_functions]") {
  for (double x = 0.0; x <= 50.0; x += 0.25) {
    const double m = std::abs(faddeeva({x, 0.0}));
    CHECK(m <= 1.0);
    // Re w(x) = e^{-x^2} on the real axis.
    CHECK(std::abs(faddeeva({x, 0.0}).real() - std::exp(-x * x)) < 1e-15);
  }
}

TEST_CASE("faddeeva rejects non-finite input and reports overflow", "[special_functions]") {
  CHECK_THROWS_AS(faddeeva({std::nan(""), 0.0}), DomainError);
  CHECK_THROWS_AS(faddeeva({std::numeric_limits<double>::infinity(), 1.0}), DomainError);
  CHECK_THROWS_AS(faddeeva({0.0, -40.0}), std::overflow_error);
  // Large lower half plane arguments with dominant oscillation stay finite.
  const cplx w = faddeeva({40.0, -1.0});
  CHECK(std::isfinite(w.real()));
  CHECK(std::isfinite(w.imag()));
}

TEST_CASE("faddeeva table round trip", "[special_functions]") {
  const auto table = bornres::testing::faddeeva_reference();
  std::stringstream buf;
  write_faddeeva_table(buf, table);
  const auto back = read_faddeeva_table(buf);
  REQUIRE(back.size() == table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(back[i].z == table[i].z);
    CHECK(back[i].w == table[i].w);
  }
  std::stringstream bad("1.0 2.0 3.0\n");
  CHECK_THROWS(read_faddeeva_table(bad));
}

TEST_CASE("moshinsky closed form matches the defining-integral reference", "[special_functions]") {
  const auto table = bornres::testing::moshinsky_reference();
  REQUIRE(table.size() == 20);
  double worst = 0.0;
  for (const auto &rec : table) {
    const cplx m = moshinsky_m(rec.args);
    INFO("x = " << rec.args.x << " kappa = " << rec.args.kappa << " t = " << rec.args.t);
    CHECK(std::abs(m - rec.value) < 1e-8);
    worst = std::max(worst, std::abs(m - rec.value));
  }
  WARN("worst absolute error " << worst);
}

TEST_CASE("moshinsky closed form matches real-line quadrature", "[special_functions]") {
  struct Case {
    double x;
    cplx kappa;
    double t;
  };
  // A pole deep in the lower half plane, and the first lambda = 100 seed.
  const Case cases[] = {{0.0, {2.0, -1.0}, 1.0}, {0.0, {3.1102, -0.000987}, 1.0}, {0.5, {2.0, -1.0}, 0.5}};
  for (const auto &c : cases) {
    auto g = [&c](double k) { return imag_unit / (2.0 * std::numbers::pi) / (k - c.kappa); };
    QuadratureSpec spec;
    spec.abs_tolerance = 1e-11;
    spec.rel_tolerance = 1e-11;
    const auto q = integrate_oscillatory_real_line(g, ChirpPhase{c.x, c.t}, spec);
    const cplx closed = moshinsky_m({c.x, c.kappa, c.t});
    INFO("kappa = " << c.kappa << " t = " << c.t << " quadrature " << q.value << " closed " << closed);
    CHECK(std::abs(q.value - closed) < 1e-8);
  }
}

TEST_CASE("moshinsky rejects non-positive time", "[special_functions]") {
  CHECK_THROWS_AS(moshinsky_m({0.0, {3.0, -0.1}, 0.0}), DomainError);
  CHECK_THROWS_AS(moshinsky_m({0.0, {3.0, -0.1}, -1.0}), DomainError);
}

TEST_CASE("moshinsky approaches its t -> 0 limit", "[special_functions]") {
  const cplx kappa{3.1105, -0.00096};
  CHECK(std::abs(moshinsky_m({0.0, kappa, 1e-10}) - moshinsky_limit_at_zero(0.0, kappa)) < 1e-4);
  CHECK(std::abs(moshinsky_m({-0.5, kappa, 1e-8}) - moshinsky_limit_at_zero(-0.5, kappa)) < 1e-3);
  CHECK(std::abs(moshinsky_m({0.5, kappa, 1e-8}) - moshinsky_limit_at_zero(0.5, kappa)) < 1e-3);
}

// The uncorrected single-kernel comparison: the kernel carries a t^{-1/2}
// term of size 1 / (2 sqrt(pi t) |kappa|), about 1e-2 at one lifetime, so
// this literal bound does not hold. Kept as a marker of that behaviour.
TEST_CASE("moshinsky equals the bare pole term in the exponential window", "[special_functions][!shouldfail]") {
  const auto &s = bornres::testing::reference_states_all().front();
  const double tau = s.pole.lifetime();
  for (double f : {0.5, 1.0, 2.0, 3.0}) {
    const double t = f * tau;
    const cplx k = s.kappa();
    CHECK(std::abs(moshinsky_m({0.0, k, t}) - std::exp(-imag_unit * k * k * t)) < 1e-3);
  }
}

TEST_CASE("moshinsky in the exponential window is the pole term plus the power-law correction",
          "[special_functions]") {
  const auto &s = bornres::testing::reference_states_all().front();
  const double tau = s.pole.lifetime();
  const cplx k = s.kappa();
  for (double f = 0.5; f <= 3.0; f += 0.25) {
    const double t = f * tau;
    const cplx m = moshinsky_m({0.0, k, t});
    const cplx pole_term = std::exp(-imag_unit * k * k * t);
    INFO("t / tau = " << f);
    CHECK(std::abs(m - pole_term - long_time_leading(k, t)) < 1e-3);
    // What remains is the pole term alone to within the next order.
    CHECK(std::abs(m - pole_term - long_time_leading(k, t) - long_time_next(k, t)) < 1e-6);
  }
}

// Literal reading of the long-time property for a single kernel. A single M
// decays as t^{-1/2}; the t^{-3/2} law only appears after the t^{-1/2} parts
// cancel across the pole sum (checked under time_evolution).
TEST_CASE("moshinsky times t^{3/2} is constant at long times", "[special_functions][!shouldfail]") {
  const cplx k = bornres::testing::reference_states_all().front().kappa();
  const cplx c1 = moshinsky_m({0.0, k, 1e5}) * std::pow(1e5, 1.5);
  const cplx c2 = moshinsky_m({0.0, k, 1e6}) * std::pow(1e6, 1.5);
  CHECK(std::abs(c1 - c2) < 1e-2 * std::abs(c2));
}

TEST_CASE("moshinsky long-time tail has the t^{-1/2} and t^{-3/2} orders", "[special_functions]") {
  const cplx k = bornres::testing::reference_states_all().front().kappa();
  std::vector<cplx> half_power, three_half_power;
  for (double t : {1e4, 1e5, 1e6, 1e7}) {
    const cplx m = moshinsky_m({0.0, k, t});
    half_power.push_back(m * std::sqrt(t));
    three_half_power.push_back((m - long_time_leading(k, t)) * std::pow(t, 1.5));
  }
  const cplx lead = long_time_leading(k, 1.0);
  const cplx next = long_time_next(k, 1.0);
  for (std::size_t i = 0; i < half_power.size(); ++i) {
    CHECK(relative_error(half_power[i], lead) < 1e-3);
    CHECK(relative_error(three_half_power[i], next) < 1e-2);
  }
  // The t^{3/2}-scaled remainder settles to a constant.
  CHECK(relative_error(three_half_power[3], three_half_power[2]) < 1e-3);
}
