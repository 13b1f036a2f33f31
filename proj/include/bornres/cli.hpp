#pragma once

// Command implementations behind the `bornres` executable. Each command maps
// a RunConfig to a CSV table (or a check report); argument parsing lives in
// tools/bornres_cli.cpp.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bornres/csv.hpp"
#include "bornres/model.hpp"
#include "bornres/pole_solver.hpp"
#include "bornres/resonance_expansion.hpp"
#include "bornres/time_evolution.hpp"

namespace bornres::cli {

inline constexpr const char *tool_version = "bornres 1.0.0";

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_computational_error = 2 };

struct RunConfig {
  double lambda = 100.0;
  double a = 1.0;
  std::size_t n_poles = 40;
  double k_min = 2.9;
  double k_max = 3.3;
  std::size_t k_steps = 400;
  std::optional<double> t_min;   // default 1e-3 tau
  std::optional<double> t_max;   // default 1e6 tau
  std::optional<std::size_t> t_steps;  // default 40 points per decade
  std::string output_path;
  bool with_continuum_oracle = false;
  std::optional<double> strict;  // overrides every upper-bound check tolerance

  void validate() const {
    ModelParams{lambda, a}.validate();
    if (n_poles < 1) throw std::invalid_argument("n-poles must be at least 1");
    if (k_steps < 1) throw std::invalid_argument("k-steps must be at least 1");
    if (!(k_min > 0.0)) throw std::invalid_argument("k-min must be positive");
    if (k_max < k_min) throw std::invalid_argument("k-max must not be below k-min");
    if (t_min && *t_min < 0.0) throw std::invalid_argument("t-min must be non-negative");
    if (t_min && t_max && *t_max <= *t_min) throw std::invalid_argument("t-max must exceed t-min");
    if (t_steps && *t_steps < 2) throw std::invalid_argument("t-steps must be at least 2");
    if (strict && !(*strict >= 0.0)) throw std::invalid_argument("strict tolerance must be non-negative");
  }

  [[nodiscard]] std::vector<double> k_grid() const {
    std::vector<double> grid;
    if (k_steps == 1) return {k_min};
    grid.reserve(k_steps);
    for (std::size_t i = 0; i < k_steps; ++i) {
      grid.push_back(k_min + (k_max - k_min) * static_cast<double>(i) / static_cast<double>(k_steps - 1));
    }
    return grid;
  }
};

struct Context {
  Model model;
  std::vector<ResonanceStateData> states;
  double max_pole_residual = 0.0;
};

using WarnSink = std::function<void(std::string_view)>;

inline Context build_context(const RunConfig &cfg, std::size_t n_poles, const WarnSink &warn = {}) {
  cfg.validate();
  Context ctx{Model::delta_shell(cfg.lambda, cfg.a), {}, 0.0};
  SolverConfig sc;
  sc.n_poles = n_poles;
  sc.warn = warn;
  const auto poles = find_poles(ctx.model.params, sc);
  for (const auto &p : poles) ctx.max_pole_residual = std::max(ctx.max_pole_residual, p.jost_residual);
  ctx.states = make_resonance_states(ctx.model, poles);
  return ctx;
}

inline void stamp_metadata(CsvTable &t, const std::string &command, const RunConfig &cfg) {
  t.set_meta("tool", tool_version);
  t.set_meta("command", command);
  t.set_meta("lambda", cfg.lambda);
  t.set_meta("a", cfg.a);
  t.set_meta("n_poles", format_number(cfg.n_poles));
}

// ---------------------------------------------------------------------------

inline CsvTable cmd_poles(const RunConfig &cfg, const WarnSink &warn = {}) {
  cfg.validate();
  const ModelParams params{cfg.lambda, cfg.a};
  SolverConfig sc;
  sc.n_poles = cfg.n_poles;
  sc.warn = warn;
  const auto poles = find_poles(params, sc);
  CsvTable t({"n", "alpha", "beta", "re_energy", "im_energy", "jost_residual", "seed_alpha", "seed_beta"});
  stamp_metadata(t, "poles", cfg);
  double worst = 0.0;
  for (const auto &p : poles) {
    worst = std::max(worst, p.jost_residual);
    t.add_row({format_number(p.n), format_number(p.alpha()), format_number(p.beta()),
               format_number(p.energy().real()), format_number(p.energy().imag()), format_number(p.jost_residual),
               format_number(p.seed.real()), format_number(-p.seed.imag())});
  }
  t.set_meta("max_pole_residual", worst);
  return t;
}

inline CsvTable cmd_born_spectrum(const RunConfig &cfg, const WarnSink &warn = {}) {
  const Context ctx = build_context(cfg, cfg.n_poles, warn);
  CsvTable t({"k", "density_continuum", "density_resonance", "lorentz_direct", "lorentz_mirror", "interference",
              "abs_deviation"});
  stamp_metadata(t, "born-spectrum", cfg);
  t.set_meta("k_min", cfg.k_min);
  t.set_meta("k_max", cfg.k_max);
  t.set_meta("k_steps", format_number(cfg.k_steps));
  t.set_meta("max_pole_residual", ctx.max_pole_residual);
  double peak = 0.0, worst = 0.0, most_negative = 0.0;
  for (double k : cfg.k_grid()) {
    const auto p = born_density_decomposition(ctx.model, ctx.states, k);
    const double dev = std::abs(p.density_resonance - p.density_continuum);
    peak = std::max(peak, p.density_continuum);
    worst = std::max(worst, dev);
    most_negative = std::min(most_negative, p.lorentz_direct + p.lorentz_mirror + p.interference);
    t.add_row(std::vector<double>{k, p.density_continuum, p.density_resonance, p.lorentz_direct, p.lorentz_mirror,
                                  p.interference, dev});
  }
  t.set_meta("peak_density", peak);
  t.set_meta("max_abs_deviation", worst);
  t.set_meta("max_relative_deviation", peak > 0.0 ? worst / peak : 0.0);
  t.set_meta("min_resonance_density", most_negative);
  return t;
}

inline CsvTable cmd_coefficients(const RunConfig &cfg, const WarnSink &warn = {}) {
  const Context ctx = build_context(cfg, cfg.n_poles, warn);
  CsvTable t({"n", "abs_Cn_sq", "I_n", "product", "log10_product", "strength_Re_CnCbarn"});
  stamp_metadata(t, "coefficients", cfg);
  t.set_meta("max_pole_residual", ctx.max_pole_residual);
  for (const auto &s : ctx.states) {
    const double c2 = std::norm(s.overlap);
    const double product = c2 * s.interior_norm;
    t.add_row({format_number(s.pole.n), format_number(c2), format_number(s.interior_norm), format_number(product),
               format_number(std::log10(product)), format_number((s.overlap * s.dual_overlap).real())});
  }
  const auto identity = born_norm_identity(ctx.model, ctx.states);
  t.set_footer("strength_sum", strength_sum(ctx.model, ctx.states));
  t.set_footer("direct_sum", identity.direct_sum);
  t.set_footer("interference", identity.interference);
  t.set_footer("norm_total", identity.total);
  return t;
}

/// Regime of the survival probability at time t given the lifetime and the
/// crossover time of the asymptotic form.
inline std::string regime_tag(double t, double tau, double crossover) {
  if (t < 0.5 * tau) return "short";
  if (!(crossover > 0.0)) return "exponential";
  if (t < 0.5 * crossover) return "exponential";
  if (t <= 2.0 * crossover) return "crossover";
  return "power_law";
}

inline std::vector<double> evolve_time_grid(const RunConfig &cfg, double tau) {
  const double lo = cfg.t_min.value_or(1e-3 * tau);
  const double hi = cfg.t_max.value_or(1e6 * tau);
  if (!(hi > lo)) throw std::invalid_argument("evolve: t-max must exceed t-min");
  if (!cfg.t_steps) {
    if (lo > 0.0) return geometric_time_grid(lo, hi, 40.0);
    throw std::invalid_argument("evolve: t-min = 0 requires an explicit t-steps");
  }
  const std::size_t n = *cfg.t_steps;
  std::vector<double> grid;
  grid.reserve(n);
  if (lo > 0.0) {
    const double ratio = std::log(hi / lo);
    for (std::size_t i = 0; i < n; ++i) grid.push_back(lo * std::exp(ratio * static_cast<double>(i) / (n - 1.0)));
    grid.back() = hi;
  } else {
    for (std::size_t i = 0; i < n; ++i) grid.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1.0));
  }
  return grid;
}

// Above this many estimated initial panels the continuum oracle is skipped
// for a time point (its column is left empty).
inline constexpr double continuum_panel_limit = 2.0e6;

inline CsvTable cmd_evolve(const RunConfig &cfg, const WarnSink &warn = {}) {
  const Context ctx = build_context(cfg, cfg.n_poles, warn);
  const double tau = ctx.states.front().pole.lifetime();
  const auto times = evolve_time_grid(cfg, tau);
  const auto crossings = asymptotic_crossovers(ctx.states, 3.0 * tau, 1e6 * tau);
  const double crossover = crossings.empty() ? 0.0 : crossings.front();
  const OverlapMatrix overlaps = overlap_matrix(ctx.model, ctx.states);

  std::vector<std::string> columns{"t", "S_resonance"};
  if (cfg.with_continuum_oracle) columns.push_back("S_continuum");
  for (const char *c : {"P_resonance", "S_asymptotic", "regime_tag"}) columns.emplace_back(c);
  CsvTable t(columns);
  stamp_metadata(t, "evolve", cfg);
  t.set_meta("max_pole_residual", ctx.max_pole_residual);
  t.set_meta("tau", tau);
  t.set_meta("decay_rate", ctx.states.front().pole.decay_rate());
  t.set_meta("crossover_time", crossover);
  t.set_meta("t_min", times.front());
  t.set_meta("t_max", times.back());
  t.set_meta("t_steps", format_number(times.size()));
  t.set_meta("tail_closure", "effective_pole");

  ContinuumOptions copt;
  for (double time : times) {
    const double s_res = std::norm(survival_amplitude_resonance(ctx.states, time, TailClosure::effective_pole));
    std::vector<std::string> row{format_number(time), format_number(s_res)};
    if (cfg.with_continuum_oracle) {
      const double k_window = std::max(copt.window.min_window,
                                       time > 0.0 ? std::sqrt(copt.window.window_scale / time) : 0.0);
      const double panels = time * k_window * k_window / std::numbers::pi;
      if (panels <= continuum_panel_limit) {
        row.push_back(format_number(std::norm(survival_amplitude_continuum(ctx.model, time, copt).value)));
      } else {
        row.emplace_back();
      }
    }
    row.push_back(format_number(nonescape_probability_resonance(overlaps, time)));
    row.push_back(time > 0.0 ? format_number(std::norm(survival_asymptotic(ctx.states, time))) : std::string{});
    row.push_back(regime_tag(time, tau, crossover));
    t.add_row(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Invariant report.

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool lower_bound = false;  // pass when measured > tolerance instead of <=
  [[nodiscard]] bool passed() const {
    if (!std::isfinite(measured)) return false;
    return lower_bound ? measured > tolerance : measured <= tolerance;
  }
};

struct CheckReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;

  [[nodiscard]] bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult &c) { return c.passed(); });
  }

  [[nodiscard]] std::string to_string() const {
    std::ostringstream out;
    out << "# " << tool_version << '\n';
    for (const auto &n : notes) out << "# " << n << '\n';
    for (const auto &c : checks) {
      out << "CHECK " << c.name << ' ' << (c.passed() ? "PASS" : "FAIL") << ' ' << format_number(c.measured) << ' '
          << (c.lower_bound ? ">" : "") << format_number(c.tolerance) << '\n';
    }
    return out.str();
  }
};

inline CheckReport cmd_check(const RunConfig &cfg, const WarnSink &warn = {}) {
  cfg.validate();
  const std::size_t n = cfg.n_poles;
  const std::size_t half = std::max<std::size_t>(1, n / 2);
  const Context ctx = build_context(cfg, 2 * n, warn);
  const Model &m = ctx.model;
  const ModelParams &p = m.params;
  const double a = p.a;
  const auto states = truncate(ctx.states, {n});
  const auto states_half = truncate(ctx.states, {half});
  const auto &states_double = ctx.states;

  CheckReport report;
  auto add = [&](const std::string &name, double measured, double tol, bool lower = false) {
    if (cfg.strict && !lower) tol = *cfg.strict;
    report.checks.push_back({name, measured, tol, lower});
  };

  // Poles.
  double worst_residual = 0.0, quadrant_violations = 0.0, order_violations = 0.0;
  double worst_norm = 0.0, worst_width = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto &s = states[i];
    worst_residual = std::max(worst_residual, s.pole.jost_residual);
    if (!(s.pole.alpha() > 0.0 && s.pole.beta() > 0.0)) quadrant_violations += 1.0;
    if (i > 0 && !(std::abs(s.kappa()) > std::abs(states[i - 1].kappa()))) order_violations += 1.0;
    worst_norm = std::max(worst_norm, std::abs(normalization_residual(s)));
    worst_width = std::max(worst_width, std::abs(width_identity_residual(s)));
  }
  add("pole_jost_residual_max", worst_residual, 1e-10);
  add("pole_quadrant_violations", quadrant_violations, 0.0);
  add("pole_order_violations", order_violations, 0.0);
  add("pole_normalization_residual_max", worst_norm, 1e-10);
  add("pole_width_identity_residual_max", worst_width, 1e-10);

  // Scattering.
  double worst_unitarity = 0.0, worst_matching = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double k = 50.0 * i / 1000.0;
    worst_unitarity = std::max(worst_unitarity, std::abs(std::abs(s_matrix(p, k)) - 1.0));
    const cplx inside = std::sqrt(2.0 / std::numbers::pi) * 2.0 * imag_unit * k * std::sin(k * a) / jost_plus(p, k);
    const cplx outside = continuum_wavefunction(p, k, a);
    // Measured against the exterior amplitude scale, since psi(a) itself has nodes on the grid.
    worst_matching = std::max(worst_matching, std::abs(inside - outside) / std::sqrt(2.0 / std::numbers::pi));
  }
  add("s_matrix_unitarity_max", worst_unitarity, 1e-12);
  add("edge_matching_max", worst_matching, 1e-12);

  // Born spectrum.
  double peak = 0.0, worst_dev = 0.0, worst_decomp = 0.0;
  for (double k : cfg.k_grid()) {
    const auto pt = born_density_decomposition(m, states, k);
    peak = std::max(peak, pt.density_continuum);
    worst_dev = std::max(worst_dev, std::abs(pt.density_resonance - pt.density_continuum));
    worst_decomp = std::max(worst_decomp, std::abs(pt.decomposition_residual()));
  }
  add("born_dual_basis_relative", peak > 0.0 ? worst_dev / peak : worst_dev, 1e-4);
  add("born_decomposition_max", worst_decomp, 1e-10);

  const auto norm_cont = survival_amplitude_continuum(m, 0.0);
  add("born_norm_continuum", std::abs(norm_cont.value.real() - 1.0), 1e-5);
  const auto identity = born_norm_identity(m, states);
  add("born_norm_identity", std::abs(identity.total - 1.0), 1e-4);
  add("direct_sum_excess", identity.direct_sum - 1.0, 0.0, true);
  add("strength_sum", std::abs(strength_sum(m, states) - 1.0), 1e-6);
  const auto &first = states.front();
  add("dominance_first_product", std::abs(std::norm(first.overlap) * first.interior_norm - 1.0), 0.02);

  // Closure and sum rule, with the N/2, N, 2N triplet.
  const double r_mid = 0.5 * a;
  const double c_half = closure_reconstruct(m, states_half, r_mid);
  const double c_n = closure_reconstruct(m, states, r_mid);
  const double c_double = closure_reconstruct(m, states_double, r_mid);
  add("closure_residual", c_n, 1e-3);
  add("closure_convergence_ratio", std::max(c_n / c_half, c_double / c_n), 1.0);
  const double s_half = std::abs(sum_rule_residual(m, states_half, r_mid, r_mid));
  const double s_n = std::abs(sum_rule_residual(m, states, r_mid, r_mid));
  const double s_double = std::abs(sum_rule_residual(m, states_double, r_mid, r_mid));
  add("sum_rule_residual", s_n, 1e-3);
  add("sum_rule_convergence_ratio", std::max(s_n / s_half, s_double / s_n), 1.0);
  auto triplet = [&](const char *what, double x1, double x2, double x3) {
    std::ostringstream o;
    o << "convergence " << what << " N=" << half << ':' << format_number(x1) << " N=" << n << ':' << format_number(x2)
      << " N=" << 2 * n << ':' << format_number(x3);
    report.notes.push_back(o.str());
  };
  triplet("closure_residual", c_half, c_n, c_double);
  triplet("sum_rule_residual", s_half, s_n, s_double);

  // Green's function route to psi+.
  const double k_g = 3.0, r_g = 0.4 * a;
  const cplx psi_closed = continuum_wavefunction(p, k_g, r_g);
  const cplx psi_green = continuum_wavefunction_from_greens(m, states, k_g, r_g);
  add("greens_consistency_relative", std::abs(psi_green - psi_closed) / std::abs(psi_closed), 1e-4);

  // Time evolution.
  add("survival_initial", std::abs(survival_amplitude_resonance(states, 0.0) - 1.0), 1e-6);
  add("survival_initial_continuum", std::abs(norm_cont.value - 1.0), 1e-6);

  report.notes.push_back("max_pole_residual " + format_number(ctx.max_pole_residual));
  return report;
}

}  // namespace bornres::cli
