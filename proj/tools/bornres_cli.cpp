// bornres: resonance-expansion datasets and invariant checks for the
// delta-shell potential.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "bornres/cli.hpp"
#include "bornres/quadrature.hpp"

namespace {

using namespace bornres;
using namespace bornres::cli;

// --out wins; otherwise BORNRES_OUTPUT_DIR/<command>.csv; otherwise stdout.
std::string resolve_output(const RunConfig &cfg, const std::string &command) {
  if (!cfg.output_path.empty()) return cfg.output_path;
  if (const char *dir = std::getenv("BORNRES_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
    return (std::filesystem::path(dir) / (command + (command == "check" ? ".txt" : ".csv"))).string();
  }
  return {};
}

void emit(const std::string &content, const std::string &path) {
  if (path.empty()) {
    std::cout << content;
    std::cout.flush();
  } else {
    write_file_atomically(path, content);
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Resonance (quasinormal) expansion of Born probabilities for the delta-shell potential"};
  app.set_version_flag("--version", std::string(tool_version));
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file; flags override it");

  RunConfig cfg;
  double t_min = 0.0, t_max = 0.0, strict = 0.0;
  std::size_t t_steps = 0;
  app.add_option("--lambda", cfg.lambda, "Shell strength")->capture_default_str();
  app.add_option("--a", cfg.a, "Shell radius")->capture_default_str();
  app.add_option("--n-poles,--n", cfg.n_poles, "Number of fourth-quadrant poles")->capture_default_str();
  app.add_option("--k-min", cfg.k_min, "Lower end of the momentum grid")->capture_default_str();
  app.add_option("--k-max", cfg.k_max, "Upper end of the momentum grid")->capture_default_str();
  app.add_option("--k-steps", cfg.k_steps, "Points in the momentum grid")->capture_default_str();
  auto *t_min_opt = app.add_option("--t-min", t_min, "First time (default 1e-3 lifetimes)");
  auto *t_max_opt = app.add_option("--t-max", t_max, "Last time (default 1e6 lifetimes)");
  auto *t_steps_opt = app.add_option("--t-steps", t_steps, "Points in the time grid (default 40 per decade)");
  app.add_option("--out", cfg.output_path, "Output file (default: stdout or $BORNRES_OUTPUT_DIR)");

  auto *poles = app.add_subcommand("poles", "Resonance poles of the Jost function");
  auto *spectrum = app.add_subcommand("born-spectrum", "|C(k)|^2 in both bases with its Lorentzian decomposition");
  auto *coefficients = app.add_subcommand("coefficients", "Per-pole strengths |C_n|^2 I_n and norm identities");
  auto *evolve = app.add_subcommand("evolve", "Survival and nonescape probabilities over time");
  evolve->add_flag("--with-continuum-oracle", cfg.with_continuum_oracle,
                   "Also evaluate the survival probability by continuum quadrature");
  auto *check = app.add_subcommand("check", "Run the invariant suite; exit 1 if any check fails");
  auto *strict_opt = check->add_option("--strict", strict, "Replace every upper-bound tolerance with this value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    // Help and version exit 0; usage errors share the invalid-input code.
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_computational_error;
  }
  if (*t_min_opt) cfg.t_min = t_min;
  if (*t_max_opt) cfg.t_max = t_max;
  if (*t_steps_opt) cfg.t_steps = t_steps;
  if (*strict_opt) cfg.strict = strict;

  auto warn = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };

  try {
    if (*poles) {
      emit(cmd_poles(cfg, warn).to_string(), resolve_output(cfg, "poles"));
    } else if (*spectrum) {
      emit(cmd_born_spectrum(cfg, warn).to_string(), resolve_output(cfg, "born-spectrum"));
    } else if (*coefficients) {
      emit(cmd_coefficients(cfg, warn).to_string(), resolve_output(cfg, "coefficients"));
    } else if (*evolve) {
      emit(cmd_evolve(cfg, warn).to_string(), resolve_output(cfg, "evolve"));
    } else if (*check) {
      const auto report = cmd_check(cfg, warn);
      emit(report.to_string(), resolve_output(cfg, "check"));
      return report.all_passed() ? exit_ok : exit_check_failed;
    }
  } catch (const SolverError &e) {
    std::cerr << "error: " << e.what() << " (index " << e.index() << ")\n";
    return exit_computational_error;
  } catch (const QuadratureError &e) {
    std::cerr << "error: " << e.what() << " (best estimate " << e.best_value() << ", error " << e.error_estimate()
              << ")\n";
    return exit_computational_error;
  } catch (const DomainError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_computational_error;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: invalid configuration: " << e.what() << '\n';
    return exit_computational_error;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_computational_error;
  }
  return exit_ok;
}
