#include <iostream>

#include <CLI11.hpp>

#include "popot/pdmp.hpp"
#include "popot_cli/experiments.hpp"

namespace {

using namespace popot::cli;

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
};

void add_common(CLI::App* sub, Common& c, bool needs_config) {
  auto* opt = sub->add_option("--config", c.config, "Experiment configuration (JSON)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "Seed (overrides the config)");
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--replicas", c.replicas, "Independent replicas (overrides the config)")
      ->check(CLI::PositiveNumber);
}

int finish(CommandResult result, const Common& c, const json& config) {
  write_outputs(c.out, result, config);
  std::cout << result.report;
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contraction experiments for structured population models"};
  app.require_subcommand(1);

  Common validate, contract, sweep, dual, ot_common;
  auto* v = app.add_subcommand("validate-a", "Check the truncation level against the jump rate");
  add_common(v, validate, true);
  auto* c = app.add_subcommand("contract", "Coupled simulation and exact transport cost over time");
  add_common(c, contract, true);
  auto* s = app.add_subcommand("sweep", "Randomized sweeps of the coupling inequalities");
  add_common(s, sweep, true);
  auto* d = app.add_subcommand("dual-check", "Dual problem solve and duality cross-check");
  add_common(d, dual, true);

  OtOptions ot;
  auto* o = app.add_subcommand("ot", "Exact transport cost between two atom-weight CSV files");
  o->add_option("--mu", ot.mu_file, "Source measure CSV")->required()->check(CLI::ExistingFile);
  o->add_option("--nu", ot.nu_file, "Target measure CSV")->required()->check(CLI::ExistingFile);
  o->add_option("--cost", ot.cost, "trunc_abs, trunc_abs_state, trunc_sum, trunc_weighted or power")
      ->capture_default_str();
  o->add_option("--a", ot.a, "Truncation level")->capture_default_str();
  o->add_option("--p", ot.p, "Exponent of the power cost")->capture_default_str();
  o->add_option("--space", ot.space, "State space of the CSV coordinates");
  o->add_flag("--plan", ot.plan, "Also write the optimal plan");
  o->add_option("--out", ot_common.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto run = [](const Common& common, auto command) {
      const json config = load_json_file(common.config);
      const Overrides over{common.seed, common.replicas};
      return finish(command(config, over), common, config);
    };
    if (*v) return run(validate, cmd_validate_a);
    if (*c) return run(contract, cmd_contract);
    if (*s) return run(sweep, cmd_sweep);
    if (*d) return run(dual, cmd_dual_check);
    if (*o) {
      const json config = {{"command", "ot"},   {"mu", ot.mu_file}, {"nu", ot.nu_file},
                           {"cost", ot.cost},   {"a", ot.a},        {"p", ot.p},
                           {"space", ot.space ? *ot.space : ""},   {"plan", ot.plan}};
      return finish(cmd_ot(ot), ot_common, config);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const popot::EnvelopeViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
