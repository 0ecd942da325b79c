// Command-line harness around the experiment runner.
//
//   relayris_cli run <spec.json> [overrides]    full sweep from a spec file
//   relayris_cli sweep --var ... --values ...   inline sweep without a file
//   relayris_cli validate <spec.json>           schema check only
#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "relayris/experiment.hpp"

namespace {

using namespace relayris;

struct CommonFlags {
  std::string out;
  std::uint64_t seed = 0;
  arma::uword trials = 0;
  int threads = 0;
  bool serial = false;
  bool timing = false;
};

void add_common_flags(CLI::App& cmd, CommonFlags& flags) {
  cmd.add_option("--out", flags.out, "Output path prefix");
  cmd.add_option("--seed", flags.seed, "Master seed for the Monte Carlo run");
  cmd.add_option("--trials", flags.trials, "Trials per sweep value");
  cmd.add_option("--threads", flags.threads, "OpenMP thread count (0 = runtime default)");
  cmd.add_flag("--serial", flags.serial, "Run trials on the serial reference path");
  cmd.add_flag("--timing", flags.timing, "Add the wall-time column to the trials CSV");
}

void apply_overrides(ExperimentSpec& spec, const CLI::App& cmd, const CommonFlags& flags) {
  if (cmd.count("--out") > 0) {
    spec.output_prefix = flags.out;
  }
  if (cmd.count("--seed") > 0) {
    spec.seed = flags.seed;
  }
  if (cmd.count("--trials") > 0) {
    spec.trials = flags.trials;
  }
  if (cmd.count("--timing") > 0) {
    spec.emit_timing = flags.timing;
  }
}

int execute(const ExperimentSpec& spec, const CommonFlags& flags) {
  if (spec.output_prefix.empty()) {
    std::cerr << "error: no output prefix (use --out or the spec's \"output\" field)\n";
    return 1;
  }
  if (flags.threads > 0) {
    omp_set_num_threads(flags.threads);
  }
  const ExperimentTables tables = flags.serial ? run_experiment_serial(spec) : run_experiment(spec);
  const OutputPaths paths = emit_outputs(tables, spec);

  std::cout << "wrote " << paths.trials_csv << "\n";
  std::cout << "wrote " << paths.aggregate_json << "\n";
  std::cout << "wrote " << paths.plot_csv << "\n";
  std::cout << "\nscenario                      " << sweep_variable_name(spec.variable)
            << "      mean power [W]   mean [dBm]   feasible\n";
  for (const AggregateRow& agg : tables.aggregates) {
    std::printf("%-28s %8g %16.6g %12.3f %7.0f%%\n",
                std::string(scenario_name(agg.scenario)).c_str(), agg.sweep_value,
                agg.mean_power_w, agg.mean_power_dbm, 100.0 * agg.feasibility_fraction);
  }
  return 0;
}

std::vector<Scenario> parse_scenarios(const std::vector<std::string>& names) {
  std::vector<Scenario> out;
  for (const std::string& name : names) {
    const auto scenario = scenario_from_name(name);
    if (!scenario) {
      throw CLI::ValidationError("--scenarios", "unknown scenario '" + name + "'");
    }
    out.push_back(*scenario);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo power-minimization sweeps for a relay- and RIS-assisted "
               "multiuser downlink"};
  app.require_subcommand(1);

  // --- run ---
  std::string spec_path;
  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Run the sweep described by a JSON spec file");
  run->add_option("spec", spec_path, "Path to the experiment spec (JSON)")->required();
  add_common_flags(*run, run_flags);

  // --- sweep ---
  CommonFlags sweep_flags;
  std::string var_name = "R_th";
  std::vector<double> values;
  std::vector<std::string> scenario_names = {"relay_ris_duality", "relay_ris_zf", "relay_only",
                                             "ris_only"};
  ExperimentSpec inline_spec;
  CLI::App* sweep = app.add_subcommand("sweep", "Run an inline sweep from flags only");
  sweep->add_option("--var", var_name, "Sweep variable: R_th, K, or d_relay");
  sweep->add_option("--values", values, "Sweep values (strictly increasing)")
      ->required()
      ->delimiter(',');
  sweep->add_option("--scenarios", scenario_names, "Scenarios to run")->delimiter(',');
  add_common_flags(*sweep, sweep_flags);
  sweep->add_option("--bs-antennas", inline_spec.base.bs_antennas, "BS antenna count");
  sweep->add_option("--relay-antennas", inline_spec.base.relay_antennas, "Relay antenna count");
  sweep->add_option("--ris-elements", inline_spec.base.ris_elements, "RIS element count");
  sweep->add_option("--users", inline_spec.base.users, "User count");
  sweep->add_option("--phase-bits", inline_spec.base.phase_bits, "Phase bits per RIS element");
  sweep->add_option("--noise-power", inline_spec.base.noise_power_w, "Noise power in watts");
  sweep->add_option("--rate-threshold", inline_spec.base.rate_threshold,
                    "Per-user QoS rate, bits/s/Hz");
  sweep->add_option("--bs-user-distance", inline_spec.base.bs_user_distance_m,
                    "BS to user-circle-center distance [m]");
  sweep->add_option("--user-radius", inline_spec.base.user_radius_m, "User circle radius [m]");
  sweep->add_option("--relay-distance", inline_spec.base.relay_distance_m,
                    "BS to relay/RIS distance [m]");
  sweep->add_option("--rician-factor", inline_spec.base.rician_factor, "Rician factor (linear)");
  sweep->add_option("--block-size", inline_spec.search.block_size,
                    "Phase shifts enumerated jointly per search block");
  sweep->add_option("--rounds-max", inline_spec.search.rounds_max, "Maximum search rounds");

  // --- validate ---
  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Check a spec file against the schema");
  validate->add_option("spec", validate_path, "Path to the experiment spec (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentSpec spec = load_spec(spec_path);
      apply_overrides(spec, *run, run_flags);
      spec.validate();
      return execute(spec, run_flags);
    }
    if (sweep->parsed()) {
      const auto variable = sweep_variable_from_name(var_name);
      if (!variable) {
        std::cerr << "error: --var must be one of R_th, K, d_relay\n";
        return 1;
      }
      inline_spec.variable = *variable;
      inline_spec.values = values;
      inline_spec.scenarios = parse_scenarios(scenario_names);
      apply_overrides(inline_spec, *sweep, sweep_flags);
      inline_spec.validate();
      return execute(inline_spec, sweep_flags);
    }
    if (validate->parsed()) {
      const ExperimentSpec spec = load_spec(validate_path);
      std::cout << "spec OK: " << spec.values.size() << " sweep value(s) over "
                << sweep_variable_name(spec.variable) << ", " << spec.scenarios.size()
                << " scenario(s), " << spec.trials << " trial(s)\n";
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
