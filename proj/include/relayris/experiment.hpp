// Monte Carlo experiment harness: seeded sweeps over R_th, K, or the relay
// distance, one shared channel realization per (value, trial) across all
// requested scenarios, deterministic CSV/JSON outputs.
//
// Trials are independent and run under OpenMP; run_trials_serial is the
// plain-loop reference the tests and the benchmark compare against.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relayris/solver_pipeline.hpp"

namespace relayris {

enum class SweepVariable { kRateThreshold, kUserCount, kRelayDistance };

std::string_view sweep_variable_name(SweepVariable variable);
std::optional<SweepVariable> sweep_variable_from_name(std::string_view name);

struct ExperimentSpec {
  SystemConfig base;
  SweepVariable variable = SweepVariable::kRateThreshold;
  std::vector<double> values;       // nonempty, strictly increasing
  std::vector<Scenario> scenarios;  // run in this order on each realization
  arma::uword trials = 200;
  std::uint64_t seed = 1;
  std::string output_prefix;
  SearchSettings search;
  bool emit_timing = false;  // adds the wall-time column to the trials CSV

  // Throws std::invalid_argument on schema violations (including per-value
  // config invariants).
  void validate() const;

  // Base config with sweep value value_index applied.
  SystemConfig config_for(arma::uword value_index) const;
};

struct ResultRow {
  Scenario scenario = Scenario::kRelayRisDuality;
  SweepVariable variable = SweepVariable::kRateThreshold;
  double sweep_value = 0.0;
  arma::uword value_index = 0;
  arma::uword trial = 0;
  std::uint64_t seed = 0;  // child seed of this (value, trial)
  bool feasible = false;
  double total_power_w = 0.0;   // NaN when infeasible
  double total_power_dbm = 0.0; // 10 log10(1000 * W); NaN when infeasible
  double relay_rate_bits = 0.0;
  double min_user_rate_bits = 0.0;  // end-to-end minimum over users
  double wall_time_ms = 0.0;
};

struct AggregateRow {
  Scenario scenario = Scenario::kRelayRisDuality;
  double sweep_value = 0.0;
  arma::uword trials = 0;
  arma::uword feasible_trials = 0;
  double feasibility_fraction = 0.0;
  double mean_power_w = 0.0;    // NaN when no trial was feasible
  double mean_power_dbm = 0.0;  // of the mean in watts; NaN when undefined
};

struct ExperimentTables {
  std::vector<ResultRow> rows;            // ordered by (value, trial, scenario)
  std::vector<AggregateRow> aggregates;   // ordered by (scenario, value)
};

// OpenMP over the (value, trial) grid; row order is independent of the
// schedule.
ExperimentTables run_experiment(const ExperimentSpec& spec);

// Identical semantics, plain serial loop.
ExperimentTables run_experiment_serial(const ExperimentSpec& spec);

struct OutputPaths {
  std::string trials_csv;
  std::string aggregate_json;
  std::string plot_csv;
};

OutputPaths output_paths(const ExperimentSpec& spec);

// Writes the per-trial CSV, the aggregate JSON, and the plot-data CSV.
// Throws std::runtime_error on I/O failures.
OutputPaths emit_outputs(const ExperimentTables& tables, const ExperimentSpec& spec);

// Fixed serialization used by all emitters: shortest-general form with 17
// significant digits, so values round-trip exactly.
std::string format_number(double value);

// RFC-4180 quoting: wraps fields containing commas, quotes, or newlines.
std::string csv_field(const std::string& value);

// JSON spec file; throws std::invalid_argument with a diagnostic on schema
// violations.
ExperimentSpec load_spec(const std::string& path);
ExperimentSpec parse_spec(const std::string& json_text);

}  // namespace relayris
