#include "relayris/experiment.hpp"

#include <omp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "relayris/random.hpp"

namespace relayris {

std::string_view sweep_variable_name(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::kRateThreshold:
      return "R_th";
    case SweepVariable::kUserCount:
      return "K";
    case SweepVariable::kRelayDistance:
      return "d_relay";
  }
  return "unknown";
}

std::optional<SweepVariable> sweep_variable_from_name(std::string_view name) {
  for (const SweepVariable v : {SweepVariable::kRateThreshold, SweepVariable::kUserCount,
                                SweepVariable::kRelayDistance}) {
    if (sweep_variable_name(v) == name) {
      return v;
    }
  }
  return std::nullopt;
}

SystemConfig ExperimentSpec::config_for(arma::uword value_index) const {
  SystemConfig config = base;
  const double value = values.at(value_index);
  switch (variable) {
    case SweepVariable::kRateThreshold:
      config.rate_threshold = value;
      break;
    case SweepVariable::kUserCount:
      config.users = static_cast<arma::uword>(std::llround(value));
      break;
    case SweepVariable::kRelayDistance:
      config.relay_distance_m = value;
      break;
  }
  return config;
}

void ExperimentSpec::validate() const {
  if (values.empty()) {
    throw std::invalid_argument("ExperimentSpec: sweep value list is empty");
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw std::invalid_argument("ExperimentSpec: sweep values must be strictly increasing");
    }
  }
  if (variable == SweepVariable::kUserCount) {
    for (const double v : values) {
      if (v < 1.0 || v != std::floor(v)) {
        throw std::invalid_argument("ExperimentSpec: user counts must be positive integers");
      }
    }
  }
  if (scenarios.empty()) {
    throw std::invalid_argument("ExperimentSpec: scenario list is empty");
  }
  if (trials < 1) {
    throw std::invalid_argument("ExperimentSpec: trials must be at least 1");
  }
  search.validate(base.phase_bits);
  for (arma::uword i = 0; i < values.size(); ++i) {
    config_for(i).validate();
  }
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// All scenario rows of one (value, trial) cell; scenarios share the channel
// realization drawn from the cell's child seed.
void run_cell(const ExperimentSpec& spec, arma::uword value_index, arma::uword trial,
              ResultRow* out) {
  const SystemConfig config = spec.config_for(value_index);
  const std::uint64_t child = derive_seed(spec.seed, value_index, trial);
  RandomStream rng(child);
  const Geometry geometry = build_geometry(config, rng);
  const ChannelSet channels = sample_channels(geometry, config, rng);

  for (std::size_t s = 0; s < spec.scenarios.size(); ++s) {
    const auto start = std::chrono::steady_clock::now();
    const SolveReport report =
        solve_scenario(spec.scenarios[s], channels, config, spec.search);
    const std::chrono::duration<double, std::milli> elapsed =
        std::chrono::steady_clock::now() - start;

    ResultRow& row = out[s];
    row.scenario = spec.scenarios[s];
    row.variable = spec.variable;
    row.sweep_value = spec.values[value_index];
    row.value_index = value_index;
    row.trial = trial;
    row.seed = child;
    row.feasible = report.feasible;
    row.total_power_w = report.feasible ? report.total_power_w : kNaN;
    row.total_power_dbm = report.feasible && report.total_power_w > 0.0
                              ? watts_to_dbm(report.total_power_w)
                              : (report.feasible ? -arma::datum::inf : kNaN);
    row.relay_rate_bits = report.relay_rate_bits;
    row.min_user_rate_bits = report.min_end_to_end_rate;
    row.wall_time_ms = elapsed.count();
  }
}

std::vector<AggregateRow> aggregate(const ExperimentSpec& spec,
                                    const std::vector<ResultRow>& rows) {
  std::vector<AggregateRow> out;
  for (const Scenario scenario : spec.scenarios) {
    for (arma::uword v = 0; v < spec.values.size(); ++v) {
      AggregateRow agg;
      agg.scenario = scenario;
      agg.sweep_value = spec.values[v];
      double power_sum = 0.0;
      for (const ResultRow& row : rows) {
        if (row.scenario != scenario || row.value_index != v) {
          continue;
        }
        ++agg.trials;
        if (row.feasible) {
          ++agg.feasible_trials;
          power_sum += row.total_power_w;
        }
      }
      agg.feasibility_fraction =
          agg.trials > 0 ? static_cast<double>(agg.feasible_trials) / agg.trials : 0.0;
      if (agg.feasible_trials > 0) {
        agg.mean_power_w = power_sum / static_cast<double>(agg.feasible_trials);
        agg.mean_power_dbm =
            agg.mean_power_w > 0.0 ? watts_to_dbm(agg.mean_power_w) : -arma::datum::inf;
      } else {
        agg.mean_power_w = kNaN;
        agg.mean_power_dbm = kNaN;
      }
      out.push_back(agg);
    }
  }
  return out;
}

ExperimentTables run_experiment_impl(const ExperimentSpec& spec, bool parallel) {
  spec.validate();
  const arma::uword num_values = spec.values.size();
  const arma::uword num_cells = num_values * spec.trials;
  const std::size_t per_cell = spec.scenarios.size();

  ExperimentTables tables;
  tables.rows.resize(num_cells * per_cell);

  if (parallel) {
    #pragma omp parallel for schedule(dynamic)
    for (arma::uword cell = 0; cell < num_cells; ++cell) {
      run_cell(spec, cell / spec.trials, cell % spec.trials, &tables.rows[cell * per_cell]);
    }
  } else {
    for (arma::uword cell = 0; cell < num_cells; ++cell) {
      run_cell(spec, cell / spec.trials, cell % spec.trials, &tables.rows[cell * per_cell]);
    }
  }

  tables.aggregates = aggregate(spec, tables.rows);
  return tables;
}

}  // namespace

ExperimentTables run_experiment(const ExperimentSpec& spec) {
  return run_experiment_impl(spec, true);
}

ExperimentTables run_experiment_serial(const ExperimentSpec& spec) {
  return run_experiment_impl(spec, false);
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) {
    return value;
  }
  std::string quoted = "\"";
  for (const char c : value) {
    if (c == '"') {
      quoted += '"';
    }
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

OutputPaths output_paths(const ExperimentSpec& spec) {
  return {spec.output_prefix + "_trials.csv", spec.output_prefix + "_aggregate.json",
          spec.output_prefix + "_plot.csv"};
}

namespace {

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) {
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("emit_outputs: cannot open '" + path + "' for writing");
  }
  return out;
}

void write_trials_csv(const std::string& path, const ExperimentTables& tables,
                      const ExperimentSpec& spec) {
  std::ofstream out = open_output(path);
  out << "scenario,sweep_variable,sweep_value,trial,seed,feasible,total_power_w,"
         "total_power_dbm,relay_rate_bps_hz,min_user_rate_bps_hz";
  if (spec.emit_timing) {
    out << ",wall_time_ms";
  }
  out << "\n";
  for (const ResultRow& row : tables.rows) {
    out << csv_field(std::string(scenario_name(row.scenario))) << ','
        << csv_field(std::string(sweep_variable_name(row.variable))) << ','
        << format_number(row.sweep_value) << ',' << row.trial << ',' << row.seed << ','
        << (row.feasible ? 1 : 0) << ',' << format_number(row.total_power_w) << ','
        << format_number(row.total_power_dbm) << ',' << format_number(row.relay_rate_bits) << ','
        << format_number(row.min_user_rate_bits);
    if (spec.emit_timing) {
      out << ',' << format_number(row.wall_time_ms);
    }
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("emit_outputs: write failed for '" + path + "'");
  }
}

void write_aggregate_json(const std::string& path, const ExperimentTables& tables,
                          const ExperimentSpec& spec) {
  nlohmann::ordered_json doc;
  doc["sweep_variable"] = std::string(sweep_variable_name(spec.variable));
  doc["trials"] = spec.trials;
  doc["seed"] = spec.seed;
  nlohmann::ordered_json scenarios = nlohmann::ordered_json::object();
  for (const AggregateRow& agg : tables.aggregates) {
    nlohmann::ordered_json entry;
    entry["trials"] = agg.trials;
    entry["feasible_trials"] = agg.feasible_trials;
    entry["feasibility_fraction"] = agg.feasibility_fraction;
    if (agg.feasible_trials > 0) {
      entry["mean_power_w"] = agg.mean_power_w;
      entry["mean_power_dbm"] = agg.mean_power_dbm;
    } else {
      entry["mean_power_w"] = nullptr;
      entry["mean_power_dbm"] = nullptr;
    }
    scenarios[std::string(scenario_name(agg.scenario))][format_number(agg.sweep_value)] = entry;
  }
  doc["scenarios"] = scenarios;

  std::ofstream out = open_output(path);
  out << doc.dump(2) << "\n";
  if (!out) {
    throw std::runtime_error("emit_outputs: write failed for '" + path + "'");
  }
}

void write_plot_csv(const std::string& path, const ExperimentTables& tables,
                    const ExperimentSpec& spec) {
  std::ofstream out = open_output(path);
  out << csv_field(std::string(sweep_variable_name(spec.variable)));
  for (const Scenario scenario : spec.scenarios) {
    const std::string name(scenario_name(scenario));
    out << ',' << name << "_mean_power_w," << name << "_mean_power_dbm," << name
        << "_feasibility";
  }
  out << "\n";
  for (arma::uword v = 0; v < spec.values.size(); ++v) {
    out << format_number(spec.values[v]);
    for (const Scenario scenario : spec.scenarios) {
      const AggregateRow* found = nullptr;
      for (const AggregateRow& agg : tables.aggregates) {
        if (agg.scenario == scenario && agg.sweep_value == spec.values[v]) {
          found = &agg;
          break;
        }
      }
      if (found == nullptr) {
        out << ",nan,nan,0";
      } else {
        out << ',' << format_number(found->mean_power_w) << ','
            << format_number(found->mean_power_dbm) << ','
            << format_number(found->feasibility_fraction);
      }
    }
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("emit_outputs: write failed for '" + path + "'");
  }
}

}  // namespace

OutputPaths emit_outputs(const ExperimentTables& tables, const ExperimentSpec& spec) {
  if (spec.output_prefix.empty()) {
    throw std::runtime_error("emit_outputs: output prefix is empty");
  }
  const OutputPaths paths = output_paths(spec);
  write_trials_csv(paths.trials_csv, tables, spec);
  write_aggregate_json(paths.aggregate_json, tables, spec);
  write_plot_csv(paths.plot_csv, tables, spec);
  return paths;
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const std::string& key : allowed) {
      known = known || key == item.key();
    }
    if (!known) {
      throw std::invalid_argument("spec: unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) {
    try {
      target = obj.at(key).get<T>();
    } catch (const json::exception&) {
      throw std::invalid_argument(std::string("spec: field '") + key + "' has the wrong type");
    }
  }
}

}  // namespace

ExperimentSpec parse_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& err) {
    throw std::invalid_argument(std::string("spec: invalid JSON: ") + err.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("spec: top level must be a JSON object");
  }
  reject_unknown_keys(doc, {"system", "sweep", "scenarios", "trials", "seed", "output", "search",
                            "timing"},
                      "top level");

  ExperimentSpec spec;
  if (doc.contains("system")) {
    const json& sys = doc.at("system");
    reject_unknown_keys(sys,
                        {"bs_antennas", "relay_antennas", "ris_elements", "users", "phase_bits",
                         "noise_power_w", "rate_threshold", "bs_user_distance_m", "user_radius_m",
                         "relay_distance_m", "rician_factor", "tx_gain_dbi", "rx_gain_dbi",
                         "ris_offset_m", "seed"},
                        "system");
    read_field(sys, "bs_antennas", spec.base.bs_antennas);
    read_field(sys, "relay_antennas", spec.base.relay_antennas);
    read_field(sys, "ris_elements", spec.base.ris_elements);
    read_field(sys, "users", spec.base.users);
    read_field(sys, "phase_bits", spec.base.phase_bits);
    read_field(sys, "noise_power_w", spec.base.noise_power_w);
    read_field(sys, "rate_threshold", spec.base.rate_threshold);
    read_field(sys, "bs_user_distance_m", spec.base.bs_user_distance_m);
    read_field(sys, "user_radius_m", spec.base.user_radius_m);
    read_field(sys, "relay_distance_m", spec.base.relay_distance_m);
    read_field(sys, "rician_factor", spec.base.rician_factor);
    read_field(sys, "tx_gain_dbi", spec.base.tx_gain_dbi);
    read_field(sys, "rx_gain_dbi", spec.base.rx_gain_dbi);
    read_field(sys, "ris_offset_m", spec.base.ris_offset_m);
    read_field(sys, "seed", spec.base.seed);
  }

  if (!doc.contains("sweep")) {
    throw std::invalid_argument("spec: missing 'sweep' section");
  }
  const json& sweep = doc.at("sweep");
  reject_unknown_keys(sweep, {"variable", "values"}, "sweep");
  std::string variable_name;
  read_field(sweep, "variable", variable_name);
  const auto variable = sweep_variable_from_name(variable_name);
  if (!variable) {
    throw std::invalid_argument("spec: sweep variable must be one of R_th, K, d_relay");
  }
  spec.variable = *variable;
  read_field(sweep, "values", spec.values);

  if (!doc.contains("scenarios")) {
    throw std::invalid_argument("spec: missing 'scenarios' list");
  }
  std::vector<std::string> scenario_names;
  read_field(doc, "scenarios", scenario_names);
  for (const std::string& name : scenario_names) {
    const auto scenario = scenario_from_name(name);
    if (!scenario) {
      throw std::invalid_argument("spec: unknown scenario '" + name + "'");
    }
    spec.scenarios.push_back(*scenario);
  }

  read_field(doc, "trials", spec.trials);
  read_field(doc, "seed", spec.seed);
  read_field(doc, "output", spec.output_prefix);
  read_field(doc, "timing", spec.emit_timing);

  if (doc.contains("search")) {
    const json& search = doc.at("search");
    reject_unknown_keys(search,
                        {"block_size", "rounds_max", "improvement_tol", "fixed_point_tol",
                         "fixed_point_max_iters", "parallel"},
                        "search");
    read_field(search, "block_size", spec.search.block_size);
    read_field(search, "rounds_max", spec.search.rounds_max);
    read_field(search, "improvement_tol", spec.search.improvement_tol);
    read_field(search, "fixed_point_tol", spec.search.fixed_point.tol);
    read_field(search, "fixed_point_max_iters", spec.search.fixed_point.max_iters);
    read_field(search, "parallel", spec.search.parallel);
  }

  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("spec: cannot read '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_spec(buffer.str());
}

}  // namespace relayris
