// Benchmark: OpenMP trial loop against the serial reference on the same
// sweep, verifying that both produce identical result tables.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <string>

#include "relayris/experiment.hpp"

using namespace relayris;

namespace {

double time_run(ExperimentTables (*runner)(const ExperimentSpec&), const ExperimentSpec& spec,
                ExperimentTables& out) {
  const auto start = std::chrono::steady_clock::now();
  out = runner(spec);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool rows_identical(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b) {
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool same = a[i].scenario == b[i].scenario && a[i].seed == b[i].seed &&
                      a[i].feasible == b[i].feasible &&
                      format_number(a[i].total_power_w) == format_number(b[i].total_power_w) &&
                      format_number(a[i].relay_rate_bits) == format_number(b[i].relay_rate_bits) &&
                      format_number(a[i].min_user_rate_bits) ==
                          format_number(b[i].min_user_rate_bits);
    if (!same) {
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentSpec spec;
  spec.base.bs_antennas = 8;
  spec.base.relay_antennas = 6;
  spec.base.ris_elements = 16;
  spec.base.users = 3;
  spec.variable = SweepVariable::kRateThreshold;
  spec.values = {1.0, 2.0};
  spec.scenarios = {Scenario::kRelayRisDuality, Scenario::kRelayRisZf, Scenario::kRelayOnly};
  spec.trials = argc > 1 ? std::stoul(argv[1]) : 24;
  spec.seed = 2024;

  std::printf("bench: %zu sweep values x %llu trials x %zu scenarios, %d thread(s)\n",
              spec.values.size(), static_cast<unsigned long long>(spec.trials),
              spec.scenarios.size(), omp_get_max_threads());

  ExperimentTables serial_tables;
  ExperimentTables parallel_tables;
  const double t_serial = time_run(run_experiment_serial, spec, serial_tables);
  const double t_parallel = time_run(run_experiment, spec, parallel_tables);

  std::printf("serial reference : %8.3f s\n", t_serial);
  std::printf("OpenMP trial loop: %8.3f s\n", t_parallel);
  std::printf("speedup          : %8.2fx\n", t_serial / t_parallel);

  if (!rows_identical(serial_tables.rows, parallel_tables.rows)) {
    std::printf("MISMATCH: parallel rows differ from the serial reference\n");
    return 1;
  }
  std::printf("parallel rows match the serial reference\n");
  return 0;
}
