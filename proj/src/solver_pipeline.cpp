#include "relayris/solver_pipeline.hpp"

#include <cmath>

namespace relayris {

namespace {

// RIS absent: empty reflected-path matrices, so the effective channels
// collapse to the direct links.
ChannelSet remove_ris(const ChannelSet& channels) {
  ChannelSet stripped = channels;
  stripped.bs_ris.set_size(0, channels.bs_ris.n_cols);
  stripped.ris_relay.set_size(channels.ris_relay.n_rows, 0);
  stripped.ris_user.set_size(channels.ris_user.n_rows, 0);
  return stripped;
}

}  // namespace

SolveReport solve_relay_ris(const ChannelSet& channels, const SystemConfig& config,
                            const SearchSettings& settings) {
  const PhaseConfig init = PhaseConfig::zeros(channels.ris_user.n_cols, config.phase_bits);
  return coordinate_descent(channels, config, settings, init).report;
}

SolveReport solve_relay_only(const ChannelSet& channels, const SystemConfig& config,
                             const FixedPointSettings& fixed_point) {
  const ChannelSet stripped = remove_ris(channels);
  const PhaseConfig phases = PhaseConfig::zeros(0, config.phase_bits);
  return evaluate_phases(stripped, phases, config, InnerSolver::kDuality, fixed_point);
}

SolveReport solve_ris_only(const ChannelSet& channels, const SystemConfig& config,
                           const SearchSettings& settings) {
  settings.validate(config.phase_bits);
  const arma::uword elements = channels.ris_user.n_cols;
  const arma::uword levels = config.phase_levels();
  const arma::uword k = config.users;
  const double sigma2 = config.noise_power_w;
  // Rates are not halved without the two-phase split, so the per-user SINR
  // target is 2^{R_th} - 1.
  const arma::vec eta(k, arma::fill::value(std::exp2(config.rate_threshold) - 1.0));

  const auto evaluate = [&](const arma::uvec& flat) {
    PhaseConfig phases;
    phases.levels = levels;
    phases.phase1 = flat;
    phases.phase2.zeros(flat.n_elem);

    SolveReport report;
    report.phases = phases;
    report.user_rate_target = config.rate_threshold;
    try {
      const arma::cx_mat rows = first_hop_user_rows(channels, phases);
      const FixedPointResult fp = duality_fixed_point(rows, eta, sigma2, settings.fixed_point);
      const DualityResult bs = duality_beamformer(rows, eta, fp.beta, sigma2);

      report.solution.bs_precoder = bs.precoder;
      report.solution.bs_stream_power = bs.state.q;
      report.fixed_point_iterations = fp.iterations;
      report.fixed_point_residual = fp.residual;

      report.sinr_phase1 = sinr_from_rows(rows, bs.precoder, sigma2);
      report.sinr_phase2.zeros(k);
      report.user_rates.set_size(k);
      for (arma::uword u = 0; u < k; ++u) {
        report.user_rates[u] = combined_rate(report.sinr_phase1[u], 0.0);
      }
      // Full-time transmission: the BS is active in both phases, so the
      // half-duplex 1/2 factor does not apply.
      report.total_power_w = arma::accu(arma::square(arma::abs(bs.precoder)));
      report.feasible =
          report.user_rates.min() >= config.rate_threshold * (1.0 - kRateTolerance);
      report.min_end_to_end_rate = report.user_rates.min();
      if (!report.feasible) {
        report.failure = "QoS constraints violated";
      }
    } catch (const SolveError& err) {
      report.feasible = false;
      report.total_power_w = kInfeasibleObjective;
      report.failure = err.what();
    }
    return report;
  };

  const arma::uvec init(elements, arma::fill::zeros);
  FlatSearchResult flat = block_coordinate_descent(elements, levels, settings, evaluate, init);
  return std::move(flat.report);
}

std::string_view scenario_name(Scenario scenario) {
  switch (scenario) {
    case Scenario::kRelayRisDuality:
      return "relay_ris_duality";
    case Scenario::kRelayRisZf:
      return "relay_ris_zf";
    case Scenario::kRelayOnly:
      return "relay_only";
    case Scenario::kRisOnly:
      return "ris_only";
  }
  return "unknown";
}

std::optional<Scenario> scenario_from_name(std::string_view name) {
  for (const Scenario s : kAllScenarios) {
    if (scenario_name(s) == name) {
      return s;
    }
  }
  return std::nullopt;
}

SolveReport solve_scenario(Scenario scenario, const ChannelSet& channels,
                           const SystemConfig& config, const SearchSettings& settings) {
  switch (scenario) {
    case Scenario::kRelayRisDuality: {
      SearchSettings duality = settings;
      duality.inner_solver = InnerSolver::kDuality;
      return solve_relay_ris(channels, config, duality);
    }
    case Scenario::kRelayRisZf: {
      SearchSettings zf = settings;
      zf.inner_solver = InnerSolver::kZeroForcing;
      return solve_relay_ris(channels, config, zf);
    }
    case Scenario::kRelayOnly:
      return solve_relay_only(channels, config, settings.fixed_point);
    case Scenario::kRisOnly:
      return solve_ris_only(channels, config, settings);
  }
  throw std::invalid_argument("solve_scenario: unknown scenario");
}

}  // namespace relayris
