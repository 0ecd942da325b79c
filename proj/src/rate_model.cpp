#include "relayris/rate_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relayris {

PhaseConfig PhaseConfig::zeros(arma::uword elements, arma::uword phase_bits) {
  PhaseConfig p;
  p.phase1.zeros(elements);
  p.phase2.zeros(elements);
  p.levels = arma::uword(1) << phase_bits;
  return p;
}

arma::cx_vec unit_phasors(const arma::uvec& indices, arma::uword levels) {
  const double step = 2.0 * std::numbers::pi / static_cast<double>(levels);
  arma::cx_vec out(indices.n_elem);
  for (arma::uword i = 0; i < indices.n_elem; ++i) {
    if (indices[i] >= levels) {
      throw std::invalid_argument("unit_phasors: phase index out of range");
    }
    out[i] = std::polar(1.0, step * static_cast<double>(indices[i]));
  }
  return out;
}

arma::cx_mat effective_first_hop(const ChannelSet& channels, const PhaseConfig& phases) {
  if (channels.ris_relay.n_cols == 0) {
    return channels.bs_relay;
  }
  const arma::cx_vec phi = unit_phasors(phases.phase1, phases.levels);
  return channels.bs_relay + channels.ris_relay * arma::diagmat(phi) * channels.bs_ris;
}

arma::cx_mat first_hop_user_rows(const ChannelSet& channels, const PhaseConfig& phases) {
  if (channels.ris_user.n_cols == 0) {
    return channels.bs_user;
  }
  const arma::cx_vec phi = unit_phasors(phases.phase1, phases.levels);
  return channels.ris_user * arma::diagmat(phi) * channels.bs_ris + channels.bs_user;
}

arma::cx_mat second_hop_user_rows(const ChannelSet& channels, const PhaseConfig& phases) {
  if (channels.ris_user.n_cols == 0) {
    return channels.relay_user;
  }
  const arma::cx_vec phi = unit_phasors(phases.phase2, phases.levels);
  return channels.ris_user * arma::diagmat(phi) * channels.ris_relay.t() + channels.relay_user;
}

arma::cx_rowvec effective_second_hop_user(const ChannelSet& channels, const PhaseConfig& phases,
                                          arma::uword user) {
  if (user >= channels.relay_user.n_rows) {
    throw std::out_of_range("effective_second_hop_user: user index out of range");
  }
  if (channels.ris_user.n_cols == 0) {
    return channels.relay_user.row(user);
  }
  const arma::cx_vec phi = unit_phasors(phases.phase2, phases.levels);
  return channels.ris_user.row(user) * arma::diagmat(phi) * channels.ris_relay.t() +
         channels.relay_user.row(user);
}

double relay_rate(const arma::cx_mat& first_hop, const arma::cx_mat& bs_precoder,
                  double noise_power) {
  if (bs_precoder.n_cols == 0) {
    return 0.0;
  }
  const arma::vec sv = arma::svd(first_hop * bs_precoder);
  double rate = 0.0;
  for (const double s : sv) {
    rate += std::log1p(s * s / noise_power);
  }
  return rate / std::numbers::ln2;
}

arma::vec sinr_from_rows(const arma::cx_mat& rows, const arma::cx_mat& precoder,
                         double noise_power) {
  const arma::uword k = rows.n_rows;
  if (precoder.n_cols == 0 || precoder.n_rows == 0) {
    return arma::vec(k, arma::fill::zeros);
  }
  const arma::mat gains = arma::square(arma::abs(rows * precoder));  // K x K
  arma::vec sinr(k);
  for (arma::uword u = 0; u < k; ++u) {
    const double desired = gains(u, u);
    const double interference = arma::accu(gains.row(u)) - desired;
    sinr[u] = desired / (interference + noise_power);
  }
  return sinr;
}

UserSinrs user_sinrs(const ChannelSet& channels, const PhaseConfig& phases,
                     const arma::cx_mat& bs_precoder, const arma::cx_mat& relay_precoder,
                     double noise_power) {
  UserSinrs out;
  out.phase1 = sinr_from_rows(first_hop_user_rows(channels, phases), bs_precoder, noise_power);
  out.phase2 = sinr_from_rows(second_hop_user_rows(channels, phases), relay_precoder, noise_power);
  return out;
}

double combined_rate(double sinr1, double sinr2) {
  return std::log1p(sinr1 + sinr2) / std::numbers::ln2;
}

SolveReport check_feasibility(const ChannelSet& channels, const PhaseConfig& phases,
                              const BeamformerSolution& solution, const SystemConfig& config) {
  SolveReport report;
  report.phases = phases;
  report.solution = solution;

  const double sigma2 = config.noise_power_w;
  const arma::uword k = config.users;
  const arma::cx_mat first_hop = effective_first_hop(channels, phases);

  report.relay_rate_bits = relay_rate(first_hop, solution.bs_precoder, sigma2);
  report.relay_rate_target = 2.0 * static_cast<double>(k) * config.rate_threshold;

  const UserSinrs sinrs =
      user_sinrs(channels, phases, solution.bs_precoder, solution.relay_precoder, sigma2);
  report.sinr_phase1 = sinrs.phase1;
  report.sinr_phase2 = sinrs.phase2;
  report.user_rates.set_size(k);
  for (arma::uword u = 0; u < k; ++u) {
    report.user_rates[u] = combined_rate(sinrs.phase1[u], sinrs.phase2[u]);
  }
  report.user_rate_target = 2.0 * config.rate_threshold;

  const double w_norm = arma::accu(arma::square(arma::abs(solution.bs_precoder)));
  const double u_norm = arma::accu(arma::square(arma::abs(solution.relay_precoder)));
  report.total_power_w = 0.5 * (w_norm + u_norm);

  const double rate_slack = 1.0 - kRateTolerance;
  bool ok = report.relay_rate_bits >= report.relay_rate_target * rate_slack;
  for (arma::uword u = 0; u < k; ++u) {
    ok = ok && report.user_rates[u] >= report.user_rate_target * rate_slack;
  }
  report.feasible = ok;
  report.min_end_to_end_rate = k > 0 ? report.user_rates.min() / 2.0 : 0.0;
  if (!ok) {
    report.failure = "QoS constraints violated";
  }
  return report;
}

}  // namespace relayris
