// Rate and SINR expressions for a candidate (W, U, Theta1, Theta2), plus the
// feasibility check against the QoS constraints.
#pragma once

#include <armadillo>
#include <limits>
#include <string>
#include <vector>

#include "relayris/channel.hpp"
#include "relayris/system_config.hpp"

namespace relayris {

// Relative tolerance applied to every rate constraint.
inline constexpr double kRateTolerance = 1e-6;

// Objective sentinel carried by infeasible reports.
inline constexpr double kInfeasibleObjective = std::numeric_limits<double>::infinity();

// Discrete phase-shift indices for both transmission phases. Element l of
// phase p realizes exp(j * 2*pi * index / levels).
struct PhaseConfig {
  arma::uvec phase1;  // length L, indices in [0, levels)
  arma::uvec phase2;  // length L
  arma::uword levels = 4;

  static PhaseConfig zeros(arma::uword elements, arma::uword phase_bits);
};

// Unit-modulus phasors realized by a vector of phase indices.
arma::cx_vec unit_phasors(const arma::uvec& indices, arma::uword levels);

struct BeamformerSolution {
  arma::cx_mat bs_precoder;     // W, M x K
  arma::cx_mat relay_precoder;  // U, N x K
  arma::vec bs_stream_power;    // per-stream BS powers
  arma::vec relay_user_power;   // per-user relay powers
};

// Outcome of one full solve: objective, achieved rates, diagnostics. The
// search layer fills the round trace; the inner solvers fill the fixed-point
// counters.
struct SolveReport {
  bool feasible = false;
  double total_power_w = kInfeasibleObjective;
  double relay_rate_bits = 0.0;
  double relay_rate_target = 0.0;  // 2 K R_th; 0 when no relay participates
  arma::vec sinr_phase1;           // per-user linear SINR, first phase
  arma::vec sinr_phase2;
  arma::vec user_rates;       // per-user achievable encoding rate
  double user_rate_target = 0.0;   // 2 R_th (R_th for the full-duplex baseline)
  double min_end_to_end_rate = 0.0;
  BeamformerSolution solution;
  PhaseConfig phases;
  arma::uword fixed_point_iterations = 0;
  double fixed_point_residual = 0.0;
  arma::uword search_rounds = 0;
  std::vector<double> round_objectives;
  std::string failure;  // nonempty when infeasible

  // Objective used by the phase search: total power, +inf when infeasible.
  double objective() const { return feasible ? total_power_w : kInfeasibleObjective; }
};

// H_TR + H_IR diag(phasors(theta1)) H_TI; the composite first-hop channel.
arma::cx_mat effective_first_hop(const ChannelSet& channels, const PhaseConfig& phases);

// Stacked phase-1 BS -> user rows (K x M): row k is
// h_Ik diag(phasors(theta1)) H_TI + h_Tk.
arma::cx_mat first_hop_user_rows(const ChannelSet& channels, const PhaseConfig& phases);

// Phase-2 relay -> user row (1 x N): h_Ik diag(phasors(theta2)) H_IR^H + h_Rk.
arma::cx_rowvec effective_second_hop_user(const ChannelSet& channels, const PhaseConfig& phases,
                                          arma::uword user);

// All K phase-2 rows stacked (K x N).
arma::cx_mat second_hop_user_rows(const ChannelSet& channels, const PhaseConfig& phases);

// log2 det(I + first_hop W W^H first_hop^H / noise), via singular values.
double relay_rate(const arma::cx_mat& first_hop, const arma::cx_mat& bs_precoder,
                  double noise_power);

// Per-user SINR of rows (K x n) against precoder columns (n x K): user k's
// desired power over the other columns' interference plus noise.
arma::vec sinr_from_rows(const arma::cx_mat& rows, const arma::cx_mat& precoder,
                         double noise_power);

struct UserSinrs {
  arma::vec phase1;
  arma::vec phase2;
};

UserSinrs user_sinrs(const ChannelSet& channels, const PhaseConfig& phases,
                     const arma::cx_mat& bs_precoder, const arma::cx_mat& relay_precoder,
                     double noise_power);

// log2(1 + sinr1 + sinr2): both phases combine at the user before decoding.
double combined_rate(double sinr1, double sinr2);

// Evaluates every rate expression for the candidate solution and applies the
// QoS constraints (relay sum rate >= 2 K R_th, combined user rates >= 2 R_th,
// both within kRateTolerance relative).
SolveReport check_feasibility(const ChannelSet& channels, const PhaseConfig& phases,
                              const BeamformerSolution& solution, const SystemConfig& config);

}  // namespace relayris
