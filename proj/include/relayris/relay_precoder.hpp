// Relay precoder under residual per-user SINR targets: uplink-downlink
// duality (optimal) and zero-forcing (closed form). Both operate on the K x n
// matrix of effective receive rows, so the same machinery also serves the
// full-duplex BS-only baseline.
#pragma once

#include <armadillo>

#include "relayris/errors.hpp"
#include "relayris/rate_model.hpp"

namespace relayris {

// Residual phase-2 SINR targets, clamped at zero.
struct SinrTargets {
  arma::vec eta;
};

// eta_k = max(0, 2^{2 R_th} - 1 - gamma_{k,1}): whatever the first phase has
// not already delivered toward the QoS rate.
SinrTargets residual_targets(const ChannelSet& channels, const PhaseConfig& phases,
                             const arma::cx_mat& bs_precoder, double rate_threshold,
                             double noise_power);

struct FixedPointSettings {
  double tol = 1e-10;            // relative sup-norm step
  arma::uword max_iters = 10000;
};

struct FixedPointResult {
  arma::vec beta;
  arma::uword iterations = 0;
  double residual = 0.0;
};

struct DualityState {
  arma::vec beta;           // uplink dual powers; 0 for users with eta = 0
  arma::cx_mat directions;  // n x K unit-norm columns; zero for inactive users
  arma::mat coupling;       // K x K; inactive rows/cols are identity placeholders
  arma::vec q;              // downlink powers; 0 for inactive users
  arma::uvec active;
  arma::uword iterations = 0;
  double residual = 0.0;
};

struct DualityResult {
  arma::cx_mat precoder;  // n x K
  DualityState state;
};

// One Jacobi sweep of the dual-power update over the active users.
arma::vec duality_fixed_point_step(const arma::cx_mat& rows, const arma::vec& eta,
                                   double noise_power, const arma::vec& beta);

// Iterates from beta = 0; throws ConvergenceError if the relative step does
// not drop below tol within max_iters.
FixedPointResult duality_fixed_point(const arma::cx_mat& rows, const arma::vec& eta,
                                     double noise_power, const FixedPointSettings& settings = {});

// MMSE directions from the converged duals, downlink powers from the coupling
// system; achieved SINRs equal the targets exactly. Throws
// InfeasibleTargetsError on a singular coupling matrix or negative powers.
DualityResult duality_beamformer(const arma::cx_mat& rows, const arma::vec& eta,
                                 const arma::vec& beta, double noise_power);

// Pseudo-inverse precoder scaled to q_k = noise_power * eta_k; inter-user
// interference is exactly nulled. Throws RankDeficientError when the stacked
// rows lose rank.
arma::cx_mat zf_beamformer(const arma::cx_mat& rows, const arma::vec& eta, double noise_power);

}  // namespace relayris
