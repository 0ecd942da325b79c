// BS precoder: top-K right singular vectors of the effective first-hop
// channel, with water-filled stream powers that make the relay sum-rate
// constraint active.
#pragma once

#include <armadillo>

#include "relayris/errors.hpp"

namespace relayris {

struct WaterfillResult {
  arma::vec stream_power;   // P_k, length K
  double water_level = 0.0; // mu
  arma::vec eigenvalues;    // lambda_k = squared singular values, descending
  arma::uvec active;        // stream indices with P_k > 0
  double achieved_rate = 0.0;
};

struct BsPrecoderResult {
  arma::cx_mat precoder;  // W = V_K diag(P)^{1/2}, M x K
  WaterfillResult waterfill;
};

// Power allocation minimizing sum(P) subject to
// sum_k log2(1 + P_k lambda_k / noise) >= target_rate, P >= 0. Streams whose
// inverse gain sits above the water level get exactly zero. Throws
// RankDeficientError when fewer than eigenvalues.n_elem positive modes exist.
WaterfillResult waterfill(const arma::vec& eigenvalues, double target_rate, double noise_power);

// Full SVD route: decompose first_hop, water-fill over the top `streams`
// squared singular values against the sum-rate target 2 * streams *
// rate_threshold. Throws RankDeficientError when the channel cannot carry
// that many streams.
BsPrecoderResult svd_waterfill(const arma::cx_mat& first_hop, arma::uword streams,
                               double rate_threshold, double noise_power);

}  // namespace relayris
