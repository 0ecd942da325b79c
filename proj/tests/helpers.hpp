// Shared builders for the unit tests: unit-scale random channel sets and
// configs with hand-picked dimensions (bypassing geometry and path loss).
#pragma once

#include <armadillo>

#include "relayris/channel.hpp"
#include "relayris/random.hpp"
#include "relayris/system_config.hpp"

namespace relayris::test {

inline arma::cx_mat random_matrix(arma::uword rows, arma::uword cols, RandomStream& rng) {
  arma::cx_mat out(rows, cols);
  for (arma::uword c = 0; c < cols; ++c) {
    for (arma::uword r = 0; r < rows; ++r) {
      out(r, c) = rng.cgaussian();
    }
  }
  return out;
}

// Unit-variance channel set of the given dimensions.
inline ChannelSet make_channels(arma::uword m, arma::uword n, arma::uword l, arma::uword k,
                                RandomStream& rng) {
  ChannelSet ch;
  ch.bs_relay = random_matrix(n, m, rng);
  ch.bs_ris = random_matrix(l, m, rng);
  ch.ris_relay = random_matrix(n, l, rng);
  ch.bs_user = random_matrix(k, m, rng);
  ch.relay_user = random_matrix(k, n, rng);
  ch.ris_user = random_matrix(k, l, rng);
  return ch;
}

// Config matching hand-built channel dimensions; unit noise by default so
// solver tolerances stay scale-free.
inline SystemConfig make_config(arma::uword m, arma::uword n, arma::uword l, arma::uword k,
                                arma::uword bits = 2, double noise = 1.0,
                                double rate_threshold = 1.0) {
  SystemConfig cfg;
  cfg.bs_antennas = m;
  cfg.relay_antennas = n;
  cfg.ris_elements = l;
  cfg.users = k;
  cfg.phase_bits = bits;
  cfg.noise_power_w = noise;
  cfg.rate_threshold = rate_threshold;
  return cfg;
}

}  // namespace relayris::test
