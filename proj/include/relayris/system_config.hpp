#pragma once

#include <armadillo>
#include <cstdint>

namespace relayris {

double db_to_linear(double db);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// All scalar system parameters. Defaults reproduce the reference setup: a
// 10-antenna BS, a 9-antenna relay co-located with a 50-element RIS half-way
// to the users, users on a 40 m disc whose center is 300 m from the BS,
// 2-bit phase shifters.
struct SystemConfig {
  arma::uword bs_antennas = 10;       // M
  arma::uword relay_antennas = 9;     // N
  arma::uword ris_elements = 50;      // L
  arma::uword users = 4;              // K
  arma::uword phase_bits = 2;         // b; each element picks one of 2^b phases
  double noise_power_w = dbm_to_watts(-94.0);
  double rate_threshold = 2.0;        // per-user QoS rate, bits/s/Hz
  double bs_user_distance_m = 300.0;  // BS to center of the user disc
  double user_radius_m = 40.0;
  double relay_distance_m = 150.0;    // BS to relay (and RIS)
  double rician_factor = 10.0;        // linear; +inf selects the pure-LoS limit
  double tx_gain_dbi = 5.0;
  double rx_gain_dbi = 0.0;
  double ris_offset_m = 1.0;          // RIS offset perpendicular to the BS-relay line
  std::uint64_t seed = 1;

  arma::uword phase_levels() const { return arma::uword(1) << phase_bits; }

  // Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

}  // namespace relayris
