// Node geometry and random channel generation: Rician fading with LoS
// steering on the BS/relay/RIS links, Rayleigh fading on all user links,
// distance-based path loss throughout.
#pragma once

#include <armadillo>
#include <utility>

#include "relayris/random.hpp"
#include "relayris/system_config.hpp"

namespace relayris {

// 2-D node placement and the distances of every modeled link.
struct Geometry {
  arma::vec2 bs;
  arma::vec2 relay;
  arma::vec2 ris;
  arma::mat users;  // 2 x K, one column per user

  double bs_relay_m = 0.0;
  double bs_ris_m = 0.0;
  double ris_relay_m = 0.0;
  arma::vec bs_user_m;     // length K
  arma::vec relay_user_m;  // length K
  arma::vec ris_user_m;    // length K
};

// One realization of all modeled links. User-side channels are stored as the
// 1 x n rows that enter the rate expressions directly (row k = user k); the
// relay-to-RIS channel in the second phase is ris_relay's conjugate transpose
// (reciprocity).
struct ChannelSet {
  arma::cx_mat bs_relay;    // N x M
  arma::cx_mat bs_ris;      // L x M
  arma::cx_mat ris_relay;   // N x L
  arma::cx_mat bs_user;     // K x M
  arma::cx_mat relay_user;  // K x N
  arma::cx_mat ris_user;    // K x L
};

// Linear power gain C / d^alpha. LoS links use alpha = 2.2 and a 35.95 dB
// reference loss, NLoS links alpha = 3.67 and 33.95 dB. Throws
// std::domain_error for nonpositive distances.
double path_loss(double distance_m, bool line_of_sight, double tx_gain_dbi, double rx_gain_dbi);

// Half-wavelength spaced linear array; element i carries phase
// pi * i * sin(angle). angle is measured from array broadside.
arma::cx_vec steering_vector_ula(arma::uword elements, double angle_rad);

// Half-wavelength spaced planar array, rows stacked over the vertical axis.
// Element (p, q) carries phase pi * (p * sin(elevation) +
// q * cos(elevation) * sin(azimuth)); vector index is p * cols + q.
arma::cx_vec steering_vector_upa(arma::uword rows, arma::uword cols, double azimuth_rad,
                                 double elevation_rad);

// Squarest rows x cols factorization of n with rows <= cols (50 -> 5 x 10).
std::pair<arma::uword, arma::uword> upa_shape(arma::uword elements);

// BS at the origin, user circle center on the +x axis, relay on the BS-center
// line at relay_distance_m, RIS offset perpendicular to it, users uniform on
// the disc.
Geometry build_geometry(const SystemConfig& config, RandomStream& rng);

// Draw order is fixed (bs_relay, bs_ris, ris_relay, then the user links in
// struct order, entries column-major) so a seed pins the whole realization.
ChannelSet sample_channels(const Geometry& geometry, const SystemConfig& config,
                           RandomStream& rng);

}  // namespace relayris
