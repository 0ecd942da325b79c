#include "relayris/channel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace relayris {

namespace {

constexpr double kPi = std::numbers::pi;

double bearing(const arma::vec2& from, const arma::vec2& to) {
  return std::atan2(to[1] - from[1], to[0] - from[0]);
}

// NLoS matrix with i.i.d. CN(0, 1) entries, filled column-major.
arma::cx_mat draw_scatter(arma::uword rows, arma::uword cols, RandomStream& rng) {
  arma::cx_mat out(rows, cols);
  for (arma::uword c = 0; c < cols; ++c) {
    for (arma::uword r = 0; r < rows; ++r) {
      out(r, c) = rng.cgaussian();
    }
  }
  return out;
}

arma::cx_mat rician_link(const arma::cx_mat& los, double beta, double kappa, RandomStream& rng) {
  const arma::cx_mat scatter = draw_scatter(los.n_rows, los.n_cols, rng);
  if (std::isinf(kappa)) {
    return std::sqrt(beta) * los;
  }
  const double los_w = std::sqrt(kappa / (1.0 + kappa));
  const double nlos_w = std::sqrt(1.0 / (1.0 + kappa));
  return std::sqrt(beta) * (los_w * los + nlos_w * scatter);
}

}  // namespace

double path_loss(double distance_m, bool line_of_sight, double tx_gain_dbi, double rx_gain_dbi) {
  if (!(distance_m > 0.0)) {
    throw std::domain_error("path_loss: distance must be positive");
  }
  const double ref_db = line_of_sight ? 35.95 : 33.95;
  const double exponent = line_of_sight ? 2.2 : 3.67;
  const double c = std::pow(10.0, (tx_gain_dbi + rx_gain_dbi - ref_db) / 10.0);
  return c / std::pow(distance_m, exponent);
}

arma::cx_vec steering_vector_ula(arma::uword elements, double angle_rad) {
  arma::cx_vec v(elements);
  const double step = kPi * std::sin(angle_rad);
  for (arma::uword i = 0; i < elements; ++i) {
    v[i] = std::polar(1.0, step * static_cast<double>(i));
  }
  return v;
}

arma::cx_vec steering_vector_upa(arma::uword rows, arma::uword cols, double azimuth_rad,
                                 double elevation_rad) {
  arma::cx_vec v(rows * cols);
  const double vert = kPi * std::sin(elevation_rad);
  const double horiz = kPi * std::cos(elevation_rad) * std::sin(azimuth_rad);
  for (arma::uword p = 0; p < rows; ++p) {
    for (arma::uword q = 0; q < cols; ++q) {
      v[p * cols + q] = std::polar(1.0, vert * static_cast<double>(p) + horiz * static_cast<double>(q));
    }
  }
  return v;
}

std::pair<arma::uword, arma::uword> upa_shape(arma::uword elements) {
  arma::uword rows = 1;
  for (arma::uword d = 1; d * d <= elements; ++d) {
    if (elements % d == 0) {
      rows = d;
    }
  }
  return {rows, elements / rows};
}

Geometry build_geometry(const SystemConfig& config, RandomStream& rng) {
  Geometry g;
  g.bs = {0.0, 0.0};
  const arma::vec2 center = {config.bs_user_distance_m, 0.0};
  g.relay = {config.relay_distance_m, 0.0};
  g.ris = {config.relay_distance_m, config.ris_offset_m};

  const arma::uword k = config.users;
  g.users.set_size(2, k);
  for (arma::uword u = 0; u < k; ++u) {
    const double radius = config.user_radius_m * std::sqrt(rng.uniform());
    const double angle = 2.0 * kPi * rng.uniform();
    g.users(0, u) = center[0] + radius * std::cos(angle);
    g.users(1, u) = center[1] + radius * std::sin(angle);
  }

  g.bs_relay_m = arma::norm(g.relay - g.bs);
  g.bs_ris_m = arma::norm(g.ris - g.bs);
  g.ris_relay_m = arma::norm(g.ris - g.relay);
  g.bs_user_m.set_size(k);
  g.relay_user_m.set_size(k);
  g.ris_user_m.set_size(k);
  for (arma::uword u = 0; u < k; ++u) {
    const arma::vec2 pos = g.users.col(u);
    g.bs_user_m[u] = arma::norm(pos - g.bs);
    g.relay_user_m[u] = arma::norm(pos - g.relay);
    g.ris_user_m[u] = arma::norm(pos - g.ris);
  }
  return g;
}

ChannelSet sample_channels(const Geometry& geometry, const SystemConfig& config,
                           RandomStream& rng) {
  const arma::uword m = config.bs_antennas;
  const arma::uword n = config.relay_antennas;
  const arma::uword l = config.ris_elements;
  const arma::uword k = config.users;
  const double gt = config.tx_gain_dbi;
  const double gr = config.rx_gain_dbi;
  const auto [ris_rows, ris_cols] = upa_shape(l);

  ChannelSet ch;

  // BS -> relay, LoS outer product of the endpoint ULA steering vectors.
  {
    const arma::cx_vec a_relay = steering_vector_ula(n, bearing(geometry.relay, geometry.bs));
    const arma::cx_vec a_bs = steering_vector_ula(m, bearing(geometry.bs, geometry.relay));
    const double beta = path_loss(geometry.bs_relay_m, true, gt, gr);
    ch.bs_relay = rician_link(a_relay * a_bs.t(), beta, config.rician_factor, rng);
  }

  // BS -> RIS, UPA at the receive side.
  {
    const arma::cx_vec a_ris =
        steering_vector_upa(ris_rows, ris_cols, bearing(geometry.ris, geometry.bs), 0.0);
    const arma::cx_vec a_bs = steering_vector_ula(m, bearing(geometry.bs, geometry.ris));
    const double beta = path_loss(geometry.bs_ris_m, true, gt, gr);
    ch.bs_ris = rician_link(a_ris * a_bs.t(), beta, config.rician_factor, rng);
  }

  // RIS -> relay; the phase-2 relay -> RIS channel is this matrix conjugate
  // transposed.
  {
    const arma::cx_vec a_relay = steering_vector_ula(n, bearing(geometry.relay, geometry.ris));
    const arma::cx_vec a_ris =
        steering_vector_upa(ris_rows, ris_cols, bearing(geometry.ris, geometry.relay), 0.0);
    const double beta = path_loss(geometry.ris_relay_m, true, gt, gr);
    ch.ris_relay = rician_link(a_relay * a_ris.t(), beta, config.rician_factor, rng);
  }

  // User links are NLoS Rayleigh, scaled per user distance.
  ch.bs_user = draw_scatter(k, m, rng);
  ch.relay_user = draw_scatter(k, n, rng);
  ch.ris_user = draw_scatter(k, l, rng);
  for (arma::uword u = 0; u < k; ++u) {
    ch.bs_user.row(u) *= std::sqrt(path_loss(geometry.bs_user_m[u], false, gt, gr));
    ch.relay_user.row(u) *= std::sqrt(path_loss(geometry.relay_user_m[u], false, gt, gr));
    ch.ris_user.row(u) *= std::sqrt(path_loss(geometry.ris_user_m[u], false, gt, gr));
  }
  return ch;
}

}  // namespace relayris
