#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "helpers.hpp"
#include "relayris/rate_model.hpp"
#include "relayris/relay_precoder.hpp"

using namespace relayris;
using relayris::test::make_channels;
using relayris::test::make_config;
using relayris::test::random_matrix;

namespace {

PhaseConfig random_phases(arma::uword l, arma::uword bits, RandomStream& rng) {
  PhaseConfig p = PhaseConfig::zeros(l, bits);
  for (arma::uword i = 0; i < l; ++i) {
    p.phase1[i] = static_cast<arma::uword>(rng.uniform() * p.levels);
    p.phase2[i] = static_cast<arma::uword>(rng.uniform() * p.levels);
  }
  return p;
}

}  // namespace

TEST_CASE("unit phasors realize the discrete phase set") {
  const arma::cx_vec v = unit_phasors(arma::uvec{0, 1, 2, 3}, 4);
  CHECK(std::abs(v[0] - std::complex<double>(1, 0)) < 1e-15);
  CHECK(std::abs(v[1] - std::complex<double>(0, 1)) < 1e-15);
  CHECK(std::abs(v[2] - std::complex<double>(-1, 0)) < 1e-15);
  CHECK(std::abs(v[3] - std::complex<double>(0, -1)) < 1e-15);
  CHECK_THROWS_AS(unit_phasors(arma::uvec{4}, 4), std::invalid_argument);
}

TEST_CASE("first hop without a reflected path is the direct channel") {
  RandomStream rng(1);
  ChannelSet ch = make_channels(4, 3, 5, 2, rng);
  ch.ris_relay.zeros();
  const PhaseConfig phases = random_phases(5, 2, rng);
  CHECK(arma::approx_equal(effective_first_hop(ch, phases), ch.bs_relay, "absdiff", 1e-14));
}

TEST_CASE("first hop at zero phases adds the raw product") {
  RandomStream rng(2);
  const ChannelSet ch = make_channels(4, 3, 5, 2, rng);
  const PhaseConfig phases = PhaseConfig::zeros(5, 2);
  const arma::cx_mat expect = ch.bs_relay + ch.ris_relay * ch.bs_ris;
  CHECK(arma::approx_equal(effective_first_hop(ch, phases), expect, "absdiff", 1e-12));
}

TEST_CASE("scalar first hop matches the hand computation") {
  RandomStream rng(3);
  const ChannelSet ch = make_channels(1, 1, 1, 1, rng);
  PhaseConfig phases = PhaseConfig::zeros(1, 2);
  phases.phase1[0] = 1;  // e^{j pi/2} = j
  const std::complex<double> expect =
      ch.bs_relay(0, 0) + ch.ris_relay(0, 0) * std::complex<double>(0, 1) * ch.bs_ris(0, 0);
  CHECK(std::abs(effective_first_hop(ch, phases)(0, 0) - expect) < 1e-14);
}

TEST_CASE("second hop rows follow reciprocity") {
  RandomStream rng(4);
  ChannelSet ch = make_channels(4, 3, 5, 2, rng);

  SUBCASE("no reflected path") {
    ch.ris_user.zeros();
    const PhaseConfig phases = random_phases(5, 2, rng);
    const arma::cx_rowvec row = effective_second_hop_user(ch, phases, 1);
    CHECK(arma::approx_equal(row, ch.relay_user.row(1), "absdiff", 1e-14));
  }

  SUBCASE("zero phases") {
    const PhaseConfig phases = PhaseConfig::zeros(5, 2);
    const arma::cx_rowvec expect = ch.ris_user.row(0) * ch.ris_relay.t() + ch.relay_user.row(0);
    CHECK(arma::approx_equal(effective_second_hop_user(ch, phases, 0), expect, "absdiff", 1e-12));
  }

  SUBCASE("scalar case") {
    const ChannelSet s = make_channels(1, 1, 1, 1, rng);
    PhaseConfig phases = PhaseConfig::zeros(1, 2);
    phases.phase2[0] = 3;  // e^{j 3 pi / 2} = -j
    const std::complex<double> expect =
        s.ris_user(0, 0) * std::complex<double>(0, -1) * std::conj(s.ris_relay(0, 0)) +
        s.relay_user(0, 0);
    CHECK(std::abs(effective_second_hop_user(s, phases, 0)(0) - expect) < 1e-14);
  }

  SUBCASE("stacked rows agree with the per-user op") {
    const PhaseConfig phases = random_phases(5, 2, rng);
    const arma::cx_mat rows = second_hop_user_rows(ch, phases);
    for (arma::uword u = 0; u < 2; ++u) {
      CHECK(arma::approx_equal(rows.row(u), effective_second_hop_user(ch, phases, u), "absdiff",
                               1e-13));
    }
  }
}

TEST_CASE("first hop is linear in each channel matrix") {
  RandomStream rng(5);
  const ChannelSet ch = make_channels(3, 3, 4, 2, rng);
  const PhaseConfig phases = random_phases(4, 2, rng);
  const arma::cx_mat base = effective_first_hop(ch, phases);

  // Doubling bs_relay and bs_ris doubles the direct and reflected terms.
  ChannelSet scaled = ch;
  scaled.bs_relay *= 2.0;
  scaled.bs_ris *= 2.0;
  const arma::cx_mat doubled = effective_first_hop(scaled, phases);
  CHECK(arma::approx_equal(doubled, 2.0 * base, "reldiff", 1e-12));

  ChannelSet direct_only = ch;
  direct_only.bs_relay *= 3.0;
  const arma::cx_mat mixed = effective_first_hop(direct_only, phases);
  CHECK(arma::approx_equal(mixed - base, 2.0 * ch.bs_relay, "absdiff", 1e-10));
}

TEST_CASE("relay rate basics") {
  RandomStream rng(6);
  const arma::cx_mat h = random_matrix(3, 4, rng);

  SUBCASE("zero precoder gives zero rate") {
    CHECK(relay_rate(h, arma::cx_mat(4, 2, arma::fill::zeros), 1.0) == 0.0);
  }

  SUBCASE("scalar value") {
    // |h w|^2 = 3 at unit noise: log2(4) = 2.
    arma::cx_mat hs(1, 1);
    hs(0, 0) = std::complex<double>(0.0, std::sqrt(3.0));
    arma::cx_mat w(1, 1);
    w(0, 0) = 1.0;
    CHECK(relay_rate(hs, w, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("matches the eigenvalue route") {
    const arma::cx_mat hh = random_matrix(3, 3, rng);
    const arma::cx_mat w = random_matrix(3, 3, rng);
    const double sigma2 = 0.7;
    const arma::cx_mat outer = hh * w * w.t() * hh.t();
    const arma::vec eigs = arma::eig_sym((outer + outer.t()) / 2.0);
    double expect = 0.0;
    for (const double e : eigs) {
      expect += std::log2(1.0 + std::max(e, 0.0) / sigma2);
    }
    CHECK(relay_rate(hh, w, sigma2) == doctest::Approx(expect).epsilon(1e-10));
  }

  SUBCASE("invariant under right-unitary rotation of the precoder") {
    const arma::cx_mat w = random_matrix(4, 3, rng);
    arma::cx_mat q, r;
    arma::qr(q, r, random_matrix(3, 3, rng));
    CHECK(relay_rate(h, w * q, 0.3) == doctest::Approx(relay_rate(h, w, 0.3)).epsilon(1e-10));
  }
}

TEST_CASE("user SINRs") {
  RandomStream rng(7);

  SUBCASE("single user has no interference") {
    const ChannelSet ch = make_channels(4, 3, 2, 1, rng);
    const PhaseConfig phases = PhaseConfig::zeros(2, 2);
    const arma::cx_mat w = random_matrix(4, 1, rng);
    const UserSinrs s = user_sinrs(ch, phases, w, arma::cx_mat(3, 1, arma::fill::zeros), 2.0);
    const arma::cx_mat rows = first_hop_user_rows(ch, phases);
    const double expect = std::norm(arma::as_scalar(rows.row(0) * w)) / 2.0;
    CHECK(s.phase1[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(s.phase2[0] == 0.0);
  }

  SUBCASE("zero precoders give zero SINR") {
    const ChannelSet ch = make_channels(4, 3, 2, 2, rng);
    const PhaseConfig phases = PhaseConfig::zeros(2, 2);
    const UserSinrs s = user_sinrs(ch, phases, arma::cx_mat(4, 2, arma::fill::zeros),
                                   arma::cx_mat(3, 2, arma::fill::zeros), 1.0);
    CHECK(s.phase1.max() == 0.0);
    CHECK(s.phase2.max() == 0.0);
  }

  SUBCASE("zero-forcing substitution gives q over noise") {
    const ChannelSet ch = make_channels(4, 5, 2, 3, rng);
    const PhaseConfig phases = random_phases(2, 2, rng);
    const arma::cx_mat rows = second_hop_user_rows(ch, phases);
    const arma::vec eta = {1.5, 3.0, 0.5};
    const double sigma2 = 0.8;
    const arma::cx_mat u = zf_beamformer(rows, eta, sigma2);
    const arma::vec sinr = sinr_from_rows(rows, u, sigma2);
    for (arma::uword k = 0; k < 3; ++k) {
      // q_k = sigma^2 eta_k, interference nulled, so gamma = q_k / sigma^2.
      CHECK(sinr[k] == doctest::Approx(eta[k]).epsilon(1e-9));
    }
  }

  SUBCASE("common scaling enters quadratically without interference") {
    const ChannelSet ch = make_channels(4, 3, 2, 1, rng);
    const PhaseConfig phases = PhaseConfig::zeros(2, 2);
    const arma::cx_mat w = random_matrix(4, 1, rng);
    const UserSinrs base = user_sinrs(ch, phases, w, arma::cx_mat(3, 1, arma::fill::zeros), 1.0);
    const UserSinrs scaled =
        user_sinrs(ch, phases, 3.0 * w, arma::cx_mat(3, 1, arma::fill::zeros), 1.0);
    CHECK(scaled.phase1[0] == doctest::Approx(9.0 * base.phase1[0]).epsilon(1e-12));
  }
}

TEST_CASE("combined rate") {
  CHECK(combined_rate(0.0, 0.0) == 0.0);
  CHECK(combined_rate(1.0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(combined_rate(3.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15));

  RandomStream rng(8);
  double prev = combined_rate(0.1, 0.0);
  for (double g = 0.2; g < 50.0; g *= 1.7) {
    const double r = combined_rate(g, 0.0);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("feasibility check") {
  RandomStream rng(9);
  const arma::uword k = 2;
  const ChannelSet ch = make_channels(4, 4, 2, k, rng);
  SystemConfig cfg = make_config(4, 4, 2, k);
  const PhaseConfig phases = PhaseConfig::zeros(2, 2);

  // Hand-built solution: identity-ish precoders scaled hard enough that all
  // constraints hold with margin.
  BeamformerSolution sol;
  sol.bs_precoder = 50.0 * random_matrix(4, k, rng);
  sol.relay_precoder = 50.0 * random_matrix(4, k, rng);

  SUBCASE("met with margin") {
    cfg.rate_threshold = 0.05;
    const SolveReport r = check_feasibility(ch, phases, sol, cfg);
    CHECK(r.feasible);
    const double expect_power =
        0.5 * (std::pow(arma::norm(sol.bs_precoder, "fro"), 2) +
               std::pow(arma::norm(sol.relay_precoder, "fro"), 2));
    CHECK(r.total_power_w == doctest::Approx(expect_power).epsilon(1e-12));
    CHECK(r.min_end_to_end_rate == doctest::Approx(r.user_rates.min() / 2.0));
  }

  SUBCASE("one user short fails") {
    cfg.rate_threshold = 0.05;
    BeamformerSolution starved = sol;
    starved.bs_precoder.col(1).zeros();
    starved.relay_precoder.col(1).zeros();
    const SolveReport r = check_feasibility(ch, phases, starved, cfg);
    CHECK_FALSE(r.feasible);
    CHECK_FALSE(r.failure.empty());
  }

  SUBCASE("boundary rate counts as feasible") {
    // Single-stream scalar system (no RIS path) hitting the relay constraint
    // exactly: |h w|^2 / sigma^2 = 2^{2 K R_th} - 1 = 15 makes R_R exactly 4.
    const ChannelSet s = [&] {
      RandomStream r2(10);
      return make_channels(1, 1, 0, 1, r2);
    }();
    SystemConfig scfg = make_config(1, 1, 0, 1);
    scfg.rate_threshold = 1.0;
    BeamformerSolution bsol;
    bsol.bs_precoder.set_size(1, 1);
    bsol.bs_precoder(0, 0) = std::sqrt(15.0) / std::abs(s.bs_relay(0, 0));
    // Relay side: make the user rate comfortably feasible.
    bsol.relay_precoder.set_size(1, 1);
    const PhaseConfig p1 = PhaseConfig::zeros(0, 2);
    const arma::cx_rowvec row2 = effective_second_hop_user(s, p1, 0);
    bsol.relay_precoder(0, 0) = 100.0 / std::abs(row2(0));
    const SolveReport r = check_feasibility(s, p1, bsol, scfg);
    CHECK(r.relay_rate_bits == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.feasible);
  }
}
