#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "relayris/solver_pipeline.hpp"

using namespace relayris;
using relayris::test::make_channels;
using relayris::test::make_config;
using relayris::test::random_matrix;

TEST_CASE("relay-only equals the main pipeline on zeroed RIS links") {
  RandomStream rng(61);
  ChannelSet ch = make_channels(4, 4, 3, 2, rng);
  ch.bs_ris.zeros();
  ch.ris_relay.zeros();
  ch.ris_user.zeros();
  const SystemConfig cfg = make_config(4, 4, 3, 2);

  const SolveReport baseline = solve_relay_only(ch, cfg);
  const SolveReport via_search =
      evaluate_phases(ch, PhaseConfig::zeros(3, cfg.phase_bits), cfg, InnerSolver::kDuality);
  CHECK(baseline.total_power_w == doctest::Approx(via_search.total_power_w).epsilon(1e-14));
  CHECK(baseline.feasible);
}

TEST_CASE("too many users surfaces as an infeasible report") {
  RandomStream rng(62);
  const ChannelSet ch = make_channels(4, 2, 3, 3, rng);
  const SystemConfig cfg = make_config(4, 2, 3, 3);
  SolveReport r;
  CHECK_NOTHROW(r = solve_relay_only(ch, cfg));
  CHECK_FALSE(r.feasible);
}

TEST_CASE("scalar two-hop chain matches the closed form") {
  RandomStream rng(63);
  ChannelSet ch = make_channels(1, 1, 0, 1, rng);
  const double sigma2 = 0.8;
  const double rate_threshold = 1.25;
  SystemConfig cfg = make_config(1, 1, 0, 1, 2, sigma2, rate_threshold);

  const double required = std::exp2(2.0 * rate_threshold) - 1.0;
  const double bs_gain = std::norm(ch.bs_relay(0, 0));
  const double direct_gain = std::norm(ch.bs_user(0, 0));
  const double relay_gain = std::norm(ch.relay_user(0, 0));

  const double bs_power = sigma2 * required / bs_gain;
  const double phase1_sinr = bs_power * direct_gain / sigma2;
  const double eta = std::max(0.0, required - phase1_sinr);
  const double relay_power = sigma2 * eta / relay_gain;
  const double expect = 0.5 * (bs_power + relay_power);

  const SolveReport r = solve_relay_only(ch, cfg);
  CHECK(r.feasible);
  CHECK(r.total_power_w == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("RIS-only single user without a reflected path") {
  RandomStream rng(64);
  const ChannelSet ch = make_channels(5, 3, 0, 1, rng);
  SystemConfig cfg = make_config(5, 3, 0, 1, 2, 1.0, 1.5);
  const SolveReport r = solve_ris_only(ch, cfg, SearchSettings{});
  CHECK(r.feasible);
  const double gain = std::pow(arma::norm(ch.bs_user.row(0)), 2);
  const double expect = (std::exp2(1.5) - 1.0) / gain;
  CHECK(r.total_power_w == doctest::Approx(expect).epsilon(1e-9));
  CHECK(r.user_rates[0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(r.min_end_to_end_rate == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("RIS-only power vanishes with the rate requirement") {
  RandomStream rng(65);
  const ChannelSet ch = make_channels(4, 3, 2, 2, rng);
  double prev = arma::datum::inf;
  for (const double rth : {2.0, 1.0, 0.25, 0.01}) {
    const SystemConfig cfg = make_config(4, 3, 2, 2, 2, 1.0, rth);
    const SolveReport r = solve_ris_only(ch, cfg, SearchSettings{});
    CHECK(r.feasible);
    CHECK(r.total_power_w < prev);
    prev = r.total_power_w;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("RIS-only with no elements is the plain downlink duality solution") {
  RandomStream rng(66);
  const ChannelSet ch = make_channels(5, 3, 0, 2, rng);
  const SystemConfig cfg = make_config(5, 3, 0, 2, 2, 1.0, 1.0);
  const SolveReport r = solve_ris_only(ch, cfg, SearchSettings{});
  CHECK(r.feasible);
  // Duality meets each SINR target exactly, and power never exceeds the
  // zero-forcing feasible point on the same rows.
  for (arma::uword u = 0; u < 2; ++u) {
    CHECK(r.user_rates[u] == doctest::Approx(1.0).epsilon(1e-8));
  }
  const arma::vec eta(2, arma::fill::value(1.0));  // 2^1 - 1
  const arma::cx_mat zf = zf_beamformer(ch.bs_user, eta, 1.0);
  CHECK(r.total_power_w <= std::pow(arma::norm(zf, "fro"), 2) + 1e-9);
}

TEST_CASE("full solve improves on the zero-phase start and stays consistent") {
  RandomStream rng(67);
  const ChannelSet ch = make_channels(5, 5, 4, 2, rng);
  const SystemConfig cfg = make_config(5, 5, 4, 2);
  const SolveReport at_zero =
      evaluate_phases(ch, PhaseConfig::zeros(4, cfg.phase_bits), cfg, InnerSolver::kDuality);
  const SolveReport best = solve_relay_ris(ch, cfg, SearchSettings{});
  CHECK(best.feasible);
  CHECK(best.total_power_w <= at_zero.total_power_w + 1e-12);

  // The returned solution re-verifies against the rate model.
  const SolveReport recheck = check_feasibility(ch, best.phases, best.solution, cfg);
  CHECK(recheck.feasible);
  CHECK(recheck.total_power_w == doctest::Approx(best.total_power_w).epsilon(1e-12));
}

TEST_CASE("full solve without RIS elements equals the relay-only baseline") {
  RandomStream rng(69);
  const ChannelSet ch = make_channels(4, 4, 0, 2, rng);
  const SystemConfig cfg = make_config(4, 4, 0, 2);
  const SolveReport searched = solve_relay_ris(ch, cfg, SearchSettings{});
  const SolveReport baseline = solve_relay_only(ch, cfg);
  CHECK(searched.total_power_w == doctest::Approx(baseline.total_power_w).epsilon(1e-14));
}

TEST_CASE("objective vanishes with the rate requirement") {
  RandomStream rng(70);
  const ChannelSet ch = make_channels(4, 4, 3, 2, rng);
  SystemConfig cfg = make_config(4, 4, 3, 2);
  cfg.rate_threshold = 1e-9;
  const SolveReport r = solve_relay_ris(ch, cfg, SearchSettings{});
  CHECK(r.feasible);
  CHECK(r.total_power_w < 1e-6);
}

TEST_CASE("scenario names round-trip") {
  for (const Scenario s : kAllScenarios) {
    const auto back = scenario_from_name(scenario_name(s));
    REQUIRE(back.has_value());
    CHECK(*back == s);
  }
  CHECK_FALSE(scenario_from_name("no_such_scenario").has_value());
}

TEST_CASE("scenario dispatch matches the direct calls") {
  RandomStream rng(68);
  const ChannelSet ch = make_channels(5, 5, 4, 2, rng);
  const SystemConfig cfg = make_config(5, 5, 4, 2);
  const SearchSettings s;

  CHECK(solve_scenario(Scenario::kRelayOnly, ch, cfg, s).total_power_w ==
        doctest::Approx(solve_relay_only(ch, cfg).total_power_w));
  SearchSettings zf = s;
  zf.inner_solver = InnerSolver::kZeroForcing;
  CHECK(solve_scenario(Scenario::kRelayRisZf, ch, cfg, s).total_power_w ==
        doctest::Approx(solve_relay_ris(ch, cfg, zf).total_power_w));
}
