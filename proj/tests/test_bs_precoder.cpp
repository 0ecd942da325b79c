#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "relayris/bs_precoder.hpp"

using namespace relayris;
using relayris::test::random_matrix;

namespace {

// Independent oracle for two modes: sweep the rate split between them and
// take the cheapest feasible allocation.
double two_mode_grid_oracle(double lambda1, double lambda2, double target, double sigma2) {
  double best = arma::datum::inf;
  const int steps = 200000;
  for (int i = 0; i <= steps; ++i) {
    const double r1 = target * i / steps;
    const double r2 = target - r1;
    const double p = sigma2 * (std::exp2(r1) - 1.0) / lambda1 +
                     sigma2 * (std::exp2(r2) - 1.0) / lambda2;
    best = std::min(best, p);
  }
  return best;
}

}  // namespace

TEST_CASE("single mode closed form") {
  // target = 2 R_th with one stream: P = sigma^2 (2^{2 R_th} - 1) / lambda.
  const WaterfillResult r = waterfill(arma::vec{1.0}, 2.0, 1.0);
  CHECK(r.stream_power[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r.water_level == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(r.achieved_rate == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("symmetric two-mode closed form") {
  const WaterfillResult r = waterfill(arma::vec{1.0, 1.0}, 4.0, 1.0);
  CHECK(r.stream_power[0] == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(r.stream_power[1] == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(r.water_level == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(r.active.n_elem == 2);
}

TEST_CASE("lopsided modes drop below the water level") {
  const double target = 4.0;
  const WaterfillResult r = waterfill(arma::vec{100.0, 1e-6}, target, 1.0);
  CHECK(r.stream_power[1] == 0.0);
  CHECK(r.active.n_elem == 1);
  CHECK(r.achieved_rate == doctest::Approx(target).epsilon(1e-10));

  const double total = arma::accu(r.stream_power);
  const double oracle = two_mode_grid_oracle(100.0, 1e-6, target, 1.0);
  CHECK(total <= oracle + 1e-9);
  CHECK(total == doctest::Approx(0.15).epsilon(1e-10));
}

TEST_CASE("waterfill against a grid oracle on random two-mode instances") {
  RandomStream rng(21);
  for (int i = 0; i < 20; ++i) {
    const double l1 = 0.1 + 10.0 * rng.uniform();
    const double l2 = 0.1 + 10.0 * rng.uniform();
    const double target = 0.5 + 6.0 * rng.uniform();
    const WaterfillResult r = waterfill(arma::vec{l1, l2}, target, 1.0);
    CHECK(r.achieved_rate == doctest::Approx(target).epsilon(1e-8));
    CHECK(arma::accu(r.stream_power) <= two_mode_grid_oracle(l1, l2, target, 1.0) + 1e-6);
  }
}

TEST_CASE("water level identities") {
  RandomStream rng(22);
  for (int i = 0; i < 30; ++i) {
    arma::vec lambda(4);
    for (auto& l : lambda) {
      l = std::pow(10.0, -3.0 + 5.0 * rng.uniform());
    }
    const double target = 0.5 + 8.0 * rng.uniform();
    const double sigma2 = 0.5;
    const WaterfillResult r = waterfill(lambda, target, sigma2);
    for (arma::uword k = 0; k < 4; ++k) {
      if (r.stream_power[k] > 0.0) {
        CHECK(r.water_level ==
              doctest::Approx(r.stream_power[k] + sigma2 / lambda[k]).epsilon(1e-10));
      } else {
        CHECK(r.water_level <= sigma2 / lambda[k] * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("zero target allocates nothing") {
  const WaterfillResult r = waterfill(arma::vec{2.0, 1.0}, 0.0, 1.0);
  CHECK(arma::accu(r.stream_power) == 0.0);
  CHECK(r.active.n_elem == 0);
}

TEST_CASE("svd route: orthogonal columns carry the stream powers") {
  RandomStream rng(23);
  const arma::cx_mat h = random_matrix(6, 8, rng);
  const arma::uword k = 4;
  const BsPrecoderResult r = svd_waterfill(h, k, 1.5, 0.8);

  const arma::cx_mat gram = r.precoder.t() * r.precoder;
  for (arma::uword i = 0; i < k; ++i) {
    for (arma::uword j = 0; j < k; ++j) {
      if (i == j) {
        CHECK(std::abs(gram(i, j)) ==
              doctest::Approx(r.waterfill.stream_power[i]).epsilon(1e-10));
      } else {
        CHECK(std::abs(gram(i, j)) < 1e-10);
      }
    }
  }
}

TEST_CASE("svd route: relay constraint is active") {
  RandomStream rng(24);
  for (int i = 0; i < 20; ++i) {
    const arma::cx_mat h = random_matrix(5, 7, rng);
    const double rate_threshold = 0.5 + 2.0 * rng.uniform();
    const BsPrecoderResult r = svd_waterfill(h, 3, rate_threshold, 1.0);
    const double target = 2.0 * 3 * rate_threshold;
    CHECK(std::abs(r.waterfill.achieved_rate - target) / target < 1e-8);
  }
}

TEST_CASE("closed form for the water level when all modes are active") {
  // Mild eigenvalue spread keeps every mode above the water level, where
  // mu = sigma^2 2^{2 R_th} / geomean(lambda) holds exactly.
  const arma::vec lambda = {4.0, 2.25, 1.0};
  const double rate_threshold = 2.0;
  const double sigma2 = 0.4;
  const WaterfillResult r = waterfill(lambda, 2.0 * 3 * rate_threshold, sigma2);
  REQUIRE(r.active.n_elem == 3);
  const double geo = std::exp(arma::mean(arma::log(lambda)));
  const double mu = sigma2 * std::exp2(2.0 * rate_threshold) / geo;
  CHECK(r.water_level == doctest::Approx(mu).epsilon(1e-12));
}

TEST_CASE("total power is monotone in the rate threshold") {
  RandomStream rng(26);
  const arma::cx_mat h = random_matrix(5, 6, rng);
  double prev = -1.0;
  for (double rth = 0.25; rth < 4.0; rth += 0.25) {
    const BsPrecoderResult r = svd_waterfill(h, 3, rth, 1.0);
    const double total = arma::accu(r.waterfill.stream_power);
    CHECK(total > prev);
    prev = total;
  }
}

TEST_CASE("total power is monotone in the channel gain") {
  RandomStream rng(27);
  const arma::cx_mat h = random_matrix(5, 6, rng);
  const double weak = arma::accu(svd_waterfill(h, 3, 2.0, 1.0).waterfill.stream_power);
  const double strong = arma::accu(svd_waterfill(2.0 * h, 3, 2.0, 1.0).waterfill.stream_power);
  CHECK(strong < weak);
}

TEST_CASE("rank deficiency raises an error") {
  RandomStream rng(28);
  const arma::cx_vec a = arma::cx_vec(random_matrix(5, 1, rng));
  const arma::cx_vec b = arma::cx_vec(random_matrix(4, 1, rng));
  const arma::cx_mat rank1 = a * b.t();
  CHECK_THROWS_AS(svd_waterfill(rank1, 2, 1.0, 1.0), RankDeficientError);
  CHECK_THROWS_AS(svd_waterfill(random_matrix(2, 3, rng), 3, 1.0, 1.0), RankDeficientError);
}
