#include "relayris/bs_precoder.hpp"

#include <cmath>
#include <numbers>

namespace relayris {

namespace {

// Relative floor below the largest mode under which a stream counts as zero.
constexpr double kRankTolerance = 1e-13;

double sum_rate(const arma::vec& eigenvalues, const arma::vec& powers, double noise_power) {
  double rate = 0.0;
  for (arma::uword i = 0; i < eigenvalues.n_elem; ++i) {
    rate += std::log1p(powers[i] * eigenvalues[i] / noise_power);
  }
  return rate / std::numbers::ln2;
}

}  // namespace

WaterfillResult waterfill(const arma::vec& eigenvalues, double target_rate, double noise_power) {
  const arma::uword k = eigenvalues.n_elem;
  WaterfillResult result;
  result.eigenvalues = eigenvalues;
  result.stream_power.zeros(k);

  if (k == 0) {
    return result;
  }
  if (eigenvalues.min() <= 0.0 || eigenvalues.min() < eigenvalues.max() * kRankTolerance) {
    throw RankDeficientError("waterfill: nonpositive eigenmode among requested streams");
  }
  if (target_rate <= 0.0) {
    result.water_level = noise_power / eigenvalues.max();
    return result;
  }

  // Modes sorted descending; shrink the active set until the water level
  // clears the weakest active mode.
  const arma::uvec order = arma::sort_index(eigenvalues, "descend");
  const arma::vec sorted = eigenvalues(order);
  for (arma::uword active = k; active >= 1; --active) {
    double log_gm = 0.0;
    for (arma::uword i = 0; i < active; ++i) {
      log_gm += std::log(sorted[i]);
    }
    log_gm /= static_cast<double>(active);
    const double mu = noise_power *
                      std::exp2(target_rate / static_cast<double>(active)) / std::exp(log_gm);
    if (mu - noise_power / sorted[active - 1] > 0.0) {
      for (arma::uword i = 0; i < active; ++i) {
        result.stream_power[order[i]] = mu - noise_power / sorted[i];
      }
      result.water_level = mu;
      break;
    }
  }
  result.active = arma::find(result.stream_power > 0.0);
  result.achieved_rate = sum_rate(eigenvalues, result.stream_power, noise_power);
  return result;
}

BsPrecoderResult svd_waterfill(const arma::cx_mat& first_hop, arma::uword streams,
                               double rate_threshold, double noise_power) {
  arma::cx_mat left;
  arma::vec singular;
  arma::cx_mat right;
  if (!arma::svd(left, singular, right, first_hop)) {
    throw RankDeficientError("svd_waterfill: SVD failed");
  }
  if (singular.n_elem < streams) {
    throw RankDeficientError("svd_waterfill: channel carries fewer modes than streams");
  }
  const arma::vec eigenvalues = arma::square(singular.head(streams));
  if (eigenvalues.min() <= 0.0 ||
      eigenvalues.min() < eigenvalues.max() * kRankTolerance) {
    throw RankDeficientError("svd_waterfill: effective channel is rank deficient");
  }

  const double target = 2.0 * static_cast<double>(streams) * rate_threshold;
  BsPrecoderResult out;
  out.waterfill = waterfill(eigenvalues, target, noise_power);
  out.precoder = right.cols(0, streams - 1) *
                 arma::diagmat(arma::conv_to<arma::cx_vec>::from(arma::sqrt(out.waterfill.stream_power)));
  return out;
}

}  // namespace relayris
