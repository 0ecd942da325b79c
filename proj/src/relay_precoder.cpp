#include "relayris/relay_precoder.hpp"

#include <cmath>

namespace relayris {

namespace {

// I_n + sum_i beta_i / sigma^2 * c_i c_i^H over the active users, with
// c_i the conjugate transpose of row i.
arma::cx_mat uplink_covariance(const arma::cx_mat& rows, const arma::vec& beta,
                               double noise_power, const arma::uvec& active) {
  arma::cx_mat cov(rows.n_cols, rows.n_cols, arma::fill::eye);
  for (const arma::uword i : active) {
    cov += (beta[i] / noise_power) * (rows.row(i).t() * rows.row(i));
  }
  return cov;
}

arma::uvec active_users(const arma::vec& eta) { return arma::find(eta > 0.0); }

void require_nonzero_channels(const arma::cx_mat& rows, const arma::uvec& active) {
  for (const arma::uword k : active) {
    if (!(arma::norm(rows.row(k)) > 0.0)) {
      throw InfeasibleTargetsError(
          "duality_fixed_point: zero effective channel for a user with a positive target");
    }
  }
}

// Reference quadforms in antenna space: quad_k = c_k^H A(beta)^{-1} c_k with
// c_k the conjugate transpose of row k. Accurate for any beta, at the price
// of an n x n solve.
arma::vec quadforms_antenna_space(const arma::cx_mat& rows, const arma::vec& beta,
                                  double noise_power, const arma::uvec& active) {
  const arma::cx_mat cov = uplink_covariance(rows, beta, noise_power, active);
  const arma::cx_mat columns = rows.rows(active).t();
  const arma::cx_mat solved = arma::solve(cov, columns, arma::solve_opts::likely_sympd);
  arma::vec quad(rows.n_rows, arma::fill::zeros);
  for (arma::uword j = 0; j < active.n_elem; ++j) {
    quad[active[j]] = std::real(arma::cdot(columns.col(j), solved.col(j)));
  }
  return quad;
}

// Same quadforms in user space through the matrix inversion lemma: with
// G = rows rows^H and D = diag(sqrt(beta / sigma^2)),
// quad_k = G_kk - (D g_k)^H (I + D G D)^{-1} (D g_k). Much cheaper per sweep,
// but the subtraction cancels catastrophically once the correction
// approaches G_kk (very large beta), so callers must watch that regime.
arma::vec quadforms_user_space(const arma::cx_mat& gram, const arma::vec& beta,
                               double noise_power) {
  const arma::uword k = gram.n_rows;
  const arma::vec d = arma::sqrt(beta / noise_power);
  const arma::cx_mat scaled = arma::diagmat(d) * gram;  // D G; column j is D g_j
  arma::cx_mat middle(k, k, arma::fill::eye);
  middle += scaled * arma::diagmat(d);
  const arma::cx_mat solved = arma::solve(middle, scaled, arma::solve_opts::likely_sympd);
  arma::vec quad(k);
  for (arma::uword j = 0; j < k; ++j) {
    quad[j] = std::real(gram(j, j)) - std::real(arma::cdot(scaled.col(j), solved.col(j)));
  }
  return quad;
}

// Correction fraction above which the user-space route has lost too many
// digits and the sweep reverts to antenna space.
constexpr double kCancellationGuard = 3e-3;

// Sweeps granted to the extrapolated Jacobi phase before switching to the
// filter/power alternation; large targets make the sweep phase crawl.
constexpr arma::uword kSweepBudget = 24;

arma::vec update_from_quadforms(const arma::vec& quad, const arma::vec& eta, double noise_power,
                                const arma::uvec& active) {
  arma::vec next(eta.n_elem, arma::fill::zeros);
  for (const arma::uword k : active) {
    next[k] = noise_power / ((1.0 + 1.0 / eta[k]) * quad[k]);
  }
  return next;
}

}  // namespace

SinrTargets residual_targets(const ChannelSet& channels, const PhaseConfig& phases,
                             const arma::cx_mat& bs_precoder, double rate_threshold,
                             double noise_power) {
  const arma::vec phase1_sinr =
      sinr_from_rows(first_hop_user_rows(channels, phases), bs_precoder, noise_power);
  const double required = std::exp2(2.0 * rate_threshold) - 1.0;
  SinrTargets targets;
  targets.eta = arma::clamp(required - phase1_sinr, 0.0, arma::datum::inf);
  return targets;
}

arma::vec duality_fixed_point_step(const arma::cx_mat& rows, const arma::vec& eta,
                                   double noise_power, const arma::vec& beta) {
  const arma::uvec active = active_users(eta);
  if (active.is_empty()) {
    return arma::vec(eta.n_elem, arma::fill::zeros);
  }
  require_nonzero_channels(rows, active);
  const arma::vec quad = quadforms_antenna_space(rows, beta, noise_power, active);
  return update_from_quadforms(quad, eta, noise_power, active);
}

namespace {

// Componentwise Aitken extrapolation over the last three iterates of a
// linearly converging sequence. Only fires where the step ratio looks
// geometric; produces the next linearization point.
class AitkenExtrapolator {
 public:
  explicit AitkenExtrapolator(const arma::vec& start) : current_(start) {}

  const arma::vec& current() const { return current_; }

  void advance(const arma::vec& next, const arma::uvec& active) {
    arma::vec accel;
    if (plain_run_ >= 2) {
      accel = next;
      bool extrapolated = false;
      for (const arma::uword k : active) {
        const double d1 = current_[k] - previous_[k];
        const double d2 = next[k] - current_[k];
        const double ratio = d1 != 0.0 ? d2 / d1 : 1.0;
        // Large targets legitimately push the ratio to 1 - O(1/eta), so the
        // bound must sit very close to 1; ratios at or above it mean
        // divergence, where extrapolating is meaningless.
        if (ratio > 0.0 && ratio < 1.0 - 1e-6) {
          accel[k] = next[k] + d2 * d2 / (d1 - d2);
          extrapolated = true;
        }
      }
      if (!extrapolated || !accel.is_finite() || accel.min() < 0.0) {
        accel.reset();
      }
    }
    previous_ = current_;
    if (accel.n_elem > 0) {
      current_ = accel;
      plain_run_ = 0;
    } else {
      current_ = next;
      ++plain_run_;
    }
  }

 private:
  arma::vec previous_;
  arma::vec current_;
  arma::uword plain_run_ = 0;
};

}  // namespace

FixedPointResult duality_fixed_point(const arma::cx_mat& rows, const arma::vec& eta,
                                     double noise_power, const FixedPointSettings& settings) {
  FixedPointResult result;
  result.beta.zeros(eta.n_elem);
  const arma::uvec active = active_users(eta);
  if (active.is_empty()) {
    return result;
  }
  require_nonzero_channels(rows, active);
  const arma::cx_mat gram = rows * rows.t();

  const auto guard_iterate = [&](const arma::vec& next, double residual, arma::uword iter) {
    if (!next.is_finite()) {
      throw ConvergenceError("duality_fixed_point: diverged", residual, iter);
    }
    for (const arma::uword k : active) {
      // Any feasible fixed point sits far below this uplink load; crossing it
      // means the targets are unattainable.
      if (next[k] * std::real(gram(k, k)) > 1e14 * noise_power) {
        throw ConvergenceError("duality_fixed_point: diverged beyond numerical range", residual,
                               iter);
      }
    }
  };
  const auto sup_step = [&](const arma::vec& next, const arma::vec& base) {
    double residual = 0.0;
    for (const arma::uword k : active) {
      residual = std::max(residual,
                          std::abs(next[k] - base[k]) / std::max(std::abs(next[k]), 1e-300));
    }
    return residual;
  };

  // Phase one: Jacobi sweeps with Aitken extrapolation spliced in once the
  // step ratios look geometric. The map is a standard interference function,
  // so the plain sweep recovers from any finite nonnegative extrapolation
  // point, and the loop only returns after a plain sweep has put the
  // residual below tol.
  AitkenExtrapolator state(result.beta);
  double residual = arma::datum::inf;
  const arma::uword sweep_budget = std::min(kSweepBudget, settings.max_iters);
  for (arma::uword iter = 1; iter <= sweep_budget; ++iter) {
    const arma::vec& beta = state.current();
    arma::vec quad = quadforms_user_space(gram, beta, noise_power);
    bool cancelled = false;
    for (const arma::uword k : active) {
      cancelled = cancelled || quad[k] < std::real(gram(k, k)) * kCancellationGuard;
    }
    if (cancelled) {
      quad = quadforms_antenna_space(rows, beta, noise_power, active);
      for (const arma::uword k : active) {
        if (!(quad[k] > 0.0)) {
          throw ConvergenceError("duality_fixed_point: quadratic forms lost all precision",
                                 residual, iter);
        }
      }
    }
    const arma::vec next = update_from_quadforms(quad, eta, noise_power, active);
    guard_iterate(next, residual, iter);
    residual = sup_step(next, beta);
    result.iterations = iter;
    result.residual = residual;
    if (residual < settings.tol) {
      result.beta = next;
      return result;
    }
    state.advance(next, active);
  }

  // Phase two, for targets large enough that the sweeps crawl: alternate
  // MMSE filters with an exact uplink power solve. When the current filters
  // cannot support the full targets (Perron root of the relative-interference
  // matrix at or above one), the targets are scaled into the feasible region
  // first, so every round produces valid positive powers. Each round is
  // certified by a plain sweep before anything is returned.
  const arma::cx_mat columns = rows.rows(active).t();
  const arma::uword na = active.n_elem;
  arma::vec beta = state.current();
  for (arma::uword iter = result.iterations + 1; iter <= settings.max_iters; ++iter) {
    const arma::cx_mat cov = uplink_covariance(rows, beta, noise_power, active);
    const arma::cx_mat solved = arma::solve(cov, columns, arma::solve_opts::likely_sympd);
    arma::vec quad(eta.n_elem, arma::fill::zeros);
    for (arma::uword j = 0; j < na; ++j) {
      quad[active[j]] = std::real(arma::cdot(columns.col(j), solved.col(j)));
      if (!(quad[active[j]] > 0.0)) {
        throw ConvergenceError("duality_fixed_point: quadratic forms lost all precision",
                               residual, iter);
      }
    }
    const arma::vec swept = update_from_quadforms(quad, eta, noise_power, active);
    guard_iterate(swept, residual, iter);
    residual = sup_step(swept, beta);
    result.iterations = iter;
    result.residual = residual;
    if (residual < settings.tol) {
      result.beta = swept;
      return result;
    }

    // Per-filter link gains E(j, i) = |f_j^H c_i|^2 with unit-norm MMSE
    // filters f_j, and the relative-interference matrix whose Perron root
    // decides how much of the targets these filters can carry.
    arma::mat gains = arma::square(arma::abs(solved.t() * columns));
    for (arma::uword j = 0; j < na; ++j) {
      gains.row(j) /= std::pow(arma::norm(solved.col(j)), 2);
    }
    arma::mat relative(na, na, arma::fill::zeros);
    for (arma::uword j = 0; j < na; ++j) {
      for (arma::uword i = 0; i < na; ++i) {
        if (i != j) {
          relative(j, i) = eta[active[j]] * gains(j, i) / gains(j, j);
        }
      }
    }
    const double perron = na > 1 ? arma::abs(arma::eig_gen(relative)).max() : 0.0;
    const double scale = perron < 0.95 ? 1.0 : 0.95 / perron;

    arma::mat coupling(na, na);
    for (arma::uword j = 0; j < na; ++j) {
      for (arma::uword i = 0; i < na; ++i) {
        coupling(j, i) =
            j == i ? gains(j, j) / (scale * eta[active[j]]) : -gains(j, i);
      }
    }
    arma::vec balanced;
    if (arma::solve(balanced, coupling, arma::vec(na, arma::fill::value(noise_power)),
                    arma::solve_opts::no_approx) &&
        balanced.is_finite() && balanced.min() >= 0.0) {
      for (arma::uword j = 0; j < na; ++j) {
        beta[active[j]] = balanced[j];
      }
    } else {
      beta = swept;
    }
  }
  throw ConvergenceError("duality_fixed_point: no convergence within max_iters", residual,
                         settings.max_iters);
}

DualityResult duality_beamformer(const arma::cx_mat& rows, const arma::vec& eta,
                                 const arma::vec& beta, double noise_power) {
  const arma::uword k = eta.n_elem;
  const arma::uword n = rows.n_cols;
  DualityResult out;
  out.state.beta = beta;
  out.state.directions.zeros(n, k);
  out.state.coupling = arma::mat(k, k, arma::fill::eye);
  out.state.q.zeros(k);
  out.state.active = active_users(eta);
  out.precoder.zeros(n, k);
  const arma::uvec& active = out.state.active;
  if (active.is_empty()) {
    return out;
  }

  const arma::cx_mat cov = uplink_covariance(rows, beta, noise_power, active);
  const arma::cx_mat columns = rows.rows(active).t();
  const arma::cx_mat solved = arma::solve(cov, columns, arma::solve_opts::likely_sympd);
  for (arma::uword j = 0; j < active.n_elem; ++j) {
    const double norm = arma::norm(solved.col(j));
    if (!(norm > 0.0)) {
      throw InfeasibleTargetsError("duality_beamformer: degenerate direction");
    }
    out.state.directions.col(active[j]) = solved.col(j) / norm;
  }

  // Coupling matrix over the active users: diagonal |r_i u_i|^2 / eta_i,
  // off-diagonal -|r_i u_j|^2.
  const arma::uword na = active.n_elem;
  arma::mat coupling(na, na);
  const arma::cx_mat cross = rows.rows(active) * out.state.directions.cols(active);
  for (arma::uword i = 0; i < na; ++i) {
    for (arma::uword j = 0; j < na; ++j) {
      const double gain = std::norm(cross(i, j));
      coupling(i, j) = i == j ? gain / eta[active[i]] : -gain;
    }
  }
  arma::vec q_active;
  if (!arma::solve(q_active, coupling, arma::vec(na, arma::fill::value(noise_power)),
                   arma::solve_opts::no_approx)) {
    throw InfeasibleTargetsError("duality_beamformer: singular coupling matrix");
  }
  if (q_active.min() < 0.0) {
    throw InfeasibleTargetsError("duality_beamformer: negative downlink power");
  }

  for (arma::uword j = 0; j < na; ++j) {
    const arma::uword u = active[j];
    out.state.q[u] = q_active[j];
    out.precoder.col(u) = std::sqrt(q_active[j]) * out.state.directions.col(u);
  }
  for (arma::uword i = 0; i < na; ++i) {
    for (arma::uword j = 0; j < na; ++j) {
      out.state.coupling(active[i], active[j]) = coupling(i, j);
    }
  }
  return out;
}

arma::cx_mat zf_beamformer(const arma::cx_mat& rows, const arma::vec& eta, double noise_power) {
  const arma::uword k = rows.n_rows;
  if (k == 0) {
    return arma::cx_mat(rows.n_cols, 0);
  }
  if (k > rows.n_cols) {
    throw RankDeficientError("zf_beamformer: more users than antennas");
  }
  const arma::cx_mat gram = rows * rows.t();  // K x K
  if (arma::rcond(gram) < 1e-12) {
    throw RankDeficientError("zf_beamformer: stacked channel is rank deficient");
  }
  const arma::vec q = noise_power * eta;
  const arma::cx_mat scaled =
      arma::solve(gram, arma::cx_mat(arma::diagmat(arma::conv_to<arma::cx_vec>::from(arma::sqrt(q)))));
  return rows.t() * scaled;
}

}  // namespace relayris
