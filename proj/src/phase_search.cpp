#include "relayris/phase_search.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

#include "relayris/bs_precoder.hpp"

namespace relayris {

void SearchSettings::validate(arma::uword phase_bits) const {
  if (block_size < 1) {
    throw std::invalid_argument("SearchSettings: block size must be at least 1");
  }
  if (rounds_max < 1) {
    throw std::invalid_argument("SearchSettings: rounds_max must be at least 1");
  }
  if (block_size * phase_bits > 16) {
    throw std::invalid_argument("SearchSettings: 2^(block_size * phase_bits) exceeds the 2^16 cap");
  }
}

SolveReport evaluate_phases(const ChannelSet& channels, const PhaseConfig& phases,
                            const SystemConfig& config, InnerSolver solver,
                            const FixedPointSettings& fixed_point) {
  const double sigma2 = config.noise_power_w;
  arma::cx_mat first_hop;
  arma::cx_mat bs_mat;
  try {
    first_hop = effective_first_hop(channels, phases);
    BsPrecoderResult bs = svd_waterfill(first_hop, config.users, config.rate_threshold, sigma2);
    const SinrTargets targets =
        residual_targets(channels, phases, bs.precoder, config.rate_threshold, sigma2);
    bs_mat = bs.precoder;

    const arma::cx_mat rows = second_hop_user_rows(channels, phases);
    BeamformerSolution solution;
    solution.bs_precoder = bs.precoder;
    solution.bs_stream_power = bs.waterfill.stream_power;
    arma::uword fp_iters = 0;
    double fp_residual = 0.0;
    if (solver == InnerSolver::kDuality) {
      const FixedPointResult fp = duality_fixed_point(rows, targets.eta, sigma2, fixed_point);
      const DualityResult relay = duality_beamformer(rows, targets.eta, fp.beta, sigma2);
      solution.relay_precoder = relay.precoder;
      solution.relay_user_power = relay.state.q;
      fp_iters = fp.iterations;
      fp_residual = fp.residual;
    } else {
      solution.relay_precoder = zf_beamformer(rows, targets.eta, sigma2);
      solution.relay_user_power = sigma2 * targets.eta;
    }

    SolveReport report = check_feasibility(channels, phases, solution, config);
    report.fixed_point_iterations = fp_iters;
    report.fixed_point_residual = fp_residual;
    return report;
  } catch (const SolveError& err) {
    SolveReport report;
    report.feasible = false;
    report.total_power_w = kInfeasibleObjective;
    report.phases = phases;
    report.failure = err.what();
    // Best-effort relay rate so infeasible candidates can still be ranked.
    if (!bs_mat.is_empty()) {
      report.relay_rate_bits = relay_rate(first_hop, bs_mat, sigma2);
    }
    report.relay_rate_target = 2.0 * static_cast<double>(config.users) * config.rate_threshold;
    report.user_rate_target = 2.0 * config.rate_threshold;
    return report;
  }
}

bool report_improves(const SolveReport& candidate, const SolveReport& incumbent) {
  if (candidate.feasible != incumbent.feasible) {
    return candidate.feasible;
  }
  if (candidate.feasible) {
    return candidate.total_power_w < incumbent.total_power_w;
  }
  return candidate.relay_rate_bits > incumbent.relay_rate_bits;
}

namespace {

// Writes candidate `code` of the block starting at `offset` into indices.
void apply_block(arma::uvec& indices, arma::uword offset, arma::uword width, arma::uword levels,
                 arma::uword code) {
  for (arma::uword i = 0; i < width; ++i) {
    indices[offset + i] = code % levels;
    code /= levels;
  }
}

arma::uword block_code(const arma::uvec& indices, arma::uword offset, arma::uword width,
                       arma::uword levels) {
  arma::uword code = 0;
  for (arma::uword i = width; i-- > 0;) {
    code = code * levels + indices[offset + i];
  }
  return code;
}

double objective_drop(double before, double after) {
  if (!(before > after)) {
    return 0.0;
  }
  return std::isinf(before) ? arma::datum::inf : before - after;
}

}  // namespace

FlatSearchResult block_coordinate_descent(
    arma::uword num_phases, arma::uword levels, const SearchSettings& settings,
    const std::function<SolveReport(const arma::uvec&)>& evaluate, const arma::uvec& init) {
  if (init.n_elem != num_phases) {
    throw std::invalid_argument("block_coordinate_descent: init length mismatch");
  }
  if (init.n_elem > 0 && init.max() >= levels) {
    throw std::invalid_argument("block_coordinate_descent: init index out of range");
  }

  FlatSearchResult result;
  result.indices = init;
  result.report = evaluate(init);

  for (arma::uword round = 1; round <= settings.rounds_max && num_phases > 0; ++round) {
    const double before = result.report.objective();
    for (arma::uword offset = 0; offset < num_phases; offset += settings.block_size) {
      const arma::uword width = std::min(settings.block_size, num_phases - offset);
      arma::uword candidates = 1;
      for (arma::uword i = 0; i < width; ++i) {
        candidates *= levels;
      }
      const arma::uword current = block_code(result.indices, offset, width, levels);

      std::vector<SolveReport> reports(candidates);
      #pragma omp parallel for schedule(dynamic) if (settings.parallel && candidates >= 16)
      for (arma::uword code = 0; code < candidates; ++code) {
        if (code == current) {
          continue;  // incumbent already evaluated
        }
        arma::uvec trial = result.indices;
        apply_block(trial, offset, width, levels, code);
        reports[code] = evaluate(trial);
      }

      arma::uword best_code = current;
      const SolveReport* best = &result.report;
      for (arma::uword code = 0; code < candidates; ++code) {
        if (code == current) {
          continue;
        }
        if (report_improves(reports[code], *best)) {
          best = &reports[code];
          best_code = code;
        }
      }
      if (best_code != current) {
        apply_block(result.indices, offset, width, levels, best_code);
        result.report = *best;
      }
    }
    result.round_objectives.push_back(result.report.objective());
    result.report.search_rounds = round;
    if (objective_drop(before, result.report.objective()) < settings.improvement_tol) {
      break;
    }
  }
  result.report.round_objectives = result.round_objectives;
  return result;
}

SearchResult coordinate_descent(const ChannelSet& channels, const SystemConfig& config,
                                const SearchSettings& settings, const PhaseConfig& init) {
  settings.validate(config.phase_bits);
  const arma::uword elements = init.phase1.n_elem;
  const arma::uword levels = config.phase_levels();
  if (init.phase2.n_elem != elements || init.levels != levels) {
    throw std::invalid_argument("coordinate_descent: init inconsistent with config");
  }

  const auto evaluate = [&](const arma::uvec& flat) {
    PhaseConfig phases;
    phases.levels = levels;
    phases.phase1 = flat.head(elements);
    phases.phase2 = flat.tail(elements);
    return evaluate_phases(channels, phases, config, settings.inner_solver, settings.fixed_point);
  };

  const arma::uvec flat_init = arma::join_cols(init.phase1, init.phase2);
  FlatSearchResult flat = block_coordinate_descent(2 * elements, levels, settings, evaluate, flat_init);

  SearchResult out;
  out.phases.levels = levels;
  out.phases.phase1 = flat.indices.head(elements);
  out.phases.phase2 = flat.indices.tail(elements);
  out.report = std::move(flat.report);
  out.round_objectives = std::move(flat.round_objectives);
  return out;
}

}  // namespace relayris
