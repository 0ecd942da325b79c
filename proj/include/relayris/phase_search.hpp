// Discrete phase optimization: blockwise exhaustive coordinate descent around
// the inner beamforming solvers. Candidate evaluations within a block are
// independent and run under OpenMP when worthwhile.
#pragma once

#include <armadillo>
#include <functional>
#include <vector>

#include "relayris/rate_model.hpp"
#include "relayris/relay_precoder.hpp"

namespace relayris {

enum class InnerSolver { kDuality, kZeroForcing };

struct SearchSettings {
  arma::uword block_size = 1;      // r: phase shifts enumerated jointly per block
  arma::uword rounds_max = 3;      // full passes over all phase shifts
  double improvement_tol = 1e-4;   // watts; minimum round improvement to continue
  InnerSolver inner_solver = InnerSolver::kDuality;
  FixedPointSettings fixed_point;
  bool parallel = true;            // OpenMP over candidates within a block

  // Enforces the 2^{r b} <= 2^16 enumeration cap; throws std::invalid_argument.
  void validate(arma::uword phase_bits) const;
};

// Full inner solve at fixed phases. Solver failures come back as an
// infeasible report with an infinite objective, never as an exception.
SolveReport evaluate_phases(const ChannelSet& channels, const PhaseConfig& phases,
                            const SystemConfig& config, InnerSolver solver,
                            const FixedPointSettings& fixed_point = {});

// Preference order used by the search: feasibility first, lower power among
// feasible candidates, larger relay rate among infeasible ones.
bool report_improves(const SolveReport& candidate, const SolveReport& incumbent);

struct FlatSearchResult {
  arma::uvec indices;
  SolveReport report;
  std::vector<double> round_objectives;
};

// Generic descent over a flat vector of `num_phases` indices, each in
// [0, levels). evaluate must be pure. Blocks of block_size indices are swept
// in order; every assignment of a block is enumerated and the best kept.
// Stops when a full round improves the objective by less than
// improvement_tol or after rounds_max rounds.
FlatSearchResult block_coordinate_descent(
    arma::uword num_phases, arma::uword levels, const SearchSettings& settings,
    const std::function<SolveReport(const arma::uvec&)>& evaluate, const arma::uvec& init);

struct SearchResult {
  PhaseConfig phases;
  SolveReport report;
  std::vector<double> round_objectives;
};

// Joint search over both phase vectors (theta1 elements first, then theta2).
SearchResult coordinate_descent(const ChannelSet& channels, const SystemConfig& config,
                                const SearchSettings& settings, const PhaseConfig& init);

}  // namespace relayris
