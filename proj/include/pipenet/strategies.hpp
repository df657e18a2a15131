#ifndef PIPENET_STRATEGIES_HPP
#define PIPENET_STRATEGIES_HPP

/**
 * @file strategies.hpp
 * @brief The three adaptive refinement strategies over a network of pipes,
 *        plus an exhaustive reference solver for small instances.
 *
 * A strategy maps per-pipe error estimates to a refinement scheme
 * (r_m, r_x, r_t) per pipe such that the predicted relative network error
 * drops below the tolerance:
 *   - individual_bounds (S1): fixed per-pipe, per-error-type budgets,
 *   - maximal_error_refinement (S2): greedy on the largest error reduction,
 *   - maximal_error_to_cost_refinement (S3): greedy on the largest
 *     error-reduction-to-cost-increase ratio.
 */

#include <cstdint>
#include <vector>

#include "pipenet/cost_model.hpp"
#include "pipenet/error_model.hpp"
#include "pipenet/gas.hpp"

namespace pipenet {

/// Refinement bookkeeping of one pipe as seen by the strategies.
struct PipeRefinementState {
  int id = 0;
  ModelLevel level = ModelLevel::m3;  ///< model the errors were estimated at
  double n_x = 100;                   ///< current space node count
  double n_t = 100;                   ///< current time node count
  ErrorTriple errors;
  int r_m = 0;  ///< pending model refinements, level - r_m >= 1, r_m <= 2
  int r_x = 0;  ///< pending spatial mesh halvings
  int r_t = 0;  ///< pending temporal mesh halvings

  ModelLevel effective_level() const { return level_from_index(level_index(level) - r_m); }
};

/// Per-pipe refinement counts returned by a strategy.
struct RefinementScheme {
  struct Entry {
    int r_m = 0;
    int r_x = 0;
    int r_t = 0;
  };
  std::vector<Entry> pipes;

  bool empty_scheme() const {
    for (const auto& e : pipes)
      if (e.r_m != 0 || e.r_x != 0 || e.r_t != 0) return false;
    return true;
  }
};

/// Relative network error Sum_j (e_m + e_x + e_t) / M under pending schemes.
double network_error(const std::vector<PipeRefinementState>& states, const StrategyConfig& cfg);

/// Relative network error with the scheme applied on top of the states.
double network_error(const std::vector<PipeRefinementState>& states, const RefinementScheme& scheme,
                     const StrategyConfig& cfg);

/// Total simulation cost of a scheme: Sum_j cost of the final model on the
/// refined meshes.
double scheme_cost(const std::vector<PipeRefinementState>& states, const RefinementScheme& scheme,
                   const CostParams& params);

/// Strategy 1: per-pipe error budgets tol_m = kappa tol and
/// tol_x = tol_t = (1-kappa)/2 tol, each split uniformly over the pipes.
/// Discretisation refinements come from a closed form, model refinements
/// are added one level per sweep while the network error stays above tol.
RefinementScheme individual_bounds(const std::vector<PipeRefinementState>& states,
                                   const StrategyConfig& cfg);

/// Strategy 2: iteratively refine every pipe whose best single-refinement
/// error reduction reaches phi times the network-wide maximum.
RefinementScheme maximal_error_refinement(const std::vector<PipeRefinementState>& states,
                                          const StrategyConfig& cfg);

/// Strategy 3: same loop as strategy 2 with the best option measured as
/// error reduction per unit of added cost.
RefinementScheme maximal_error_to_cost_refinement(const std::vector<PipeRefinementState>& states,
                                                  const StrategyConfig& cfg,
                                                  const CostParams& params);

// ---------------------------------------------------------------------------
// Exhaustive reference solver
// ---------------------------------------------------------------------------

/// A refinement-planning problem in knapsack form: pay v_{ik} to remove
/// w_{ik} of the error, starting from error eta and base cost c, until the
/// residual error is at most tol_eta.
struct KnapsackInstance {
  double base_cost = 0.0;   ///< c
  double base_error = 0.0;  ///< eta
  double tol_eta = 0.0;
  std::vector<std::vector<double>> reductions;  ///< w[i][k], k-th refinement of possibility i
  std::vector<std::vector<double>> costs;       ///< v[i][k], all > 0
};

struct KnapsackSolution {
  std::vector<int> counts;  ///< r_i per refinement possibility
  double total_cost = 0.0;  ///< c + sum of selected v
};

/// Globally minimal-cost scheme by exhaustive enumeration up to max_depth
/// refinements per possibility. Throws Infeasible when no scheme within the
/// depth satisfies the constraint.
KnapsackSolution knapsack_oracle(const KnapsackInstance& instance, int max_depth);

/// Residual error and total cost of a given count vector on an instance.
struct InstanceEvaluation {
  double residual_error = 0.0;
  double total_cost = 0.0;
  bool feasible = false;
};
InstanceEvaluation evaluate_on_instance(const KnapsackInstance& instance, const std::vector<int>& counts);

/// Snapshot of a network of M2-level pipes as a separable knapsack instance
/// with possibility order (pipe0 model, pipe0 space, pipe0 time, pipe1 ...).
/// Requires every pipe at level M2 with zero pending refinements and M1
/// amplification factors equal to 1, so that the error accounting of the
/// instance matches pipe_error_sum exactly.
KnapsackInstance knapsack_from_states(const std::vector<PipeRefinementState>& states,
                                      const StrategyConfig& cfg, const CostParams& params,
                                      int depth);

/// Refinement counts of a scheme in instance possibility order.
std::vector<int> scheme_to_counts(const RefinementScheme& scheme);

}  // namespace pipenet

#endif  // PIPENET_STRATEGIES_HPP
