#include "pipenet/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pipenet/errors.hpp"

namespace pipenet {

namespace {

double relative_error(const std::vector<PipeRefinementState>& states, const StrategyConfig& cfg) {
  double total = 0.0;
  for (const auto& s : states)
    total += pipe_error_sum(s.errors, s.level, s.r_m, s.r_x, s.r_t, cfg);
  return total / cfg.target_value;
}

std::vector<PipeRefinementState> with_scheme(const std::vector<PipeRefinementState>& states,
                                             const RefinementScheme& scheme) {
  if (scheme.pipes.size() != states.size())
    throw ConfigError("scheme size does not match network size");
  std::vector<PipeRefinementState> out = states;
  for (size_t j = 0; j < out.size(); ++j) {
    out[j].r_m = scheme.pipes[j].r_m;
    out[j].r_x = scheme.pipes[j].r_x;
    out[j].r_t = scheme.pipes[j].r_t;
  }
  return out;
}

RefinementScheme extract_scheme(const std::vector<PipeRefinementState>& states) {
  RefinementScheme scheme;
  scheme.pipes.reserve(states.size());
  for (const auto& s : states) scheme.pipes.push_back({s.r_m, s.r_x, s.r_t});
  return scheme;
}

/// Closed-form count of mesh halvings bringing f_r * e / 2^(s*r) below the bound.
int refinements_for_bound(double e, double bound, double order, double f_r) {
  const double r = std::ceil(std::log(f_r * e / bound) / (order * std::log(2.0)));
  return std::max(0, static_cast<int>(r));
}

void apply_refinement(PipeRefinementState& s, RefineKind kind) {
  switch (kind) {
    case RefineKind::model:
      if (level_index(s.level) - s.r_m <= 1) throw ConfigError("model refinement past M1");
      ++s.r_m;
      break;
    case RefineKind::space: ++s.r_x; break;
    case RefineKind::time: ++s.r_t; break;
  }
}

}  // namespace

double network_error(const std::vector<PipeRefinementState>& states, const StrategyConfig& cfg) {
  if (states.empty()) throw ConfigError("network_error: empty network");
  return relative_error(states, cfg);
}

double network_error(const std::vector<PipeRefinementState>& states, const RefinementScheme& scheme,
                     const StrategyConfig& cfg) {
  return network_error(with_scheme(states, scheme), cfg);
}

double scheme_cost(const std::vector<PipeRefinementState>& states, const RefinementScheme& scheme,
                   const CostParams& params) {
  if (scheme.pipes.size() != states.size())
    throw ConfigError("scheme size does not match network size");
  double total = 0.0;
  for (size_t j = 0; j < states.size(); ++j) {
    const auto& e = scheme.pipes[j];
    const ModelLevel final_level = level_from_index(level_index(states[j].level) - e.r_m);
    total += cost_refined(final_level, e.r_x, e.r_t, states[j].n_x, states[j].n_t, params);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Strategy 1 - individual bounds
// ---------------------------------------------------------------------------

RefinementScheme individual_bounds(const std::vector<PipeRefinementState>& states,
                                   const StrategyConfig& cfg) {
  if (states.empty()) throw ConfigError("individual_bounds: empty network");
  cfg.validate();

  const double n_p = static_cast<double>(states.size());
  const double abs_tol = cfg.tol * cfg.target_value;
  const double bound_m = cfg.kappa * abs_tol / n_p;
  const double bound_xt = 0.5 * (1.0 - cfg.kappa) * abs_tol / n_p;

  std::vector<PipeRefinementState> work = states;
  for (int iter = 0; relative_error(work, cfg) > cfg.tol; ++iter) {
    if (iter >= cfg.max_iterations)
      throw Unsatisfiable("individual_bounds: iteration cap reached at relative error " +
                          std::to_string(relative_error(work, cfg)));
    bool changed = false;
    for (auto& s : work) {
      if (s.errors.space > bound_xt) {
        const int r = refinements_for_bound(s.errors.space, bound_xt, cfg.s_x, cfg.safety_factor);
        if (r > s.r_x) { s.r_x = r; changed = true; }
      }
      if (s.errors.time > bound_xt) {
        const int r = refinements_for_bound(s.errors.time, bound_xt, cfg.s_t, cfg.safety_factor);
        if (r > s.r_t) { s.r_t = r; changed = true; }
      }
    }
    if (relative_error(work, cfg) > cfg.tol) {
      for (auto& s : work) {
        if (s.errors.model > bound_m && level_index(s.level) - s.r_m > 1) {
          ++s.r_m;
          changed = true;
        }
      }
    }
    if (!changed)
      throw Unsatisfiable("individual_bounds: no further refinement available at relative error " +
                          std::to_string(relative_error(work, cfg)));
  }
  return extract_scheme(work);
}

// ---------------------------------------------------------------------------
// Strategies 2 and 3 - greedy threshold loops
// ---------------------------------------------------------------------------

namespace {

/// Best option of one pipe for strategy 2 (net error reduction) or
/// strategy 3 (error reduction per unit cost, params != nullptr).
BestOption best_option(const PipeRefinementState& s, const StrategyConfig& cfg,
                       const CostParams* params) {
  if (params == nullptr) return error_reduction(s.level, s.r_m, s.r_x, s.r_t, s.errors, cfg);

  const ErrorDeltas d = error_deltas(s.level, s.r_m, s.r_x, s.r_t, s.errors, cfg);
  const ModelLevel m_c = s.effective_level();
  const CostDeltas c = cost_deltas(m_c, s.r_x, s.r_t, s.n_x, s.n_t, *params);
  BestOption best{d.space / c.space, RefineKind::space};
  const double time_ratio = d.time / c.time;
  if (time_ratio > best.delta) best = {time_ratio, RefineKind::time};
  if (d.model_available) {
    const double model_ratio = d.model / c.model;
    if (model_ratio >= best.delta) best = {model_ratio, RefineKind::model};
  }
  return best;
}

RefinementScheme greedy_threshold(const std::vector<PipeRefinementState>& states,
                                  const StrategyConfig& cfg, const CostParams* params) {
  if (states.empty()) throw ConfigError("greedy refinement: empty network");
  cfg.validate();

  std::vector<PipeRefinementState> work = states;
  std::vector<BestOption> best(work.size());
  for (size_t j = 0; j < work.size(); ++j) best[j] = best_option(work[j], cfg, params);

  for (int iter = 0; relative_error(work, cfg) > cfg.tol; ++iter) {
    if (iter >= cfg.max_iterations)
      throw Unsatisfiable("greedy refinement: iteration cap reached at relative error " +
                          std::to_string(relative_error(work, cfg)));
    double max_b = -std::numeric_limits<double>::infinity();
    for (const auto& b : best) max_b = std::max(max_b, b.delta);
    if (!(max_b > 0.0))
      throw Unsatisfiable("greedy refinement: no error reduction available at relative error " +
                          std::to_string(relative_error(work, cfg)));
    const double bound = cfg.phi * max_b;
    for (size_t j = 0; j < work.size(); ++j) {
      if (!(best[j].delta > 0.0) || best[j].delta < bound) continue;
      if (cfg.uniform_time && best[j].kind == RefineKind::time) {
        // Network-wide time stepping: one temporal refinement applies to
        // every pipe, after which all options are stale.
        for (auto& s : work) ++s.r_t;
        for (size_t k = 0; k < work.size(); ++k) best[k] = best_option(work[k], cfg, params);
      } else {
        apply_refinement(work[j], best[j].kind);
        best[j] = best_option(work[j], cfg, params);
      }
    }
  }
  return extract_scheme(work);
}

}  // namespace

RefinementScheme maximal_error_refinement(const std::vector<PipeRefinementState>& states,
                                          const StrategyConfig& cfg) {
  return greedy_threshold(states, cfg, nullptr);
}

RefinementScheme maximal_error_to_cost_refinement(const std::vector<PipeRefinementState>& states,
                                                  const StrategyConfig& cfg,
                                                  const CostParams& params) {
  params.validate();
  return greedy_threshold(states, cfg, &params);
}

// ---------------------------------------------------------------------------
// Exhaustive reference solver
// ---------------------------------------------------------------------------

InstanceEvaluation evaluate_on_instance(const KnapsackInstance& instance,
                                        const std::vector<int>& counts) {
  if (counts.size() != instance.reductions.size())
    throw ConfigError("count vector does not match instance size");
  InstanceEvaluation ev;
  ev.residual_error = instance.base_error;
  ev.total_cost = instance.base_cost;
  for (size_t i = 0; i < counts.size(); ++i) {
    const auto& w = instance.reductions[i];
    const auto& v = instance.costs[i];
    if (counts[i] < 0 || static_cast<size_t>(counts[i]) > w.size())
      throw ConfigError("count exceeds instance refinement sequence length");
    for (int k = 0; k < counts[i]; ++k) {
      ev.residual_error -= w[static_cast<size_t>(k)];
      ev.total_cost += v[static_cast<size_t>(k)];
    }
  }
  ev.feasible = ev.residual_error <= instance.tol_eta;
  return ev;
}

namespace {

void oracle_search(const KnapsackInstance& inst, int max_depth, size_t i, double error, double cost,
                   std::vector<int>& counts, KnapsackSolution& best, bool& found) {
  if (found && cost >= best.total_cost) return;  // costs are positive, prune
  if (error <= inst.tol_eta) {
    if (!found || cost < best.total_cost) {
      best.counts = counts;
      best.total_cost = cost;
      found = true;
    }
    return;
  }
  if (i == inst.reductions.size()) return;
  const auto& w = inst.reductions[i];
  const auto& v = inst.costs[i];
  const int depth = std::min<int>(max_depth, static_cast<int>(w.size()));
  double e = error, c = cost;
  for (int r = 0; r <= depth; ++r) {
    counts[i] = r;
    oracle_search(inst, max_depth, i + 1, e, c, counts, best, found);
    if (r < depth) {
      e -= w[static_cast<size_t>(r)];
      c += v[static_cast<size_t>(r)];
    }
  }
  counts[i] = 0;
}

}  // namespace

KnapsackSolution knapsack_oracle(const KnapsackInstance& instance, int max_depth) {
  if (instance.reductions.size() != instance.costs.size())
    throw ConfigError("knapsack instance: reduction/cost possibility counts differ");
  for (size_t i = 0; i < instance.costs.size(); ++i) {
    if (instance.costs[i].size() != instance.reductions[i].size())
      throw ConfigError("knapsack instance: sequence lengths differ for possibility " + std::to_string(i));
    for (double v : instance.costs[i])
      if (!(v > 0.0)) throw ConfigError("knapsack instance: cost additions must be > 0");
    for (double w : instance.reductions[i])
      if (w < 0.0) throw ConfigError("knapsack instance: error reductions must be >= 0");
  }

  KnapsackSolution best;
  bool found = false;
  std::vector<int> counts(instance.reductions.size(), 0);
  oracle_search(instance, max_depth, 0, instance.base_error, instance.base_cost, counts, best, found);
  if (!found) throw Infeasible("knapsack_oracle: no scheme within depth " + std::to_string(max_depth));
  return best;
}

KnapsackInstance knapsack_from_states(const std::vector<PipeRefinementState>& states,
                                      const StrategyConfig& cfg, const CostParams& params,
                                      int depth) {
  if (cfg.amp_x_m1 != 1.0 || cfg.amp_t_m1 != 1.0)
    throw ConfigError("knapsack_from_states requires M1 amplification factors of 1");
  KnapsackInstance inst;
  inst.tol_eta = cfg.tol * cfg.target_value;
  for (const auto& s : states) {
    if (s.level != ModelLevel::m2 || s.r_m != 0 || s.r_x != 0 || s.r_t != 0)
      throw ConfigError("knapsack_from_states requires fresh M2 pipes");
    inst.base_error += s.errors.sum();
    inst.base_cost += cost(ModelLevel::m2, s.n_x, s.n_t, params);

    // model switch M2 -> M1: discretisation terms cancel since the
    // amplification factors agree, so the reduction is exact
    inst.reductions.push_back({cfg.fm_21 * s.errors.model});
    inst.costs.push_back({cost(ModelLevel::m1, s.n_x, s.n_t, params) -
                          cost(ModelLevel::m2, s.n_x, s.n_t, params)});

    std::vector<double> wx, vx, wt, vt;
    for (int k = 0; k < depth; ++k) {
      wx.push_back(predicted_space_error(ModelLevel::m2, s.errors.space, k, cfg) -
                   predicted_space_error(ModelLevel::m2, s.errors.space, k + 1, cfg));
      vx.push_back(cost_refined(ModelLevel::m2, k + 1, 0, s.n_x, s.n_t, params) -
                   cost_refined(ModelLevel::m2, k, 0, s.n_x, s.n_t, params));
      wt.push_back(predicted_time_error(ModelLevel::m2, s.errors.time, k, cfg) -
                   predicted_time_error(ModelLevel::m2, s.errors.time, k + 1, cfg));
      vt.push_back(cost_refined(ModelLevel::m2, 0, k + 1, s.n_x, s.n_t, params) -
                   cost_refined(ModelLevel::m2, 0, k, s.n_x, s.n_t, params));
    }
    inst.reductions.push_back(std::move(wx));
    inst.costs.push_back(std::move(vx));
    inst.reductions.push_back(std::move(wt));
    inst.costs.push_back(std::move(vt));
  }
  return inst;
}

std::vector<int> scheme_to_counts(const RefinementScheme& scheme) {
  std::vector<int> counts;
  counts.reserve(scheme.pipes.size() * 3);
  for (const auto& e : scheme.pipes) {
    counts.push_back(e.r_m);
    counts.push_back(e.r_x);
    counts.push_back(e.r_t);
  }
  return counts;
}

}  // namespace pipenet
