#ifndef PIPENET_COST_MODEL_HPP
#define PIPENET_COST_MODEL_HPP

/**
 * @file cost_model.hpp
 * @brief Computational cost functionals per model level.
 *
 * The cost of simulating one pipe with model m on n_x space and n_t time
 * nodes is C_m * n_x^alpha_m * n_t^beta_m. The constants were calibrated
 * against production solver timings and are treated as given.
 */

#include <array>
#include <cmath>
#include <string>

#include "pipenet/errors.hpp"
#include "pipenet/gas.hpp"

namespace pipenet {

/// Per-level constants (C_m, alpha_m, beta_m) of the cost functional.
struct CostParams {
  struct Level {
    double c;      ///< scale [CPU seconds]
    double alpha;  ///< space exponent
    double beta;   ///< time exponent
  };
  // index 0 -> M1, 1 -> M2, 2 -> M3
  std::array<Level, 3> levels{{{8.45e-5, 0.952, 0.937},
                               {1.06e-4, 0.908, 0.925},
                               {5.49e-5, 0.694, 0.857}}};

  const Level& level(ModelLevel m) const { return levels[static_cast<size_t>(level_index(m) - 1)]; }

  void validate() const {
    for (const auto& l : levels) {
      if (!(l.c > 0.0)) throw ConfigError("cost scale C_m must be > 0");
      if (!(l.alpha > 0.0 && l.alpha <= 1.2)) throw ConfigError("cost exponent alpha_m must be in (0, 1.2]");
      if (!(l.beta > 0.0 && l.beta <= 1.2)) throw ConfigError("cost exponent beta_m must be in (0, 1.2]");
    }
  }
};

/// Cost of one simulation of model m on n_x space and n_t time nodes.
inline double cost(ModelLevel m, double n_x, double n_t, const CostParams& params = {}) {
  const auto& l = params.level(m);
  return l.c * std::pow(n_x, l.alpha) * std::pow(n_t, l.beta);
}

/// Cost after (r_x, r_t) mesh halvings starting from (n_x0, n_t0) nodes.
/// Identical code path to cost(), so the refinement form and the node form
/// agree bitwise.
inline double cost_refined(ModelLevel m, int r_x, int r_t, double n_x0, double n_t0,
                           const CostParams& params = {}) {
  return cost(m, std::ldexp(n_x0, r_x), std::ldexp(n_t0, r_t), params);
}

/// Marginal cost increments for one model upgrade, one spatial and one
/// temporal refinement from the state (m_c, r_x, r_t). The model delta is
/// meaningful only for m_c != M1 and is reported as 0 for M1.
struct CostDeltas {
  double model = 0.0;
  double space = 0.0;
  double time = 0.0;
};

inline CostDeltas cost_deltas(ModelLevel m_c, int r_x, int r_t, double n_x0, double n_t0,
                              const CostParams& params = {}) {
  CostDeltas d;
  const double base = cost_refined(m_c, r_x, r_t, n_x0, n_t0, params);
  d.space = cost_refined(m_c, r_x + 1, r_t, n_x0, n_t0, params) - base;
  d.time = cost_refined(m_c, r_x, r_t + 1, n_x0, n_t0, params) - base;
  if (m_c != ModelLevel::m1) {
    const ModelLevel up = level_from_index(level_index(m_c) - 1);
    d.model = cost_refined(up, r_x, r_t, n_x0, n_t0, params) - base;
    if (!(d.model > 0.0))
      throw DegenerateCostDelta("model cost delta <= 0 at level " + std::to_string(level_index(m_c)));
  }
  if (!(d.space > 0.0) || !(d.time > 0.0))
    throw DegenerateCostDelta("discretisation cost delta <= 0 at level " + std::to_string(level_index(m_c)));
  return d;
}

}  // namespace pipenet

#endif  // PIPENET_COST_MODEL_HPP
