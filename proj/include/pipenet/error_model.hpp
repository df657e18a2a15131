#ifndef PIPENET_ERROR_MODEL_HPP
#define PIPENET_ERROR_MODEL_HPP

/**
 * @file error_model.hpp
 * @brief Predictive error arithmetic for refinement planning.
 *
 * Each pipe carries an estimated error triple (model, space, time). The
 * functions here predict how those errors change under model upgrades and
 * mesh halvings: discretisation errors shrink by 2^(order * refinements)
 * and get a one-time safety bump, model errors shrink by a per-switch
 * reduction fraction applied to the current residual.
 */

#include <cmath>
#include <string>

#include "pipenet/errors.hpp"
#include "pipenet/gas.hpp"

namespace pipenet {

/// Estimated absolute error contributions of one pipe.
struct ErrorTriple {
  double model = 0.0;  ///< e_m >= 0
  double space = 0.0;  ///< e_x >= 0
  double time = 0.0;   ///< e_t >= 0

  double sum() const { return model + space + time; }
};

/// Which of the three refinement kinds an option refers to.
/// Declaration order fixes the tie-break priority: model > space > time.
enum class RefineKind : int { model = 0, space = 1, time = 2 };

/// Tunable parameters shared by the error model and the strategies.
struct StrategyConfig {
  double tol = 0.1;          ///< relative error tolerance
  double kappa = 1.0 / 3.0;  ///< model-error share of the tolerance (strategy 1)
  double phi = 1.0;          ///< best-option threshold fraction (strategies 2/3)
  double safety_factor = 1.1;  ///< f_r > 1, applied once per refined direction
  double s_x = 2.0;            ///< spatial convergence order
  double s_t = 1.0;            ///< temporal convergence order
  double target_value = 30.0;  ///< |M(u^h)| normalising the network error

  /// Discretisation-error amplification for M1 relative to the benchmark M2.
  /// The factors for M2 (1) and M3 (0) are fixed by the hierarchy.
  double amp_x_m1 = 1.0;
  double amp_t_m1 = 1.0;

  /// Model-error reduction fractions for the two possible switches.
  double fm_32 = 0.75;  ///< fraction removed by M3 -> M2
  double fm_21 = 0.25;  ///< fraction removed by M2 -> M1

  int max_iterations = 100;  ///< strategy loop cap before Unsatisfiable

  /// Network-wide time stepping: a temporal refinement applies to every pipe.
  bool uniform_time = false;

  double amp_x(ModelLevel m) const {
    switch (m) {
      case ModelLevel::m1: return amp_x_m1;
      case ModelLevel::m2: return 1.0;
      case ModelLevel::m3: return 0.0;
    }
    return 0.0;
  }
  double amp_t(ModelLevel m) const {
    switch (m) {
      case ModelLevel::m1: return amp_t_m1;
      case ModelLevel::m2: return 1.0;
      case ModelLevel::m3: return 0.0;
    }
    return 0.0;
  }
  /// Reduction fraction for the switch from level `from` one step up.
  double fm(ModelLevel from) const {
    switch (from) {
      case ModelLevel::m3: return fm_32;
      case ModelLevel::m2: return fm_21;
      case ModelLevel::m1: break;
    }
    throw ConfigError("no model switch available from M1");
  }

  void validate() const {
    if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
    if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("kappa must be in (0,1)");
    if (!(phi > 0.0 && phi <= 1.0)) throw ConfigError("phi must be in (0,1]");
    if (!(safety_factor > 1.0)) throw ConfigError("safety factor f_r must be > 1");
    if (!(s_x > 0.0) || !(s_t > 0.0)) throw ConfigError("convergence orders must be > 0");
    if (!(target_value > 0.0)) throw ConfigError("target value M must be > 0");
    if (!(fm_32 > 0.0 && fm_32 <= 1.0) || !(fm_21 > 0.0 && fm_21 <= 1.0))
      throw ConfigError("model reduction fractions must be in (0,1]");
    if (amp_x_m1 < 0.0 || amp_t_m1 < 0.0) throw ConfigError("M1 amplification factors must be >= 0");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  }
};

/// 1 for an unrefined direction, f_r once at least one refinement is pending.
inline double safety(int r, double f_r) { return r > 0 ? f_r : 1.0; }

/// Predicted spatial error of a pipe running at level m_c after r_x halvings.
inline double predicted_space_error(ModelLevel m_c, double e_x, int r_x, const StrategyConfig& cfg) {
  return e_x / std::exp2(cfg.s_x * r_x) * safety(r_x, cfg.safety_factor) * cfg.amp_x(m_c);
}

/// Predicted temporal error of a pipe running at level m_c after r_t halvings.
inline double predicted_time_error(ModelLevel m_c, double e_t, int r_t, const StrategyConfig& cfg) {
  return e_t / std::exp2(cfg.s_t * r_t) * safety(r_t, cfg.safety_factor) * cfg.amp_t(m_c);
}

/// Residual model error after r_m switches starting from `level`.
/// Each switch removes its configured fraction of the original error, so
/// the removed fractions add up along the switch path; with the default
/// fractions 3/4 and 1/4 the residual vanishes at M1, where a pipe has no
/// model error by definition. Clamped at zero for fraction sets above 1.
inline double residual_model_error(ModelLevel level, int r_m, double e_m, const StrategyConfig& cfg) {
  double removed = 0.0;
  int l = level_index(level);
  for (int k = 0; k < r_m; ++k) {
    if (l <= 1) throw ConfigError("model refinement past M1");
    removed += cfg.fm(level_from_index(l));
    --l;
  }
  return e_m * std::max(0.0, 1.0 - removed);
}

/// Predicted total error of one pipe under the pending scheme (r_m, r_x, r_t).
inline double pipe_error_sum(const ErrorTriple& errs, ModelLevel level, int r_m, int r_x, int r_t,
                             const StrategyConfig& cfg) {
  const int mc = level_index(level) - r_m;
  if (mc < 1 || mc > 3) throw ConfigError("effective model level out of range: " + std::to_string(mc));
  const ModelLevel m_c = level_from_index(mc);
  return residual_model_error(level, r_m, errs.model, cfg) +
         predicted_space_error(m_c, errs.space, r_x, cfg) +
         predicted_time_error(m_c, errs.time, r_t, cfg);
}

/// Best single-refinement option of one pipe.
struct BestOption {
  double delta = 0.0;             ///< predicted net error reduction
  RefineKind kind = RefineKind::space;
};

/// The three single-refinement error reductions on top of a pending scheme.
struct ErrorDeltas {
  bool model_available = false;  ///< false when the effective level is M1
  double model = 0.0;
  double space = 0.0;
  double time = 0.0;
};

/// Net error reduction for one model upgrade, one spatial and one temporal
/// refinement on top of the pending scheme (r_m, r_x, r_t). The model delta
/// accounts for discretisation errors introduced or amplified by the switch
/// and can be negative.
inline ErrorDeltas error_deltas(ModelLevel level, int r_m, int r_x, int r_t,
                                const ErrorTriple& errs, const StrategyConfig& cfg) {
  const int mc = level_index(level) - r_m;
  if (mc < 1 || mc > 3) throw ConfigError("effective model level out of range: " + std::to_string(mc));
  const ModelLevel m_c = level_from_index(mc);

  ErrorDeltas d;
  d.space =
      predicted_space_error(m_c, errs.space, r_x, cfg) - predicted_space_error(m_c, errs.space, r_x + 1, cfg);
  d.time =
      predicted_time_error(m_c, errs.time, r_t, cfg) - predicted_time_error(m_c, errs.time, r_t + 1, cfg);
  if (m_c != ModelLevel::m1) {
    const ModelLevel up = level_from_index(mc - 1);
    // removed fraction applies to the original estimate; the difference of
    // residuals keeps the delta consistent with pipe_error_sum even when
    // the clamp is active
    const double model_gain = residual_model_error(level, r_m, errs.model, cfg) -
                              residual_model_error(level, r_m + 1, errs.model, cfg);
    d.model_available = true;
    d.model =
        model_gain +
        predicted_space_error(m_c, errs.space, r_x, cfg) - predicted_space_error(up, errs.space, r_x, cfg) +
        predicted_time_error(m_c, errs.time, r_t, cfg) - predicted_time_error(up, errs.time, r_t, cfg);
  }
  return d;
}

/// Largest of the three reductions; ties break model > space > time. When
/// the effective level is M1, only space and time compete.
inline BestOption error_reduction(ModelLevel level, int r_m, int r_x, int r_t,
                                  const ErrorTriple& errs, const StrategyConfig& cfg) {
  const ErrorDeltas d = error_deltas(level, r_m, r_x, r_t, errs, cfg);
  BestOption best{d.space, RefineKind::space};
  if (d.time > best.delta) best = {d.time, RefineKind::time};
  if (d.model_available && d.model >= best.delta) best = {d.model, RefineKind::model};
  return best;
}

}  // namespace pipenet

#endif  // PIPENET_ERROR_MODEL_HPP
