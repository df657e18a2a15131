#ifndef PIPENET_PIPE_SOLVER_HPP
#define PIPENET_PIPE_SOLVER_HPP

/**
 * @file pipe_solver.hpp
 * @brief Single-pipe solvers of the model hierarchy.
 *
 * M1 (nonlinear isothermal Euler) and M2 (semilinear) are discretised with
 * the implicit box scheme: cell-averaged states in time, node fluxes in
 * space, fully implicit source terms. One step solves a banded nonlinear
 * system by damped Newton. M3 is the stationary zero-slope closed form
 * p(x) = sqrt(p_in^2 - lambda c^2 x / D * q|q|).
 */

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "pipenet/gas.hpp"

namespace pipenet {

/// One prescribed condition at a pipe end.
struct BoundaryCondition {
  enum class Kind { pressure, flux };
  Kind kind = Kind::pressure;
  double value = 0.0;

  static BoundaryCondition pressure(double p) { return {Kind::pressure, p}; }
  static BoundaryCondition flux(double q) { return {Kind::flux, q}; }
};

/// Pressure profile of the algebraic model at the given positions.
/// The speed of sound is evaluated at the pipe inlet. Throws
/// PressureExhausted when the radicand drops to zero within the pipe.
Eigen::VectorXd solve_m3(const PipeConfig& cfg, double p_in, double q, const Eigen::VectorXd& x);

/// Full gas field of the algebraic model (density via the EOS, constant flux).
GasField solve_m3_field(const PipeConfig& cfg, double p_in, double q, const Eigen::VectorXd& x);

/// One implicit box-scheme step of model M1 or M2 with one boundary
/// condition per pipe end. Throws SolverDiverged when Newton fails and
/// NonPhysicalState when the converged state loses positivity.
GasField step_pipe(ModelLevel model, const PipeConfig& cfg, const GasField& state, double dt,
                   const BoundaryCondition& inflow, const BoundaryCondition& outflow);

inline GasField step_m1(const PipeConfig& cfg, const GasField& state, double dt,
                        const BoundaryCondition& inflow, const BoundaryCondition& outflow) {
  return step_pipe(ModelLevel::m1, cfg, state, dt, inflow, outflow);
}
inline GasField step_m2(const PipeConfig& cfg, const GasField& state, double dt,
                        const BoundaryCondition& inflow, const BoundaryCondition& outflow) {
  return step_pipe(ModelLevel::m2, cfg, state, dt, inflow, outflow);
}

/// Stationary solution of M1/M2 on the grid of the guess field.
GasField solve_stationary(ModelLevel model, const PipeConfig& cfg, const GasField& guess,
                          const BoundaryCondition& inflow, const BoundaryCondition& outflow);

// ---------------------------------------------------------------------------
// Building blocks shared with the network solver
// ---------------------------------------------------------------------------

/// Equation scales used to normalise Newton residuals.
struct EquationScales {
  double density = 1.0;
  double flux = 1.0;
  double pressure = 1.0;
};

/// Writes the interior box-scheme equations of one pipe into a global
/// system. Unknowns are interleaved (rho_0, q_0, rho_1, q_1, ...) starting
/// at var0; the 2*n_cells interior equations start at eq0. The two boundary
/// closures are the caller's responsibility.
class BoxAssembler {
 public:
  BoxAssembler(ModelLevel model, const PipeConfig& cfg, int n_cells);

  int n_cells() const { return n_cells_; }
  int n_nodes() const { return n_cells_ + 1; }
  int n_unknowns() const { return 2 * n_nodes(); }

  /// stationary=true drops the time term (dt ignored).
  void interior(const Eigen::VectorXd& u, const Eigen::VectorXd& u_old, double dt, bool stationary,
                int eq0, int var0, Eigen::VectorXd& res,
                std::vector<Eigen::Triplet<double>>& jac) const;

  /// Scales for the interior equations (mass rows then momentum rows per cell).
  void scale_rows(double dt, bool stationary, const EquationScales& s, int eq0,
                  Eigen::VectorXd& scales) const;

  const PipeConfig& config() const { return cfg_; }
  double cell_width() const { return h_; }
  ModelLevel model() const { return model_; }

 private:
  ModelLevel model_;
  PipeConfig cfg_;
  int n_cells_;
  double h_;
};

/// Damped Newton on a sparse nonlinear system. `assemble` fills the
/// residual and Jacobian triplets for the current iterate. Residuals are
/// normalised by `scales` (componentwise); convergence at max-norm <= tol.
/// Throws SolverDiverged on stagnation or iteration cap.
Eigen::VectorXd newton_solve(
    int n_unknowns,
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&,
                             std::vector<Eigen::Triplet<double>>&)>& assemble,
    const Eigen::VectorXd& initial, const Eigen::VectorXd& scales, double tol = 1e-10,
    int max_iterations = 50);

}  // namespace pipenet

#endif  // PIPENET_PIPE_SOLVER_HPP
