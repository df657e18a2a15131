#include "pipenet/pipe_solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "pipenet/errors.hpp"

namespace pipenet {

// ---------------------------------------------------------------------------
// algebraic model
// ---------------------------------------------------------------------------

Eigen::VectorXd solve_m3(const PipeConfig& cfg, double p_in, double q, const Eigen::VectorXd& x) {
  if (!(p_in > 0.0)) throw NonPhysicalState("solve_m3: inlet pressure must be > 0");
  const double rho_in = density_from_pressure(p_in, cfg);
  const double c2 = p_in / rho_in;
  const double slope_term = cfg.friction * c2 / cfg.diameter * q * std::abs(q);

  Eigen::VectorXd p(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double radicand = p_in * p_in - slope_term * x(i);
    if (!(radicand > 0.0))
      throw PressureExhausted("solve_m3: pressure exhausted at x = " + std::to_string(x(i)));
    p(i) = std::sqrt(radicand);
  }
  return p;
}

GasField solve_m3_field(const PipeConfig& cfg, double p_in, double q, const Eigen::VectorXd& x) {
  GasField field;
  field.x = x;
  field.q = Eigen::VectorXd::Constant(x.size(), q);
  const Eigen::VectorXd p = solve_m3(cfg, p_in, q, x);
  field.rho.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) field.rho(i) = density_from_pressure(p(i), cfg);
  return field;
}

// ---------------------------------------------------------------------------
// box scheme assembly
// ---------------------------------------------------------------------------

namespace {

/// dp/drho for p = rho R T / (1 + alpha rho R T).
double pressure_derivative(double rho, const PipeConfig& cfg) {
  const double rt = cfg.gas_constant * cfg.temperature;
  const double den = 1.0 + cfg.alpha * rho * rt;
  return rt / (den * den);
}

}  // namespace

BoxAssembler::BoxAssembler(ModelLevel model, const PipeConfig& cfg, int n_cells)
    : model_(model), cfg_(cfg), n_cells_(n_cells), h_(cfg.length / n_cells) {
  if (model == ModelLevel::m3) throw ConfigError("BoxAssembler: M3 has no box discretisation");
  if (n_cells < 1) throw ConfigError("BoxAssembler: need at least one cell");
  cfg.validate();
}

void BoxAssembler::interior(const Eigen::VectorXd& u, const Eigen::VectorXd& u_old, double dt,
                            bool stationary, int eq0, int var0, Eigen::VectorXd& res,
                            std::vector<Eigen::Triplet<double>>& jac) const {
  const bool advective = model_ == ModelLevel::m1;
  const double lam = 0.5 * cfg_.friction / cfg_.diameter;
  const double grav = cfg_.gravity * cfg_.slope;
  // transient: d/dt + d/dx scaled by dt/h; stationary: d/dx scaled by 1/h
  const double flux_w = stationary ? 1.0 / h_ : dt / h_;
  const double src_w = stationary ? 1.0 : dt;

  for (int i = 0; i < n_cells_; ++i) {
    const int vl = var0 + 2 * i;      // rho_i, q_i
    const int vr = var0 + 2 * i + 2;  // rho_{i+1}, q_{i+1}
    const double rho_l = u(vl), q_l = u(vl + 1);
    const double rho_r = u(vr), q_r = u(vr + 1);
    if (!(rho_l > 0.0) || !(rho_r > 0.0))
      throw NonPhysicalState("box scheme: nonpositive density in iterate");

    const double p_l = pressure_from_density(rho_l, cfg_);
    const double p_r = pressure_from_density(rho_r, cfg_);
    const double dp_l = pressure_derivative(rho_l, cfg_);
    const double dp_r = pressure_derivative(rho_r, cfg_);

    const int eq_mass = eq0 + 2 * i;
    const int eq_mom = eq0 + 2 * i + 1;

    // mass: time average + flux difference of q
    double r_mass = flux_w * (q_r - q_l);
    if (!stationary) r_mass += 0.5 * (rho_l + rho_r) - 0.5 * (u_old(vl) + u_old(vr));
    res(eq_mass) = r_mass;
    if (!stationary) {
      jac.emplace_back(eq_mass, vl, 0.5);
      jac.emplace_back(eq_mass, vr, 0.5);
    }
    jac.emplace_back(eq_mass, vl + 1, -flux_w);
    jac.emplace_back(eq_mass, vr + 1, flux_w);

    // momentum flux: p (+ q^2 / rho for the advective model)
    double f_l = p_l, f_r = p_r;
    double df_l_rho = dp_l, df_r_rho = dp_r;
    double df_l_q = 0.0, df_r_q = 0.0;
    if (advective) {
      f_l += q_l * q_l / rho_l;
      f_r += q_r * q_r / rho_r;
      df_l_rho -= q_l * q_l / (rho_l * rho_l);
      df_r_rho -= q_r * q_r / (rho_r * rho_r);
      df_l_q = 2.0 * q_l / rho_l;
      df_r_q = 2.0 * q_r / rho_r;
    }

    // friction and gravity at the cell average of the new state
    const double rho_m = 0.5 * (rho_l + rho_r);
    const double q_m = 0.5 * (q_l + q_r);
    const double src = lam * q_m * std::abs(q_m) / rho_m + grav * rho_m;
    const double dsrc_rho = -lam * q_m * std::abs(q_m) / (rho_m * rho_m) + grav;
    const double dsrc_q = 2.0 * lam * std::abs(q_m) / rho_m;

    double r_mom = flux_w * (f_r - f_l) + src_w * src;
    if (!stationary) r_mom += 0.5 * (q_l + q_r) - 0.5 * (u_old(vl + 1) + u_old(vr + 1));
    res(eq_mom) = r_mom;

    jac.emplace_back(eq_mom, vl, -flux_w * df_l_rho + src_w * 0.5 * dsrc_rho);
    jac.emplace_back(eq_mom, vr, flux_w * df_r_rho + src_w * 0.5 * dsrc_rho);
    double j_ql = -flux_w * df_l_q + src_w * 0.5 * dsrc_q;
    double j_qr = flux_w * df_r_q + src_w * 0.5 * dsrc_q;
    if (!stationary) {
      j_ql += 0.5;
      j_qr += 0.5;
    }
    jac.emplace_back(eq_mom, vl + 1, j_ql);
    jac.emplace_back(eq_mom, vr + 1, j_qr);
  }
}

void BoxAssembler::scale_rows(double dt, bool stationary, const EquationScales& s, int eq0,
                              Eigen::VectorXd& scales) const {
  const double flux_w = stationary ? 1.0 / h_ : dt / h_;
  const double mass_scale = (stationary ? 0.0 : s.density) + flux_w * s.flux;
  const double mom_scale = (stationary ? 0.0 : s.flux) + flux_w * s.pressure;
  for (int i = 0; i < n_cells_; ++i) {
    scales(eq0 + 2 * i) = mass_scale;
    scales(eq0 + 2 * i + 1) = mom_scale;
  }
}

// ---------------------------------------------------------------------------
// damped Newton
// ---------------------------------------------------------------------------

Eigen::VectorXd newton_solve(
    int n_unknowns,
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&,
                             std::vector<Eigen::Triplet<double>>&)>& assemble,
    const Eigen::VectorXd& initial, const Eigen::VectorXd& scales, double tol,
    int max_iterations) {
  Eigen::VectorXd u = initial;
  Eigen::VectorXd res(n_unknowns);
  std::vector<Eigen::Triplet<double>> trips;

  auto scaled_norm = [&](const Eigen::VectorXd& r) {
    double m = 0.0;
    for (int k = 0; k < n_unknowns; ++k) m = std::max(m, std::abs(r(k)) / scales(k));
    return m;
  };
  auto try_residual = [&](const Eigen::VectorXd& cand, Eigen::VectorXd& r) -> bool {
    trips.clear();
    try {
      assemble(cand, r, trips);
    } catch (const NonPhysicalState&) {
      return false;
    }
    return r.allFinite();
  };

  res.setZero();
  if (!try_residual(u, res)) throw SolverDiverged("newton: nonphysical initial state");
  double norm = scaled_norm(res);

  Eigen::SparseMatrix<double> jac(n_unknowns, n_unknowns);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;

  for (int iter = 0; iter < max_iterations; ++iter) {
    if (norm <= tol) return u;

    jac.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) throw SolverDiverged("newton: singular Jacobian");
    const Eigen::VectorXd step = lu.solve(res);

    // backtracking line search on the scaled residual
    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd cand, cand_res(n_unknowns);
    for (int back = 0; back < 12; ++back) {
      cand = u - t * step;
      cand_res.setZero();
      if (try_residual(cand, cand_res)) {
        const double cand_norm = scaled_norm(cand_res);
        if (cand_norm < norm || cand_norm <= tol) {
          u = cand;
          res = cand_res;
          norm = cand_norm;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted)
      throw SolverDiverged("newton: line search stagnated at residual " + std::to_string(norm));
  }
  throw SolverDiverged("newton: iteration cap reached at residual " + std::to_string(norm));
}

// ---------------------------------------------------------------------------
// single-pipe drivers
// ---------------------------------------------------------------------------

namespace {

GasField solve_single_pipe(ModelLevel model, const PipeConfig& cfg, const GasField& state,
                           double dt, bool stationary, const BoundaryCondition& inflow,
                           const BoundaryCondition& outflow) {
  state.validate();
  const int n_nodes = static_cast<int>(state.size());
  const int n_cells = n_nodes - 1;
  const BoxAssembler box(model, cfg, n_cells);
  const int n_unknowns = box.n_unknowns();

  Eigen::VectorXd u_old(n_unknowns);
  for (int i = 0; i < n_nodes; ++i) {
    u_old(2 * i) = state.rho(i);
    u_old(2 * i + 1) = state.q(i);
  }

  EquationScales es;
  es.density = state.rho.cwiseAbs().maxCoeff() + 1.0;
  es.flux = state.q.cwiseAbs().maxCoeff() + 1.0;
  es.pressure = pressure_from_density(es.density, cfg);

  auto closure = [&](const BoundaryCondition& bc, int node, const Eigen::VectorXd& u, int eq,
                     Eigen::VectorXd& res, std::vector<Eigen::Triplet<double>>& jac) {
    const int v = 2 * node;
    if (bc.kind == BoundaryCondition::Kind::pressure) {
      res(eq) = pressure_from_density(u(v), cfg) - bc.value;
      jac.emplace_back(eq, v, pressure_derivative(u(v), cfg));
    } else {
      res(eq) = u(v + 1) - bc.value;
      jac.emplace_back(eq, v + 1, 1.0);
    }
  };

  auto assemble = [&](const Eigen::VectorXd& u, Eigen::VectorXd& res,
                      std::vector<Eigen::Triplet<double>>& jac) {
    box.interior(u, u_old, dt, stationary, 0, 0, res, jac);
    closure(inflow, 0, u, 2 * n_cells, res, jac);
    closure(outflow, n_cells, u, 2 * n_cells + 1, res, jac);
  };

  Eigen::VectorXd scales(n_unknowns);
  box.scale_rows(dt, stationary, es, 0, scales);
  scales(2 * n_cells) = inflow.kind == BoundaryCondition::Kind::pressure ? es.pressure : es.flux;
  scales(2 * n_cells + 1) = outflow.kind == BoundaryCondition::Kind::pressure ? es.pressure : es.flux;

  const Eigen::VectorXd u = newton_solve(n_unknowns, assemble, u_old, scales);

  GasField out;
  out.x = state.x;
  out.rho.resize(n_nodes);
  out.q.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    out.rho(i) = u(2 * i);
    out.q(i) = u(2 * i + 1);
  }
  out.validate();
  return out;
}

}  // namespace

GasField step_pipe(ModelLevel model, const PipeConfig& cfg, const GasField& state, double dt,
                   const BoundaryCondition& inflow, const BoundaryCondition& outflow) {
  if (!(dt > 0.0)) throw ConfigError("step_pipe: dt must be > 0");
  return solve_single_pipe(model, cfg, state, dt, false, inflow, outflow);
}

GasField solve_stationary(ModelLevel model, const PipeConfig& cfg, const GasField& guess,
                          const BoundaryCondition& inflow, const BoundaryCondition& outflow) {
  return solve_single_pipe(model, cfg, guess, 0.0, true, inflow, outflow);
}

}  // namespace pipenet
