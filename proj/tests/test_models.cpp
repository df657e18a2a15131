#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "pipenet/experiment.hpp"
#include "pipenet/gas.hpp"
#include "pipenet/pipe_solver.hpp"

using namespace pipenet;

namespace {

PipeConfig ideal_pipe() {
  PipeConfig cfg;
  cfg.length = 10000.0;
  cfg.diameter = 0.5;
  cfg.friction = 0.011;
  cfg.slope = 0.0;
  cfg.gas_constant = 500.0;
  cfg.temperature = 300.0;  // c^2 = R T = 150000 for alpha = 0
  cfg.alpha = 0.0;
  return cfg;
}

}  // namespace

// ---------------------------------------------------------------------------
// equation of state
// ---------------------------------------------------------------------------

TEST_CASE("ideal gas law is recovered for alpha = 0") {
  PipeConfig cfg = ideal_pipe();
  CHECK(pressure_from_density(1.0, cfg) == 150000.0);
  CHECK(pressure_from_density(40.0, cfg) == doctest::Approx(40.0 * 150000.0).epsilon(1e-15));
}

TEST_CASE("real-gas pressure agrees with a bisection oracle") {
  PipeConfig cfg = ideal_pipe();
  cfg.alpha = 1e-8;
  const double rho = 50.0;
  const double p = pressure_from_density(rho, cfg);

  // oracle: root of f(p) = p - rho (1 - alpha p) R T by bisection
  auto f = [&](double x) { return x - rho * (1.0 - cfg.alpha * x) * 150000.0; };
  double lo = 0.0, hi = 1.0e9;
  REQUIRE(f(lo) < 0.0);
  REQUIRE(f(hi) > 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  CHECK(p == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
  // defining relation holds to 1e-12 relative
  CHECK(std::abs(p - rho * (1.0 - cfg.alpha * p) * 150000.0) <= 1e-12 * p);
}

TEST_CASE("pressure/density conversions are inverse to each other") {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    PipeConfig cfg = ideal_pipe();
    cfg.alpha = rng.next_real(0.0, 5e-8);
    const double rho = rng.next_real(0.1, 80.0);
    const double p = pressure_from_density(rho, cfg);
    CHECK(density_from_pressure(p, cfg) == doctest::Approx(rho).epsilon(1e-10));
  }
}

TEST_CASE("nonphysical equation-of-state inputs are rejected") {
  PipeConfig cfg = ideal_pipe();
  CHECK_THROWS_AS(pressure_from_density(0.0, cfg), NonPhysicalState);
  CHECK_THROWS_AS(density_from_pressure(-1.0, cfg), NonPhysicalState);
  cfg.alpha = 1e-7;
  CHECK_THROWS_AS(density_from_pressure(1.0e7, cfg), NonPhysicalState);  // z(p) <= 0
}

// ---------------------------------------------------------------------------
// algebraic model
// ---------------------------------------------------------------------------

TEST_CASE("algebraic model keeps the inlet pressure at zero flow") {
  const PipeConfig cfg = ideal_pipe();
  const Eigen::VectorXd x = uniform_grid(cfg.length, 8);
  const Eigen::VectorXd p = solve_m3(cfg, 60e5, 0.0, x);
  for (Eigen::Index i = 0; i < p.size(); ++i) CHECK(p(i) == 60e5);
}

TEST_CASE("reversed flow mirrors the pressure correction") {
  const PipeConfig cfg = ideal_pipe();
  const Eigen::VectorXd x = uniform_grid(cfg.length, 4);
  const Eigen::VectorXd fwd = solve_m3(cfg, 60e5, 120.0, x);
  const Eigen::VectorXd bwd = solve_m3(cfg, 60e5, -120.0, x);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    CHECK(fwd(i) * fwd(i) + bwd(i) * bwd(i) == doctest::Approx(2.0 * 60e5 * 60e5).epsilon(1e-14));
}

TEST_CASE("algebraic model closed-form value") {
  const PipeConfig cfg = ideal_pipe();
  Eigen::VectorXd x(1);
  x << 10000.0;
  const Eigen::VectorXd p = solve_m3(cfg, 60e5, 100.0, x);
  const double expect = std::sqrt(60e5 * 60e5 - 0.011 * 150000.0 * 10000.0 / 0.5 * 100.0 * 100.0);
  CHECK(p(0) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("pressure exhaustion is reported") {
  const PipeConfig cfg = ideal_pipe();
  const Eigen::VectorXd x = uniform_grid(cfg.length, 4);
  CHECK_THROWS_AS(solve_m3(cfg, 2e5, 500.0, x), PressureExhausted);
}

TEST_CASE("closed form matches an integrated stationary profile") {
  const PipeConfig cfg = ideal_pipe();
  const double p_in = 60e5, q = 150.0;

  // oracle: RK4 on dp/dx = -lambda/(2D) q|q| / rho(p), rho = p / (RT)
  auto rhs = [&](double p) { return -cfg.friction / (2.0 * cfg.diameter) * q * std::abs(q) * 150000.0 / p; };
  const int steps = 20000;
  const double dx = cfg.length / steps;
  std::vector<double> p_ode(static_cast<size_t>(steps) + 1);
  p_ode[0] = p_in;
  for (int i = 0; i < steps; ++i) {
    const double p0 = p_ode[static_cast<size_t>(i)];
    const double k1 = rhs(p0);
    const double k2 = rhs(p0 + 0.5 * dx * k1);
    const double k3 = rhs(p0 + 0.5 * dx * k2);
    const double k4 = rhs(p0 + dx * k3);
    p_ode[static_cast<size_t>(i) + 1] = p0 + dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  const Eigen::VectorXd x = uniform_grid(cfg.length, 10);
  const Eigen::VectorXd p = solve_m3(cfg, p_in, q, x);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const size_t k = static_cast<size_t>(std::llround(x(i) / dx));
    CHECK(std::abs(p(i) - p_ode[k]) <= 1e-8 * p_ode[k]);
  }
}

// ---------------------------------------------------------------------------
// box scheme
// ---------------------------------------------------------------------------

TEST_CASE("stationary data is a fixed point of the box step") {
  const PipeConfig cfg = ideal_pipe();
  const Eigen::VectorXd x = uniform_grid(cfg.length, 16);
  const GasField guess = solve_m3_field(cfg, 60e5, 100.0, x);

  for (ModelLevel m : {ModelLevel::m2, ModelLevel::m1}) {
    const auto bc_in = BoundaryCondition::pressure(60e5);
    const auto bc_out = BoundaryCondition::flux(100.0);
    const GasField steady = solve_stationary(m, cfg, guess, bc_in, bc_out);
    const GasField next = step_pipe(m, cfg, steady, 30.0, bc_in, bc_out);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      CHECK(next.rho(i) == doctest::Approx(steady.rho(i)).epsilon(1e-9));
      CHECK(next.q(i) == doctest::Approx(steady.q(i)).epsilon(1e-9));
    }
  }
}

TEST_CASE("semilinear and nonlinear models agree at low velocity") {
  const PipeConfig cfg = ideal_pipe();
  const Eigen::VectorXd x = uniform_grid(cfg.length, 24);
  const double q = 2.0;  // v ~ 0.04 m/s vs c ~ 387 m/s
  const GasField init = solve_m3_field(cfg, 60e5, q, x);
  const auto bc_in = BoundaryCondition::pressure(60.3e5);
  const auto bc_out = BoundaryCondition::flux(q);

  const GasField a = step_pipe(ModelLevel::m2, cfg, init, 10.0, bc_in, bc_out);
  const GasField b = step_pipe(ModelLevel::m1, cfg, init, 10.0, bc_in, bc_out);

  // the dropped advective term is O(v^2/c^2) relative to the pressure flux
  double mach2 = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = a.q(i) / a.rho(i);
    mach2 = std::max(mach2, v * v / 150000.0);
  }
  CHECK(mach2 < 1e-4);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    CHECK(std::abs(a.rho(i) - b.rho(i)) / a.rho(i) <= mach2);
}

namespace {

/// Independent dense oracle for a 3-node pipe: the box equations assembled
/// directly, solved by Newton with a finite-difference Jacobian.
Eigen::VectorXd dense_box_residual(ModelLevel model, const PipeConfig& cfg,
                                   const Eigen::VectorXd& u, const Eigen::VectorXd& u_old,
                                   double dt, double p_bc, double q_bc) {
  const double h = cfg.length / 2.0;
  const double rt = cfg.gas_constant * cfg.temperature;
  auto pr = [&](double rho) { return rho * rt / (1.0 + cfg.alpha * rho * rt); };
  auto flux = [&](double rho, double q) {
    return pr(rho) + (model == ModelLevel::m1 ? q * q / rho : 0.0);
  };
  auto src = [&](double rho, double q) {
    return 0.5 * cfg.friction / cfg.diameter * q * std::abs(q) / rho +
           cfg.gravity * cfg.slope * rho;
  };
  Eigen::VectorXd r(6);
  for (int i = 0; i < 2; ++i) {
    const double rl = u(2 * i), ql = u(2 * i + 1), rr = u(2 * i + 2), qr = u(2 * i + 3);
    r(2 * i) = 0.5 * (rl + rr) - 0.5 * (u_old(2 * i) + u_old(2 * i + 2)) + dt / h * (qr - ql);
    r(2 * i + 1) = 0.5 * (ql + qr) - 0.5 * (u_old(2 * i + 1) + u_old(2 * i + 3)) +
                   dt / h * (flux(rr, qr) - flux(rl, ql)) +
                   dt * src(0.5 * (rl + rr), 0.5 * (ql + qr));
  }
  r(4) = pr(u(0)) - p_bc;
  r(5) = u(5) - q_bc;
  return r;
}

}  // namespace

TEST_CASE("single box step matches a dense finite-difference oracle") {
  PipeConfig cfg = ideal_pipe();
  cfg.alpha = 2e-9;
  cfg.slope = 0.001;
  const Eigen::VectorXd x = uniform_grid(cfg.length, 2);
  GasField init;
  init.x = x;
  init.rho = Eigen::VectorXd::Constant(3, 45.0);
  init.q.resize(3);
  init.q << 100.0, 98.0, 95.0;
  const double dt = 25.0;
  const double p_bc = 63e5, q_bc = 102.0;

  for (ModelLevel m : {ModelLevel::m2, ModelLevel::m1}) {
    Eigen::VectorXd u_old(6);
    for (int i = 0; i < 3; ++i) {
      u_old(2 * i) = init.rho(i);
      u_old(2 * i + 1) = init.q(i);
    }
    // oracle Newton with numeric Jacobian
    Eigen::VectorXd u = u_old;
    for (int iter = 0; iter < 60; ++iter) {
      const Eigen::VectorXd r = dense_box_residual(m, cfg, u, u_old, dt, p_bc, q_bc);
      Eigen::MatrixXd jac(6, 6);
      for (int k = 0; k < 6; ++k) {
        Eigen::VectorXd up = u;
        const double eps = 1e-6 * std::max(1.0, std::abs(u(k)));
        up(k) += eps;
        jac.col(k) = (dense_box_residual(m, cfg, up, u_old, dt, p_bc, q_bc) - r) / eps;
      }
      u -= jac.fullPivLu().solve(r);
    }

    const GasField stepped = step_pipe(m, cfg, init, dt, BoundaryCondition::pressure(p_bc),
                                       BoundaryCondition::flux(q_bc));
    for (int i = 0; i < 3; ++i) {
      CHECK(stepped.rho(i) == doctest::Approx(u(2 * i)).epsilon(1e-8));
      CHECK(stepped.q(i) == doctest::Approx(u(2 * i + 1)).epsilon(1e-8));
    }
  }
}

TEST_CASE("diverging solves are reported, never silent") {
  const PipeConfig cfg = ideal_pipe();
  const Eigen::VectorXd x = uniform_grid(cfg.length, 8);
  const GasField init = solve_m3_field(cfg, 60e5, 50.0, x);
  // negative boundary pressure has no physical solution
  CHECK_THROWS_AS(step_pipe(ModelLevel::m2, cfg, init, 10.0, BoundaryCondition::pressure(-2e5),
                            BoundaryCondition::flux(50.0)),
                  SolverDiverged);
}

namespace {

/// Smooth transient: sinusoidal inlet pressure ramp on a stationary base.
GasField run_transient(const PipeConfig& cfg, int n_x, int n_t, double t_end) {
  const Eigen::VectorXd x = uniform_grid(cfg.length, n_x);
  GasField field = solve_stationary(ModelLevel::m2, cfg, solve_m3_field(cfg, 60e5, 100.0, x),
                                    BoundaryCondition::pressure(60e5), BoundaryCondition::flux(100.0));
  const double dt = t_end / n_t;
  for (int k = 0; k < n_t; ++k) {
    const double t = (k + 1) * dt;
    const double p_in = 60e5 * (1.0 + 0.02 * std::sin(M_PI * t / t_end));
    field = step_pipe(ModelLevel::m2, cfg, field, dt, BoundaryCondition::pressure(p_in),
                      BoundaryCondition::flux(100.0));
  }
  return field;
}

double grid_error(const GasField& coarse, const GasField& fine) {
  const Eigen::Index stride = (fine.size() - 1) / (coarse.size() - 1);
  double err2 = 0.0;
  for (Eigen::Index i = 0; i < coarse.size(); ++i) {
    const double d = coarse.rho(i) - fine.rho(i * stride);
    err2 += d * d;
  }
  return std::sqrt(err2 / static_cast<double>(coarse.size()));
}

}  // namespace

TEST_CASE("observed convergence orders match (s_x, s_t) = (2, 1)") {
  const PipeConfig cfg = ideal_pipe();
  const double t_end = 20.0;

  // spatial order: shared fine time grid, reference on an 8x finer mesh
  const int nt_fixed = 128;
  const GasField ref_x = run_transient(cfg, 256, nt_fixed, t_end);
  const double ex1 = grid_error(run_transient(cfg, 16, nt_fixed, t_end), ref_x);
  const double ex2 = grid_error(run_transient(cfg, 32, nt_fixed, t_end), ref_x);
  const double order_x = std::log2(ex1 / ex2);
  CHECK(order_x == doctest::Approx(2.0).epsilon(0.1));

  // temporal order: shared space grid cancels the spatial error part
  const int nx_fixed = 64;
  const GasField ref_t = run_transient(cfg, nx_fixed, 256, t_end);
  const double et1 = grid_error(run_transient(cfg, nx_fixed, 8, t_end), ref_t);
  const double et2 = grid_error(run_transient(cfg, nx_fixed, 16, t_end), ref_t);
  const double order_t = std::log2(et1 / et2);
  CHECK(order_t == doctest::Approx(1.0).epsilon(0.2));
}
