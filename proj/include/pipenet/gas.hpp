#ifndef PIPENET_GAS_HPP
#define PIPENET_GAS_HPP

/**
 * @file gas.hpp
 * @brief Physical pipe parameters, the real-gas equation of state and the
 *        gas field state carried by a single pipe.
 *
 * The equation of state is p = rho * z(p) * R * T with compressibility
 * factor z(p) = 1 - alpha * p. For alpha = 0 this is the ideal gas law.
 */

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "pipenet/errors.hpp"

namespace pipenet {

/// Hierarchy level of the pipe-flow model. Smaller = more detailed.
/// 1 = nonlinear isothermal Euler, 2 = semilinear, 3 = algebraic.
enum class ModelLevel : int { m1 = 1, m2 = 2, m3 = 3 };

inline int level_index(ModelLevel m) { return static_cast<int>(m); }

inline ModelLevel level_from_index(int i) {
  if (i < 1 || i > 3) throw ConfigError("model level must be 1, 2 or 3, got " + std::to_string(i));
  return static_cast<ModelLevel>(i);
}

/// Physical parameters of one pipe segment.
struct PipeConfig {
  double length = 1.0;        ///< L [m]
  double diameter = 0.5;      ///< D [m]
  double friction = 0.011;    ///< Darcy friction coefficient lambda (> 0)
  double slope = 0.0;         ///< h' (dimensionless elevation gradient)
  double gravity = 9.81;      ///< g [m/s^2]
  double gas_constant = 500.0;  ///< specific gas constant R [J/(kg K)]
  double temperature = 288.0;   ///< T [K]
  double alpha = 0.0;           ///< compressibility coefficient [1/Pa], >= 0

  /// Cross-section area [m^2].
  double area() const { return 0.25 * M_PI * diameter * diameter; }

  void validate() const {
    if (!(length > 0.0)) throw ConfigError("pipe length must be > 0");
    if (!(diameter > 0.0)) throw ConfigError("pipe diameter must be > 0");
    if (!(friction > 0.0)) throw ConfigError("pipe friction must be > 0");
    if (!(gas_constant > 0.0)) throw ConfigError("gas constant must be > 0");
    if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
  }
};

/// Pressure from density via p = rho*(1 - alpha*p)*R*T.
/// The relation is linear in p and solves to p = rho*R*T / (1 + alpha*rho*R*T).
inline double pressure_from_density(double rho, const PipeConfig& cfg) {
  if (!(rho > 0.0)) throw NonPhysicalState("pressure_from_density: rho must be > 0, got " + std::to_string(rho));
  const double rrt = rho * cfg.gas_constant * cfg.temperature;
  return rrt / (1.0 + cfg.alpha * rrt);
}

/// Density from pressure via rho = p / (z(p)*R*T), z(p) = 1 - alpha*p.
/// Requires z(p) > 0, i.e. p < 1/alpha.
inline double density_from_pressure(double p, const PipeConfig& cfg) {
  if (!(p > 0.0)) throw NonPhysicalState("density_from_pressure: p must be > 0, got " + std::to_string(p));
  const double z = 1.0 - cfg.alpha * p;
  if (!(z > 0.0))
    throw NonPhysicalState("density_from_pressure: compressibility factor z(p) <= 0 at p = " + std::to_string(p));
  return p / (z * cfg.gas_constant * cfg.temperature);
}

/// Speed of sound c = sqrt(p/rho) evaluated from a density.
inline double sound_speed(double rho, const PipeConfig& cfg) {
  return std::sqrt(pressure_from_density(rho, cfg) / rho);
}

/// Discrete state of the gas in one pipe: grid positions, density and
/// mass flux q = rho*v at each grid node.
struct GasField {
  Eigen::VectorXd x;    ///< node positions [m], strictly increasing, x(0)=0, x(end)=L
  Eigen::VectorXd rho;  ///< density [kg/m^3], > 0
  Eigen::VectorXd q;    ///< mass flux rho*v [kg/(m^2 s)]

  Eigen::Index size() const { return x.size(); }

  /// Node-wise pressure derived through the equation of state.
  Eigen::VectorXd pressure(const PipeConfig& cfg) const {
    Eigen::VectorXd p(rho.size());
    for (Eigen::Index i = 0; i < rho.size(); ++i) p(i) = pressure_from_density(rho(i), cfg);
    return p;
  }

  /// Throws NonPhysicalState on nonpositive or non-finite density.
  void validate() const {
    for (Eigen::Index i = 0; i < rho.size(); ++i) {
      if (!std::isfinite(rho(i)) || !(rho(i) > 0.0))
        throw NonPhysicalState("GasField: nonphysical density at node " + std::to_string(i));
      if (!std::isfinite(q(i))) throw NonPhysicalState("GasField: non-finite flux at node " + std::to_string(i));
    }
  }
};

/// Uniform grid with n_cells intervals over [0, L].
inline Eigen::VectorXd uniform_grid(double length, int n_cells) {
  return Eigen::VectorXd::LinSpaced(n_cells + 1, 0.0, length);
}

}  // namespace pipenet

#endif  // PIPENET_GAS_HPP
