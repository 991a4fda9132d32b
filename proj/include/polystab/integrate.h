#pragma once

#include <Eigen/Core>

namespace polystab {

/// One classical fourth-order Runge–Kutta step of ẋ = rhs(t, x).
template <typename Rhs>
Eigen::VectorXd rk4_step(const Rhs& rhs, double t, const Eigen::VectorXd& x,
                         double h) {
  const Eigen::VectorXd k1 = rhs(t, x);
  const Eigen::VectorXd k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = rhs(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline constexpr double kDivergenceNorm = 1e6;

}  // namespace polystab
