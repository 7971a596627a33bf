#pragma once

#include <functional>

#include <Eigen/Core>

namespace uavpower {

struct LmOptions {
  double tol = 1e-10;        // relative SSE improvement below which we stop
  double step_tol = 1e-10;   // relative parameter step below which we stop
  int max_iters = 10000;
  std::function<void(int, double)> on_iteration;  // (iteration, sse) after each accepted step
};

struct LmResult {
  Eigen::VectorXd x;
  double sse = 0;
  bool converged = false;
  int iterations = 0;
};

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Minimizes ||r(x)||^2 with Marquardt-scaled damping and a central-difference
/// Jacobian (step 1e-6 * max(1, |x_j|)). Only SSE-decreasing steps are
/// accepted, so the reported SSE sequence is non-increasing. When no damped
/// step can decrease the SSE the iterate is returned as converged.
LmResult levenberg_marquardt(const ResidualFunction& residuals, const Eigen::VectorXd& x0,
                             const LmOptions& options = {});

Eigen::MatrixXd numeric_jacobian(const ResidualFunction& residuals, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& r0);

}  // namespace uavpower
