#include "uavpower/levenberg_marquardt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

namespace uavpower {

namespace {

double sum_of_squares(const Eigen::VectorXd& r) {
  // Sequential accumulation keeps results bit-identical across runs.
  double s = 0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += r(i) * r(i);
  return s;
}

constexpr double kMinLambda = 1e-15;
constexpr double kMaxLambda = 1e16;
constexpr int kStallSteps = 5;

}  // namespace

Eigen::MatrixXd numeric_jacobian(const ResidualFunction& residuals, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& r0) {
  Eigen::MatrixXd jac(r0.size(), x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
    probe(j) = x(j) + h;
    const Eigen::VectorXd up = residuals(probe);
    probe(j) = x(j) - h;
    const Eigen::VectorXd down = residuals(probe);
    probe(j) = x(j);
    jac.col(j) = (up - down) / (2 * h);
  }
  return jac;
}

LmResult levenberg_marquardt(const ResidualFunction& residuals, const Eigen::VectorXd& x0,
                             const LmOptions& options) {
  LmResult out;
  out.x = x0;
  Eigen::VectorXd r = residuals(out.x);
  out.sse = sum_of_squares(r);
  if (!std::isfinite(out.sse)) {
    return out;
  }

  double lambda = 1e-3;
  int stalled = 0;
  while (out.iterations < options.max_iters) {
    if (out.sse == 0) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd jac = numeric_jacobian(residuals, out.x, r);
    const Eigen::MatrixXd hessian = jac.transpose() * jac;
    const Eigen::VectorXd gradient = jac.transpose() * r;
    const double diag_floor = std::max(1e-12 * hessian.diagonal().maxCoeff(), std::numeric_limits<double>::min());
    const Eigen::VectorXd scaling = hessian.diagonal().cwiseMax(diag_floor);

    bool accepted = false;
    Eigen::VectorXd step;
    Eigen::VectorXd candidate;
    Eigen::VectorXd candidate_r;
    double candidate_sse = 0;
    while (lambda <= kMaxLambda) {
      Eigen::MatrixXd damped = hessian;
      damped.diagonal() += lambda * scaling;
      step = damped.ldlt().solve(-gradient);
      if (step.allFinite()) {
        candidate = out.x + step;
        candidate_r = residuals(candidate);
        candidate_sse = sum_of_squares(candidate_r);
        if (std::isfinite(candidate_sse) && candidate_sse < out.sse) {
          accepted = true;
          break;
        }
      }
      lambda *= 4;
    }
    if (!accepted) {
      // No descent direction survives any damping: numerically stationary.
      out.converged = true;
      break;
    }

    const double improvement = (out.sse - candidate_sse) / out.sse;
    double relative_step = 0;
    for (Eigen::Index j = 0; j < step.size(); ++j) {
      relative_step = std::max(relative_step, std::abs(step(j)) / std::max(1.0, std::abs(out.x(j))));
    }
    out.x = candidate;
    r = candidate_r;
    out.sse = candidate_sse;
    ++out.iterations;
    if (options.on_iteration) options.on_iteration(out.iterations, out.sse);
    lambda = std::max(lambda / 3, kMinLambda);

    // A single slow step is not enough; slow progress must persist.
    stalled = improvement < options.tol ? stalled + 1 : 0;
    if (stalled >= kStallSteps || relative_step < options.step_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace uavpower
