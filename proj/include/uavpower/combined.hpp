#pragma once

// Speed-power models in combined-parameter form. The nine coefficients
// c1..c9 absorb the physical constants so the curves are identifiable from
// speed-power data alone:
//
//   forward(v) = c1 + c2 v^2 + c3 (sqrt(1 + v^4/c4^2) - v^2/c4)^{1/2} + c5 v^3
//   ascent(v)  = c6 + c7 v + c8 v^3 + (c7 + c8 v^2) sqrt((1 + 4c8/c9) v^2 + 4c7/c9)
//   descent(v) = c6 + c7 v - c8 v^3 + (c7 - c8 v^2) sqrt((1 - 4c8/c9) v^2 + 4c7/c9)

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "uavpower/errors.hpp"
#include "uavpower/model.hpp"
#include "uavpower/params.hpp"

namespace uavpower {

template <typename Scalar>
struct CombinedParams {
  using Vector = Eigen::Matrix<Scalar, 9, 1>;

  Vector values = Vector::Zero();

  /// 1-based access matching the c1..c9 naming.
  Scalar& c(int j) { return values(j - 1); }
  const Scalar& c(int j) const { return values(j - 1); }

  void validate_forward() const {
    if (!(c(1) > Scalar(0) && c(3) > Scalar(0) && c(4) > Scalar(0) && c(5) > Scalar(0))) {
      throw InvalidParams("forward combined parameters require c1, c3, c4, c5 > 0");
    }
    if (!(c(2) >= Scalar(0))) {
      throw InvalidParams("forward combined parameters require c2 >= 0");
    }
  }

  void validate_vertical() const {
    if (!(c(6) > Scalar(0) && c(7) > Scalar(0) && c(9) > Scalar(0))) {
      throw InvalidParams("vertical combined parameters require c6, c7, c9 > 0");
    }
    if (!(c(8) >= Scalar(0))) {
      throw InvalidParams("vertical combined parameters require c8 >= 0");
    }
  }
};

using CombinedParamsd = CombinedParams<double>;

template <typename Scalar>
Scalar eval_forward_combined(const Scalar& v, const CombinedParams<Scalar>& p) {
  using std::sqrt;
  detail::require_nonnegative_speed(v, "eval_forward_combined");
  const Scalar v2 = v * v;
  // sqrt(1 + x^2) - x rewritten as 1 / (sqrt(1 + x^2) + x), x = v^2 / c4.
  const Scalar x = v2 / p.c(4);
  return p.c(1) + p.c(2) * v2 + p.c(3) * sqrt(Scalar(1) / (sqrt(Scalar(1) + x * x) + x)) + p.c(5) * v2 * v;
}

/// Radicand of the descent momentum term at speed v.
template <typename Scalar>
Scalar descent_combined_radicand(const Scalar& v, const CombinedParams<Scalar>& p) {
  return (Scalar(1) - Scalar(4) * p.c(8) / p.c(9)) * v * v + Scalar(4) * p.c(7) / p.c(9);
}

namespace detail {

template <typename Scalar>
Scalar vertical_combined(const Scalar& v, const Scalar& sign, const CombinedParams<Scalar>& p) {
  using std::sqrt;
  const Scalar v2 = v * v;
  const Scalar radicand = (Scalar(1) + sign * Scalar(4) * p.c(8) / p.c(9)) * v2 + Scalar(4) * p.c(7) / p.c(9);
  return p.c(6) + p.c(7) * v + sign * p.c(8) * v2 * v + (p.c(7) + sign * p.c(8) * v2) * sqrt(radicand);
}

}  // namespace detail

template <typename Scalar>
Scalar eval_ascent_combined(const Scalar& v, const CombinedParams<Scalar>& p) {
  detail::require_nonnegative_speed(v, "eval_ascent_combined");
  const Scalar radicand = (Scalar(1) + Scalar(4) * p.c(8) / p.c(9)) * v * v + Scalar(4) * p.c(7) / p.c(9);
  if (!(radicand >= Scalar(0))) {
    throw DomainError("eval_ascent_combined: negative radicand at " + detail::format_speed(v));
  }
  return detail::vertical_combined(v, Scalar(1), p);
}

template <typename Scalar>
Scalar eval_descent_combined(const Scalar& v, const CombinedParams<Scalar>& p) {
  detail::require_nonnegative_speed(v, "eval_descent_combined");
  if (!(descent_combined_radicand(v, p) >= Scalar(0))) {
    throw DomainError("eval_descent_combined: negative radicand (1 - 4c8/c9) v^2 + 4c7/c9 at " + detail::format_speed(v));
  }
  return detail::vertical_combined(v, Scalar(-1), p);
}

/// Combined coefficients equivalent to the physical models: with these,
/// the combined curves coincide with forward_power, ascent_power and
/// descent_power.
template <typename Scalar>
CombinedParams<Scalar> physical_to_combined(const AirframeParams<Scalar>& p) {
  using std::sqrt;
  const PowerBreakdown<Scalar> hover = hover_power(p);
  const Scalar nf = Scalar(p.n);
  CombinedParams<Scalar> out;
  out.c(1) = hover.blade_profile_w;
  out.c(2) = Scalar(3) / Scalar(8) * p.profile_drag_delta * sqrt(p.weight_w * nf * p.rho * p.disc_area_a / p.thrust_coeff_ct) * p.solidity_s;
  out.c(3) = hover.induced_w;
  out.c(4) = Scalar(2) * p.v0 * p.v0;
  out.c(5) = nf / Scalar(2) * p.s_fp_par * p.rho;
  out.c(6) = hover.total_w;
  out.c(7) = p.weight_w / Scalar(2);
  out.c(8) = nf / Scalar(4) * p.s_fp_perp * p.rho;
  out.c(9) = nf * p.rho * p.disc_area_a;
  return out;
}

}  // namespace uavpower
