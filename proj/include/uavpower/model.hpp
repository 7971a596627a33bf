#pragma once

// Closed-form power models for an n-rotor vehicle in steady flight.
//
// All functions are pure and templated on the scalar type. Speeds are in m/s,
// powers in W. Domain violations throw DomainError, invalid parameter sets
// throw InvalidParams.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <type_traits>

#include "uavpower/errors.hpp"
#include "uavpower/params.hpp"
#include "uavpower/single_rotor.hpp"

namespace uavpower {

namespace detail {

template <typename Scalar>
std::string format_speed(const Scalar& v) {
  if constexpr (std::is_arithmetic_v<Scalar>) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f m/s", static_cast<double>(v));
    return buf;
  } else {
    return "(non-arithmetic scalar)";
  }
}

template <typename Scalar>
void require_nonnegative_speed(const Scalar& v, const char* op) {
  if (!(v >= Scalar(0))) {
    throw DomainError(std::string(op) + ": speed must be >= 0, got " + format_speed(v));
  }
}

// (sqrt(1 + x^2) - x)^{1/2} with x = v^2 / (2 v0^2), evaluated as
// (1 / (sqrt(1 + x^2) + x))^{1/2}. The radicand is positive for every x >= 0
// and the form has no cancellation at large speed.
template <typename Scalar>
Scalar induced_velocity_ratio(const Scalar& x) {
  using std::sqrt;
  return sqrt(Scalar(1) / (sqrt(Scalar(1) + x * x) + x));
}

template <typename Scalar>
Scalar three_halves(const Scalar& x) {
  using std::sqrt;
  return x * sqrt(x);
}

}  // namespace detail

/// Mean induced velocity in hover, sqrt(W / (2 rho A)), using the full
/// vehicle weight. Reproduces v0 = 6.325 m/s for the reference parameters.
template <typename Scalar>
Scalar derive_v0(const AirframeParams<Scalar>& p) {
  using std::sqrt;
  p.validate();
  return sqrt(p.weight_w / (Scalar(2) * p.rho * p.disc_area_a));
}

/// Hover power of one rotor carrying `per_rotor_weight`, with Omega
/// eliminated through the thrust relation (thrust = weight).
template <typename Scalar>
Scalar single_rotor_hover_power(const Scalar& per_rotor_weight, const AirframeParams<Scalar>& p) {
  using std::sqrt;
  p.validate();
  if (!(per_rotor_weight > Scalar(0))) {
    throw DomainError("single_rotor_hover_power: per-rotor weight must be > 0");
  }
  const Scalar w32 = detail::three_halves(per_rotor_weight);
  const Scalar ct = p.thrust_coeff_ct;
  return w32 / sqrt(p.rho) * p.solidity_s / sqrt(p.disc_area_a) / detail::three_halves(ct) * p.profile_drag_delta / Scalar(8) +
         (Scalar(1) + p.induced_correction_k) * w32 / sqrt(Scalar(2) * p.rho * p.disc_area_a);
}

/// Total hover power split into blade-profile and induced parts.
template <typename Scalar>
PowerBreakdown<Scalar> hover_power(const AirframeParams<Scalar>& p) {
  using std::sqrt;
  p.validate();
  const Scalar w32 = detail::three_halves(p.weight_w);
  const Scalar n_rho_a = Scalar(p.n) * p.rho * p.disc_area_a;
  PowerBreakdown<Scalar> out;
  out.blade_profile_w = w32 / sqrt(n_rho_a) / detail::three_halves(p.thrust_coeff_ct) * p.profile_drag_delta / Scalar(8) * p.solidity_s;
  out.induced_w = (Scalar(1) + p.induced_correction_k) * w32 / sqrt(Scalar(2) * n_rho_a);
  out.total_w = out.blade_profile_w + out.induced_w;
  return out;
}

/// Forward power of one rotor carrying W/n at thrust-to-weight ratio 1.
template <typename Scalar>
PowerBreakdown<Scalar> per_rotor_forward_power(const Scalar& v, const AirframeParams<Scalar>& p) {
  using std::sqrt;
  p.validate();
  detail::require_nonnegative_speed(v, "per_rotor_forward_power");
  const Scalar wr = p.per_rotor_weight();
  const Scalar v2 = v * v;
  PowerBreakdown<Scalar> out;
  out.blade_profile_w = detail::three_halves(wr) / sqrt(p.rho) * p.solidity_s / sqrt(p.disc_area_a) /
                            detail::three_halves(p.thrust_coeff_ct) * p.profile_drag_delta / Scalar(8) +
                        Scalar(3) / Scalar(8) * p.profile_drag_delta * sqrt(wr * p.rho * p.disc_area_a / p.thrust_coeff_ct) * p.solidity_s * v2;
  out.induced_w = (Scalar(1) + p.induced_correction_k) * detail::three_halves(wr) / sqrt(Scalar(2) * p.rho * p.disc_area_a) *
                  detail::induced_velocity_ratio(v2 / (Scalar(2) * p.v0 * p.v0));
  out.parasite_w = Scalar(0.5) * p.s_fp_par * p.rho * v2 * v;
  out.total_w = out.blade_profile_w + out.induced_w + out.parasite_w;
  return out;
}

/// Total power in level forward flight at constant speed v (thrust taken
/// equal to weight).
template <typename Scalar>
PowerBreakdown<Scalar> forward_power(const Scalar& v, const AirframeParams<Scalar>& p) {
  using std::sqrt;
  detail::require_nonnegative_speed(v, "forward_power");
  const PowerBreakdown<Scalar> hover = hover_power(p);
  const Scalar v2 = v * v;
  const Scalar nf = Scalar(p.n);
  PowerBreakdown<Scalar> out;
  out.blade_profile_w = hover.blade_profile_w +
                        Scalar(3) / Scalar(8) * p.profile_drag_delta * sqrt(p.weight_w * nf * p.rho * p.disc_area_a / p.thrust_coeff_ct) * p.solidity_s * v2;
  out.induced_w = hover.induced_w * detail::induced_velocity_ratio(v2 / (Scalar(2) * p.v0 * p.v0));
  out.parasite_w = nf / Scalar(2) * p.s_fp_par * p.rho * v2 * v;
  out.total_w = out.blade_profile_w + out.induced_w + out.parasite_w;
  return out;
}

/// Largest descent speed at which each rotor still produces non-negative
/// thrust: sqrt(2 (W/n) / (S_perp rho)).
template <typename Scalar>
Scalar descent_thrust_speed_limit(const AirframeParams<Scalar>& p) {
  using std::sqrt;
  p.validate();
  return sqrt(Scalar(2) * p.per_rotor_weight() / (p.s_fp_perp * p.rho));
}

/// Largest descent speed keeping (1 - S_perp/A) v^2 + 2W/(n rho A) >= 0.
/// Infinite when S_perp <= A.
template <typename Scalar>
Scalar descent_radicand_speed_limit(const AirframeParams<Scalar>& p) {
  using std::sqrt;
  p.validate();
  const Scalar excess = p.s_fp_perp / p.disc_area_a - Scalar(1);
  if (!(excess > Scalar(0))) {
    return Scalar(std::numeric_limits<double>::infinity());
  }
  return sqrt(Scalar(2) * p.weight_w / (Scalar(p.n) * p.rho * p.disc_area_a) / excess);
}

template <typename Scalar>
Scalar descent_speed_limit(const AirframeParams<Scalar>& p) {
  using std::min;
  return min(descent_thrust_speed_limit(p), descent_radicand_speed_limit(p));
}

namespace detail {

template <typename Scalar>
void require_descent_domain(const Scalar& v, const AirframeParams<Scalar>& p, const char* op) {
  require_nonnegative_speed(v, op);
  const Scalar thrust_bound = descent_thrust_speed_limit(p);
  if (v > thrust_bound) {
    throw DomainError(std::string(op) + ": descent speed " + format_speed(v) + " exceeds the thrust bound " +
                      format_speed(thrust_bound) + " (per-rotor thrust would be negative)");
  }
  const Scalar radicand_bound = descent_radicand_speed_limit(p);
  if (v > radicand_bound) {
    throw DomainError(std::string(op) + ": descent speed " + format_speed(v) + " exceeds the radicand bound " +
                      format_speed(radicand_bound) + " (momentum-term radicand would be negative)");
  }
}

}  // namespace detail

/// Thrust of one rotor in steady vertical flight at speed v >= 0: weight
/// share plus (ascent) or minus (descent) the per-rotor fuselage drag
/// (1/2) S_perp rho v^2.
template <typename Scalar>
Scalar vertical_thrust_per_rotor(const Scalar& v, VerticalDirection dir, const AirframeParams<Scalar>& p) {
  p.validate();
  const Scalar drag = Scalar(0.5) * p.s_fp_perp * p.rho * v * v;
  if (dir == VerticalDirection::Ascent) {
    detail::require_nonnegative_speed(v, "vertical_thrust_per_rotor");
    return p.per_rotor_weight() + drag;
  }
  detail::require_nonnegative_speed(v, "vertical_thrust_per_rotor");
  const Scalar bound = descent_thrust_speed_limit(p);
  if (v > bound) {
    throw DomainError("vertical_thrust_per_rotor: descent speed " + detail::format_speed(v) +
                      " exceeds the thrust bound " + detail::format_speed(bound));
  }
  return p.per_rotor_weight() - drag;
}

/// Vertical power of one rotor: its hover power plus the single-rotor climb
/// terms evaluated at the rotor's vertical thrust.
template <typename Scalar>
Scalar per_rotor_vertical_power(const Scalar& v, VerticalDirection dir, const AirframeParams<Scalar>& p) {
  using std::sqrt;
  if (dir == VerticalDirection::Descent) {
    detail::require_descent_domain(v, p, "per_rotor_vertical_power");
  }
  const Scalar thrust = vertical_thrust_per_rotor(v, dir, p);
  const Scalar hover = single_rotor_hover_power(p.per_rotor_weight(), p);
  return hover + Scalar(0.5) * thrust * v + thrust / Scalar(2) * sqrt(v * v + Scalar(2) * thrust / (p.rho * p.disc_area_a));
}

namespace detail {

// Terms of the vertical models beyond hover power; sign = +1 ascent, -1 descent.
template <typename Scalar>
Scalar vertical_climb_terms(const Scalar& v, const Scalar& sign, const AirframeParams<Scalar>& p) {
  using std::sqrt;
  const Scalar nf = Scalar(p.n);
  const Scalar drag_coeff = nf / Scalar(4) * p.s_fp_perp * p.rho;
  const Scalar v2 = v * v;
  return Scalar(0.5) * p.weight_w * v + sign * drag_coeff * v2 * v +
         (p.weight_w / Scalar(2) + sign * drag_coeff * v2) *
             sqrt((Scalar(1) + sign * p.s_fp_perp / p.disc_area_a) * v2 + Scalar(2) * p.weight_w / (nf * p.rho * p.disc_area_a));
}

}  // namespace detail

/// Total power in steady vertical ascent at speed v. Everything beyond hover
/// power is reported as climb_w.
template <typename Scalar>
PowerBreakdown<Scalar> ascent_power(const Scalar& v, const AirframeParams<Scalar>& p) {
  detail::require_nonnegative_speed(v, "ascent_power");
  PowerBreakdown<Scalar> out = hover_power(p);
  const Scalar hover_total = out.total_w;
  out.climb_w = detail::vertical_climb_terms(v, Scalar(1), p);
  out.total_w = hover_total + out.climb_w;
  return out;
}

/// Total power in steady vertical descent at speed v >= 0 (v is the
/// magnitude). Valid up to descent_speed_limit().
template <typename Scalar>
PowerBreakdown<Scalar> descent_power(const Scalar& v, const AirframeParams<Scalar>& p) {
  detail::require_descent_domain(v, p, "descent_power");
  PowerBreakdown<Scalar> out = hover_power(p);
  const Scalar hover_total = out.total_w;
  out.climb_w = detail::vertical_climb_terms(v, Scalar(-1), p);
  out.total_w = hover_total + out.climb_w;
  return out;
}

/// Power increment over hover from horizontal motion at speed v_par.
/// Zero at v_par = 0.
template <typename Scalar>
PowerBreakdown<Scalar> horizontal_increment(const Scalar& v_par, const AirframeParams<Scalar>& p) {
  using std::sqrt;
  detail::require_nonnegative_speed(v_par, "horizontal_increment");
  const PowerBreakdown<Scalar> hover = hover_power(p);
  const Scalar v2 = v_par * v_par;
  const Scalar nf = Scalar(p.n);
  PowerBreakdown<Scalar> out;
  out.blade_profile_w = Scalar(3) / Scalar(8) * sqrt(nf) * p.profile_drag_delta * sqrt(p.weight_w * p.rho * p.disc_area_a / p.thrust_coeff_ct) * p.solidity_s * v2;
  out.induced_w = hover.induced_w * (detail::induced_velocity_ratio(v2 / (Scalar(2) * p.v0 * p.v0)) - Scalar(1));
  out.parasite_w = nf / Scalar(2) * p.s_fp_par * p.rho * v2 * v_par;
  out.total_w = out.blade_profile_w + out.induced_w + out.parasite_w;
  return out;
}

/// Power increment over hover from vertical motion at signed speed v_perp,
/// written with sgn(v_perp) in {-1, 0, 1} and sgn(|v_perp|) in {0, 1}.
/// Exactly zero at v_perp = 0; note the one-sided limits at 0 are not zero.
template <typename Scalar>
Scalar vertical_increment(const Scalar& v_perp, const AirframeParams<Scalar>& p) {
  using std::abs;
  using std::sqrt;
  if (v_perp < Scalar(0)) {
    detail::require_descent_domain(Scalar(-v_perp), p, "vertical_increment");
  }
  p.validate();
  const Scalar sign = v_perp > Scalar(0) ? Scalar(1) : (v_perp < Scalar(0) ? Scalar(-1) : Scalar(0));
  const Scalar moving = v_perp != Scalar(0) ? Scalar(1) : Scalar(0);
  const Scalar speed = abs(v_perp);
  const Scalar hover_root = p.weight_w / Scalar(2) * sqrt(Scalar(2) * p.weight_w / (Scalar(p.n) * p.rho * p.disc_area_a));
  return detail::vertical_climb_terms(speed, sign, p) + (moving - Scalar(1)) * hover_root;
}

/// Total power for steady 3-D flight: hover power plus the horizontal and
/// vertical increments. Reproduces forward/ascent/descent models when the
/// complementary velocity component is zero.
template <typename Scalar>
PowerBreakdown<Scalar> total_power(const Velocity3<Scalar>& v, const AirframeParams<Scalar>& p) {
  const PowerBreakdown<Scalar> hover = hover_power(p);
  const PowerBreakdown<Scalar> horizontal = horizontal_increment(v.v_par, p);
  const Scalar vertical = vertical_increment(v.v_perp, p);
  PowerBreakdown<Scalar> out;
  out.blade_profile_w = hover.blade_profile_w + horizontal.blade_profile_w;
  out.induced_w = hover.induced_w + horizontal.induced_w;
  out.parasite_w = horizontal.parasite_w;
  out.climb_w = vertical;
  out.total_w = hover.total_w + horizontal.total_w + vertical;
  return out;
}

template <typename Scalar>
RegimeDomain<Scalar> regime_domain(Regime regime, const AirframeParams<Scalar>& p) {
  const Scalar inf = Scalar(std::numeric_limits<double>::infinity());
  switch (regime) {
    case Regime::Hover: return {regime, Scalar(0), Scalar(0)};
    case Regime::Forward: return {regime, Scalar(0), inf};
    case Regime::Ascent: return {regime, Scalar(0), inf};
    case Regime::Descent: return {regime, Scalar(0), descent_speed_limit(p)};
  }
  return {regime, Scalar(0), Scalar(0)};
}

/// Dispatch on regime. `v` is the speed magnitude; it is ignored for Hover.
template <typename Scalar>
PowerBreakdown<Scalar> regime_power(Regime regime, const Scalar& v, const AirframeParams<Scalar>& p) {
  switch (regime) {
    case Regime::Hover: return hover_power(p);
    case Regime::Forward: return forward_power(v, p);
    case Regime::Ascent: return ascent_power(v, p);
    case Regime::Descent: return descent_power(v, p);
  }
  return hover_power(p);
}

}  // namespace uavpower
