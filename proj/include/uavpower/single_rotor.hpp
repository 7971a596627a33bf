#pragma once

// Single-rotor power baselines written in terms of blade angular velocity.
// The multi-rotor models in model.hpp are the n-fold sum of these with
// Omega eliminated through the thrust relation, so evaluating them directly
// gives an independent route to every multi-rotor closed form.

#include <cmath>

#include "uavpower/errors.hpp"
#include "uavpower/params.hpp"

namespace uavpower {

/// Blade angular velocity (rad/s) producing `thrust_n` on one rotor:
/// Omega = sqrt(T / (C_T rho A R^2)).
template <typename Scalar>
Scalar omega_from_thrust(const Scalar& thrust_n, const AirframeParams<Scalar>& p) {
  using std::sqrt;
  if (thrust_n < Scalar(0)) {
    throw DomainError("omega_from_thrust: thrust must be >= 0");
  }
  const Scalar r = p.rotor_radius_r;
  return sqrt(thrust_n / (p.thrust_coeff_ct * p.rho * p.disc_area_a * r * r));
}

/// Hover power of a rotor spinning at `omega` and carrying `weight`.
/// Blade-profile part is (delta/8) rho s A Omega^3 R^3, induced part
/// (1+k) W^{3/2} / sqrt(2 rho A).
template <typename Scalar>
PowerBreakdown<Scalar> single_rotor_hover_baseline(const Scalar& omega, const Scalar& weight,
                                                   const AirframeParams<Scalar>& p) {
  using std::sqrt;
  const Scalar tip = omega * p.rotor_radius_r;
  PowerBreakdown<Scalar> out;
  out.blade_profile_w = p.profile_drag_delta / Scalar(8) * p.rho * p.solidity_s * p.disc_area_a * tip * tip * tip;
  out.induced_w = (Scalar(1) + p.induced_correction_k) * weight * sqrt(weight) / sqrt(Scalar(2) * p.rho * p.disc_area_a);
  out.total_w = out.blade_profile_w + out.induced_w;
  return out;
}

/// Forward-flight power of a single rotor at speed v with thrust-to-weight
/// ratio kappa. The parasite term uses the horizontal flat-plate area.
template <typename Scalar>
PowerBreakdown<Scalar> single_rotor_forward_baseline(const Scalar& v, const Scalar& kappa, const Scalar& omega,
                                                     const Scalar& weight, const AirframeParams<Scalar>& p) {
  using std::sqrt;
  const PowerBreakdown<Scalar> hover = single_rotor_hover_baseline(omega, weight, p);
  const Scalar tip = omega * p.rotor_radius_r;
  const Scalar v2 = v * v;
  const Scalar v02 = p.v0 * p.v0;
  PowerBreakdown<Scalar> out;
  out.blade_profile_w = hover.blade_profile_w * (Scalar(1) + Scalar(3) * v2 / (tip * tip));
  out.induced_w = hover.induced_w * kappa * sqrt(sqrt(kappa * kappa + v2 * v2 / (Scalar(4) * v02 * v02)) - v2 / (Scalar(2) * v02));
  out.parasite_w = Scalar(0.5) * p.s_fp_par * p.rho * v2 * v;
  out.total_w = out.blade_profile_w + out.induced_w + out.parasite_w;
  return out;
}

/// Vertical-flight power of a single rotor: hover power plus the climb work
/// rate T V / 2 and the momentum term (T/2) sqrt(V^2 + 2T/(rho A)).
template <typename Scalar>
Scalar single_rotor_vertical_baseline(const Scalar& v, const Scalar& thrust, const Scalar& hover_w,
                                      const AirframeParams<Scalar>& p) {
  using std::sqrt;
  return hover_w + Scalar(0.5) * thrust * v + thrust / Scalar(2) * sqrt(v * v + Scalar(2) * thrust / (p.rho * p.disc_area_a));
}

}  // namespace uavpower
