#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "uavpower/errors.hpp"

namespace uavpower {

enum class Regime { Hover, Forward, Ascent, Descent };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Hover: return "hover";
    case Regime::Forward: return "forward";
    case Regime::Ascent: return "ascent";
    case Regime::Descent: return "descent";
  }
  return "?";
}

enum class VerticalDirection { Ascent, Descent };

/// Physical constants of a multi-rotor vehicle and the surrounding air.
///
/// Per-rotor quantities (disc area, solidity, thrust coefficient, radius) are
/// shared by all rotors. The weight is the whole vehicle's weight.
template <typename Scalar>
struct AirframeParams {
  int n = 4;                       // rotor count, even and >= 4
  Scalar weight_w{20};             // N
  Scalar rho{1.168};               // kg/m^3
  Scalar disc_area_a{0.214};       // m^2, per rotor
  Scalar solidity_s{0.045};
  Scalar profile_drag_delta{0.011};
  Scalar induced_correction_k{0.11};
  Scalar thrust_coeff_ct{0.001195};
  Scalar rotor_radius_r{0.26};     // m
  Scalar v0{6.325};                // m/s, mean induced velocity in hover
  Scalar s_fp_par{0.009};          // m^2, horizontal flat-plate area
  Scalar s_fp_perp{0.377};         // m^2, vertical flat-plate area

  /// Throws InvalidParams naming the first offending field.
  void validate() const {
    if (n < 4 || n % 2 != 0) {
      throw InvalidParams("rotor count n must be even and >= 4, got " + std::to_string(n));
    }
    auto positive = [](const Scalar& x, const char* name) {
      if (!(x > Scalar(0) && x < Scalar(std::numeric_limits<double>::infinity()))) {
        throw InvalidParams(std::string(name) + " must be finite and > 0");
      }
    };
    positive(weight_w, "weight_w");
    positive(rho, "rho");
    positive(disc_area_a, "disc_area_a");
    positive(solidity_s, "solidity_s");
    positive(profile_drag_delta, "profile_drag_delta");
    positive(thrust_coeff_ct, "thrust_coeff_ct");
    positive(rotor_radius_r, "rotor_radius_r");
    positive(v0, "v0");
    positive(s_fp_par, "s_fp_par");
    positive(s_fp_perp, "s_fp_perp");
    if (!(induced_correction_k >= Scalar(0))) {
      throw InvalidParams("induced_correction_k must be >= 0");
    }
  }

  Scalar per_rotor_weight() const { return weight_w / Scalar(n); }

  /// Copy with a different rotor count; all per-rotor constants and the
  /// vehicle weight are kept.
  AirframeParams with_rotors(int rotors) const {
    AirframeParams p = *this;
    p.n = rotors;
    return p;
  }

  template <typename Other>
  AirframeParams<Other> cast() const {
    AirframeParams<Other> p;
    p.n = n;
    p.weight_w = Other(weight_w);
    p.rho = Other(rho);
    p.disc_area_a = Other(disc_area_a);
    p.solidity_s = Other(solidity_s);
    p.profile_drag_delta = Other(profile_drag_delta);
    p.induced_correction_k = Other(induced_correction_k);
    p.thrust_coeff_ct = Other(thrust_coeff_ct);
    p.rotor_radius_r = Other(rotor_radius_r);
    p.v0 = Other(v0);
    p.s_fp_par = Other(s_fp_par);
    p.s_fp_perp = Other(s_fp_perp);
    return p;
  }
};

/// Steady velocity split into horizontal magnitude and signed vertical
/// component (positive = ascent).
template <typename Scalar>
struct Velocity3 {
  Scalar v_par{0};
  Scalar v_perp{0};

  Scalar total() const {
    using std::sqrt;
    return sqrt(v_par * v_par + v_perp * v_perp);
  }
};

template <typename Scalar>
struct PowerBreakdown {
  Scalar total_w{0};
  Scalar blade_profile_w{0};
  Scalar induced_w{0};
  Scalar parasite_w{0};
  Scalar climb_w{0};

  Scalar component_sum() const { return blade_profile_w + induced_w + parasite_w + climb_w; }
};

template <typename Scalar>
struct RegimeDomain {
  Regime regime = Regime::Hover;
  Scalar v_min{0};
  Scalar v_max{0};
};

using AirframeParamsd = AirframeParams<double>;
using Velocity3d = Velocity3<double>;
using PowerBreakdownd = PowerBreakdown<double>;
using RegimeDomaind = RegimeDomain<double>;

/// The simulation parameter set: Table of main notations plus C_T = 0.001195
/// and S_FP_perp = 0.377 used for the rotor-count simulations.
inline AirframeParamsd reference_params() { return AirframeParamsd{}; }

}  // namespace uavpower
