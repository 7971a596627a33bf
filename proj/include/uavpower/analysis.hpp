#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "uavpower/params.hpp"

namespace uavpower {

/// Energy spent per metre travelled, P(v) / v, in J/m.
double energy_per_meter(Regime regime, double v, const AirframeParamsd& params);

struct SpeedRange {
  double min = 0;
  double max = 0;
};

struct OptimalSpeed {
  double speed = 0;             // m/s
  double energy_per_meter = 0;  // J/m
  bool at_boundary = false;     // minimizer sits on an end of the range
};

/// Minimizes energy_per_meter over the closed range: 0.1 m/s grid scan,
/// then golden-section refinement in the bracket around the best grid point.
OptimalSpeed optimal_speed(Regime regime, SpeedRange range, const AirframeParamsd& params);

enum class SweepRegime { Forward, Ascent, Descent, ForwardAscent, ForwardDescent };

const char* to_string(SweepRegime r);
SweepRegime parse_sweep_regime(const std::string& name);

struct SweepSpec {
  std::vector<int> rotor_counts;
  SweepRegime regime = SweepRegime::Forward;
  std::vector<double> speeds;  // total speed for the mixed regimes
  double ratio = 0;            // horizontal / vertical speed for mixed regimes

  void validate() const;
};

/// Rotor counts 4..12, speeds 0..15 m/s by 1 (forward and mixed),
/// 0..6 and 0..3 m/s by 0.5 (ascent, descent), ratio 2.5 forward-ascent
/// and 5 forward-descent.
SweepSpec default_sweep_spec(SweepRegime regime);

/// Drops speeds whose descent component lies outside the descent domain for
/// any rotor count in `spec` (the per-rotor thrust bound shrinks as n
/// grows: 2.75 m/s at n = 12 for the reference airframe).
SweepSpec clip_to_domain(SweepSpec spec, const AirframeParamsd& base);

struct SweepRow {
  int n = 0;
  double v = 0;
  double power_w = 0;
};

/// Power for every (n, v) cell, n outermost. The vehicle weight and
/// per-rotor constants of `base` are kept as n varies.
std::vector<SweepRow> rotor_sweep(const SweepSpec& spec, const AirframeParamsd& base);

/// Horizontal and signed vertical components of a mixed-regime total speed.
Velocity3d mixed_velocity(SweepRegime regime, double total_speed, double ratio);

struct MissionSegment {
  Velocity3d v;
  double duration_s = 0;
};

struct MissionRow {
  std::size_t segment = 0;
  MissionSegment input;
  double power_w = 0;
  double energy_j = 0;
};

struct MissionReport {
  double energy_j = 0;
  std::vector<MissionRow> rows;
};

/// Sum of steady-flight power times duration over the segments.
MissionReport mission_energy(std::span<const MissionSegment> segments, const AirframeParamsd& params);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_mission_csv(std::ostream& out, const MissionReport& report);
std::vector<MissionSegment> read_mission_csv(std::istream& in, const std::string& source = "mission.csv");

}  // namespace uavpower
