#pragma once

// Telemetry ingestion: 1 Hz speed, 10 Hz current/voltage, optional altitude.
// Electrical samples are averaged into one power value per speed sample.

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "uavpower/errors.hpp"
#include "uavpower/series.hpp"

namespace uavpower {

struct SpeedSample {
  double t = 0;  // s since log start
  double v = 0;  // m/s
};

struct ElectricalSample {
  double t = 0;
  double current = 0;  // A
  double voltage = 0;  // V
};

struct AltitudeSample {
  double t = 0;
  double alt = 0;  // m
};

class ProfileNotDetected : public DataError {
 public:
  using DataError::DataError;
};

/// Battery power, current x voltage. Communication load is not subtracted.
double compute_power(const ElectricalSample& e);

struct AlignedWindow {
  double t = 0;             // speed timestamp opening the window
  double v = 0;
  double p = 0;             // mean electrical power in the window
  std::size_t samples = 0;  // electrical samples averaged
};

struct AlignResult {
  std::vector<AlignedWindow> windows;
  std::size_t dropped = 0;  // speed samples with no electrical data
};

/// Pairs each speed sample at time t with the mean power of electrical
/// samples in [t, min(t + 1, t_next)), where t_next is the following speed
/// timestamp. Windows without electrical samples are dropped. Both inputs
/// must have strictly increasing timestamps.
AlignResult align(std::span<const SpeedSample> speed, std::span<const ElectricalSample> elec);

SpeedPowerSeries to_series(const AlignResult& aligned, Regime regime);

/// Replaces every speed by floor(v + 1/2). Fails on an already snapped series.
SpeedPowerSeries round_speeds(const SpeedPowerSeries& series);

/// Snaps every speed to the nearest multiple of `width`
/// (floor(v / width + 1/2) * width). Used with width 0.5 for vertical logs.
SpeedPowerSeries bin_speeds(const SpeedPowerSeries& series, double width);

struct TimeWindow {
  double begin = 0;
  double end = 0;
  bool contains(double t) const { return t >= begin && t <= end; }
  double duration() const { return end - begin; }
};

struct VerticalWindows {
  TimeWindow ascent;
  TimeWindow descent;
};

/// Vertical speed at each altitude sample: altitude difference over one
/// second centred on the sample, with linear interpolation (clamped at the
/// ends of the log).
std::vector<double> altitude_rates(std::span<const AltitudeSample> alt);

/// Finds the constant-rate ascent and the following constant-rate descent of
/// an ascend-hover-descend round trip. A segment is constant-rate where the
/// altitude rate stays within 0.25 m/s of the segment median for at least
/// 3 s. The ascent is clipped to altitudes <= hmax and the descent to
/// altitudes >= h0. Throws ProfileNotDetected when either segment is missing.
VerticalWindows trim_vertical_round_trip(std::span<const AltitudeSample> alt, double h0, double hmax);

/// Windows whose speed timestamp lies in `window` (inclusive).
AlignResult select_window(const AlignResult& aligned, const TimeWindow& window);

std::vector<SpeedSample> read_speed_csv(std::istream& in, const std::string& source = "speed.csv");
std::vector<ElectricalSample> read_electrical_csv(std::istream& in, const std::string& source = "electrical.csv");
std::vector<AltitudeSample> read_altitude_csv(std::istream& in, const std::string& source = "altitude.csv");

std::vector<SpeedSample> read_speed_csv(const std::string& path);
std::vector<ElectricalSample> read_electrical_csv(const std::string& path);
std::vector<AltitudeSample> read_altitude_csv(const std::string& path);

/// `v_mps,power_w` with shortest round-trip number formatting, LF endings.
void write_pairs_csv(std::ostream& out, const SpeedPowerSeries& series);
SpeedPowerSeries read_pairs_csv(std::istream& in, Regime regime, const std::string& source = "pairs.csv");
SpeedPowerSeries read_pairs_csv(const std::string& path, Regime regime);

}  // namespace uavpower
