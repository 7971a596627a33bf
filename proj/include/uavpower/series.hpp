#pragma once

#include <cstddef>
#include <vector>

#include "uavpower/params.hpp"

namespace uavpower {

struct SpeedPower {
  double v = 0;  // m/s
  double p = 0;  // W
};

/// Preprocessed (speed, power) observations from one flight regime.
struct SpeedPowerSeries {
  Regime regime = Regime::Forward;
  std::vector<SpeedPower> pairs;
  bool rounding_applied = false;  // speeds snapped to integers
  double bin_width = 0;           // 0 for raw speeds, else the snapping width

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  std::size_t distinct_speeds() const;
};

}  // namespace uavpower
