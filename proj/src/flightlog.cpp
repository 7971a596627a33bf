#include "uavpower/flightlog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "uavpower/csv.hpp"

namespace uavpower {

namespace {

constexpr double kRateTolerance = 0.25;   // m/s
constexpr double kMinSegmentSeconds = 3.0;

template <typename Sample>
void require_increasing(std::span<const Sample> samples, const char* what) {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t > samples[i - 1].t)) {
      throw DataError(std::string(what) + ": timestamps not strictly increasing at index " + std::to_string(i));
    }
  }
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path + "'");
  }
  return in;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

struct IndexRun {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
};

// Longest run (by time span) of consecutive indices in [from, to) satisfying pred.
template <typename Pred>
bool longest_run(std::span<const AltitudeSample> alt, std::size_t from, std::size_t to, Pred pred, IndexRun& best) {
  bool found = false;
  double best_span = -1;
  std::size_t i = from;
  while (i < to) {
    if (!pred(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < to && pred(j + 1)) ++j;
    const double span = alt[j].t - alt[i].t;
    if (span > best_span) {
      best_span = span;
      best = {i, j};
      found = true;
    }
    i = j + 1;
  }
  return found;
}

// Constant-rate part of a monotone segment, or false when shorter than 3 s.
bool constant_rate_segment(std::span<const AltitudeSample> alt, const std::vector<double>& rate, IndexRun moving,
                           IndexRun& out) {
  std::vector<double> rates(rate.begin() + static_cast<std::ptrdiff_t>(moving.first),
                            rate.begin() + static_cast<std::ptrdiff_t>(moving.last) + 1);
  const double med = median(rates);
  auto steady = [&](std::size_t k) { return std::abs(rate[k] - med) < kRateTolerance; };
  if (!longest_run(alt, moving.first, moving.last + 1, steady, out)) return false;
  return alt[out.last].t - alt[out.first].t >= kMinSegmentSeconds;
}

}  // namespace

double compute_power(const ElectricalSample& e) {
  if (!(e.voltage > 0)) {
    throw DataError("compute_power: voltage must be > 0");
  }
  if (!(e.current >= 0)) {
    throw DataError("compute_power: current must be >= 0");
  }
  return e.current * e.voltage;
}

AlignResult align(std::span<const SpeedSample> speed, std::span<const ElectricalSample> elec) {
  if (speed.empty() || elec.empty()) {
    throw DataError("align: speed and electrical logs must be nonempty");
  }
  require_increasing(speed, "align (speed)");
  require_increasing(elec, "align (electrical)");

  AlignResult out;
  std::size_t e = 0;
  for (std::size_t i = 0; i < speed.size(); ++i) {
    const double begin = speed[i].t;
    double end = begin + 1.0;
    if (i + 1 < speed.size()) end = std::min(end, speed[i + 1].t);
    while (e < elec.size() && elec[e].t < begin) ++e;
    double sum = 0;
    std::size_t count = 0;
    std::size_t k = e;
    for (; k < elec.size() && elec[k].t < end; ++k) {
      sum += compute_power(elec[k]);
      ++count;
    }
    e = k;
    if (count == 0) {
      ++out.dropped;
      continue;
    }
    out.windows.push_back({begin, speed[i].v, sum / static_cast<double>(count), count});
  }
  return out;
}

SpeedPowerSeries to_series(const AlignResult& aligned, Regime regime) {
  SpeedPowerSeries out;
  out.regime = regime;
  out.pairs.reserve(aligned.windows.size());
  for (const auto& w : aligned.windows) out.pairs.push_back({w.v, w.p});
  return out;
}

SpeedPowerSeries round_speeds(const SpeedPowerSeries& series) {
  if (series.rounding_applied || series.bin_width > 0) {
    throw DataError("round_speeds: speeds are already snapped");
  }
  SpeedPowerSeries out = bin_speeds(series, 1.0);
  out.rounding_applied = true;
  return out;
}

SpeedPowerSeries bin_speeds(const SpeedPowerSeries& series, double width) {
  if (!(width > 0)) {
    throw DataError("bin_speeds: width must be > 0");
  }
  if (series.rounding_applied || series.bin_width > 0) {
    throw DataError("bin_speeds: speeds are already snapped");
  }
  SpeedPowerSeries out = series;
  for (auto& sp : out.pairs) sp.v = std::floor(sp.v / width + 0.5) * width;
  out.bin_width = width;
  return out;
}

std::vector<double> altitude_rates(std::span<const AltitudeSample> alt) {
  require_increasing(alt, "altitude_rates");
  auto height_at = [&](double t) {
    if (t <= alt.front().t) return alt.front().alt;
    if (t >= alt.back().t) return alt.back().alt;
    const auto it = std::upper_bound(alt.begin(), alt.end(), t,
                                     [](double x, const AltitudeSample& s) { return x < s.t; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (t - lo.t) / (hi.t - lo.t);
    return lo.alt + f * (hi.alt - lo.alt);
  };
  std::vector<double> rates(alt.size());
  for (std::size_t i = 0; i < alt.size(); ++i) {
    rates[i] = height_at(alt[i].t + 0.5) - height_at(alt[i].t - 0.5);
  }
  return rates;
}

VerticalWindows trim_vertical_round_trip(std::span<const AltitudeSample> alt, double h0, double hmax) {
  if (alt.size() < 2) {
    throw ProfileNotDetected("trim_vertical_round_trip: altitude log too short");
  }
  const std::vector<double> rate = altitude_rates(alt);

  IndexRun climbing;
  if (!longest_run(alt, 0, alt.size(), [&](std::size_t k) { return rate[k] > kRateTolerance; }, climbing)) {
    throw ProfileNotDetected("trim_vertical_round_trip: no ascent segment");
  }
  IndexRun ascent;
  if (!constant_rate_segment(alt, rate, climbing, ascent)) {
    throw ProfileNotDetected("trim_vertical_round_trip: ascent is not held at a constant rate for 3 s");
  }
  IndexRun sinking;
  if (!longest_run(alt, ascent.last + 1, alt.size(), [&](std::size_t k) { return rate[k] < -kRateTolerance; },
                   sinking)) {
    throw ProfileNotDetected("trim_vertical_round_trip: no descent segment after the ascent");
  }
  IndexRun descent;
  if (!constant_rate_segment(alt, rate, sinking, descent)) {
    throw ProfileNotDetected("trim_vertical_round_trip: descent is not held at a constant rate for 3 s");
  }

  while (ascent.last > ascent.first && alt[ascent.last].alt > hmax) --ascent.last;
  while (descent.last > descent.first && alt[descent.last].alt < h0) --descent.last;
  if (alt[ascent.last].alt > hmax || alt[descent.first].alt < h0) {
    throw ProfileNotDetected("trim_vertical_round_trip: segments lie outside [h0, hmax]");
  }
  return {{alt[ascent.first].t, alt[ascent.last].t}, {alt[descent.first].t, alt[descent.last].t}};
}

AlignResult select_window(const AlignResult& aligned, const TimeWindow& window) {
  AlignResult out;
  for (const auto& w : aligned.windows) {
    if (window.contains(w.t)) out.windows.push_back(w);
  }
  return out;
}

std::vector<SpeedSample> read_speed_csv(std::istream& in, const std::string& source) {
  const auto rows = csv::read_numeric(in, source, {"t_s", "v_mps"});
  std::vector<SpeedSample> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (r[0] < 0 || r[1] < 0) throw ParseError(source, r.line, "time and speed must be non-negative");
    out.push_back({r[0], r[1]});
  }
  return out;
}

std::vector<ElectricalSample> read_electrical_csv(std::istream& in, const std::string& source) {
  const auto rows = csv::read_numeric(in, source, {"t_s", "current_a", "voltage_v"});
  std::vector<ElectricalSample> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (r[0] < 0 || r[1] < 0 || !(r[2] > 0)) {
      throw ParseError(source, r.line, "need t >= 0, current >= 0, voltage > 0");
    }
    out.push_back({r[0], r[1], r[2]});
  }
  return out;
}

std::vector<AltitudeSample> read_altitude_csv(std::istream& in, const std::string& source) {
  const auto rows = csv::read_numeric(in, source, {"t_s", "alt_m"});
  std::vector<AltitudeSample> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (r[0] < 0) throw ParseError(source, r.line, "time must be non-negative");
    out.push_back({r[0], r[1]});
  }
  return out;
}

std::vector<SpeedSample> read_speed_csv(const std::string& path) {
  auto in = open(path);
  return read_speed_csv(in, path);
}

std::vector<ElectricalSample> read_electrical_csv(const std::string& path) {
  auto in = open(path);
  return read_electrical_csv(in, path);
}

std::vector<AltitudeSample> read_altitude_csv(const std::string& path) {
  auto in = open(path);
  return read_altitude_csv(in, path);
}

void write_pairs_csv(std::ostream& out, const SpeedPowerSeries& series) {
  out << "v_mps,power_w\n";
  for (const auto& sp : series.pairs) out << csv::repr(sp.v) << ',' << csv::repr(sp.p) << '\n';
}

SpeedPowerSeries read_pairs_csv(std::istream& in, Regime regime, const std::string& source) {
  const auto rows = csv::read_numeric(in, source, {"v_mps", "power_w"});
  SpeedPowerSeries out;
  out.regime = regime;
  for (const auto& r : rows) {
    if (r[0] < 0 || !(r[1] > 0)) throw ParseError(source, r.line, "need v >= 0 and power > 0");
    out.pairs.push_back({r[0], r[1]});
  }
  return out;
}

SpeedPowerSeries read_pairs_csv(const std::string& path, Regime regime) {
  auto in = open(path);
  return read_pairs_csv(in, regime, path);
}

}  // namespace uavpower
