#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "uavpower/combined.hpp"
#include "uavpower/series.hpp"

namespace uavpower {

struct FitOptions {
  double tol = 1e-10;   // relative SSE improvement per accepted iteration
  int max_iters = 10000;
  // Extra starts from the initial point with each coefficient scaled by a
  // random factor in [0.5, 1.5]; the lowest SSE wins.
  int restarts = 0;
  std::uint64_t seed = 0;
  std::function<void(int, double)> on_iteration;  // (iteration, sse)
};

enum class FitRegime { Forward, VerticalPair };

inline const char* to_string(FitRegime r) { return r == FitRegime::Forward ? "forward" : "vertical"; }

struct FitResult {
  CombinedParamsd params;
  FitRegime regime = FitRegime::Forward;
  double sse = 0;
  double mae = 0;
  double rmse = 0;
  std::size_t n_points = 0;
  bool converged = false;
  int iterations = 0;
};

struct ErrorMetrics {
  double mae = 0;
  double rmse = 0;
};

using SpeedCurve = std::function<double(double)>;

/// Mean absolute and root-mean-square error of `model` against the pairs.
ErrorMetrics error_metrics(std::span<const SpeedPower> data, const SpeedCurve& model);
ErrorMetrics error_metrics(const SpeedPowerSeries& data, const SpeedCurve& model);

/// One pair per distinct speed holding the median power at that speed,
/// sorted by speed.
SpeedPowerSeries per_speed_medians(const SpeedPowerSeries& data);

/// Least-squares fit of c1..c5 to forward-flight data. Coefficients are
/// optimized in log space so they stay positive. The heuristic start is
/// always tried alongside `init`. Requires at least six distinct speeds.
FitResult fit_forward(const SpeedPowerSeries& data, const CombinedParamsd& init, const FitOptions& options = {});

/// Joint least-squares fit of c6..c9 to ascent and descent data (the two
/// objectives share their parameters, so their sum is minimized). Iterates
/// that make a descent speed infeasible pay a penalty of 1e12 per unit of
/// radicand violation.
FitResult fit_vertical(const SpeedPowerSeries& ascent, const SpeedPowerSeries& descent, const CombinedParamsd& init,
                       const FitOptions& options = {});

/// Starting point from the data alone: hover intercept split 60/40 between
/// c1 and c3, c4 = 80 m^2/s^2, small positive c2 and c5.
CombinedParamsd heuristic_forward_init(const SpeedPowerSeries& data);

/// Starting point for the vertical fit: c7 = weight/2 from the caller's
/// weight estimate, c9 = 1, c8 = 0.1, c6 from the lowest-speed power.
CombinedParamsd heuristic_vertical_init(const SpeedPowerSeries& ascent, const SpeedPowerSeries& descent,
                                        double weight_estimate_n);

/// key=value block, one entry per line, fitted coefficients only.
std::string to_key_value(const FitResult& result);

std::string fit_csv_header();
/// CSV row matching fit_csv_header(); coefficients not fitted are left empty.
std::string to_csv_row(const FitResult& result);

}  // namespace uavpower
