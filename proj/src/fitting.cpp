#include "uavpower/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "uavpower/errors.hpp"
#include "uavpower/levenberg_marquardt.hpp"

namespace uavpower {

std::size_t SpeedPowerSeries::distinct_speeds() const {
  std::set<double> speeds;
  for (const auto& sp : pairs) speeds.insert(sp.v);
  return speeds.size();
}

namespace {

constexpr double kRadicandPenalty = 1e12;
constexpr double kLogFloor = 1e-12;

// Fitted coefficients live in log space.
struct Parameterization {
  std::vector<int> indices;  // 1-based coefficient numbers

  Eigen::VectorXd to_internal(const CombinedParamsd& p) const {
    Eigen::VectorXd x(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
      // Coefficients allowed to be zero start just above it in log space.
      const double c = std::max(p.c(indices[i]), kLogFloor);
      x(i) = std::log(c);
    }
    return x;
  }

  CombinedParamsd to_external(const Eigen::VectorXd& x, CombinedParamsd base) const {
    for (std::size_t i = 0; i < indices.size(); ++i) {
      base.c(indices[i]) = std::exp(x(i));
    }
    return base;
  }
};

void require_finite(const SpeedPowerSeries& data, const char* what) {
  for (const auto& sp : data.pairs) {
    if (!std::isfinite(sp.v) || !std::isfinite(sp.p)) {
      throw DataError(std::string(what) + ": non-finite speed or power");
    }
    if (sp.v < 0) {
      throw DataError(std::string(what) + ": negative speed");
    }
  }
}

double sum_of_squares(const Eigen::VectorXd& r) {
  double s = 0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += r(i) * r(i);
  return s;
}

// Descent curve with the radicand clamped at zero, plus the violation.
double clamped_descent(double v, const CombinedParamsd& p, double& violation) {
  const double radicand = descent_combined_radicand(v, p);
  violation = radicand < 0 ? -radicand : 0.0;
  const double v2 = v * v;
  return p.c(6) + p.c(7) * v - p.c(8) * v2 * v + (p.c(7) - p.c(8) * v2) * std::sqrt(std::max(radicand, 0.0));
}

FitResult finish(FitRegime regime, const CombinedParamsd& params, const LmResult& lm,
                 const Eigen::VectorXd& data_residuals) {
  FitResult out;
  out.params = params;
  out.regime = regime;
  out.n_points = static_cast<std::size_t>(data_residuals.size());
  out.sse = sum_of_squares(data_residuals);
  double abs_sum = 0;
  for (Eigen::Index i = 0; i < data_residuals.size(); ++i) abs_sum += std::abs(data_residuals(i));
  out.mae = abs_sum / static_cast<double>(out.n_points);
  out.rmse = std::sqrt(out.sse / static_cast<double>(out.n_points));
  out.converged = lm.converged;
  out.iterations = lm.iterations;
  return out;
}

// Portable uniform draw in [-1, 1) from the top 53 bits.
double symmetric_unit(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

// Other starts replace the caller's result only when they improve the SSE by
// more than `negligible`, so an exact fit from the caller's init is kept
// even where the model is not identifiable.
LmResult multistart(const ResidualFunction& residuals, const Eigen::VectorXd& x0, const LmOptions& lm,
                    const FitOptions& options, double negligible, const std::vector<Eigen::VectorXd>& extra = {}) {
  LmResult best = levenberg_marquardt(residuals, x0, lm);
  auto consider = [&](LmResult candidate) {
    if (candidate.sse < best.sse - negligible) best = std::move(candidate);
  };
  for (const auto& start : extra) {
    LmOptions quiet = lm;
    quiet.on_iteration = nullptr;
    consider(levenberg_marquardt(residuals, start, quiet));
  }
  std::mt19937_64 rng(options.seed);
  for (int r = 0; r < options.restarts; ++r) {
    Eigen::VectorXd start = x0;
    for (Eigen::Index j = 0; j < start.size(); ++j) {
      const double u = symmetric_unit(rng);
      start(j) += std::log1p(0.5 * u);
    }
    LmOptions quiet = lm;
    quiet.on_iteration = nullptr;
    consider(levenberg_marquardt(residuals, start, quiet));
  }
  return best;
}

// SSE differences below this are rounding noise for the given data.
double negligible_sse(std::initializer_list<const SpeedPowerSeries*> series) {
  double energy = 0;
  for (const auto* s : series) {
    for (const auto& sp : s->pairs) energy += sp.p * sp.p;
  }
  return 1e-20 * energy;
}

LmOptions lm_options(const FitOptions& options) {
  LmOptions lm;
  lm.tol = options.tol;
  lm.max_iters = options.max_iters;
  lm.on_iteration = options.on_iteration;
  return lm;
}

}  // namespace

ErrorMetrics error_metrics(std::span<const SpeedPower> data, const SpeedCurve& model) {
  if (data.empty()) {
    throw DataError("error_metrics: empty data");
  }
  double abs_sum = 0;
  double sq_sum = 0;
  for (const auto& sp : data) {
    const double r = sp.p - model(sp.v);
    abs_sum += std::abs(r);
    sq_sum += r * r;
  }
  const auto n = static_cast<double>(data.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

ErrorMetrics error_metrics(const SpeedPowerSeries& data, const SpeedCurve& model) {
  return error_metrics(std::span<const SpeedPower>(data.pairs), model);
}

SpeedPowerSeries per_speed_medians(const SpeedPowerSeries& data) {
  std::vector<SpeedPower> sorted = data.pairs;
  std::stable_sort(sorted.begin(), sorted.end(), [](const SpeedPower& a, const SpeedPower& b) {
    return a.v < b.v || (a.v == b.v && a.p < b.p);
  });
  SpeedPowerSeries out;
  out.regime = data.regime;
  out.rounding_applied = data.rounding_applied;
  out.bin_width = data.bin_width;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].v == sorted[i].v) ++j;
    const std::size_t count = j - i;
    const std::size_t mid = i + count / 2;
    const double median = count % 2 == 1 ? sorted[mid].p : 0.5 * (sorted[mid - 1].p + sorted[mid].p);
    out.pairs.push_back({sorted[i].v, median});
    i = j;
  }
  return out;
}

FitResult fit_forward(const SpeedPowerSeries& data, const CombinedParamsd& init, const FitOptions& options) {
  require_finite(data, "fit_forward");
  if (data.distinct_speeds() < 6) {
    throw DataError("fit_forward: need at least 6 distinct speeds, got " + std::to_string(data.distinct_speeds()));
  }
  // The fit may start on the lower bound of c3 and c5 (zero); the log
  // parameterization lifts such starts to a tiny positive value.
  if (!(init.c(1) > 0 && init.c(4) > 0 && init.c(2) >= 0 && init.c(3) >= 0 && init.c(5) >= 0)) {
    throw InvalidParams("fit_forward: init requires c1, c4 > 0 and c2, c3, c5 >= 0");
  }

  const Parameterization param{{1, 2, 3, 4, 5}};
  const auto& pairs = data.pairs;
  auto data_residuals = [&](const CombinedParamsd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = pairs[i].p - eval_forward_combined(pairs[i].v, p);
    }
    return r;
  };
  const ResidualFunction residuals = [&](const Eigen::VectorXd& x) { return data_residuals(param.to_external(x, init)); };

  // The data-driven start escapes the c2 -> 0 basin that poor user guesses fall into.
  const std::vector<Eigen::VectorXd> extra{param.to_internal(heuristic_forward_init(data))};
  const LmResult lm = multistart(residuals, param.to_internal(init), lm_options(options), options,
                                 negligible_sse({&data}), extra);
  const CombinedParamsd fitted = param.to_external(lm.x, init);
  return finish(FitRegime::Forward, fitted, lm, data_residuals(fitted));
}

FitResult fit_vertical(const SpeedPowerSeries& ascent, const SpeedPowerSeries& descent, const CombinedParamsd& init,
                       const FitOptions& options) {
  if (ascent.empty() || descent.empty()) {
    throw DataError("fit_vertical: both ascent and descent series must be nonempty");
  }
  require_finite(ascent, "fit_vertical");
  require_finite(descent, "fit_vertical");
  std::set<double> speeds;
  for (const auto& sp : ascent.pairs) speeds.insert(sp.v);
  for (const auto& sp : descent.pairs) speeds.insert(sp.v);
  if (speeds.size() < 5) {
    throw DataError("fit_vertical: need at least 5 distinct speeds, got " + std::to_string(speeds.size()));
  }
  init.validate_vertical();

  const Parameterization param{{6, 7, 8, 9}};
  const auto n_a = static_cast<Eigen::Index>(ascent.size());
  const auto n_d = static_cast<Eigen::Index>(descent.size());

  auto data_residuals = [&](const CombinedParamsd& p, double& violation) {
    Eigen::VectorXd r(n_a + n_d);
    violation = 0;
    for (Eigen::Index i = 0; i < n_a; ++i) {
      const auto& sp = ascent.pairs[static_cast<std::size_t>(i)];
      r(i) = sp.p - eval_ascent_combined(sp.v, p);
    }
    for (Eigen::Index i = 0; i < n_d; ++i) {
      const auto& sp = descent.pairs[static_cast<std::size_t>(i)];
      double v_i = 0;
      r(n_a + i) = sp.p - clamped_descent(sp.v, p, v_i);
      violation += v_i;
    }
    return r;
  };
  // Last entry carries the penalty so its square adds 1e12 * violation.
  const ResidualFunction residuals = [&](const Eigen::VectorXd& x) {
    double violation = 0;
    const Eigen::VectorXd r = data_residuals(param.to_external(x, init), violation);
    Eigen::VectorXd full(r.size() + 1);
    full.head(r.size()) = r;
    full(r.size()) = std::sqrt(kRadicandPenalty * violation);
    return full;
  };

  const LmResult lm = multistart(residuals, param.to_internal(init), lm_options(options), options,
                                 negligible_sse({&ascent, &descent}));
  const CombinedParamsd fitted = param.to_external(lm.x, init);
  double violation = 0;
  const Eigen::VectorXd r = data_residuals(fitted, violation);
  FitResult out = finish(FitRegime::VerticalPair, fitted, lm, r);
  if (violation > 0) {
    out.converged = false;
  }
  return out;
}

namespace {

double lowest_speed_median(const SpeedPowerSeries& a, const SpeedPowerSeries* b) {
  SpeedPowerSeries merged = a;
  if (b != nullptr) merged.pairs.insert(merged.pairs.end(), b->pairs.begin(), b->pairs.end());
  const SpeedPowerSeries medians = per_speed_medians(merged);
  if (medians.empty()) {
    throw DataError("initialization needs nonempty data");
  }
  return medians.pairs.front().p;
}

double max_speed(const SpeedPowerSeries& data) {
  double m = 0;
  for (const auto& sp : data.pairs) m = std::max(m, sp.v);
  return m;
}

}  // namespace

CombinedParamsd heuristic_forward_init(const SpeedPowerSeries& data) {
  const double p0 = lowest_speed_median(data, nullptr);
  const double vmax = std::max(1.0, max_speed(data));
  CombinedParamsd out;
  out.c(1) = 0.6 * p0;
  out.c(2) = 0.01 * p0 / (vmax * vmax);
  out.c(3) = 0.4 * p0;
  out.c(4) = 80.0;
  out.c(5) = 0.05 * p0 / (vmax * vmax * vmax);
  return out;
}

CombinedParamsd heuristic_vertical_init(const SpeedPowerSeries& ascent, const SpeedPowerSeries& descent,
                                        double weight_estimate_n) {
  if (!(weight_estimate_n > 0)) {
    throw InvalidParams("heuristic_vertical_init: weight estimate must be > 0");
  }
  const double p0 = lowest_speed_median(ascent, &descent);
  CombinedParamsd out;
  out.c(7) = weight_estimate_n / 2;
  out.c(8) = 0.1;
  out.c(9) = 1.0;
  const double root_term = 2 * out.c(7) * std::sqrt(out.c(7) / out.c(9));
  out.c(6) = std::max(p0 - root_term, 0.1 * p0);
  return out;
}

namespace {

std::string g12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::pair<int, int> fitted_range(FitRegime r) { return r == FitRegime::Forward ? std::pair{1, 5} : std::pair{6, 9}; }

}  // namespace

std::string to_key_value(const FitResult& result) {
  std::ostringstream os;
  os << "regime=" << to_string(result.regime) << '\n';
  const auto [first, last] = fitted_range(result.regime);
  for (int j = first; j <= last; ++j) os << 'c' << j << '=' << g12(result.params.c(j)) << '\n';
  os << "sse=" << g12(result.sse) << '\n'
     << "mae=" << g12(result.mae) << '\n'
     << "rmse=" << g12(result.rmse) << '\n'
     << "n_points=" << result.n_points << '\n'
     << "converged=" << (result.converged ? "true" : "false") << '\n'
     << "iterations=" << result.iterations << '\n';
  return os.str();
}

std::string fit_csv_header() { return "regime,c1,c2,c3,c4,c5,c6,c7,c8,c9,sse,mae,rmse,n_points,converged,iterations"; }

std::string to_csv_row(const FitResult& result) {
  std::ostringstream os;
  os << to_string(result.regime);
  const auto [first, last] = fitted_range(result.regime);
  for (int j = 1; j <= 9; ++j) {
    os << ',';
    if (j >= first && j <= last) os << g12(result.params.c(j));
  }
  os << ',' << g12(result.sse) << ',' << g12(result.mae) << ',' << g12(result.rmse) << ',' << result.n_points << ','
     << (result.converged ? "true" : "false") << ',' << result.iterations;
  return os.str();
}

}  // namespace uavpower
