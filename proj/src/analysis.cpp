#include "uavpower/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "uavpower/csv.hpp"
#include "uavpower/errors.hpp"
#include "uavpower/model.hpp"

namespace uavpower {

namespace {

constexpr double kScanStep = 0.1;
constexpr double kGoldenTolerance = 1e-7;

double golden_section(const std::function<double(double)>& f, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > kGoldenTolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double energy_per_meter(Regime regime, double v, const AirframeParamsd& params) {
  if (regime == Regime::Hover) {
    throw DomainError("energy_per_meter: undefined in hover");
  }
  if (!(v > 0)) {
    throw DomainError("energy_per_meter: speed must be > 0");
  }
  return regime_power(regime, v, params).total_w / v;
}

OptimalSpeed optimal_speed(Regime regime, SpeedRange range, const AirframeParamsd& params) {
  if (!(range.min > 0) || !(range.max > range.min) || !std::isfinite(range.max)) {
    throw DomainError("optimal_speed: need 0 < min < max");
  }
  const RegimeDomaind domain = regime_domain(regime, params);
  if (regime == Regime::Hover || range.max > domain.v_max) {
    throw DomainError("optimal_speed: range exceeds the " + std::string(to_string(regime)) + " domain");
  }
  auto energy = [&](double v) { return energy_per_meter(regime, v, params); };

  const auto steps = static_cast<std::size_t>(std::floor((range.max - range.min) / kScanStep + 1e-9));
  std::vector<double> grid;
  for (std::size_t i = 0; i <= steps; ++i) grid.push_back(range.min + static_cast<double>(i) * kScanStep);
  if (grid.back() < range.max) grid.push_back(range.max);

  std::size_t best = 0;
  double best_e = energy(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double e = energy(grid[i]);
    if (e < best_e) {
      best_e = e;
      best = i;
    }
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  double v = golden_section(energy, lo, hi);
  double e = energy(v);
  // Keep the endpoint itself when it beats the refined interior point.
  for (double edge : {lo, hi}) {
    const double e_edge = energy(edge);
    if (e_edge <= e) {
      v = edge;
      e = e_edge;
    }
  }
  const double edge_tol = 1e-6;
  return {v, e, v - range.min <= edge_tol || range.max - v <= edge_tol};
}

const char* to_string(SweepRegime r) {
  switch (r) {
    case SweepRegime::Forward: return "forward";
    case SweepRegime::Ascent: return "ascent";
    case SweepRegime::Descent: return "descent";
    case SweepRegime::ForwardAscent: return "forward-ascent";
    case SweepRegime::ForwardDescent: return "forward-descent";
  }
  return "?";
}

SweepRegime parse_sweep_regime(const std::string& name) {
  for (auto r : {SweepRegime::Forward, SweepRegime::Ascent, SweepRegime::Descent, SweepRegime::ForwardAscent,
                 SweepRegime::ForwardDescent}) {
    if (name == to_string(r)) return r;
  }
  throw InvalidParams("unknown sweep regime '" + name + "'");
}

void SweepSpec::validate() const {
  if (rotor_counts.empty() || speeds.empty()) {
    throw InvalidParams("sweep: rotor counts and speeds must be nonempty");
  }
  for (int n : rotor_counts) {
    if (n < 4 || n % 2 != 0) {
      throw InvalidParams("sweep: rotor count " + std::to_string(n) + " is not an even number >= 4");
    }
  }
  for (double v : speeds) {
    if (!(v >= 0) || !std::isfinite(v)) throw InvalidParams("sweep: speeds must be finite and >= 0");
  }
  const bool mixed = regime == SweepRegime::ForwardAscent || regime == SweepRegime::ForwardDescent;
  if (mixed && !(ratio > 0)) {
    throw InvalidParams("sweep: mixed regimes need ratio > 0");
  }
}

SweepSpec default_sweep_spec(SweepRegime regime) {
  SweepSpec spec;
  spec.regime = regime;
  spec.rotor_counts = {4, 6, 8, 10, 12};
  auto range = [](double max, double step) {
    std::vector<double> v;
    const auto count = static_cast<int>(std::round(max / step));
    for (int i = 0; i <= count; ++i) v.push_back(i * step);
    return v;
  };
  switch (regime) {
    case SweepRegime::Forward: spec.speeds = range(15, 1); break;
    case SweepRegime::Ascent: spec.speeds = range(6, 0.5); break;
    case SweepRegime::Descent: spec.speeds = range(3, 0.5); break;
    case SweepRegime::ForwardAscent:
      spec.speeds = range(15, 1);
      spec.ratio = 2.5;
      break;
    case SweepRegime::ForwardDescent:
      spec.speeds = range(15, 1);
      spec.ratio = 5;
      break;
  }
  return spec;
}

SweepSpec clip_to_domain(SweepSpec spec, const AirframeParamsd& base) {
  if (spec.regime != SweepRegime::Descent && spec.regime != SweepRegime::ForwardDescent) {
    return spec;
  }
  double limit = std::numeric_limits<double>::infinity();
  for (int n : spec.rotor_counts) limit = std::min(limit, descent_speed_limit(base.with_rotors(n)));
  std::erase_if(spec.speeds, [&](double v) {
    const double vertical = spec.regime == SweepRegime::Descent ? v : -mixed_velocity(spec.regime, v, spec.ratio).v_perp;
    return vertical > limit;
  });
  return spec;
}

Velocity3d mixed_velocity(SweepRegime regime, double total_speed, double ratio) {
  const double vertical = total_speed / std::sqrt(1 + ratio * ratio);
  const double sign = regime == SweepRegime::ForwardDescent ? -1.0 : 1.0;
  return {ratio * vertical, sign * vertical};
}

std::vector<SweepRow> rotor_sweep(const SweepSpec& spec, const AirframeParamsd& base) {
  spec.validate();
  std::vector<SweepRow> rows;
  rows.reserve(spec.rotor_counts.size() * spec.speeds.size());
  for (int n : spec.rotor_counts) {
    const AirframeParamsd p = base.with_rotors(n);
    for (double v : spec.speeds) {
      double power = 0;
      switch (spec.regime) {
        case SweepRegime::Forward: power = forward_power(v, p).total_w; break;
        case SweepRegime::Ascent: power = ascent_power(v, p).total_w; break;
        case SweepRegime::Descent: power = descent_power(v, p).total_w; break;
        case SweepRegime::ForwardAscent:
        case SweepRegime::ForwardDescent:
          power = total_power(mixed_velocity(spec.regime, v, spec.ratio), p).total_w;
          break;
      }
      rows.push_back({n, v, power});
    }
  }
  return rows;
}

MissionReport mission_energy(std::span<const MissionSegment> segments, const AirframeParamsd& params) {
  MissionReport report;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const MissionSegment& seg = segments[i];
    if (!(seg.duration_s > 0)) {
      throw DomainError("segment " + std::to_string(i) + ": duration must be > 0");
    }
    double power = 0;
    try {
      power = total_power(seg.v, params).total_w;
    } catch (const DomainError& e) {
      throw DomainError("segment " + std::to_string(i) + ": " + e.what());
    }
    const double energy = power * seg.duration_s;
    report.rows.push_back({i, seg, power, energy});
    report.energy_j += energy;
  }
  return report;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "n,v_mps,power_w\n";
  for (const auto& r : rows) out << r.n << ',' << csv::g12(r.v) << ',' << csv::g12(r.power_w) << '\n';
}

void write_mission_csv(std::ostream& out, const MissionReport& report) {
  out << "segment,v_par,v_perp,duration_s,power_w,energy_j\n";
  for (const auto& r : report.rows) {
    out << r.segment << ',' << csv::g12(r.input.v.v_par) << ',' << csv::g12(r.input.v.v_perp) << ','
        << csv::g12(r.input.duration_s) << ',' << csv::g12(r.power_w) << ',' << csv::g12(r.energy_j) << '\n';
  }
}

std::vector<MissionSegment> read_mission_csv(std::istream& in, const std::string& source) {
  const auto rows = csv::read_numeric(in, source, {"v_par", "v_perp", "duration_s"});
  std::vector<MissionSegment> out;
  for (const auto& r : rows) {
    if (r[0] < 0 || !(r[2] > 0)) {
      throw ParseError(source, r.line, "need v_par >= 0 and duration_s > 0");
    }
    out.push_back({{r[0], r[1]}, r[2]});
  }
  return out;
}

}  // namespace uavpower
