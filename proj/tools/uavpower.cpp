// uavpower: command-line front end for the multi-rotor power models.
//
// Exit codes: 0 success, 2 usage, 3 domain, 4 data/parse, 5 fit did not converge.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uavpower/analysis.hpp"
#include "uavpower/combined.hpp"
#include "uavpower/config.hpp"
#include "uavpower/csv.hpp"
#include "uavpower/errors.hpp"
#include "uavpower/fitting.hpp"
#include "uavpower/flightlog.hpp"
#include "uavpower/model.hpp"

using namespace uavpower;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kDomain = 3, kData = 4, kNotConverged = 5 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;

  Config config() const { return config_path.empty() ? default_config() : load_config(config_path); }
};

void with_output(const std::string& path, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  write(out);
}

std::string g4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

Regime parse_regime(const std::string& name) {
  for (auto r : {Regime::Hover, Regime::Forward, Regime::Ascent, Regime::Descent}) {
    if (name == to_string(r)) return r;
  }
  throw UsageError("unknown regime '" + name + "'");
}

std::vector<double> parse_speed_list(const std::string& text) {
  // Either "start:stop:step" or a comma-separated list.
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double start = 0, stop = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(text);
    if (!(ss >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0) || stop < start) {
      throw UsageError("bad speed range '" + text + "', expected start:stop:step");
    }
    const auto count = static_cast<int>(std::floor((stop - start) / step + 1e-9));
    for (int i = 0; i <= count; ++i) out.push_back(start + i * step);
    return out;
  }
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad speed '" + item + "'");
    }
  }
  return out;
}

void print_breakdown(std::ostream& os, const std::string& regime, const Velocity3d& v, const PowerBreakdownd& p) {
  auto row = [&](const char* key, double value) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-16s %s\n", key, csv::g12(value).c_str());
    os << buf;
  };
  char head[96];
  std::snprintf(head, sizeof head, "%-16s %s\n", "regime", regime.c_str());
  os << head;
  row("v_par_mps", v.v_par);
  row("v_perp_mps", v.v_perp);
  row("total_w", p.total_w);
  row("blade_profile_w", p.blade_profile_w);
  row("induced_w", p.induced_w);
  row("parasite_w", p.parasite_w);
  row("climb_w", p.climb_w);
}

// Fitted curve sampled every 0.1 m/s up to the largest observed speed.
void write_curve_csv(std::ostream& os, const FitResult& fit, const std::vector<std::pair<std::string, double>>& branches) {
  os << "branch,v_mps,power_w\n";
  for (const auto& [branch, vmax] : branches) {
    const auto steps = static_cast<int>(std::floor(vmax / 0.1 + 1e-9));
    for (int i = 0; i <= steps; ++i) {
      const double v = i * 0.1;
      double p = 0;
      if (branch == "forward") {
        p = eval_forward_combined(v, fit.params);
      } else if (branch == "ascent") {
        p = eval_ascent_combined(v, fit.params);
      } else {
        if (descent_combined_radicand(v, fit.params) < 0) break;
        p = eval_descent_combined(v, fit.params);
      }
      os << branch << ',' << csv::g12(v) << ',' << csv::g12(p) << '\n';
    }
  }
}

double max_speed(const SpeedPowerSeries& s) {
  double m = 0;
  for (const auto& sp : s.pairs) m = std::max(m, sp.v);
  return m;
}

void report_metrics(const char* label, const SpeedPowerSeries& data, const SpeedCurve& curve) {
  const ErrorMetrics m = error_metrics(per_speed_medians(data), curve);
  std::cerr << label << " (per-speed medians): MAE=" << g4(m.mae) << " W RMSE=" << g4(m.rmse) << " W\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-rotor UAV power models: evaluation, telemetry ingestion, fitting and analyses"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals globals;
  app.add_option("--config", globals.config_path, "Vehicle config (key=value lines); reference values if omitted");
  app.add_option("--out", globals.out_path, "Output file (default stdout)");
  app.add_option("--seed", globals.seed, "Seed for fit restarts (overrides config)");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a power model");
  std::string eval_regime;
  std::optional<double> eval_v, eval_vpar, eval_vperp;
  eval->add_option("--regime", eval_regime, "hover|forward|ascent|descent");
  eval->add_option("--v", eval_v, "Speed magnitude, m/s");
  eval->add_option("--vpar", eval_vpar, "Horizontal speed for the 3-D model, m/s");
  eval->add_option("--vperp", eval_vperp, "Signed vertical speed for the 3-D model, m/s");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Align telemetry logs into speed-power pairs");
  std::string speed_csv, elec_csv, alt_csv, ingest_regime = "forward";
  bool round = false;
  double h0 = 0, hmax = std::numeric_limits<double>::infinity();
  ingest->add_option("--speed", speed_csv, "Speed CSV (t_s,v_mps)")->required();
  ingest->add_option("--elec", elec_csv, "Electrical CSV (t_s,current_a,voltage_v)")->required();
  ingest->add_option("--alt", alt_csv, "Altitude CSV (t_s,alt_m) for vertical round trips");
  ingest->add_option("--regime", ingest_regime, "forward|ascent|descent");
  ingest->add_flag("--round", round, "Snap speeds: nearest integer (forward) or 0.5 m/s (vertical)");
  ingest->add_option("--h0", h0, "Minimum descent height, m");
  ingest->add_option("--hmax", hmax, "Maximum ascent height, m");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit combined-parameter models to speed-power pairs");
  std::string fit_regime = "forward", pairs_csv, ascent_csv, descent_csv, curve_csv, init_mode = "config";
  std::optional<double> tol;
  std::optional<int> max_iters;
  int restarts = 0;
  fit->add_option("--regime", fit_regime, "forward|vertical");
  fit->add_option("--pairs", pairs_csv, "Forward pairs CSV (v_mps,power_w)");
  fit->add_option("--ascent", ascent_csv, "Ascent pairs CSV");
  fit->add_option("--descent", descent_csv, "Descent pairs CSV");
  fit->add_option("--curve", curve_csv, "Write the fitted curve (0.1 m/s grid) here");
  fit->add_option("--init", init_mode, "config|heuristic");
  fit->add_option("--tol", tol, "Relative SSE tolerance");
  fit->add_option("--max-iters", max_iters, "Iteration limit");
  fit->add_option("--restarts", restarts, "Additional perturbed starts");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Rotor-count sweep table");
  std::string sweep_regime = "forward", sweep_counts, sweep_speeds;
  std::optional<double> ratio;
  sweep->add_option("--regime", sweep_regime, "forward|ascent|descent|forward-ascent|forward-descent");
  sweep->add_option("--n", sweep_counts, "Comma-separated rotor counts (default 4,6,8,10,12)");
  sweep->add_option("--speeds", sweep_speeds, "start:stop:step or comma-separated speeds, m/s");
  sweep->add_option("--ratio", ratio, "Horizontal/vertical speed ratio for mixed regimes");

  // energy
  auto* energy = app.add_subcommand("energy", "Mission energy over steady segments");
  std::string mission_csv;
  energy->add_option("--mission", mission_csv, "Mission CSV (v_par,v_perp,duration_s)")->required();

  // optimal-speed
  auto* optimal = app.add_subcommand("optimal-speed", "Speed minimizing energy per metre");
  std::string opt_regime = "forward";
  double vmin = 0, vmax = 0;
  optimal->add_option("--regime", opt_regime, "forward|ascent|descent");
  optimal->add_option("--vmin", vmin, "Lower end of the search range, m/s")->required();
  optimal->add_option("--vmax", vmax, "Upper end of the search range, m/s")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const Config cfg = globals.config();
    const AirframeParamsd& params = cfg.params;

    if (*eval) {
      if (eval_vpar || eval_vperp) {
        if (!eval_regime.empty() || eval_v) throw UsageError("use either --regime/--v or --vpar/--vperp");
        const Velocity3d v{eval_vpar.value_or(0.0), eval_vperp.value_or(0.0)};
        const PowerBreakdownd p = total_power(v, params);
        with_output(globals.out_path, [&](std::ostream& os) { print_breakdown(os, "3d", v, p); });
        return kOk;
      }
      if (eval_regime.empty()) throw UsageError("eval needs --regime or --vpar/--vperp");
      const Regime regime = parse_regime(eval_regime);
      if (regime != Regime::Hover && !eval_v) throw UsageError("eval --regime " + eval_regime + " needs --v");
      const double speed = regime == Regime::Hover ? 0.0 : *eval_v;
      const PowerBreakdownd p = regime_power(regime, speed, params);
      Velocity3d v{};
      if (regime == Regime::Forward) v.v_par = speed;
      if (regime == Regime::Ascent) v.v_perp = speed;
      if (regime == Regime::Descent) v.v_perp = -speed;
      with_output(globals.out_path, [&](std::ostream& os) { print_breakdown(os, eval_regime, v, p); });
      return kOk;
    }

    if (*ingest) {
      const Regime regime = parse_regime(ingest_regime);
      if (regime == Regime::Hover) throw UsageError("ingest regime must be forward, ascent or descent");
      const auto speed = read_speed_csv(speed_csv);
      const auto elec = read_electrical_csv(elec_csv);
      AlignResult aligned = align(speed, elec);
      const std::size_t dropped = aligned.dropped;
      if (!alt_csv.empty()) {
        if (regime == Regime::Forward) throw UsageError("--alt applies to ascent/descent logs only");
        const auto alt = read_altitude_csv(alt_csv);
        const VerticalWindows windows = trim_vertical_round_trip(alt, h0, hmax);
        aligned = select_window(aligned, regime == Regime::Ascent ? windows.ascent : windows.descent);
        const TimeWindow& w = regime == Regime::Ascent ? windows.ascent : windows.descent;
        std::cerr << "segment: " << g4(w.begin) << " s .. " << g4(w.end) << " s\n";
      }
      SpeedPowerSeries series = to_series(aligned, regime);
      if (round) series = regime == Regime::Forward ? round_speeds(series) : bin_speeds(series, 0.5);
      with_output(globals.out_path, [&](std::ostream& os) { write_pairs_csv(os, series); });
      std::cerr << "emitted " << series.size() << " windows, dropped " << dropped << '\n';
      return kOk;
    }

    if (*fit) {
      FitOptions options;
      options.tol = tol.value_or(cfg.tol.value_or(options.tol));
      options.max_iters = max_iters.value_or(cfg.max_iters.value_or(options.max_iters));
      options.restarts = restarts;
      options.seed = globals.seed.value_or(cfg.seed.value_or(0));
      if (init_mode != "config" && init_mode != "heuristic") throw UsageError("--init must be config or heuristic");
      const CombinedParamsd mapped = physical_to_combined(params);

      FitResult result;
      std::vector<std::pair<std::string, double>> branches;
      if (fit_regime == "forward") {
        if (pairs_csv.empty()) throw UsageError("fit --regime forward needs --pairs");
        const SpeedPowerSeries data = read_pairs_csv(pairs_csv, Regime::Forward);
        const CombinedParamsd init = init_mode == "config" ? mapped : heuristic_forward_init(data);
        result = fit_forward(data, init, options);
        branches = {{"forward", max_speed(data)}};
        const CombinedParamsd fitted = result.params;
        report_metrics("forward", data, [&](double v) { return eval_forward_combined(v, fitted); });
      } else if (fit_regime == "vertical") {
        if (ascent_csv.empty() || descent_csv.empty()) throw UsageError("fit --regime vertical needs --ascent and --descent");
        const SpeedPowerSeries ascent = read_pairs_csv(ascent_csv, Regime::Ascent);
        const SpeedPowerSeries descent = read_pairs_csv(descent_csv, Regime::Descent);
        const CombinedParamsd init =
            init_mode == "config" ? mapped : heuristic_vertical_init(ascent, descent, params.weight_w);
        result = fit_vertical(ascent, descent, init, options);
        branches = {{"ascent", max_speed(ascent)}, {"descent", max_speed(descent)}};
        const CombinedParamsd fitted = result.params;
        auto up = [&](double v) { return eval_ascent_combined(v, fitted); };
        auto down = [&](double v) { return eval_descent_combined(v, fitted); };
        const SpeedPowerSeries ma = per_speed_medians(ascent);
        const SpeedPowerSeries md = per_speed_medians(descent);
        std::vector<double> residuals;
        for (const auto& sp : ma.pairs) residuals.push_back(sp.p - up(sp.v));
        for (const auto& sp : md.pairs) residuals.push_back(sp.p - down(sp.v));
        double abs_sum = 0, sq_sum = 0;
        for (double r : residuals) {
          abs_sum += std::abs(r);
          sq_sum += r * r;
        }
        const auto n = static_cast<double>(residuals.size());
        std::cerr << "vertical pooled (per-speed medians): MAE=" << g4(abs_sum / n) << " W RMSE=" << g4(std::sqrt(sq_sum / n))
                  << " W\n";
        report_metrics("ascent", ascent, up);
        report_metrics("descent", descent, down);
      } else {
        throw UsageError("fit --regime must be forward or vertical");
      }

      with_output(globals.out_path, [&](std::ostream& os) { os << to_key_value(result); });
      if (!curve_csv.empty()) {
        with_output(curve_csv, [&](std::ostream& os) { write_curve_csv(os, result, branches); });
      }
      if (!result.converged) {
        std::cerr << "fit did not converge after " << result.iterations << " iterations\n";
        return kNotConverged;
      }
      return kOk;
    }

    if (*sweep) {
      SweepSpec spec = default_sweep_spec(parse_sweep_regime(sweep_regime));
      if (!sweep_counts.empty()) {
        spec.rotor_counts.clear();
        for (double n : parse_speed_list(sweep_counts)) {
          if (n != std::floor(n)) throw UsageError("rotor counts must be integers");
          spec.rotor_counts.push_back(static_cast<int>(n));
        }
      }
      if (ratio) spec.ratio = *ratio;
      if (!sweep_speeds.empty()) {
        spec.speeds = parse_speed_list(sweep_speeds);
      } else {
        // Default grids stop where the largest rotor count leaves the descent domain.
        spec.validate();
        const std::size_t before = spec.speeds.size();
        spec = clip_to_domain(spec, params);
        if (spec.speeds.size() < before) {
          std::cerr << "dropped " << before - spec.speeds.size() << " default speeds outside the descent domain\n";
        }
      }
      const auto rows = rotor_sweep(spec, params);
      with_output(globals.out_path, [&](std::ostream& os) { write_sweep_csv(os, rows); });
      return kOk;
    }

    if (*energy) {
      std::ifstream in(mission_csv);
      if (!in) throw DataError("cannot open '" + mission_csv + "'");
      const auto segments = read_mission_csv(in, mission_csv);
      const MissionReport report = mission_energy(segments, params);
      with_output(globals.out_path, [&](std::ostream& os) { write_mission_csv(os, report); });
      std::cerr << "total energy: " << csv::g12(report.energy_j) << " J\n";
      return kOk;
    }

    if (*optimal) {
      const OptimalSpeed best = optimal_speed(parse_regime(opt_regime), {vmin, vmax}, params);
      with_output(globals.out_path, [&](std::ostream& os) {
        os << "v_opt_mps=" << csv::g12(best.speed) << '\n'
           << "energy_j_per_m=" << csv::g12(best.energy_per_meter) << '\n'
           << "at_boundary=" << (best.at_boundary ? "true" : "false") << '\n';
      });
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidParams& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
