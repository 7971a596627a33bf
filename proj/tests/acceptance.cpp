// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "generators.hpp"
#include "uavpower/analysis.hpp"
#include "uavpower/fitting.hpp"
#include "uavpower/model.hpp"

using namespace uavpower;
using namespace uavpower::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit_s > 0 && elapsed >= time_limit_s) {
    o.pass = false;
    o.detail += fmt(" [time limit %.1f s exceeded]", time_limit_s);
  }
  std::printf("%s  %d. %s: %s (%.3f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), elapsed);
  if (!o.pass) ++failures;
}

const AirframeParamsd kRef = reference_params();

Outcome summation_identities() {
  ParamGenerator gen(1);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const AirframeParamsd p = gen.params();
    const double vf = gen.forward_speed();
    const double va = gen.ascent_speed();
    const double vd = gen.descent_speed(p);
    const double errs[] = {
        rel_diff(hover_power(p).total_w, p.n * single_rotor_hover_power(p.per_rotor_weight(), p)),
        rel_diff(hover_power(p).total_w, summed_hover(p)),
        rel_diff(forward_power(vf, p).total_w, p.n * per_rotor_forward_power(vf, p).total_w),
        rel_diff(forward_power(vf, p).total_w, summed_forward(vf, p)),
        rel_diff(ascent_power(va, p).total_w, p.n * per_rotor_vertical_power(va, VerticalDirection::Ascent, p)),
        rel_diff(ascent_power(va, p).total_w, summed_vertical(va, VerticalDirection::Ascent, p)),
        rel_diff(descent_power(vd, p).total_w, p.n * per_rotor_vertical_power(vd, VerticalDirection::Descent, p)),
        rel_diff(descent_power(vd, p).total_w, summed_vertical(vd, VerticalDirection::Descent, p)),
    };
    for (double e : errs) worst = std::max(worst, e);
  }
  return {worst <= 1e-12, fmt("200 draws x 4 regimes, max rel err %.2e (limit 1e-12)", worst)};
}

Outcome combined_equivalence() {
  const CombinedParamsd c = physical_to_combined(kRef);
  double worst = 0;
  int points = 0;
  for (int i = 0; i <= 150; ++i, ++points) {
    const double v = 0.1 * i;
    worst = std::max(worst, rel_diff(eval_forward_combined(v, c), forward_power(v, kRef).total_w));
  }
  for (int i = 0; i <= 60; ++i, ++points) {
    const double v = 0.1 * i;
    worst = std::max(worst, rel_diff(eval_ascent_combined(v, c), ascent_power(v, kRef).total_w));
  }
  const double vd_max = descent_speed_limit(kRef);
  for (int i = 0; 0.1 * i <= vd_max; ++i, ++points) {
    const double v = 0.1 * i;
    worst = std::max(worst, rel_diff(eval_descent_combined(v, c), descent_power(v, kRef).total_w));
  }
  return {worst <= 1e-9, fmt("%d grid points, max rel err %.2e (limit 1e-9)", points, worst)};
}

Outcome branch_consistency() {
  double worst = 0;
  bool zero_exact = true;
  auto check = [&](const AirframeParamsd& p, double vf, double va, double vd) {
    worst = std::max(worst, rel_diff(total_power(Velocity3d{0, 0}, p).total_w, hover_power(p).total_w));
    worst = std::max(worst, rel_diff(total_power(Velocity3d{vf, 0}, p).total_w, forward_power(vf, p).total_w));
    // At v_perp = 0 the sgn term selects hover, which the vertical models
    // do not reduce to, so the vertical branches are compared for v > 0.
    if (va > 0) worst = std::max(worst, rel_diff(total_power(Velocity3d{0, va}, p).total_w, ascent_power(va, p).total_w));
    if (vd > 0) worst = std::max(worst, rel_diff(total_power(Velocity3d{0, -vd}, p).total_w, descent_power(vd, p).total_w));
    zero_exact = zero_exact && horizontal_increment(0.0, p).total_w == 0.0 && vertical_increment(0.0, p) == 0.0;
  };
  for (int i = 0; i <= 150; ++i) check(kRef, 0.1 * i, 0.04 * i, 0.03 * i);
  ParamGenerator gen(3);
  for (int i = 0; i < 200; ++i) {
    const AirframeParamsd p = gen.params();
    check(p, gen.forward_speed(), gen.ascent_speed(), gen.descent_speed(p));
  }
  return {worst <= 1e-12 && zero_exact,
          fmt("max rel err %.2e (limit 1e-12); dP_par(0) = dP_perp(0) = 0 exactly: %s", worst,
              zero_exact ? "yes" : "no")};
}

Outcome hover_sanity() {
  const double p = hover_power(kRef).total_w;
  const bool ok = p >= 300.0 / 2 && p <= 300.0 * 2 && p >= 317.0 / 2 && p <= 317.0 * 2;
  return {ok, fmt("model hover %.2f W vs measured ~300 W and ~317 W, band factor 2", p)};
}

Outcome fit_round_trip() {
  const CombinedParamsd truth = physical_to_combined(kRef);
  const CombinedParamsd init = scaled(truth, {{1, 1.3}, {2, 0.7}, {3, 1.25}, {4, 0.8}, {5, 1.4}});
  const FitResult clean = fit_forward(forward_grid(truth), init);
  const double recovery = max_curve_rel_error(clean.params, truth);
  const FitResult noisy = fit_forward(noisy_forward(truth, 5.0, 42), init);
  const double noisy_rmse = curve_rmse(noisy.params, truth);

  SpeedPowerSeries a, d;
  for (int i = 0; i <= 12; ++i) a.pairs.push_back({0.5 * i, eval_ascent_combined(0.5 * i, truth)});
  for (int i = 0; i <= 6; ++i) d.pairs.push_back({0.5 * i, eval_descent_combined(0.5 * i, truth)});
  const FitResult vert = fit_vertical(a, d, scaled(truth, {{6, 1.2}, {7, 0.8}, {8, 1.3}, {9, 0.7}}));
  double vert_recovery = 0;
  for (const auto& sp : a.pairs) vert_recovery = std::max(vert_recovery, rel_diff(eval_ascent_combined(sp.v, vert.params), sp.p));
  for (const auto& sp : d.pairs) vert_recovery = std::max(vert_recovery, rel_diff(eval_descent_combined(sp.v, vert.params), sp.p));

  const bool ok = clean.sse <= 1e-12 && recovery <= 1e-3 && noisy_rmse <= 2.0 && vert.sse <= 1e-12 &&
                  vert_recovery <= 1e-3 && clean.converged && noisy.converged && vert.converged;
  return {ok, fmt("forward SSE %.1e, curve err %.1e; noisy curve RMSE %.3f W (limit 2); vertical SSE %.1e, err %.1e",
                  clean.sse, recovery, noisy_rmse, vert.sse, vert_recovery)};
}

Outcome qualitative_trends() {
  std::string detail;
  bool ok = true;

  bool a_ok = true;
  for (int i = 1; i <= 600; ++i) {
    a_ok = a_ok && ascent_power(0.01 * i, kRef).total_w > ascent_power(0.01 * (i - 1), kRef).total_w;
  }
  detail += fmt("(a) %s", a_ok ? "ok" : "FAIL");

  bool b_ok = true;
  const double vd_max = descent_speed_limit(kRef);
  for (int i = 1; 0.01 * i <= vd_max; ++i) {
    b_ok = b_ok && descent_power(0.01 * i, kRef).total_w < ascent_power(0.01 * i, kRef).total_w;
  }
  detail += fmt(" (b) %s", b_ok ? "ok" : "FAIL");

  auto at = [](const std::vector<SweepRow>& rows, double v) {
    std::map<int, double> out;
    for (const auto& r : rows) {
      if (std::abs(r.v - v) < 1e-9) out[r.n] = r.power_w;
    }
    return out;
  };
  const auto fwd = rotor_sweep(default_sweep_spec(SweepRegime::Forward), kRef);
  const auto f3 = at(fwd, 3);
  bool c_ok = true;
  for (int n = 6; n <= 12; n += 2) c_ok = c_ok && f3.at(n) < f3.at(n - 2);
  const auto f12 = at(fwd, 12);
  int argmin = 4;
  for (const auto& [n, p] : f12) {
    if (p < f12.at(argmin)) argmin = n;
  }
  c_ok = c_ok && argmin > 4 && argmin < 12;
  for (int n = 6; n <= 12; n += 2) c_ok = c_ok && (n <= argmin ? f12.at(n) < f12.at(n - 2) : f12.at(n) > f12.at(n - 2));
  const auto desc = rotor_sweep(clip_to_domain(default_sweep_spec(SweepRegime::Descent), kRef), kRef);
  for (double v : clip_to_domain(default_sweep_spec(SweepRegime::Descent), kRef).speeds) {
    const auto dv = at(desc, v);
    for (int n = 6; n <= 12; n += 2) c_ok = c_ok && dv.at(n) < dv.at(n - 2);
  }
  detail += fmt(" (c) %s, forward v=12 minimum at n=%d", c_ok ? "ok" : "FAIL", argmin);

  SweepSpec fa = default_sweep_spec(SweepRegime::ForwardAscent);
  fa.rotor_counts = {4, 12};
  fa.speeds = {6, 10};
  const auto rows = rotor_sweep(fa, kRef);
  const double d6 = at(rows, 6).at(12) - at(rows, 6).at(4);
  const double d10 = at(rows, 10).at(12) - at(rows, 10).at(4);
  const bool d_ok = d6 < 0 && d10 > 0;
  detail += fmt(" (d) P12-P4 = %.2f W at 6 m/s, %+.2f W at 10 m/s", d6, d10);

  ok = a_ok && b_ok && c_ok && d_ok;
  return {ok, detail};
}

Outcome optimal_speed_grid() {
  auto grid = [](Regime r, double lo, double hi) {
    double best_v = lo, best_e = energy_per_meter(r, lo, kRef);
    for (int i = 1; lo + 0.01 * i <= hi + 1e-12; ++i) {
      const double e = energy_per_meter(r, lo + 0.01 * i, kRef);
      if (e < best_e) {
        best_e = e;
        best_v = lo + 0.01 * i;
      }
    }
    return best_v;
  };
  const OptimalSpeed f = optimal_speed(Regime::Forward, {1, 30}, kRef);
  const double fg = grid(Regime::Forward, 1, 30);
  const OptimalSpeed d = optimal_speed(Regime::Descent, {0.01, 4.7}, kRef);
  const double dg = grid(Regime::Descent, 0.01, 4.7);
  const bool ok = std::abs(f.speed - fg) <= 0.01 && std::abs(d.speed - dg) <= 0.01;
  return {ok, fmt("forward [1,30]: %.4f vs grid %.2f; descent (0,4.7]: %.4f vs grid %.2f%s", f.speed, fg, d.speed, dg,
                  d.at_boundary ? " (boundary)" : "")};
}

Outcome pipeline_determinism() {
  CliSandbox box;
  std::vector<std::string> outputs[2];
  for (int run = 0; run < 2; ++run) {
    const std::string tag = std::to_string(run);
    const std::string pairs = box.path("pairs" + tag + ".csv").string();
    const std::string fit = box.path("fit" + tag + ".txt").string();
    const std::string curve = box.path("curve" + tag + ".csv").string();
    const std::string sweep = box.path("sweep" + tag + ".csv").string();
    const CliRun i = box.run("--out " + pairs + " ingest --round --speed " + CliSandbox::fixture("forward_speed.csv") +
                             " --elec " + CliSandbox::fixture("forward_elec.csv"));
    const CliRun f = box.run("--seed 11 --out " + fit + " fit --restarts 2 --pairs " + pairs + " --curve " + curve);
    const CliRun s = box.run("--out " + sweep + " sweep --regime forward-ascent");
    if (i.exit_code != 0 || f.exit_code != 0 || s.exit_code != 0) {
      return {false, fmt("exit codes %d/%d/%d", i.exit_code, f.exit_code, s.exit_code)};
    }
    for (const auto& path : {pairs, fit, curve, sweep}) outputs[run].push_back(slurp(path));
    outputs[run].push_back(i.err + f.err + s.err);
  }
  std::size_t bytes = 0;
  for (const auto& o : outputs[0]) bytes += o.size();
  const bool same = outputs[0] == outputs[1];
  return {same && bytes > 0, fmt("ingest -> fit -> sweep twice, %zu bytes compared, %s", bytes,
                                 same ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  criterion(1, "summation identities", 1.0, summation_identities);
  criterion(2, "combined/physical equivalence", 1.0, combined_equivalence);
  criterion(3, "3-D model branch consistency", 0, branch_consistency);
  criterion(4, "hover magnitude sanity", 0, hover_sanity);
  criterion(5, "fit round trip", 10.0, fit_round_trip);
  criterion(6, "qualitative trends", 5.0, qualitative_trends);
  criterion(7, "optimal speed vs 0.01 m/s grid", 0, optimal_speed_grid);
  criterion(8, "pipeline determinism", 0, pipeline_determinism);
  std::printf("%s: %d of 8 criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
