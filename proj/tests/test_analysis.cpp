#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "generators.hpp"
#include "uavpower/analysis.hpp"
#include "uavpower/errors.hpp"
#include "uavpower/model.hpp"

using namespace uavpower;
using testing::rel_diff;

namespace {

const AirframeParamsd kRef = reference_params();

// Brute-force minimizer on a 0.01 m/s grid.
double grid_minimizer(Regime regime, double lo, double hi) {
  double best_v = lo;
  double best_e = energy_per_meter(regime, lo, kRef);
  for (int i = 1; lo + 0.01 * i <= hi + 1e-12; ++i) {
    const double v = lo + 0.01 * i;
    const double e = energy_per_meter(regime, v, kRef);
    if (e < best_e) {
      best_e = e;
      best_v = v;
    }
  }
  return best_v;
}

std::map<int, double> powers_at(const std::vector<SweepRow>& rows, double v) {
  std::map<int, double> out;
  for (const auto& r : rows) {
    if (std::abs(r.v - v) < 1e-12) out[r.n] = r.power_w;
  }
  return out;
}

}  // namespace

TEST_CASE("energy per metre") {
  CHECK(energy_per_meter(Regime::Forward, 10, kRef) == doctest::Approx(19.899328084913027).epsilon(1e-12));
  CHECK(energy_per_meter(Regime::Forward, 1, kRef) > energy_per_meter(Regime::Forward, 10, kRef));
  for (Regime r : {Regime::Forward, Regime::Ascent, Regime::Descent}) {
    const double v = 2.5;
    CHECK(energy_per_meter(r, v, kRef) * v == doctest::Approx(regime_power(r, v, kRef).total_w).epsilon(1e-15));
  }
  CHECK_THROWS_AS(energy_per_meter(Regime::Forward, 0, kRef), DomainError);
  CHECK_THROWS_AS(energy_per_meter(Regime::Hover, 1, kRef), DomainError);
  CHECK_THROWS_AS(energy_per_meter(Regime::Descent, 6, kRef), DomainError);
}

TEST_CASE("optimal speed: forward safe range ends on the boundary") {
  const OptimalSpeed o = optimal_speed(Regime::Forward, {1, 15}, kRef);
  CHECK(o.at_boundary);
  CHECK(o.speed == doctest::Approx(15));
  CHECK(o.energy_per_meter == doctest::Approx(energy_per_meter(Regime::Forward, 15, kRef)));
}

TEST_CASE("optimal speed: forward extended range is interior") {
  const OptimalSpeed o = optimal_speed(Regime::Forward, {1, 30}, kRef);
  CHECK_FALSE(o.at_boundary);
  CHECK(o.speed > 15);
  CHECK(o.speed < 30);
  CHECK(std::abs(o.speed - grid_minimizer(Regime::Forward, 1, 30)) <= 0.01);
  // Stationary point: energy rises on both sides.
  CHECK(energy_per_meter(Regime::Forward, o.speed - 0.05, kRef) > o.energy_per_meter);
  CHECK(energy_per_meter(Regime::Forward, o.speed + 0.05, kRef) > o.energy_per_meter);
}

TEST_CASE("optimal speed: descent is fastest allowed") {
  const OptimalSpeed o = optimal_speed(Regime::Descent, {0.01, 4.7}, kRef);
  CHECK(o.at_boundary);
  CHECK(o.speed == doctest::Approx(4.7));
  CHECK(std::abs(o.speed - grid_minimizer(Regime::Descent, 0.01, 4.7)) <= 0.01);
}

TEST_CASE("optimal speed: invalid ranges") {
  CHECK_THROWS_AS(optimal_speed(Regime::Forward, {0, 10}, kRef), DomainError);
  CHECK_THROWS_AS(optimal_speed(Regime::Forward, {5, 5}, kRef), DomainError);
  CHECK_THROWS_AS(optimal_speed(Regime::Forward, {6, 5}, kRef), DomainError);
  CHECK_THROWS_AS(optimal_speed(Regime::Descent, {1, 6}, kRef), DomainError);
  CHECK_THROWS_AS(optimal_speed(Regime::Hover, {1, 2}, kRef), DomainError);
}

TEST_CASE("optimal speed matches the grid on random airframes") {
  testing::ParamGenerator gen(2024);
  for (int i = 0; i < 10; ++i) {
    const AirframeParamsd p = gen.params();
    const OptimalSpeed o = optimal_speed(Regime::Forward, {1, 25}, p);
    double best_v = 1;
    double best_e = energy_per_meter(Regime::Forward, 1, p);
    for (int k = 1; k <= 2400; ++k) {
      const double v = 1 + 0.01 * k;
      const double e = energy_per_meter(Regime::Forward, v, p);
      if (e < best_e) {
        best_e = e;
        best_v = v;
      }
    }
    CHECK(std::abs(o.speed - best_v) <= 0.01);
    CHECK(o.energy_per_meter <= best_e * (1 + 1e-12));
  }
}

TEST_CASE("sweep regime names") {
  for (SweepRegime r : {SweepRegime::Forward, SweepRegime::Ascent, SweepRegime::Descent, SweepRegime::ForwardAscent,
                        SweepRegime::ForwardDescent}) {
    CHECK(parse_sweep_regime(to_string(r)) == r);
  }
  CHECK(std::string(to_string(SweepRegime::ForwardAscent)) == "forward-ascent");
  CHECK_THROWS_AS(parse_sweep_regime("sideways"), InvalidParams);
}

TEST_CASE("sweep spec validation") {
  SweepSpec s = default_sweep_spec(SweepRegime::Forward);
  CHECK_NOTHROW(s.validate());
  s.rotor_counts = {4, 5};
  CHECK_THROWS_AS(s.validate(), InvalidParams);
  s.rotor_counts = {2};
  CHECK_THROWS_AS(s.validate(), InvalidParams);
  s = default_sweep_spec(SweepRegime::ForwardAscent);
  s.ratio = 0;
  CHECK_THROWS_AS(s.validate(), InvalidParams);
  s = default_sweep_spec(SweepRegime::Forward);
  s.speeds = {-1};
  CHECK_THROWS_AS(s.validate(), InvalidParams);
}

TEST_CASE("default forward sweep has 80 rows") {
  const auto rows = rotor_sweep(default_sweep_spec(SweepRegime::Forward), kRef);
  CHECK(rows.size() == 80);
  CHECK(rows.front().n == 4);
  CHECK(rows.back().n == 12);
  CHECK(rows.back().v == 15);
}

TEST_CASE("sweep at the base rotor count reproduces the model") {
  SweepSpec s;
  s.rotor_counts = {4};
  s.regime = SweepRegime::Forward;
  s.speeds = {0, 3, 10};
  const auto rows = rotor_sweep(s, kRef);
  for (const auto& r : rows) CHECK(r.power_w == forward_power(r.v, kRef).total_w);
}

TEST_CASE("sweep trends") {
  const auto fwd = rotor_sweep(default_sweep_spec(SweepRegime::Forward), kRef);
  const auto at3 = powers_at(fwd, 3);
  for (int n = 6; n <= 12; n += 2) CHECK(at3.at(n) < at3.at(n - 2));

  const auto at12 = powers_at(fwd, 12);
  int argmin = 4;
  for (const auto& [n, p] : at12) {
    if (p < at12.at(argmin)) argmin = n;
  }
  CHECK(argmin > 4);
  CHECK(argmin < 12);
  for (int n = 6; n <= argmin; n += 2) CHECK(at12.at(n) < at12.at(n - 2));
  for (int n = argmin + 2; n <= 12; n += 2) CHECK(at12.at(n) > at12.at(n - 2));

  const auto desc = rotor_sweep(clip_to_domain(default_sweep_spec(SweepRegime::Descent), kRef), kRef);
  for (double v = 0; v <= 2.5; v += 0.5) {
    const auto at = powers_at(desc, v);
    for (int n = 6; n <= 12; n += 2) CHECK(at.at(n) < at.at(n - 2));
  }

  // Forward-ascent at ratio 2.5: more rotors help below ~8 m/s, hurt above.
  const auto fa = rotor_sweep(default_sweep_spec(SweepRegime::ForwardAscent), kRef);
  CHECK(powers_at(fa, 6).at(12) - powers_at(fa, 6).at(4) < 0);
  CHECK(powers_at(fa, 10).at(12) - powers_at(fa, 10).at(4) > 0);
}

TEST_CASE("default descent grids are clipped to the common domain") {
  // n = 12 caps descent at 2.75 m/s.
  const SweepSpec d = clip_to_domain(default_sweep_spec(SweepRegime::Descent), kRef);
  CHECK(d.speeds.back() == 2.5);
  CHECK(d.speeds.size() == 6);
  CHECK_NOTHROW(rotor_sweep(d, kRef));
  CHECK_THROWS_AS(rotor_sweep(default_sweep_spec(SweepRegime::Descent), kRef), DomainError);

  const SweepSpec fd = clip_to_domain(default_sweep_spec(SweepRegime::ForwardDescent), kRef);
  CHECK(fd.speeds.back() == 14);
  CHECK_NOTHROW(rotor_sweep(fd, kRef));

  const SweepSpec f = clip_to_domain(default_sweep_spec(SweepRegime::Forward), kRef);
  CHECK(f.speeds.size() == 16);
}

TEST_CASE("mixed velocity splits the total speed") {
  const Velocity3d a = mixed_velocity(SweepRegime::ForwardAscent, 10, 2.5);
  CHECK(a.total() == doctest::Approx(10).epsilon(1e-15));
  CHECK(a.v_par / a.v_perp == doctest::Approx(2.5).epsilon(1e-15));
  const Velocity3d d = mixed_velocity(SweepRegime::ForwardDescent, 10, 5);
  CHECK(d.v_perp < 0);
  CHECK(d.v_par / -d.v_perp == doctest::Approx(5).epsilon(1e-15));
}

TEST_CASE("mixed descent outside the descent domain") {
  SweepSpec s;
  s.rotor_counts = {4};
  s.regime = SweepRegime::ForwardDescent;
  s.ratio = 1;
  s.speeds = {10};
  CHECK_THROWS_AS(rotor_sweep(s, kRef), DomainError);
}

TEST_CASE("mission energy") {
  const std::vector<MissionSegment> hover{{{0, 0}, 10}};
  CHECK(mission_energy(hover, kRef).energy_j == doctest::Approx(2041.9241120872914).epsilon(1e-12));

  const std::vector<MissionSegment> cruise{{{10, 0}, 5}};
  CHECK(mission_energy(cruise, kRef).energy_j == doctest::Approx(994.9664042456513).epsilon(1e-12));

  const std::vector<MissionSegment> twice{{{3, 1}, 4}, {{3, 1}, 4}};
  const std::vector<MissionSegment> once{{{3, 1}, 8}};
  CHECK(mission_energy(twice, kRef).energy_j == doctest::Approx(mission_energy(once, kRef).energy_j).epsilon(1e-15));

  std::vector<MissionSegment> all = hover;
  all.insert(all.end(), cruise.begin(), cruise.end());
  const MissionReport r = mission_energy(all, kRef);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[1].segment == 1);
  CHECK(r.energy_j == doctest::Approx(2041.9241120872914 + 994.9664042456513).epsilon(1e-15));
}

TEST_CASE("mission errors name the segment") {
  const std::vector<MissionSegment> bad{{{0, 0}, 10}, {{0, -6}, 5}};
  try {
    mission_energy(bad, kRef);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).rfind("segment 1:", 0) == 0);
  }
  const std::vector<MissionSegment> zero{{{0, 0}, 0}};
  CHECK_THROWS_AS(mission_energy(zero, kRef), DomainError);
}

TEST_CASE("sweep and mission CSV") {
  SweepSpec s;
  s.rotor_counts = {4};
  s.speeds = {0};
  std::ostringstream out;
  write_sweep_csv(out, rotor_sweep(s, kRef));
  CHECK(out.str() == "n,v_mps,power_w\n4,0,204.192411209\n");

  std::istringstream in("v_par,v_perp,duration_s\n0,0,10\n10,0,5\n");
  const auto segs = read_mission_csv(in);
  REQUIRE(segs.size() == 2);
  std::ostringstream mout;
  write_mission_csv(mout, mission_energy(segs, kRef));
  CHECK(mout.str().rfind("segment,v_par,v_perp,duration_s,power_w,energy_j\n0,0,0,10,204.192411209,2041.92411209\n",
                         0) == 0);

  std::istringstream bad("v_par,v_perp,duration_s\n0,0,-1\n");
  CHECK_THROWS_AS(read_mission_csv(bad), ParseError);
}
