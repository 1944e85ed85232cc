#include <cmath>
#include <vector>

#include "asqg/analysis.hpp"
#include "asqg/errors.hpp"
#include "asqg/flow.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace asqg;

namespace {

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n0 = 4;
  cfg.N = 6;
  cfg.nodes_per_bubble = 64;
  cfg.riesz = false;
  cfg.holder_pairs = 64;
  cfg.output_cadence = 0.005;
  cfg.T = 0.02;
  return cfg;
}

// Record with one bubble-center tracer whose x2 coordinate follows `phi2`.
RunRecord synthetic(int n, double alpha, double beta, const std::vector<double>& phi2) {
  const InitialData d = make_initial_data(n, n, alpha, beta);
  RunRecord r;
  r.config.alpha = alpha;
  r.config.beta_amp = beta;
  r.config.n0 = n;
  r.config.N = n;
  const Vec2 c = d.bubble(n).center;
  TracerSeries t{0, n, c, eval_field(d, c), {}};
  for (std::size_t k = 0; k < phi2.size(); ++k) {
    r.times.push_back(0.01 * static_cast<double>(k));
    t.positions.push_back({c.x1, phi2[k]});
    r.holder_estimate.push_back(1.0);
    r.riesz_to_initial.push_back(0.0);
  }
  r.tracers.push_back(t);
  return r;
}

}  // namespace

TEST_CASE("quadrant integral: empty region, containment, bubble scale invariance") {
  const double alpha = 0.5, beta = 0.1;
  const InitialData d = make_initial_data(4, 8, alpha, beta);
  const ParticleEnsemble ens = discretize(d, 32 * 32);
  CHECK(quadrant_integral(ens, {0.1, 0.1}, Region::Q) == 0.0);
  CHECK(quadrant_integral(ens, {0.1, 1e-9}, Region::R) == 0.0);
  for (int n = 5; n <= 8; ++n) {
    const Vec2 x = d.bubble(n).center;
    CHECK(quadrant_integral(ens, x, Region::R) >= quadrant_integral(ens, x, Region::Q));
    CHECK(quadrant_integral(ens, x, Region::Q) > 0.0);
  }
  std::vector<double> scaled;
  for (int m : {4, 5, 6}) {
    const InitialData one = make_initial_data(m, m, alpha, beta);
    const ParticleEnsemble e1 = discretize(one, 32 * 32);
    const Vec2 x = make_bubble(m + 2, alpha).center;
    scaled.push_back(quadrant_integral(e1, x, Region::Q) / std::pow(m, -beta));
  }
  for (double v : scaled) CHECK(close_rel(v, scaled.front(), 0.02));
}

TEST_CASE("velocity residual: zero data, axis, amplitude scaling, region swap") {
  const double alpha = 0.5;
  InitialData z = make_initial_data(4, 8, alpha, 0.1);
  z.amplitude_scale = 0.0;
  const ParticleEnsemble ez = discretize(z, 64);
  const Residual r0 = velocity_residual(ez, z.bubble(5).center);
  CHECK(r0.r1 == 0.0);
  CHECK(r0.r2 == 0.0);

  const InitialData d = make_initial_data(4, 8, alpha, 0.1);
  const ParticleEnsemble ens = discretize(d, 16 * 16);
  CHECK_THROWS_AS(velocity_residual(ens, {0.0, 1e-3}), DomainError);
  CHECK_THROWS_AS(velocity_residual(ens, {1e-3, 0.0}), DomainError);

  InitialData d10 = d;
  d10.amplitude_scale = 10.0;
  const ParticleEnsemble e10 = discretize(d10, 16 * 16);
  for (const BubbleSpec& b : d.bubbles) {
    const Residual a = velocity_residual(ens, b.center);
    const Residual c = velocity_residual(e10, b.center);
    CHECK(std::abs(a.r1 - c.r1) <= 1e-10 * std::max(a.r1, 1e-300));
    CHECK(std::abs(a.r2 - c.r2) <= 1e-10 * std::max(a.r2, 1e-300));
  }

  // |I_R - I_Q| is bounded by [theta] / 4 * log(|x|^2 / x1^2); for the normalized residual
  // that gives |r1_R - r1_Q| <= (2 + alpha) L / (1 + L), L = log(|x|^2 / x1^2).
  const ThetaNorm norm_theta = holder_norm(ens);
  for (const BubbleSpec& b : d.bubbles) {
    for (const Vec2 x : {b.center, Vec2{b.center.x1, 3.0 * b.center.x2}, Vec2{b.center.x1, 0.3 * b.center.x2}}) {
      const Residual q = velocity_residual(ens, x, norm_theta, Region::Q);
      const Residual r = velocity_residual(ens, x, norm_theta, Region::R);
      const double L = std::log(norm2(x) / (x.x1 * x.x1));
      CHECK(std::abs(r.r1 - q.r1) <= (2.0 + alpha) * L / (1.0 + L) + 1e-12);
    }
  }
}

TEST_CASE("holder norm of an ensemble") {
  const double alpha = 0.5, beta = 0.1;
  const InitialData d = make_initial_data(4, 8, alpha, beta);
  const ThetaNorm t = holder_norm(discretize(d, 16 * 16));
  CHECK(close_rel(t.linf, d.peak(4), 1e-12));
  // axis pairs of the center nodes give at least n^-beta 16^alpha times the grid offset factor
  CHECK(t.seminorm >= 0.9 * std::pow(4.0, -beta) * std::pow(16.0, alpha));
  CHECK(t.total() == t.linf + t.seminorm);
}

TEST_CASE("ratio series and witness quotient identities") {
  const double alpha = 0.5, beta = 0.1;
  for (int n : {4, 6, 8}) {
    const double x2 = make_bubble(n, alpha).center.x2;
    const RunRecord r = synthetic(n, alpha, beta, {x2, 0.5 * x2, 0.25 * x2});
    const auto ratio = ratio_series(r, 0);
    CHECK(ratio[0] == 1.0);
    CHECK(close_rel(ratio[1], 0.5, 1e-15));
    const auto w = witness_quotient(r, 0, alpha);
    CHECK(close_rel(w[0], std::pow(n, -beta) * std::pow(16.0, alpha), 1e-12));
    CHECK(close_rel(w[1] / w[0], std::pow(2.0, alpha), 1e-14));
    CHECK(close_rel(w[2] / w[0], std::pow(x2 / (0.25 * x2), alpha), 1e-14));
  }
  RunRecord bad = synthetic(4, alpha, beta, {1e-3, 0.0});
  CHECK_THROWS_AS(witness_quotient(bad, 0, alpha), NumericalError);
  bad.tracers[0].x0 = {0.0, 1e-3};
  CHECK_THROWS_AS(ratio_series(bad, 0), DomainError);

  // initial aspect ratio of any support point lies in [1/3, 3]
  const InitialData d = make_initial_data(4, 8, alpha, beta);
  const ParticleEnsemble ens = discretize(d, 32 * 32);
  for (const Vec2& p : ens.nodes) {
    CHECK(p.x2 / p.x1 >= 1.0 / 3.0);
    CHECK(p.x2 / p.x1 <= 3.0);
  }
}

TEST_CASE("T_n schedule") {
  ScheduleParams p{0.1, 1.0, 0.05};
  CHECK_THROWS_AS(tn_schedule(p, 0), DomainError);
  CHECK(close_rel(tn_schedule(p, 4).uncapped / tn_schedule(p, 8).uncapped, std::pow(2.0, 0.9), 1e-14));
  CHECK(close_rel(tn_schedule(p, 4).uncapped / tn_schedule(p, 8).uncapped, 1.866065983073615, 1e-12));
  CHECK(tn_schedule(p, 1).capped == p.T);
  for (int n = 1; n < 200; ++n) {
    const ScheduleValue a = tn_schedule(p, n), b = tn_schedule(p, n + 1);
    CHECK(b.uncapped <= a.uncapped);
    CHECK(b.capped <= a.capped);
    CHECK(a.capped <= a.uncapped);
    CHECK(a.capped > 0.0);
  }
}

TEST_CASE("schedule fit and ordering margin on a real run") {
  const RunRecord r = run(small_config());
  const double c = fit_schedule_constant(r);
  CHECK(c > 0.0);
  const double margin = ordering_margin(r, r.config.n0);
  CHECK(margin >= 0.0);
  CHECK(margin <= 1.0);
  CHECK_THROWS_AS(ordering_margin(r, 99), DomainError);
}

TEST_CASE("inflation report: stationary run and schema") {
  ExperimentConfig cfg = small_config();
  cfg.amplitude_scale = 0.0;
  cfg.tracer_spec = "centers";
  // zero data puts theta0 = 0 at the tracers; growth factors default to 1
  const RunRecord r = run(cfg);
  const InflationReport rep = inflation_report(r);
  REQUIRE(rep.tracers.size() == 3);
  for (const TracerGrowth& g : rep.tracers) CHECK(g.growth == 1.0);
  CHECK(rep.ratio_max == 1.0);

  const RunRecord live = run(small_config());
  const InflationReport lr = inflation_report(live);
  const auto j = nlohmann::json::parse(report_json(lr));
  CHECK(j["tracers"].size() == 3);
  for (const char* k : {"n", "q0", "qT", "growth"}) CHECK(j["tracers"][0].contains(k));
  CHECK(j["holder"].contains("h0"));
  CHECK(j["holder"].contains("hT"));
  CHECK(j["ratios"].contains("max"));
  CHECK(j["flags"].contains("innermost_monotone"));
  CHECK(j["flags"].contains("ordering_holds"));
  CHECK(lr.tracers.front().n == 4);
  CHECK(lr.tracers.back().n == 6);
}

TEST_CASE("inflation report monotonicity flag uses 1% slack") {
  const double alpha = 0.5;
  const double x2 = make_bubble(4, alpha).center.x2;
  // witness ~ phi2^-alpha: a 0.5% dip is tolerated, a 3% dip is not
  const double up = std::pow(1.0 - 0.005, 1.0 / alpha);
  const RunRecord ok = synthetic(4, alpha, 0.1, {x2, 0.9 * x2, 0.9 * x2 / up, 0.8 * x2, 0.8 * x2, 0.8 * x2});
  CHECK(inflation_report(tabulate(ok), alpha).innermost_monotone);
  const double up3 = std::pow(1.0 - 0.03, 1.0 / alpha);
  const RunRecord dip = synthetic(4, alpha, 0.1, {x2, 0.9 * x2, 0.9 * x2 / up3, 0.8 * x2, 0.8 * x2, 0.8 * x2});
  CHECK(!inflation_report(tabulate(dip), alpha).innermost_monotone);
}
