#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "asqg/errors.hpp"
#include "asqg/flow.hpp"
#include "doctest.h"

using namespace asqg;

namespace {

// Two bubbles, coarse grid, no field diagnostics: cheap enough for step studies.
ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n0 = 4;
  cfg.N = 5;
  cfg.nodes_per_bubble = 64;
  cfg.riesz = false;
  cfg.holder_pairs = 64;
  cfg.output_cadence = 0.01;
  return cfg;
}

FlowState integrate(FlowState s, double T, long steps, double sign = 1.0) {
  const double dt = T / static_cast<double>(steps);
  for (long k = 0; k < steps; ++k) s = step_rk4(s, dt, sign);
  return s;
}

double max_node_gap(const FlowState& a, const FlowState& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.ensemble.size(); ++j) m = std::max(m, norm(a.ensemble.nodes[j] - b.ensemble.nodes[j]));
  return m;
}

double median_nn_distance(const ParticleEnsemble& ens) {
  std::vector<double> d(ens.size(), INFINITY);
  for (std::size_t i = 0; i < ens.size(); ++i)
    for (std::size_t j = 0; j < ens.size(); ++j)
      if (i != j && ens.bubble[i] == ens.bubble[j]) d[i] = std::min(d[i], norm(ens.nodes[i] - ens.nodes[j]) / ens.spacing[i]);
  std::nth_element(d.begin(), d.begin() + static_cast<long>(d.size() / 2), d.end());
  return d[d.size() / 2];
}

// Median of |J - 1| where J is the area of the parallelogram spanned by each node's
// right and upper grid neighbours, relative to its initial value.
double median_area_drift(const ParticleEnsemble& e0, const ParticleEnsemble& e1) {
  std::map<std::tuple<int, long, long>, std::size_t> index;
  auto key = [&](std::size_t j) {
    const double h = e0.spacing[j];
    return std::tuple<int, long, long>{e0.bubble[j], std::lround(e0.nodes[j].x1 / h - 0.5),
                                       std::lround(e0.nodes[j].x2 / h - 0.5)};
  };
  for (std::size_t j = 0; j < e0.size(); ++j) index[key(j)] = j;
  auto cross = [](Vec2 a, Vec2 b) { return a.x1 * b.x2 - a.x2 * b.x1; };
  std::vector<double> drift;
  for (std::size_t j = 0; j < e0.size(); ++j) {
    auto [b, i1, i2] = key(j);
    const auto r = index.find({b, i1 + 1, i2});
    const auto u = index.find({b, i1, i2 + 1});
    if (r == index.end() || u == index.end()) continue;
    const double a0 = cross(e0.nodes[r->second] - e0.nodes[j], e0.nodes[u->second] - e0.nodes[j]);
    const double a1 = cross(e1.nodes[r->second] - e1.nodes[j], e1.nodes[u->second] - e1.nodes[j]);
    drift.push_back(std::abs(a1 / a0 - 1.0));
  }
  std::nth_element(drift.begin(), drift.begin() + static_cast<long>(drift.size() / 2), drift.end());
  return drift[drift.size() / 2];
}

}  // namespace

TEST_CASE("tracer construction") {
  const Tracer t = make_tracer({1e-3, 2e-3}, 4, 0.5);
  REQUIRE(t.path.size() == 1);
  CHECK(t.path[0].t == 0.0);
  CHECK(t.path[0].x == Vec2{1e-3, 2e-3});
  CHECK(t.position() == Vec2{1e-3, 2e-3});

  const InitialData d = make_initial_data(4, 6, 0.5, 0.1);
  const auto tr = make_tracers("centers, mirrors, axis, @0.001:0.002", d);
  CHECK(tr.size() == 3 + 9 + 3 + 1);
  CHECK(*tr[0].bubble_index == 4);
  CHECK(tr[0].theta0 == eval_field(d, d.bubble(4).center));
  CHECK(tr[3].x0 == reflect_tilde(tr[0].x0));
  CHECK_THROWS_AS(make_tracers("bogus", d), ConfigError);
  CHECK_THROWS_AS(make_tracers("@1", d), ConfigError);
}

TEST_CASE("step_rk4: zero data is stationary, values and weights untouched") {
  ExperimentConfig cfg = small_config();
  cfg.amplitude_scale = 0.0;
  const FlowState s0 = initial_state(cfg);
  const FlowState s1 = step_rk4(s0, 1e-3);
  CHECK(s1.t == 1e-3);
  CHECK(s1.ensemble.nodes == s0.ensemble.nodes);
  CHECK(s1.tracers[0].path.size() == 2);

  const FlowState a = initial_state(small_config());
  const FlowState b = integrate(a, 0.01, 10);
  CHECK(b.ensemble.values == a.ensemble.values);
  CHECK(b.ensemble.weights == a.ensemble.weights);
  CHECK(b.ensemble.nodes != a.ensemble.nodes);
  for (const Tracer& t : b.tracers)
    for (std::size_t k = 1; k < t.path.size(); ++k) CHECK(t.path[k].t > t.path[k - 1].t);
}

TEST_CASE("step_rk4: observed order under dt halving") {
  const FlowState s = initial_state(small_config());
  const double T = 0.05;
  const FlowState a = integrate(s, T, 25);
  const FlowState b = integrate(s, T, 50);
  const FlowState c = integrate(s, T, 100);
  const double order = std::log2(max_node_gap(a, b) / max_node_gap(b, c));
  MESSAGE("observed order " << order);
  CHECK(order >= 3.5);
}

TEST_CASE("axis tracer stays on the axis; mirror tracers stay mirrored") {
  ExperimentConfig cfg = small_config();
  cfg.tracer_spec = "axis,centers,mirrors";
  FlowState s = initial_state(cfg);
  const double T = 0.05;
  s = integrate(s, T, 100);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(s.tracers[i].position().x1) <= 1e-10);
  // tracers 2..3 are the centers, 4..15 their mirrors in groups of three per source
  const std::size_t n_src = 4;
  for (std::size_t i = 0; i < n_src; ++i) {
    const Vec2 x = s.tracers[i].position();
    const Vec2 tl = s.tracers[n_src + 3 * i].position();
    const Vec2 br = s.tracers[n_src + 3 * i + 1].position();
    const Vec2 ng = s.tracers[n_src + 3 * i + 2].position();
    const double tol = 1e-8 * T * std::max(norm(x), 1e-300);
    CHECK(norm(tl - reflect_tilde(x)) <= tol);
    CHECK(norm(br - reflect_bar(x)) <= tol);
    CHECK(norm(ng + x) <= tol);
  }
}

TEST_CASE("run: T = 0, determinism, cadence") {
  ExperimentConfig cfg = small_config();
  cfg.T = 0.0;
  const RunRecord r0 = run(cfg);
  CHECK(r0.times.size() == 1);
  CHECK(r0.times[0] == 0.0);
  CHECK(r0.steps == 0);

  cfg = small_config();
  cfg.T = 0.02;
  cfg.output_cadence = 0.005;
  cfg.riesz = true;
  cfg.riesz_cells = 8;
  const RunRecord a = run(cfg);
  const RunRecord b = run(cfg);
  CHECK(a.times == b.times);
  CHECK(a.holder_estimate == b.holder_estimate);
  CHECK(a.riesz_to_initial == b.riesz_to_initial);
  for (std::size_t i = 0; i < a.tracers.size(); ++i) CHECK(a.tracers[i].positions == b.tracers[i].positions);
  CHECK(a.times.front() == 0.0);
  CHECK(std::abs(a.times.back() - cfg.T) < 1e-12);
  CHECK(a.times.size() >= 5);
  CHECK(a.riesz_to_initial.front() == 0.0);
  CHECK(a.axis_crossings == 0);
  CHECK(!a.truncated);
}

TEST_CASE("run: wall budget truncates gracefully") {
  ExperimentConfig cfg = small_config();
  cfg.T = 10.0;
  cfg.dt_max = 1e-4;
  cfg.wall_budget = 0.2;
  const RunRecord r = run(cfg);
  CHECK(r.truncated);
  CHECK(r.times.back() < cfg.T);
  CHECK(r.times.size() == r.holder_estimate.size());
}

TEST_CASE("run: support containment") {
  ExperimentConfig cfg = small_config();
  cfg.T = 0.05;
  const FlowState s0 = initial_state(cfg);
  double r0 = 0.0;
  for (const Vec2& p : s0.ensemble.nodes) r0 = std::max(r0, norm(p));
  // u vanishes at the origin, so |u(x)| <= C |x| (1 - log|x|) with the fitted modulus
  const ModulusFit fit = log_lipschitz_modulus(s0.ensemble, 1000);
  const double rate = fit.c_sup * (1.0 - std::log(s0.ensemble.h_min));
  FlowState s = s0;
  const double dt = stable_dt(cfg, s0);
  const long steps = static_cast<long>(std::ceil(cfg.T / dt));
  s = integrate(s, cfg.T, steps);
  double rT = 0.0;
  for (const Vec2& p : s.ensemble.nodes) rT = std::max(rT, norm(p));
  MESSAGE("support growth " << rT / r0 << " bound " << std::exp(rate * cfg.T));
  CHECK(rT <= r0 * std::exp(rate * cfg.T));
}

TEST_CASE("area consistency: weights and local area elements") {
  ExperimentConfig cfg = small_config();
  cfg.nodes_per_bubble = 256;
  const FlowState s0 = initial_state(cfg);
  const FlowState s = integrate(s0, 0.05, 50);
  double w0 = 0.0, w1 = 0.0;
  for (double w : s0.ensemble.weights) w0 += w;
  for (double w : s.ensemble.weights) w1 += w;
  CHECK(w0 == w1);
  // Spacing itself follows the hyperbolic strain; only the area element is conserved.
  const double m0 = median_nn_distance(s0.ensemble), m1 = median_nn_distance(s.ensemble);
  const double area = median_area_drift(s0.ensemble, s.ensemble);
  MESSAGE("median nearest-neighbour spacing " << m0 << " -> " << m1 << ", median area drift " << area);
  CHECK(area <= 0.05);
}

TEST_CASE("reverse_check") {
  ExperimentConfig cfg = small_config();
  cfg.T = 0.0;
  CHECK(reverse_check(cfg) == 0.0);
  cfg.T = 0.05;
  const double dt = 1e-3;
  const double e1 = reverse_check(cfg, dt);
  const double e2 = reverse_check(cfg, dt / 2.0);
  MESSAGE("return error " << e1 << " -> " << e2);
  CHECK(e1 <= 10.0 * std::pow(dt, 4) * (cfg.T / dt));
  CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("integration failure carries the state") {
  FlowState s = initial_state(small_config());
  s.ensemble.nodes[0] = {NAN, 1e-3};
  try {
    (void)step_rk4(s, 1e-3);
    FAIL("expected IntegrationFailure");
  } catch (const IntegrationFailure& e) {
    CHECK(e.state().ensemble.size() == s.ensemble.size());
  }
}

TEST_CASE("twin runs") {
  ExperimentConfig cfg = small_config();
  cfg.T = 0.02;
  cfg.output_cadence = 0.005;
  cfg.riesz_cells = 8;
  const TwinRunSeries z = twin_run_distance(cfg, 0.0);
  for (double d : z.distance) CHECK(d == 0.0);

  const TwinRunSeries a = twin_run_distance(cfg, 0.02);
  const TwinRunSeries b = twin_run_distance(cfg, 0.01);
  REQUIRE(a.distance.size() == a.times.size());
  CHECK(a.distance.front() > 0.0);
  CHECK(std::abs(b.distance.front() / a.distance.front() - 0.5) <= 0.05);
  double c_fit = 0.0;
  for (std::size_t k = 1; k < a.times.size(); ++k)
    c_fit = std::max(c_fit, std::log(a.distance[k] / a.distance.front()) / a.times[k]);
  MESSAGE("fitted growth rate " << c_fit);
  CHECK(std::isfinite(c_fit));
}
