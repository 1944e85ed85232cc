#include "asqg/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "asqg/analysis.hpp"
#include "asqg/errors.hpp"
#include "asqg/kernels.hpp"

namespace asqg {

Tracer make_tracer(Vec2 x0, std::optional<int> bubble, double theta0) {
  Tracer t;
  t.x0 = x0;
  t.path.push_back({0.0, x0});
  t.bubble_index = bubble;
  t.theta0 = theta0;
  return t;
}

namespace {

std::vector<Vec2> positions_of(const FlowState& s) {
  std::vector<Vec2> p = s.ensemble.nodes;
  for (const Tracer& t : s.tracers) p.push_back(t.position());
  return p;
}

std::vector<Vec2> stage_velocity(const ParticleEnsemble& base, const std::vector<Vec2>& positions,
                                 double sign) {
  ParticleEnsemble moved = base;
  std::copy_n(positions.begin(), static_cast<std::ptrdiff_t>(base.size()), moved.nodes.begin());
  return velocity_batch(moved, positions, sign);
}

std::vector<Vec2> axpy(const std::vector<Vec2>& x, double a, const std::vector<Vec2>& v) {
  std::vector<Vec2> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * v[i];
  return out;
}

}  // namespace

FlowState step_rk4(const FlowState& state, double dt, double sign) {
  if (!(dt > 0.0)) throw DomainError("step_rk4: dt must be > 0");
  const std::vector<Vec2> p0 = positions_of(state);
  const ParticleEnsemble& ens = state.ensemble;

  const auto k1 = stage_velocity(ens, p0, sign);
  const auto k2 = stage_velocity(ens, axpy(p0, 0.5 * dt, k1), sign);
  const auto k3 = stage_velocity(ens, axpy(p0, 0.5 * dt, k2), sign);
  const auto k4 = stage_velocity(ens, axpy(p0, dt, k3), sign);

  FlowState next = state;
  next.t = state.t + dt;
  const std::size_t n = ens.size();
  for (std::size_t i = 0; i < p0.size(); ++i) {
    Vec2 x = p0[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!is_finite(x)) {
      std::ostringstream msg;
      msg << "step_rk4: non-finite position for " << (i < n ? "node " : "tracer ") << (i < n ? i : i - n)
          << " at t = " << state.t;
      throw IntegrationFailure(msg.str(), state);
    }
    if (i < n) {
      if (x.x1 <= 0.0) {
        x.x1 = kAxisClamp;
        ++next.axis_crossings;
      }
      if (x.x2 <= 0.0) {
        x.x2 = kAxisClamp;
        ++next.axis_crossings;
      }
      next.ensemble.nodes[i] = x;
    } else {
      next.tracers[i - n].path.push_back({next.t, x});
    }
  }
  return next;
}

InitialData make_data(const ExperimentConfig& cfg) {
  InitialData d = make_initial_data(cfg.n0, cfg.N, cfg.alpha, cfg.beta_amp);
  d.amplitude_scale = cfg.amplitude_scale;
  return d;
}

std::vector<Tracer> make_tracers(const std::string& spec, const InitialData& data) {
  std::vector<Tracer> out;
  std::istringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token.erase(0, token.find_first_not_of(' '));
    token.erase(token.find_last_not_of(' ') + 1);
    if (token == "centers") {
      for (const BubbleSpec& b : data.bubbles) out.push_back(make_tracer(b.center, b.n, eval_field(data, b.center)));
    } else if (token == "axis") {
      for (const BubbleSpec& b : data.bubbles) out.push_back(make_tracer({0.0, b.center.x2}));
    } else if (token == "mirrors") {
      const std::size_t m = out.size();
      for (std::size_t i = 0; i < m; ++i) {
        const Vec2 x = out[i].x0;
        for (Vec2 y : {reflect_tilde(x), reflect_bar(x), -x}) out.push_back(make_tracer(y, std::nullopt, eval_field(data, y)));
      }
    } else if (!token.empty() && token.front() == '@') {
      const auto colon = token.find(':');
      if (colon == std::string::npos) throw ConfigError("tracers.spec", "expected @x1:x2, got '" + token + "'");
      try {
        const Vec2 x{std::stod(token.substr(1, colon - 1)), std::stod(token.substr(colon + 1))};
        out.push_back(make_tracer(x, std::nullopt, eval_field(data, x)));
      } catch (const std::logic_error&) {
        throw ConfigError("tracers.spec", "malformed point '" + token + "'");
      }
    } else {
      throw ConfigError("tracers.spec", "unknown token '" + token + "'");
    }
  }
  return out;
}

FlowState initial_state(const ExperimentConfig& cfg, const InitialData& data) {
  FlowState s;
  s.ensemble = discretize(data, cfg.nodes_per_bubble, cfg.eps_kappa);
  s.tracers = make_tracers(cfg.tracer_spec, data);
  return s;
}

FlowState initial_state(const ExperimentConfig& cfg) { return initial_state(cfg, make_data(cfg)); }

double stable_dt(const ExperimentConfig& cfg, const FlowState& state) {
  const ParticleEnsemble& ens = state.ensemble;
  const std::vector<Vec2> u = velocity_batch(ens, ens.nodes);
  double dt = cfg.dt_max;
  for (std::size_t j = 0; j < ens.size(); ++j) {
    const double speed = norm(u[j]);
    if (speed > 0.0) dt = std::min(dt, cfg.cfl * ens.spacing[j] / speed);
  }
  return dt;
}

RunRecord run(const ExperimentConfig& cfg, const RunCallbacks& callbacks, std::optional<double> forced_dt) {
  return run(cfg, make_data(cfg), callbacks, forced_dt);
}

RunRecord run(const ExperimentConfig& cfg, const InitialData& data, const RunCallbacks& callbacks,
              std::optional<double> forced_dt) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  };

  FlowState state = initial_state(cfg, data);
  RunRecord record;
  record.config = cfg;
  for (std::size_t i = 0; i < state.tracers.size(); ++i) {
    const Tracer& t = state.tracers[i];
    record.tracers.push_back({static_cast<int>(i), t.bubble_index, t.x0, t.theta0, {}});
  }

  double dt = forced_dt ? *forced_dt : stable_dt(cfg, state);
  long steps = 0;
  if (cfg.T > 0.0) {
    steps = std::max(1L, static_cast<long>(std::ceil(cfg.T / dt - 1e-9)));
    dt = cfg.T / static_cast<double>(steps);
  }
  record.dt = dt;
  record.steps = steps;
  const long every = std::max(1L, std::lround(cfg.output_cadence / dt));

  const ScalarField initial_rec = cfg.riesz ? reconstruct_field(state.ensemble) : zero_field();
  auto emit = [&](const FlowState& s) {
    record.times.push_back(s.t);
    for (std::size_t i = 0; i < s.tracers.size(); ++i) record.tracers[i].positions.push_back(s.tracers[i].position());
    record.holder_estimate.push_back(
        ensemble_holder_estimate(s.ensemble, cfg.alpha, cfg.holder_pairs, cfg.seed).value);
    record.riesz_to_initial.push_back(
        cfg.riesz ? riesz_distance(reconstruct_field(s.ensemble), initial_rec, cfg.alpha, {cfg.riesz_cells})
                  : std::numeric_limits<double>::quiet_NaN());
    if (callbacks.on_output) callbacks.on_output(s);
  };

  emit(state);
  for (long k = 1; k <= steps; ++k) {
    state = step_rk4(state, dt);
    const bool budget_hit = cfg.wall_budget > 0.0 && elapsed() > cfg.wall_budget && k < steps;
    if (k % every == 0 || k == steps || budget_hit) emit(state);
    if (budget_hit) {
      record.truncated = true;
      break;
    }
  }
  record.axis_crossings = state.axis_crossings;
  record.wall_seconds = elapsed();
  return record;
}

double reverse_check(const ExperimentConfig& cfg, std::optional<double> forced_dt) {
  cfg.validate();
  const FlowState start = initial_state(cfg);
  if (cfg.T <= 0.0) return 0.0;
  double dt = forced_dt ? *forced_dt : stable_dt(cfg, start);
  const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.T / dt - 1e-9)));
  dt = cfg.T / static_cast<double>(steps);

  FlowState s = start;
  for (long k = 0; k < steps; ++k) s = step_rk4(s, dt, 1.0);
  for (long k = 0; k < steps; ++k) s = step_rk4(s, dt, -1.0);

  double err = 0.0;
  for (std::size_t j = 0; j < s.ensemble.size(); ++j)
    err = std::max(err, norm(s.ensemble.nodes[j] - start.ensemble.nodes[j]));
  return err;
}

namespace {

// Nodes of one bubble bucketed on a uniform grid of cell size = largest mollifier radius.
struct NodeGroup {
  Vec2 lo;
  double cell = 0.0;
  int cols = 0, rows = 0;
  std::vector<std::vector<std::size_t>> buckets;
  double radius = 0.0;
  Vec2 hi;
};

}  // namespace

ScalarField reconstruct_field(const ParticleEnsemble& ens, double width_factor) {
  if (!(width_factor > 0.0)) throw DomainError("reconstruct_field: width_factor must be > 0");
  struct Data {
    std::vector<Vec2> p;
    std::vector<double> q, nu;
    std::vector<NodeGroup> groups;
  };
  auto data = std::make_shared<Data>();
  data->p = ens.nodes;
  for (std::size_t j = 0; j < ens.size(); ++j) {
    data->q.push_back(ens.weights[j] * ens.values[j]);
    data->nu.push_back(width_factor * ens.spacing[j]);
  }

  std::vector<int> tags = ens.bubble;
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  ScalarField f;
  f.odd_odd = true;
  for (int tag : tags) {
    NodeGroup g;
    g.lo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    g.hi = {0.0, 0.0};
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < ens.size(); ++j) {
      if (ens.bubble[j] != tag) continue;
      members.push_back(j);
      g.lo = {std::min(g.lo.x1, ens.nodes[j].x1), std::min(g.lo.x2, ens.nodes[j].x2)};
      g.hi = {std::max(g.hi.x1, ens.nodes[j].x1), std::max(g.hi.x2, ens.nodes[j].x2)};
      g.radius = std::max(g.radius, data->nu[j]);
    }
    g.cell = g.radius;
    g.cols = static_cast<int>((g.hi.x1 - g.lo.x1) / g.cell) + 1;
    g.rows = static_cast<int>((g.hi.x2 - g.lo.x2) / g.cell) + 1;
    g.buckets.resize(static_cast<std::size_t>(g.cols) * static_cast<std::size_t>(g.rows));
    for (std::size_t j : members) {
      const int c = std::min(g.cols - 1, static_cast<int>((ens.nodes[j].x1 - g.lo.x1) / g.cell));
      const int r = std::min(g.rows - 1, static_cast<int>((ens.nodes[j].x2 - g.lo.x2) / g.cell));
      g.buckets[static_cast<std::size_t>(r) * g.cols + c].push_back(j);
    }
    // square patch covering the group's support, clipped to the closed quadrant
    const Vec2 lo{std::max(0.0, g.lo.x1 - g.radius), std::max(0.0, g.lo.x2 - g.radius)};
    const double side = std::max(g.hi.x1 + g.radius - lo.x1, g.hi.x2 + g.radius - lo.x2);
    f.patches.push_back({lo, side});
    f.support_radius = std::max(f.support_radius, norm(g.hi) + g.radius);
    data->groups.push_back(std::move(g));
  }
  f.patches = merge_patches(std::move(f.patches));

  // g(z) = sum_j q_j phi_{nu_j}(z - p_j) over first-quadrant nodes; the odd-odd field
  // is g(x) - g(~x) - g(_x) + g(-x).
  auto g_sum = [data](Vec2 z) {
    double s = 0.0;
    for (const NodeGroup& g : data->groups) {
      if (z.x1 < g.lo.x1 - g.radius || z.x1 > g.hi.x1 + g.radius || z.x2 < g.lo.x2 - g.radius ||
          z.x2 > g.hi.x2 + g.radius)
        continue;
      const int c0 = static_cast<int>(std::floor((z.x1 - g.lo.x1) / g.cell));
      const int r0 = static_cast<int>(std::floor((z.x2 - g.lo.x2) / g.cell));
      for (int r = std::max(0, r0 - 1); r <= std::min(g.rows - 1, r0 + 1); ++r)
        for (int c = std::max(0, c0 - 1); c <= std::min(g.cols - 1, c0 + 1); ++c)
          for (std::size_t j : g.buckets[static_cast<std::size_t>(r) * g.cols + c])
            s += data->q[j] * eval_mollifier(data->nu[j], z - data->p[j]);
    }
    return s;
  };
  f.evaluator = [g_sum](Vec2 x) { return g_sum(x) - g_sum(reflect_tilde(x)) - g_sum(reflect_bar(x)) + g_sum(-x); };
  return f;
}

TwinRunSeries twin_run_distance(const ExperimentConfig& cfg, double perturbation_size) {
  if (!(perturbation_size >= 0.0)) throw DomainError("twin_run_distance: perturbation must be >= 0");
  ExperimentConfig quiet = cfg;
  quiet.riesz = false;
  const InitialData base = make_data(cfg);
  InitialData twin = base;
  twin.bubbles.front().amplitude *= 1.0 + perturbation_size;

  const double dt = stable_dt(cfg, initial_state(cfg, base));
  std::vector<ParticleEnsemble> snaps_a, snaps_b;
  run(quiet, base, {[&](const FlowState& s) { snaps_a.push_back(s.ensemble); }}, dt);
  const RunRecord rb = run(quiet, twin, {[&](const FlowState& s) { snaps_b.push_back(s.ensemble); }}, dt);

  TwinRunSeries out;
  out.dt = rb.dt;
  out.times = rb.times;
  for (std::size_t k = 0; k < snaps_a.size(); ++k) {
    out.distance.push_back(riesz_distance(reconstruct_field(snaps_a[k]), reconstruct_field(snaps_b[k]), cfg.alpha,
                                          {cfg.riesz_cells}));
  }
  return out;
}

}  // namespace asqg
