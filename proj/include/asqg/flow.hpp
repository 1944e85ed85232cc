#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "asqg/config.hpp"
#include "asqg/fields.hpp"
#include "asqg/particles.hpp"
#include "asqg/records.hpp"

namespace asqg {

struct PathPoint {
  double t = 0.0;
  Vec2 x;
};

/// Passive point advected by the particle velocity.
struct Tracer {
  Vec2 x0;
  std::vector<PathPoint> path;  ///< path.front() is (0, x0)
  std::optional<int> bubble_index;
  double theta0 = 0.0;

  Vec2 position() const { return path.back().x; }
};

Tracer make_tracer(Vec2 x0, std::optional<int> bubble = std::nullopt, double theta0 = 0.0);

struct FlowState {
  double t = 0.0;
  ParticleEnsemble ensemble;
  std::vector<Tracer> tracers;
  long axis_crossings = 0;  ///< nodes clamped back into the open quadrant
};

/// Thrown when a step produces a non-finite position; carries the offending state.
class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(const std::string& what, FlowState dump)
      : std::runtime_error(what), state_(std::move(dump)) {}
  const FlowState& state() const noexcept { return state_; }

 private:
  FlowState state_;
};

/// Position a node is clamped to when a step pushes it onto or across an axis.
inline constexpr double kAxisClamp = 1e-16;

/// Classical RK4 step of nodes and tracers; velocities from velocity_batch at every stage.
/// `sign` = -1 integrates the time-reversed system.
FlowState step_rk4(const FlowState& state, double dt, double sign = 1.0);

/// Builds the bubble data, ensemble and tracers described by a config.
InitialData make_data(const ExperimentConfig& cfg);
FlowState initial_state(const ExperimentConfig& cfg);
FlowState initial_state(const ExperimentConfig& cfg, const InitialData& data);

/// Tracers from a spec string: comma-separated tokens `centers`, `mirrors`
/// (mirror images of all tracers so far), `axis` (points (0, c_n2)), or `@x1:x2`.
std::vector<Tracer> make_tracers(const std::string& spec, const InitialData& data);

/// min(dt_max, cfl * min_j h_j / |u_j|) from the velocities of the given state.
double stable_dt(const ExperimentConfig& cfg, const FlowState& state);

struct RunCallbacks {
  std::function<void(const FlowState&)> on_output;
};

/// Integrates to cfg.T with a fixed step. If `forced_dt` is given it replaces
/// the stability rule (used to put twin runs on one time grid).
RunRecord run(const ExperimentConfig& cfg, const RunCallbacks& callbacks = {},
              std::optional<double> forced_dt = std::nullopt);
RunRecord run(const ExperimentConfig& cfg, const InitialData& data, const RunCallbacks& callbacks,
              std::optional<double> forced_dt);

/// Forward to T, then backward with the reversed kernel; max node return error.
double reverse_check(const ExperimentConfig& cfg, std::optional<double> forced_dt = std::nullopt);

/// Particle field sum_j w_j theta_j phi_{nu_j}(x - p_j), nu_j = width_factor * h_j,
/// extended odd-odd.
ScalarField reconstruct_field(const ParticleEnsemble& ens, double width_factor = 2.0);

struct TwinRunSeries {
  std::vector<double> times;
  std::vector<double> distance;
  double dt = 0.0;
};

/// Runs the config and a copy whose largest bubble amplitude is scaled by
/// (1 + perturbation_size) on the same time grid; Riesz distance of the
/// reconstructed fields at every output time.
TwinRunSeries twin_run_distance(const ExperimentConfig& cfg, double perturbation_size);

}  // namespace asqg
