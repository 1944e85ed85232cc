#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "asqg/fields.hpp"
#include "asqg/particles.hpp"
#include "asqg/records.hpp"

namespace asqg {

/// Integration regions for the hyperbolic-strain integral at x:
/// Q(x) = [2x1, inf) x [2x2, inf) and the half-strip R(x) = [2x1, inf) x [0, inf).
enum class Region { Q, R };

/// sum over nodes p in the region of w theta p1 p2 / |p|^(4+alpha).
double quadrant_integral(const ParticleEnsemble& ens, Vec2 x, Region region);

/// Hoelder lower bound from exact node values: node-to-axis pairs for every node
/// (the field vanishes on both axes) plus `pair_budget` random same-bubble node pairs.
HolderEstimate ensemble_holder_estimate(const ParticleEnsemble& ens, double exponent, int pair_budget,
                                        std::uint64_t seed = 0);

/// L^inf + seminorm lower bound. Underestimates the C^{0,alpha} norm, so residuals
/// normalized by it are overestimates.
struct ThetaNorm {
  double linf = 0.0;
  double seminorm = 0.0;
  double total() const { return linf + seminorm; }
};
ThetaNorm holder_norm(const ParticleEnsemble& ens, int pair_budget = 4096, std::uint64_t seed = 0);

struct Residual {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Normalized defects of the two velocity approximations
///   u1/x1 ~ +4(2+alpha) I(x),  u2/x2 ~ -4(2+alpha) I(x),  I = quadrant_integral.
/// r1 = |u1/x1 - 4(2+a) I| / (|theta| (1 + log(|x|^2/x1^2))), r2 likewise with x2.
/// With Region::R the u2 residual uses the mirrored strip [0, inf) x [2x2, inf).
/// Throws DomainError for x on an axis. Zero data gives (0, 0).
Residual velocity_residual(const ParticleEnsemble& ens, Vec2 x, const ThetaNorm& norm,
                           Region region = Region::Q);
Residual velocity_residual(const ParticleEnsemble& ens, Vec2 x, Region region = Region::Q);

/// (Phi2/Phi1) / (x2/x1) at each output time. Throws DomainError for tracers on an axis.
std::vector<double> ratio_series(const RunRecord& record, std::size_t tracer_id);

/// theta0 / Phi2(t)^alpha at each output time. Throws NumericalError if Phi2 <= 0.
std::vector<double> witness_quotient(const RunRecord& record, std::size_t tracer_id, double alpha);

struct ScheduleParams {
  double beta_amp = 0.1;
  double c_fit = 1.0;
  double T = std::numeric_limits<double>::infinity();
};

struct ScheduleValue {
  double uncapped = 0.0;  ///< c (1 - beta) / n^(1 - beta)
  double capped = 0.0;    ///< min(T, c / sum_{m<n} m^-beta), T when the sum is empty
};
ScheduleValue tn_schedule(const ScheduleParams& params, int n);

/// Largest c such that c (1-beta)/n^(1-beta) stays at or below the last output time
/// at which each bubble-center tracer still has 1/gamma <= Phi_i/x_i <= gamma
/// (the run end if it never leaves).
double fit_schedule_constant(const RunRecord& record, double gamma = 2.0);

/// min over output times of (inf_{bubble n'} Phi1 - 2 sup_{bubbles > n'} Phi1) / inf_{bubble n'} Phi1
/// over bubble-center tracers. Nonnegative when the ordering holds throughout.
double ordering_margin(const RunRecord& record, int n_prime);

/// Ratio and witness columns for every bubble-center tracer.
SeriesTable tabulate(const RunRecord& record);

struct TracerGrowth {
  int n = 0;
  double q0 = 0.0;
  double qT = 0.0;
  double growth = 1.0;
  double phi2_decay = 1.0;  ///< Phi2(T)/x2 = (q0/qT)^(1/alpha)
  double ratio_max = 1.0;
};

struct InflationReport {
  std::vector<TracerGrowth> tracers;  ///< ordered by n
  double h0 = 0.0;
  double hT = 0.0;
  double ratio_max = 1.0;
  bool innermost_monotone = true;  ///< first half of the window, 1% slack
  bool innermost_exceeds_outermost = false;
  bool truncated = false;
  std::optional<double> ordering_margin;
};

InflationReport inflation_report(const SeriesTable& table, double alpha, bool truncated = false);
InflationReport inflation_report(const RunRecord& record);

/// {tracers: [{n, q0, qT, growth, ...}], holder: {h0, hT}, ratios: {...}, flags: {...}}
std::string report_json(const InflationReport& report);

}  // namespace asqg
