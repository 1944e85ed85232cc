#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "asqg/vec2.hpp"

namespace asqg {

/// Smooth radial profile with 1 on [0, 1/64] and 0 on [1/32, inf).
struct RadialBump {
  static constexpr double inner_radius = 1.0 / 64.0;
  static constexpr double outer_radius = 1.0 / 32.0;

  double operator()(double r) const;
};

RadialBump make_bump();

/// One rescaled bump: amplitude * phi(4^n (x - center)), centered at (4^{-n-2}, 4^{-n-2}).
struct BubbleSpec {
  int n = 0;
  Vec2 center;
  double scale = 0.0;      ///< 4^{-n}
  double amplitude = 0.0;  ///< 4^{-alpha n}

  double support_radius() const { return scale * RadialBump::outer_radius; }
};

BubbleSpec make_bubble(int n, double alpha);

/// Axis-aligned square [lo, lo + side]^2 where a field may be nonzero.
/// For odd-odd fields only first-quadrant patches are listed.
struct Patch {
  Vec2 lo;
  double side = 0.0;

  Vec2 center() const { return lo + Vec2{0.5 * side, 0.5 * side}; }
  bool contains(Vec2 x) const {
    return x.x1 >= lo.x1 && x.x1 <= lo.x1 + side && x.x2 >= lo.x2 && x.x2 <= lo.x2 + side;
  }
};

/// Replaces overlapping patches by their bounding squares until the set is disjoint.
std::vector<Patch> merge_patches(std::vector<Patch> patches);

/// A generic scalar field: evaluator plus the quadrature hints needed to integrate it.
struct ScalarField {
  std::function<double(Vec2)> evaluator;
  double support_radius = 0.0;
  bool unbounded = false;  ///< true for nonzero constants; no patches then
  bool odd_odd = false;
  std::vector<Patch> patches;

  double operator()(Vec2 x) const { return evaluator(x); }
};

/// Multi-scale bubble data sum_{n0<=n<=N} n^{-beta_amp} theta_loc^(n), extended odd in both axes.
struct InitialData {
  int n0 = 4;
  int N = 8;
  double alpha = 0.5;
  double beta_amp = 0.1;
  double amplitude_scale = 1.0;  ///< overall multiplier, 1 for the canonical family
  std::vector<BubbleSpec> bubbles;
  bool odd_odd = true;

  /// n^{-beta_amp} * amplitude_scale
  double weight(int n) const;
  /// Peak value of bubble n (plateau value).
  double peak(int n) const;
  const BubbleSpec& bubble(int n) const { return bubbles.at(static_cast<std::size_t>(n - n0)); }
};

/// Throws ConfigError on 1 <= n0 <= N, 0 < beta_amp < 1/4, 0 < alpha < 1 violations.
InitialData make_initial_data(int n0, int N, double alpha, double beta_amp);

double eval_field(const InitialData& data, Vec2 x);
double eval_field(const ScalarField& field, Vec2 x);

ScalarField as_field(const InitialData& data);
/// Bubble n of `data` alone, keeping its weight n^{-beta_amp}.
ScalarField single_bubble_field(const InitialData& data, int n);
ScalarField constant_field(double value);
ScalarField zero_field();
/// a * A + b * B, with patches merged.
ScalarField linear_combination(double a, const ScalarField& A, double b, const ScalarField& B);
/// x -> A(x / lambda), patches scaled.
ScalarField dilate(const ScalarField& A, double lambda);

struct HolderEstimate {
  double exponent = 1.0;
  double value = 0.0;  ///< lower bound of the seminorm
  std::pair<Vec2, Vec2> witness_pair;
};

/// Stratified lower-bound estimator of the C^{0,exponent} seminorm.
///
/// Anchors are drawn inside every patch (and at the patch center). Each anchor is
/// paired with partners at dyadic separations spanning `relative_scale_range`
/// (multiples of the patch side), and with its projections onto both axes when
/// the field is odd-odd. Sampling is done in patch-relative coordinates so that
/// geometrically similar patches see identical sample layouts.
/// Fields without patches are sampled on [-1, 1]^2.
HolderEstimate holder_seminorm_estimate(const ScalarField& field, double exponent, int pair_budget,
                                        std::pair<double, double> relative_scale_range = {1.0 / 512.0, 2.0},
                                        std::uint64_t seed = 0);

/// Sampled sup |f| over patch grids (plus patch centers).
double linf_norm(const ScalarField& field, int samples_per_side = 129);

/// Midpoint-rule L^p norm over patches; images counted for odd-odd fields.
double lp_norm(const ScalarField& field, double p, int cells_per_side = 256);

/// Options for the product quadrature behind riesz_distance.
struct RieszQuadrature {
  int cells_per_side = 32;
};

/// sqrt of  int int D(x) D(y) |x - y|^{-2 alpha} dx dy  with D = A - B.
/// Throws NumericalError when the discrete energy is negative beyond round-off.
double riesz_distance(const ScalarField& A, const ScalarField& B, double alpha,
                      RieszQuadrature quad = {});

/// Convolution with the standard mollifier of radius nu (midpoint quadrature on the nu-ball).
ScalarField mollify(const ScalarField& field, double nu, int cells_per_side = 24);

}  // namespace asqg
