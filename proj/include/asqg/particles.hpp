#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "asqg/fields.hpp"
#include "asqg/kernels.hpp"
#include "asqg/vec2.hpp"

namespace asqg {

/// First-quadrant particle quadrature of an odd-odd field.
///
/// Node j carries an area weight, the conserved value theta_j, its local grid
/// spacing h_j and the index of the bubble it was seeded from. Each node's
/// kernel is regularized with eps_j = (kappa * h_j)^2; `params.eps` records the
/// finest value (kappa * h_min)^2.
struct ParticleEnsemble {
  std::vector<Vec2> nodes;
  std::vector<double> weights;
  std::vector<double> values;
  std::vector<double> spacing;
  std::vector<int> bubble;
  KernelParams params;
  double kappa = 0.5;
  double h_min = 0.0;

  std::size_t size() const { return nodes.size(); }
  double node_eps(std::size_t j) const { return (kappa * spacing[j]) * (kappa * spacing[j]); }
};

/// Uniform G x G midpoint grid over each bubble's bounding square, G^2 = nodes_per_bubble.
/// Throws ConfigError unless nodes_per_bubble is a perfect square with G >= 8.
ParticleEnsemble discretize(const InitialData& data, int nodes_per_bubble, double kappa = 0.5);

/// Same construction for one generic odd-odd field on a single first-quadrant patch.
ParticleEnsemble discretize_patch(const ScalarField& field, const Patch& patch, int cells_per_side,
                                  double alpha, double kappa = 0.5);

/// u(x) = sum_j w_j theta_j K_image(x, p_j). `sign` = -1 reverses the flow.
Vec2 velocity_at(const ParticleEnsemble& ens, Vec2 x, double sign = 1.0);

/// Parallel map of velocity_at; each target is summed serially so results do not
/// depend on the thread count.
std::vector<Vec2> velocity_batch(const ParticleEnsemble& ens, std::span<const Vec2> targets,
                                 double sign = 1.0);

struct ModulusSample {
  double separation = 0.0;
  double plain = 0.0;      ///< |u(x) - u(y)| / r
  double corrected = 0.0;  ///< |u(x) - u(y)| / (r (1 - log^- r))
};

struct ModulusFit {
  double c_sup = 0.0;
  double c_p95 = 0.0;
  double lipschitz_sup = 0.0;  ///< plain quotient over pairs with r >= lipschitz_min_separation
  double lipschitz_min_separation = 0.0;
  std::vector<ModulusSample> samples;
};

/// Samples pairs with log-uniform separations in [h_min, 1], anchored half at
/// jittered nodes and half in origin-centered boxes of the pair's own scale.
/// Throws DomainError when pair_budget < 100.
ModulusFit log_lipschitz_modulus(const ParticleEnsemble& ens, int pair_budget,
                                 double lipschitz_min_separation = 0.0, std::uint64_t seed = 1);

/// Columnar snapshot `x1,x2,w,theta`, 17 significant digits.
void write_ensemble_csv(std::ostream& out, const ParticleEnsemble& ens);

struct SnapshotRow {
  Vec2 x;
  double w = 0.0;
  double theta = 0.0;
};
std::vector<SnapshotRow> read_ensemble_csv(std::istream& in);

}  // namespace asqg
