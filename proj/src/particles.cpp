#include "asqg/particles.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "asqg/errors.hpp"
#include "fast_sums.hpp"

namespace asqg {

namespace {

struct SourceArrays {
  std::vector<double> y1, y2, q, eps;

  explicit SourceArrays(const ParticleEnsemble& ens) {
    const std::size_t n = ens.size();
    y1.resize(n);
    y2.resize(n);
    q.resize(n);
    eps.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      y1[j] = ens.nodes[j].x1;
      y2[j] = ens.nodes[j].x2;
      q[j] = ens.weights[j] * ens.values[j];
      eps[j] = ens.node_eps(j);
    }
  }

  Vec2 velocity(Vec2 x, double alpha, double sign) const {
    return fast::image_velocity_sum(x, y1, y2, q, eps, alpha, sign);
  }
};

void append_grid(ParticleEnsemble& ens, const ScalarField& field, const Patch& patch, int g, int tag,
                 double drop_below) {
  const double h = patch.side / g;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const Vec2 x = patch.lo + Vec2{(i + 0.5) * h, (j + 0.5) * h};
      const double v = field(x);
      if (std::abs(v) < drop_below) continue;
      ens.nodes.push_back(x);
      ens.weights.push_back(h * h);
      ens.values.push_back(v);
      ens.spacing.push_back(h);
      ens.bubble.push_back(tag);
    }
  }
}

void finalize(ParticleEnsemble& ens, double alpha, double kappa) {
  ens.kappa = kappa;
  ens.params.alpha = alpha;
  ens.h_min = ens.spacing.empty() ? 0.0 : *std::min_element(ens.spacing.begin(), ens.spacing.end());
  ens.params.eps = (kappa * ens.h_min) * (kappa * ens.h_min);
  ens.params.validate();
}

int grid_side(int nodes_per_bubble) {
  const int g = static_cast<int>(std::lround(std::sqrt(static_cast<double>(nodes_per_bubble))));
  if (g * g != nodes_per_bubble) throw ConfigError("nodes_per_bubble", "must be a perfect square G^2");
  if (g < 8) throw ConfigError("nodes_per_bubble", "G must be >= 8");
  return g;
}

}  // namespace

ParticleEnsemble discretize(const InitialData& data, int nodes_per_bubble, double kappa) {
  const int g = grid_side(nodes_per_bubble);
  if (!(kappa > 0.0)) throw ConfigError("eps_kappa", "must be > 0");
  ParticleEnsemble ens;
  const ScalarField field = as_field(data);
  for (const BubbleSpec& b : data.bubbles) {
    const double r = b.support_radius();
    const Patch square{b.center - Vec2{r, r}, 2.0 * r};
    append_grid(ens, field, square, g, b.n, 1e-14 * b.amplitude * data.weight(b.n));
  }
  // Zero data keeps its grid so that geometry-only diagnostics remain defined.
  if (ens.nodes.empty() && data.amplitude_scale == 0.0) {
    for (const BubbleSpec& b : data.bubbles) {
      const double r = b.support_radius();
      append_grid(ens, field, {b.center - Vec2{r, r}, 2.0 * r}, g, b.n, -1.0);
    }
  }
  finalize(ens, data.alpha, kappa);
  return ens;
}

ParticleEnsemble discretize_patch(const ScalarField& field, const Patch& patch, int cells_per_side,
                                  double alpha, double kappa) {
  if (cells_per_side < 1) throw ConfigError("cells_per_side", "must be >= 1");
  ParticleEnsemble ens;
  append_grid(ens, field, patch, cells_per_side, 0, 0.0);
  // keep zero-valued cells out, they contribute nothing
  finalize(ens, alpha, kappa);
  return ens;
}

Vec2 velocity_at(const ParticleEnsemble& ens, Vec2 x, double sign) {
  const SourceArrays src(ens);
  return src.velocity(x, ens.params.alpha, sign);
}

std::vector<Vec2> velocity_batch(const ParticleEnsemble& ens, std::span<const Vec2> targets, double sign) {
  const SourceArrays src(ens);
  std::vector<Vec2> out(targets.size());
  const long n = static_cast<long>(targets.size());
  const double alpha = ens.params.alpha;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = src.velocity(targets[static_cast<std::size_t>(i)], alpha, sign);
  return out;
}

ModulusFit log_lipschitz_modulus(const ParticleEnsemble& ens, int pair_budget,
                                 double lipschitz_min_separation, std::uint64_t seed) {
  if (pair_budget < 100) throw DomainError("log_lipschitz_modulus: pair_budget must be >= 100");
  ModulusFit fit;
  fit.lipschitz_min_separation = lipschitz_min_separation;
  if (ens.size() == 0) return fit;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_lo = std::log(std::max(ens.h_min, 1e-300));
  const double log_hi = 0.0;

  std::vector<Vec2> points;
  std::vector<double> separations;
  points.reserve(2 * static_cast<std::size_t>(pair_budget));
  for (int k = 0; k < pair_budget; ++k) {
    const double r = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    Vec2 a;
    if (k % 2 == 0) {
      const std::size_t j = std::min(ens.size() - 1, static_cast<std::size_t>(unit(rng) * ens.size()));
      const double h = ens.spacing[j];
      a = ens.nodes[j] + h * Vec2{unit(rng) - 0.5, unit(rng) - 0.5};
    } else {
      a = 4.0 * r * Vec2{unit(rng), unit(rng)};
    }
    points.push_back(a);
    points.push_back(a + r * Vec2{std::cos(phi), std::sin(phi)});
    separations.push_back(r);
  }
  const std::vector<Vec2> u = velocity_batch(ens, points);

  std::vector<double> corrected;
  corrected.reserve(separations.size());
  for (std::size_t k = 0; k < separations.size(); ++k) {
    const double r = norm(points[2 * k + 1] - points[2 * k]);
    const double du = norm(u[2 * k + 1] - u[2 * k]);
    const double log_minus = std::min(std::log(r), 0.0);
    ModulusSample s{r, du / r, du / (r * (1.0 - log_minus))};
    fit.samples.push_back(s);
    corrected.push_back(s.corrected);
    fit.c_sup = std::max(fit.c_sup, s.corrected);
    if (r >= lipschitz_min_separation) fit.lipschitz_sup = std::max(fit.lipschitz_sup, s.plain);
  }
  std::sort(corrected.begin(), corrected.end());
  const std::size_t idx = static_cast<std::size_t>(std::ceil(0.95 * corrected.size())) - 1;
  fit.c_p95 = corrected[std::min(idx, corrected.size() - 1)];
  return fit;
}

void write_ensemble_csv(std::ostream& out, const ParticleEnsemble& ens) {
  out << "x1,x2,w,theta\n";
  out << std::setprecision(17);
  for (std::size_t j = 0; j < ens.size(); ++j)
    out << ens.nodes[j].x1 << ',' << ens.nodes[j].x2 << ',' << ens.weights[j] << ',' << ens.values[j] << '\n';
}

std::vector<SnapshotRow> read_ensemble_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "x1,x2,w,theta")
    throw NumericalError("ensemble snapshot: missing header x1,x2,w,theta");
  std::vector<SnapshotRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    SnapshotRow r;
    if (!(ss >> r.x.x1 >> r.x.x2 >> r.w >> r.theta))
      throw NumericalError("ensemble snapshot: malformed row '" + line + "'");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace asqg
