#include "asqg/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "asqg/errors.hpp"
#include "asqg/kernels.hpp"
#include "fast_sums.hpp"

namespace asqg {

namespace {

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

bool overlaps(const Patch& a, const Patch& b) {
  return a.lo.x1 < b.lo.x1 + b.side && b.lo.x1 < a.lo.x1 + a.side && a.lo.x2 < b.lo.x2 + b.side &&
         b.lo.x2 < a.lo.x2 + a.side;
}

Patch bounding(const Patch& a, const Patch& b) {
  const double lo1 = std::min(a.lo.x1, b.lo.x1), lo2 = std::min(a.lo.x2, b.lo.x2);
  const double hi1 = std::max(a.lo.x1 + a.side, b.lo.x1 + b.side);
  const double hi2 = std::max(a.lo.x2 + a.side, b.lo.x2 + b.side);
  return {{lo1, lo2}, std::max(hi1 - lo1, hi2 - lo2)};
}

}  // namespace

std::vector<Patch> merge_patches(std::vector<Patch> patches) {
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < patches.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < patches.size() && !merged; ++j) {
        if (overlaps(patches[i], patches[j])) {
          patches[i] = bounding(patches[i], patches[j]);
          patches.erase(patches.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
      }
    }
  }
  std::sort(patches.begin(), patches.end(),
            [](const Patch& a, const Patch& b) { return a.side > b.side; });
  return patches;
}

namespace {

std::vector<Patch> sampling_patches(const ScalarField& f) {
  if (!f.patches.empty()) return f.patches;
  return {Patch{{-1.0, -1.0}, 2.0}};
}

// Midpoint nodes with nonzero values over a disjoint patch set.
struct QuadratureNodes {
  std::vector<double> x1, x2, w, value;
};

QuadratureNodes midpoint_nodes(const std::vector<Patch>& patches, int cells_per_side,
                               const std::function<double(Vec2)>& f) {
  QuadratureNodes q;
  for (const Patch& p : patches) {
    const double h = p.side / cells_per_side;
    for (int i = 0; i < cells_per_side; ++i) {
      for (int j = 0; j < cells_per_side; ++j) {
        const Vec2 x = p.lo + Vec2{(i + 0.5) * h, (j + 0.5) * h};
        const double v = f(x);
        if (v == 0.0) continue;
        q.x1.push_back(x.x1);
        q.x2.push_back(x.x2);
        q.w.push_back(h * h);
        q.value.push_back(v);
      }
    }
  }
  return q;
}

}  // namespace

double RadialBump::operator()(double r) const {
  // 1 at r = inner_radius, 0 at r = outer_radius
  return smooth_step((outer_radius - r) / (outer_radius - inner_radius));
}

RadialBump make_bump() { return {}; }

BubbleSpec make_bubble(int n, double alpha) {
  BubbleSpec b;
  b.n = n;
  const double c = std::pow(4.0, -n - 2);
  b.center = {c, c};
  b.scale = std::pow(4.0, -n);
  b.amplitude = std::pow(4.0, -alpha * n);
  return b;
}

double InitialData::weight(int n) const { return amplitude_scale * std::pow(static_cast<double>(n), -beta_amp); }

double InitialData::peak(int n) const { return weight(n) * bubble(n).amplitude; }

InitialData make_initial_data(int n0, int N, double alpha, double beta_amp) {
  if (n0 < 1) throw ConfigError("n0", "must be >= 1");
  if (N < n0) throw ConfigError("N", "must be >= n0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha", "must lie in (0, 1)");
  if (!(beta_amp > 0.0 && beta_amp < 0.25)) throw ConfigError("beta_amp", "must lie in (0, 1/4)");
  InitialData d;
  d.n0 = n0;
  d.N = N;
  d.alpha = alpha;
  d.beta_amp = beta_amp;
  for (int n = n0; n <= N; ++n) d.bubbles.push_back(make_bubble(n, alpha));

  // Supports must be pairwise disjoint and interior to the quadrant.
  for (std::size_t i = 0; i < d.bubbles.size(); ++i) {
    const BubbleSpec& a = d.bubbles[i];
    if (!(a.center.x1 - a.support_radius() > 0.0) || norm(a.center) + a.support_radius() >= 0.25)
      throw NumericalError("bubble support leaves the open quadrant inside |x| < 1/4");
    for (std::size_t j = i + 1; j < d.bubbles.size(); ++j) {
      const BubbleSpec& b = d.bubbles[j];
      if (!(norm(a.center - b.center) > a.support_radius() + b.support_radius()))
        throw NumericalError("bubble supports overlap");
    }
  }
  return d;
}

double eval_field(const InitialData& data, Vec2 x) {
  if (x.x1 == 0.0 || x.x2 == 0.0) return 0.0;
  const double sign = (x.x1 > 0.0) == (x.x2 > 0.0) ? 1.0 : -1.0;
  const Vec2 y{std::abs(x.x1), std::abs(x.x2)};
  static const RadialBump bump;
  for (const BubbleSpec& b : data.bubbles) {
    const Vec2 d = y - b.center;
    if (std::abs(d.x1) >= b.support_radius() || std::abs(d.x2) >= b.support_radius()) continue;
    const double r = norm(d) / b.scale;
    // supports are disjoint, so the first hit is the only one
    return sign * data.weight(b.n) * b.amplitude * bump(r);
  }
  return 0.0;
}

double eval_field(const ScalarField& field, Vec2 x) { return field.evaluator(x); }

namespace {

Patch bubble_patch(const BubbleSpec& b) {
  const double r = b.support_radius();
  return {b.center - Vec2{r, r}, 2.0 * r};
}

}  // namespace

ScalarField as_field(const InitialData& data) {
  ScalarField f;
  f.evaluator = [data](Vec2 x) { return eval_field(data, x); };
  f.odd_odd = true;
  double radius = 0.0;
  for (const BubbleSpec& b : data.bubbles) {
    f.patches.push_back(bubble_patch(b));
    radius = std::max(radius, norm(b.center) + b.support_radius());
  }
  f.support_radius = radius;
  return f;
}

ScalarField single_bubble_field(const InitialData& data, int n) {
  InitialData one = data;
  one.bubbles = {data.bubble(n)};
  one.n0 = one.N = n;
  // keep the original weight n^{-beta}
  ScalarField f = as_field(one);
  return f;
}

ScalarField constant_field(double value) {
  ScalarField f;
  f.evaluator = [value](Vec2) { return value; };
  f.unbounded = value != 0.0;
  return f;
}

ScalarField zero_field() {
  ScalarField f = constant_field(0.0);
  f.odd_odd = true;
  return f;
}

ScalarField linear_combination(double a, const ScalarField& A, double b, const ScalarField& B) {
  ScalarField f;
  f.evaluator = [a, b, fa = A.evaluator, fb = B.evaluator](Vec2 x) { return a * fa(x) + b * fb(x); };
  f.odd_odd = A.odd_odd && B.odd_odd;
  f.unbounded = (A.unbounded && a != 0.0) || (B.unbounded && b != 0.0);
  if (!f.unbounded) {
    std::vector<Patch> all = A.patches;
    all.insert(all.end(), B.patches.begin(), B.patches.end());
    f.patches = merge_patches(std::move(all));
    f.support_radius = std::max(A.support_radius, B.support_radius);
  }
  return f;
}

ScalarField dilate(const ScalarField& A, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("dilate: lambda must be > 0");
  ScalarField f = A;
  f.evaluator = [lambda, fa = A.evaluator](Vec2 x) { return fa(x * (1.0 / lambda)); };
  f.support_radius = A.support_radius * lambda;
  for (Patch& p : f.patches) {
    p.lo *= lambda;
    p.side *= lambda;
  }
  return f;
}

HolderEstimate holder_seminorm_estimate(const ScalarField& field, double exponent, int pair_budget,
                                        std::pair<double, double> relative_scale_range,
                                        std::uint64_t seed) {
  if (!(exponent > 0.0 && exponent <= 1.0)) throw DomainError("holder exponent must lie in (0, 1]");
  if (pair_budget < 1) throw DomainError("holder_seminorm_estimate: empty pair budget");
  const auto [rmin, rmax] = relative_scale_range;
  if (!(rmin > 0.0 && rmax >= rmin)) throw DomainError("holder_seminorm_estimate: bad scale range");

  int n_sep = 1;
  while (rmin * std::pow(2.0, n_sep) <= rmax) ++n_sep;
  const std::vector<Patch> patches = sampling_patches(field);
  const int per_patch = std::max(1, pair_budget / static_cast<int>(patches.size()));
  const int anchors = std::max(1, per_patch / (n_sep + 2));

  HolderEstimate best;
  best.exponent = exponent;
  auto consider = [&](Vec2 a, Vec2 b) {
    const double d = norm(a - b);
    if (d == 0.0) return;
    const double q = std::abs(field(a) - field(b)) / std::pow(d, exponent);
    if (q > best.value) {
      best.value = q;
      best.witness_pair = {a, b};
    }
  };

  for (const Patch& p : patches) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < anchors; ++k) {
      const Vec2 a = k == 0 ? p.center() : p.lo + p.side * Vec2{unit(rng), unit(rng)};
      consider(a, {a.x1, 0.0});
      consider(a, {0.0, a.x2});
      for (int s = 0; s < n_sep; ++s) {
        const double r = p.side * rmin * std::pow(2.0, s);
        const double phi = 2.0 * std::numbers::pi * unit(rng);
        consider(a, a + r * Vec2{std::cos(phi), std::sin(phi)});
      }
    }
  }
  return best;
}

double linf_norm(const ScalarField& field, int samples_per_side) {
  double m = 0.0;
  for (const Patch& p : sampling_patches(field)) {
    m = std::max(m, std::abs(field(p.center())));
    const double h = p.side / (samples_per_side - 1);
    for (int i = 0; i < samples_per_side; ++i)
      for (int j = 0; j < samples_per_side; ++j)
        m = std::max(m, std::abs(field(p.lo + Vec2{i * h, j * h})));
  }
  return m;
}

double lp_norm(const ScalarField& field, double p, int cells_per_side) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
  if (field.unbounded) throw DomainError("lp_norm: field has no compact support");
  if (field.patches.empty()) return 0.0;
  const QuadratureNodes q = midpoint_nodes(merge_patches(field.patches), cells_per_side, field.evaluator);
  double s = 0.0;
  for (std::size_t i = 0; i < q.w.size(); ++i) s += q.w[i] * std::pow(std::abs(q.value[i]), p);
  if (field.odd_odd) s *= 4.0;
  return std::pow(s, 1.0 / p);
}

double riesz_distance(const ScalarField& A, const ScalarField& B, double alpha, RieszQuadrature quad) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("riesz_distance: alpha must lie in (0, 1)");
  const ScalarField D = linear_combination(1.0, A, -1.0, B);
  if (D.unbounded) throw DomainError("riesz_distance: fields must be compactly supported");
  if (D.patches.empty()) return 0.0;
  const QuadratureNodes nodes = midpoint_nodes(D.patches, quad.cells_per_side, D.evaluator);
  const std::size_t n = nodes.w.size();
  if (n == 0) return 0.0;

  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = nodes.w[i] * nodes.value[i];

  // Self-interaction of a cell: integral of |z|^{-2 alpha} over the disk of equal area.
  const double self_coeff = 2.0 * std::numbers::pi / (2.0 - 2.0 * alpha);
  double energy = 0.0;
  double magnitude = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double row = fast::riesz_row_sum({nodes.x1[j], nodes.x2[j]}, nodes.x1, nodes.x2, q, alpha,
                                           D.odd_odd, static_cast<long>(j));
    const double rho = std::sqrt(nodes.w[j] / std::numbers::pi);
    const double self = q[j] * nodes.value[j] * self_coeff * std::pow(rho, 2.0 - 2.0 * alpha);
    energy += q[j] * row + self;
    magnitude += std::abs(q[j] * row) + std::abs(self);
  }
  if (D.odd_odd) {
    energy *= 4.0;
    magnitude *= 4.0;
  }
  if (energy < -1e-8 * magnitude) throw NumericalError("riesz_distance: negative discrete energy");
  return std::sqrt(std::max(energy, 0.0));
}

ScalarField mollify(const ScalarField& field, double nu, int cells_per_side) {
  if (!(nu > 0.0)) throw DomainError("mollify: nu must be > 0");
  std::vector<Vec2> offsets;
  std::vector<double> weights;
  const double h = 2.0 * nu / cells_per_side;
  double total = 0.0;
  for (int i = 0; i < cells_per_side; ++i) {
    for (int j = 0; j < cells_per_side; ++j) {
      const Vec2 z{-nu + (i + 0.5) * h, -nu + (j + 0.5) * h};
      const double w = eval_mollifier(nu, z) * h * h;
      if (w == 0.0) continue;
      offsets.push_back(z);
      weights.push_back(w);
      total += w;
    }
  }
  for (double& w : weights) w /= total;

  ScalarField out;
  out.odd_odd = field.odd_odd;
  out.unbounded = field.unbounded;
  out.evaluator = [offsets, weights, f = field.evaluator](Vec2 x) {
    double s = 0.0;
    for (std::size_t k = 0; k < offsets.size(); ++k) s += weights[k] * f(x - offsets[k]);
    return s;
  };
  if (!field.patches.empty()) {
    std::vector<Patch> grown;
    for (const Patch& p : field.patches) {
      Patch g{p.lo - Vec2{nu, nu}, p.side + 2.0 * nu};
      if (field.odd_odd) {
        // clip to the closed first quadrant, keeping a square
        const double hi1 = g.lo.x1 + g.side, hi2 = g.lo.x2 + g.side;
        g.lo = {std::max(g.lo.x1, 0.0), std::max(g.lo.x2, 0.0)};
        g.side = std::max(hi1 - g.lo.x1, hi2 - g.lo.x2);
      }
      grown.push_back(g);
    }
    out.patches = merge_patches(std::move(grown));
    out.support_radius = field.support_radius + nu;
  }
  return out;
}

}  // namespace asqg
