#include "asqg/kernels.hpp"

#include <cmath>
#include <numbers>

#include "asqg/errors.hpp"

namespace asqg {

void KernelParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha", "must lie in (0, 1)");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("eps", "must be finite and >= 0");
}

Vec2 eval_K(const KernelParams& params, Vec2 z) {
  const double r2 = norm2(z);
  if (r2 == 0.0) throw DomainError("eval_K: kernel is singular at z = 0");
  return perp(z) * std::pow(r2, -(2.0 + params.alpha) / 2.0);
}

Vec2 eval_K_reg(const KernelParams& params, Vec2 z) {
  const double d = norm2(z) + params.eps;
  if (d == 0.0) throw DomainError("eval_K_reg: eps = 0 and z = 0");
  return perp(z) * std::pow(d, -(2.0 + params.alpha) / 2.0);
}

Vec2 eval_image_kernel(const KernelParams& params, Vec2 x, Vec2 y) {
  return eval_K_reg(params, x - y) - eval_K_reg(params, x - reflect_tilde(y)) +
         eval_K_reg(params, x + y) - eval_K_reg(params, x - reflect_bar(y));
}

namespace {

// Integral of exp(-1/(1-|z|^2)) over the unit disk: pi * (1/e - E1(1)), with E1(1) = -Ei(-1).
double bump_mass() {
  static const double mass = std::numbers::pi * (std::exp(-1.0) + std::expint(-1.0));
  return mass;
}

}  // namespace

double eval_mollifier(double nu, Vec2 z) {
  if (!(nu > 0.0)) throw DomainError("eval_mollifier: nu must be > 0");
  const double s = norm2(z) / (nu * nu);
  if (s >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s)) / (bump_mass() * nu * nu);
}

}  // namespace asqg
