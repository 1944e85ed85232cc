#pragma once

#include <cmath>

#include "asqg/vec2.hpp"

namespace asqg {

/// Biot-Savart parameters for the alpha-SQG family.
///
/// The velocity is u = K * theta with K(z) = z^perp / |z|^(2+alpha) and
/// z^perp = (-z2, z1). The normalization constant is fixed to 1.
/// eps is the squared regularization length (units length^2).
struct KernelParams {
  static constexpr double c_alpha = 1.0;

  double alpha = 0.5;
  double eps = 0.0;

  /// Throws ConfigError unless 0 < alpha < 1 and eps >= 0.
  void validate() const;
};

/// Singular kernel K(z) = z^perp / |z|^(2+alpha). Throws DomainError at z = 0.
Vec2 eval_K(const KernelParams& params, Vec2 z);

/// Regularized kernel z^perp / (|z|^2 + eps)^((2+alpha)/2).
Vec2 eval_K_reg(const KernelParams& params, Vec2 z);

/// Kernel that integrates the first-quadrant restriction of an odd-odd field:
///   K(x-y) - K(x-~y) + K(x+y) - K(x-_y)
/// with ~y = (-y1, y2), _y = (y1, -y2); each term regularized.
Vec2 eval_image_kernel(const KernelParams& params, Vec2 x, Vec2 y);

/// Standard mollifier nu^-2 phi(z / nu), phi(z) = C exp(-1 / (1 - |z|^2)) on the unit disk.
double eval_mollifier(double nu, Vec2 z);

namespace detail {

/// Hot-loop form of the image kernel. `neg_half_exp` = -(2+alpha)/2. No validation.
inline Vec2 image_kernel_unchecked(double neg_half_exp, double eps, Vec2 x, Vec2 y) {
  const double a1 = x.x1 - y.x1, b1 = x.x1 + y.x1;
  const double a2 = x.x2 - y.x2, b2 = x.x2 + y.x2;
  const double sa1 = a1 * a1, sb1 = b1 * b1, sa2 = a2 * a2, sb2 = b2 * b2;
  // x - y = (a1, a2); x - ~y = (b1, a2); x + y = (b1, b2); x - _y = (a1, b2)
  const double p_direct = std::pow(sa1 + sa2 + eps, neg_half_exp);
  const double p_tilde = std::pow(sb1 + sa2 + eps, neg_half_exp);
  const double p_sum = std::pow(sb1 + sb2 + eps, neg_half_exp);
  const double p_bar = std::pow(sa1 + sb2 + eps, neg_half_exp);
  // component 1 is -z2 * p, component 2 is z1 * p
  const double u1 = -a2 * (p_direct - p_tilde) - b2 * (p_sum - p_bar);
  const double u2 = a1 * (p_direct - p_bar) + b1 * (p_sum - p_tilde);
  return {u1, u2};
}

}  // namespace detail

}  // namespace asqg
