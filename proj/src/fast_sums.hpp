#pragma once

// Vectorized inner loops. Compiled with relaxed floating-point flags; every
// routine sums in a fixed order so results are reproducible for a given build.

#include <span>

#include "asqg/vec2.hpp"

namespace asqg::fast {

/// sum_j q_j * image_kernel(x, y_j) with per-source regularization eps_j.
Vec2 image_velocity_sum(Vec2 x, std::span<const double> y1, std::span<const double> y2,
                        std::span<const double> q, std::span<const double> eps, double alpha,
                        double sign);

/// sum_k q_k * G(x - y_k), G(z) = |z|^{-2 alpha}; image sum for odd-odd data.
/// The term with index `skip` (identity image only) is omitted; pass -1 to keep all.
double riesz_row_sum(Vec2 x, std::span<const double> y1, std::span<const double> y2,
                     std::span<const double> q, double alpha, bool odd_odd, long skip);

}  // namespace asqg::fast
