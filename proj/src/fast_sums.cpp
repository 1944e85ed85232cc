#include "fast_sums.hpp"

#include <cmath>
#include <cstddef>

namespace asqg::fast {

Vec2 image_velocity_sum(Vec2 x, std::span<const double> y1, std::span<const double> y2,
                        std::span<const double> q, std::span<const double> eps, double alpha,
                        double sign) {
  const double e = -(2.0 + alpha) / 2.0;
  const double x1 = x.x1, x2 = x.x2;
  const std::size_t n = q.size();
  const double* py1 = y1.data();
  const double* py2 = y2.data();
  const double* pq = q.data();
  const double* pe = eps.data();
  double u1 = 0.0, u2 = 0.0;
#pragma omp simd reduction(+ : u1, u2)
  for (std::size_t j = 0; j < n; ++j) {
    const double a1 = x1 - py1[j], b1 = x1 + py1[j];
    const double a2 = x2 - py2[j], b2 = x2 + py2[j];
    const double sa1 = a1 * a1, sb1 = b1 * b1, sa2 = a2 * a2, sb2 = b2 * b2;
    const double ej = pe[j];
    const double p_direct = std::exp(e * std::log(sa1 + sa2 + ej));
    const double p_tilde = std::exp(e * std::log(sb1 + sa2 + ej));
    const double p_sum = std::exp(e * std::log(sb1 + sb2 + ej));
    const double p_bar = std::exp(e * std::log(sa1 + sb2 + ej));
    u1 += pq[j] * (-a2 * (p_direct - p_tilde) - b2 * (p_sum - p_bar));
    u2 += pq[j] * (a1 * (p_direct - p_bar) + b1 * (p_sum - p_tilde));
  }
  return {sign * u1, sign * u2};
}

double riesz_row_sum(Vec2 x, std::span<const double> y1, std::span<const double> y2,
                     std::span<const double> q, double alpha, bool odd_odd, long skip) {
  const double x1 = x.x1, x2 = x.x2;
  const std::size_t n = q.size();
  const double* py1 = y1.data();
  const double* py2 = y2.data();
  const double* pq = q.data();
  const double e = -alpha;
  // Skip the singular self term by zeroing its weight for the identity image.
  double direct = 0.0, images = 0.0;
  if (odd_odd) {
#pragma omp simd reduction(+ : direct, images)
    for (std::size_t k = 0; k < n; ++k) {
      const double a1 = x1 - py1[k], b1 = x1 + py1[k];
      const double a2 = x2 - py2[k], b2 = x2 + py2[k];
      const double sa1 = a1 * a1, sb1 = b1 * b1, sa2 = a2 * a2, sb2 = b2 * b2;
      const bool self = static_cast<long>(k) == skip;
      const double d = self ? 1.0 : sa1 + sa2;
      const double g_direct = self ? 0.0 : std::exp(e * std::log(d));
      const double g_img = -std::exp(e * std::log(sb1 + sa2)) - std::exp(e * std::log(sa1 + sb2)) +
                           std::exp(e * std::log(sb1 + sb2));
      direct += pq[k] * g_direct;
      images += pq[k] * g_img;
    }
  } else {
#pragma omp simd reduction(+ : direct)
    for (std::size_t k = 0; k < n; ++k) {
      const double a1 = x1 - py1[k], a2 = x2 - py2[k];
      const bool self = static_cast<long>(k) == skip;
      const double d = self ? 1.0 : a1 * a1 + a2 * a2;
      direct += self ? 0.0 : pq[k] * std::exp(e * std::log(d));
    }
  }
  return direct + images;
}

}  // namespace asqg::fast
