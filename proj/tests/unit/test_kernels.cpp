#include <cmath>
#include <numbers>
#include <random>

#include "asqg/errors.hpp"
#include "asqg/kernels.hpp"
#include "doctest.h"

using namespace asqg;

namespace {

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300}); }

// Radial profile of the standard bump, unnormalized.
double raw_bump(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

// 2D integral of f over [-R, R]^2 by the tensor Gauss-Legendre rule on many panels.
template <typename F>
double square_integral(F f, double R, int panels) {
  static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
  static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  const double h = 2.0 * R / panels;
  double s = 0.0;
  for (int i = 0; i < panels; ++i)
    for (int a = 0; a < 5; ++a) {
      const double x = -R + (i + 0.5) * h + 0.5 * h * gx[a];
      for (int j = 0; j < panels; ++j)
        for (int b = 0; b < 5; ++b) {
          const double y = -R + (j + 0.5) * h + 0.5 * h * gx[b];
          s += gw[a] * gw[b] * f(x, y);
        }
    }
  return s * 0.25 * h * h;
}

}  // namespace

TEST_CASE("eval_K closed forms") {
  KernelParams p{0.5, 0.0};
  const Vec2 a = eval_K(p, {1.0, 0.0});
  CHECK(a.x1 == 0.0);
  CHECK(a.x2 == doctest::Approx(1.0).epsilon(1e-15));
  const Vec2 b = eval_K(p, {0.0, 2.0});
  CHECK(b.x1 == doctest::Approx(-2.0 / std::pow(2.0, 2.5)).epsilon(1e-15));
  CHECK(b.x1 == doctest::Approx(-0.3535533905932738).epsilon(1e-14));
  CHECK(b.x2 == 0.0);
  CHECK_THROWS_AS(eval_K(p, {0.0, 0.0}), DomainError);
}

TEST_CASE("eval_K is odd and has magnitude |z|^(-1-alpha)") {
  for (double alpha : {0.1, 0.5, 0.9}) {
    KernelParams p{alpha, 0.0};
    const Vec2 z{0.3, -0.4};
    const Vec2 k = eval_K(p, z);
    const Vec2 km = eval_K(p, -z);
    CHECK(km.x1 == -k.x1);
    CHECK(km.x2 == -k.x2);
    CHECK(close_rel(norm(k), std::pow(0.5, -1.0 - alpha), 1e-14));
  }
}

TEST_CASE("eval_K_reg reductions and monotonicity") {
  KernelParams p{0.5, 1e-6};
  const Vec2 zero = eval_K_reg(p, {0.0, 0.0});
  CHECK(zero.x1 == 0.0);
  CHECK(zero.x2 == 0.0);
  CHECK(norm(eval_K_reg(p, {1e-3, 0.0})) <= norm(eval_K(p, {1e-3, 0.0})));

  KernelParams p0{0.5, 0.0};
  const Vec2 z{0.07, -0.02};
  CHECK(eval_K_reg(p0, z) == eval_K(p0, z));
  CHECK_THROWS_AS(eval_K_reg(p0, {0.0, 0.0}), DomainError);

  double prev = norm(eval_K(p0, z));
  for (double eps : {1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
    const double m = norm(eval_K_reg({0.5, eps}, z));
    CHECK(m <= prev);
    prev = m;
  }
}

TEST_CASE("KernelParams validation") {
  CHECK_THROWS_AS((KernelParams{0.0, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((KernelParams{1.0, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((KernelParams{0.5, -1.0}.validate()), ConfigError);
  CHECK_NOTHROW((KernelParams{0.5, 0.0}.validate()));
}

TEST_CASE("image kernel: axis cancellation and tangency") {
  KernelParams p{0.5, 1e-8};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  for (int k = 0; k < 200; ++k) {
    const Vec2 x{u(rng), u(rng)};
    const Vec2 y_axis{u(rng), 0.0};
    const Vec2 v = eval_image_kernel(p, x, y_axis);
    CHECK(std::abs(v.x1) <= 1e-12 * norm(eval_K_reg(p, x - y_axis)));
    CHECK(std::abs(v.x2) <= 1e-12 * norm(eval_K_reg(p, x - y_axis)));

    const Vec2 y{u(rng), u(rng)};
    const double a = u(rng);
    const Vec2 on2 = eval_image_kernel(p, {0.0, a}, y);
    CHECK(std::abs(on2.x1) <= 1e-12 * std::max(norm(on2), norm(eval_K_reg(p, Vec2{0.0, a} - y))));
    const Vec2 on1 = eval_image_kernel(p, {a, 0.0}, y);
    CHECK(std::abs(on1.x2) <= 1e-12 * std::max(norm(on1), norm(eval_K_reg(p, Vec2{a, 0.0} - y))));
  }
}

TEST_CASE("image kernel equals the four-term sum") {
  KernelParams p{0.5, 1e-8};
  const Vec2 x{0.02, 0.01}, y{0.05, 0.04};
  const Vec2 ref = eval_K_reg(p, x - y) - eval_K_reg(p, x - reflect_tilde(y)) + eval_K_reg(p, x + y) -
                   eval_K_reg(p, x - reflect_bar(y));
  const Vec2 v = eval_image_kernel(p, x, y);
  CHECK(close_rel(v.x1, ref.x1, 1e-12));
  CHECK(close_rel(v.x2, ref.x2, 1e-12));
}

TEST_CASE("mollifier support, symmetry and unit mass") {
  CHECK_THROWS_AS(eval_mollifier(0.0, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(eval_mollifier(-1.0, {0.0, 0.0}), DomainError);
  CHECK(eval_mollifier(0.1, {0.1, 0.0}) == 0.0);
  CHECK(eval_mollifier(0.1, {0.08, 0.07}) == 0.0);
  CHECK(eval_mollifier(0.1, {0.03, 0.04}) > 0.0);
  CHECK(eval_mollifier(0.1, {0.03, 0.05}) == eval_mollifier(0.1, {0.05, -0.03}));

  // Normalization from a 1D radial integral, independent of the library constant.
  double radial = 0.0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) {
    const double s = (i + 0.5) / m;
    radial += s * raw_bump(s) / m;
  }
  const double c_ref = 1.0 / (2.0 * std::numbers::pi * radial);
  CHECK(close_rel(eval_mollifier(1.0, {0.0, 0.0}), c_ref * std::exp(-1.0), 1e-8));

  for (double nu : {1.0, 0.1}) {
    const double mass = square_integral([&](double a, double b) { return eval_mollifier(nu, {a, b}); }, nu, 200);
    CHECK(std::abs(mass - 1.0) <= 1e-6);
  }
}

TEST_CASE("finite-difference Jacobian within the decay envelope") {
  const double alpha = 0.5;
  KernelParams p{alpha, 0.0};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logr(std::log(1e-3), 0.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double r = std::exp(logr(rng)), t = ang(rng);
    const Vec2 z{r * std::cos(t), r * std::sin(t)};
    const double h = 1e-5 * r;
    const Vec2 d1 = (eval_K(p, z + Vec2{h, 0.0}) - eval_K(p, z - Vec2{h, 0.0})) * (0.5 / h);
    const Vec2 d2 = (eval_K(p, z + Vec2{0.0, h}) - eval_K(p, z - Vec2{0.0, h})) * (0.5 / h);
    // Frobenius norm of the Jacobian
    const double jac = std::sqrt(norm2(d1) + norm2(d2));
    worst = std::max(worst, jac * std::pow(r, 2.0 + alpha));
  }
  CHECK(worst <= 4.0);
  CHECK(worst > 1.0);
}
