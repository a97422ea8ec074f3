#pragma once

#include "afem/types.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace afem::quad {

struct Point1 {
  double x;  // in [0, 1]
  double w;  // sums to 1
};

struct Point2 {
  std::array<double, 3> bary;
  double w;  // sums to 1 (multiply by area)
};

/// Gauss-Legendre rule on [0, 1] with n points, weights summing to 1.
inline std::vector<Point1> gauss_legendre(int n) {
  std::vector<Point1> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    pts[static_cast<std::size_t>(i)] = {0.5 * (1.0 - x), 0.5 * w};
  }
  return pts;
}

/// Seven-point rule on a triangle, exact for polynomials of degree 5.
inline const std::vector<Point2>& triangle7() {
  static const std::vector<Point2> rule = [] {
    const double w0 = 0.225;
    const double s15 = std::sqrt(15.0);
    const double A1 = (9.0 - 2.0 * s15) / 21.0, B1 = (6.0 + s15) / 21.0;
    const double A2 = (9.0 + 2.0 * s15) / 21.0, B2 = (6.0 - s15) / 21.0;
    const double W1 = (155.0 + s15) / 1200.0, W2 = (155.0 - s15) / 1200.0;
    std::vector<Point2> r;
    r.push_back({{1.0 / 3, 1.0 / 3, 1.0 / 3}, w0});
    r.push_back({{A1, B1, B1}, W1});
    r.push_back({{B1, A1, B1}, W1});
    r.push_back({{B1, B1, A1}, W1});
    r.push_back({{A2, B2, B2}, W2});
    r.push_back({{B2, A2, B2}, W2});
    r.push_back({{B2, B2, A2}, W2});
    return r;
  }();
  return rule;
}

/// Collapsed (Duffy) tensor Gauss rule on a triangle with n*n points; exact
/// for polynomials of degree 2n-2.
inline std::vector<Point2> triangle_collapsed(int n) {
  const auto g = gauss_legendre(n);
  std::vector<Point2> r;
  r.reserve(static_cast<std::size_t>(n * n));
  for (const auto& p : g) {
    for (const auto& q : g) {
      // (u, v) in the unit square -> lambda = (1-u, u(1-v), uv), jacobian 2u.
      const double u = p.x, v = q.x;
      r.push_back({{1.0 - u, u * (1.0 - v), u * v}, p.w * q.w * 2.0 * u});
    }
  }
  return r;
}

inline Vec2 map_point(const std::array<Vec2, 3>& x, const std::array<double, 3>& bary) {
  return bary[0] * x[0] + bary[1] * x[1] + bary[2] * x[2];
}

} // namespace afem::quad
