// SPDX-License-Identifier: Apache-2.0

#include "plate/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace plate {

GaussRule1d gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule1d rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  // Newton iteration on Legendre polynomials, nodes on [-1,1] mapped to [0,1].
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double r = std::cos(M_PI * (4 * i + 3) / (4 * n + 2));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = r;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * r * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (r * p1 - p0) / (r * r - 1.0);
      double dr = p1 / dp;
      r -= dr;
      if (std::abs(dr) < 1e-16 * (1.0 + std::abs(r))) break;
    }
    double w = 2.0 / ((1.0 - r * r) * dp * dp);
    rule.points[i] = 0.5 * (1.0 - r);
    rule.points[n - 1 - i] = 0.5 * (1.0 + r);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

QuadRule triangle_rule(int order) {
  if (order < 0) order = 0;
  // Duffy map (a,b) -> (a, b(1-a)) raises the degree in `a` by one.
  const int n = (order + 3) / 2;
  GaussRule1d g = gauss_legendre(n);
  QuadRule rule;
  rule.order = order;
  rule.points.resize(n * n, 2);
  rule.weights.resize(n * n);
  int q = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j, ++q) {
      const double a = g.points[i];
      const double b = g.points[j];
      rule.points(q, 0) = a;
      rule.points(q, 1) = b * (1.0 - a);
      rule.weights[q] = g.weights[i] * g.weights[j] * (1.0 - a);
    }
  }
  return rule;
}

QuadRule square_rule(int order) {
  if (order < 0) order = 0;
  const int n = order / 2 + 1;
  GaussRule1d g = gauss_legendre(n);
  QuadRule rule;
  rule.order = order;
  rule.points.resize(n * n, 2);
  rule.weights.resize(n * n);
  int q = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j, ++q) {
      rule.points(q, 0) = g.points[i];
      rule.points(q, 1) = g.points[j];
      rule.weights[q] = g.weights[i] * g.weights[j];
    }
  }
  return rule;
}

}  // namespace plate
