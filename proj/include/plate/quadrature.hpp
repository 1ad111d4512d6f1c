// SPDX-License-Identifier: Apache-2.0

#ifndef PLATE_QUADRATURE_HPP
#define PLATE_QUADRATURE_HPP

#include <Eigen/Dense>

namespace plate {

/// Gauss-Legendre rule on [0,1]; n points integrate degree 2n-1 exactly.
struct GaussRule1d {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};

GaussRule1d gauss_legendre(int n);

/// Quadrature on a reference cell: the unit triangle {x,y >= 0, x+y <= 1}
/// or the unit square [0,1]^2. Weights sum to the reference measure.
struct QuadRule {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;
  int order = 0;  ///< polynomial degree integrated exactly

  int size() const { return static_cast<int>(weights.size()); }
};

/// Rule on the unit triangle exact for polynomials up to `order`,
/// built by collapsing a tensor Gauss rule. All weights positive.
QuadRule triangle_rule(int order);

/// Tensor Gauss rule on the unit square exact up to `order` per variable.
QuadRule square_rule(int order);

}  // namespace plate

#endif
