// SPDX-License-Identifier: Apache-2.0

#ifndef PLATE_MATERIAL_HPP
#define PLATE_MATERIAL_HPP

#include <Eigen/Dense>

#include "plate/errors.hpp"

namespace plate {

/// Isotropic plate material tensor C N = D ((1-nu) N + nu tr(N) I),
/// positive definite on symmetric matrices for D > 0, -1 < nu < 1/2.
class MaterialTensor {
 public:
  MaterialTensor(double stiffness, double poisson);
  static MaterialTensor identity() { return MaterialTensor(1.0, 0.0); }

  double stiffness() const { return d_; }
  double poisson() const { return nu_; }
  bool is_identity() const { return d_ == 1.0 && nu_ == 0.0; }

  Eigen::Matrix2d apply(const Eigen::Matrix2d& n) const;
  Eigen::Matrix2d apply_inverse(const Eigen::Matrix2d& m) const;

  /// C^{-1}(q I) = q * inverse_identity_scale() * I.
  double inverse_identity_scale() const { return 1.0 / (d_ * (1.0 + nu_)); }

 private:
  double d_, nu_;
};

inline Eigen::Matrix2d apply_C(const MaterialTensor& mat, const Eigen::Matrix2d& n) {
  return mat.apply(n);
}
inline Eigen::Matrix2d apply_Cinv(const MaterialTensor& mat, const Eigen::Matrix2d& m) {
  return mat.apply_inverse(m);
}

}  // namespace plate

#endif
