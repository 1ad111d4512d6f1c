// SPDX-License-Identifier: Apache-2.0

#include "plate/material.hpp"

#include <cmath>

namespace plate {

MaterialTensor::MaterialTensor(double stiffness, double poisson) : d_(stiffness), nu_(poisson) {
  if (!(d_ > 0)) throw InvalidMaterial("material stiffness D must be positive");
  if (!(nu_ > -1.0 && nu_ < 0.5))
    throw InvalidMaterial("Poisson ratio must lie in (-1, 1/2)");
}

Eigen::Matrix2d MaterialTensor::apply(const Eigen::Matrix2d& n) const {
  return d_ * ((1.0 - nu_) * n + nu_ * n.trace() * Eigen::Matrix2d::Identity());
}

Eigen::Matrix2d MaterialTensor::apply_inverse(const Eigen::Matrix2d& m) const {
  if (std::abs(1.0 - nu_) < 1e-12 || std::abs(1.0 + nu_) < 1e-12)
    throw SingularMaterial("material tensor is singular for nu -> +-1");
  return (m - (nu_ / (1.0 + nu_)) * m.trace() * Eigen::Matrix2d::Identity()) / (d_ * (1.0 - nu_));
}

}  // namespace plate
