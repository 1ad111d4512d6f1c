// SPDX-License-Identifier: Apache-2.0

#ifndef PLATE_ASSEMBLY_HPP
#define PLATE_ASSEMBLY_HPP

#include <functional>

#include "plate/linalg.hpp"
#include "plate/material.hpp"
#include "plate/quadrature.hpp"
#include "plate/space.hpp"

namespace plate {

/// Registered volume bilinear forms.
enum class VolumeForm {
  GradGrad,         ///< (grad u, grad v), scalar x scalar
  SymCurlSymCurl,   ///< (symCurl phi, symCurl psi) in the C^{-1} inner product
  TraceCoupling,    ///< (q I, symCurl psi)_{C^{-1}}, vector test x scalar trial
  Mass              ///< (u, v), scalar x scalar
};

/// Element-loop assembly; entries exact for quadrature order >= 2k
/// (the default). Throws ShapeMismatch on incompatible spaces.
CsrMatrix assemble(const FeSpace& test, const FeSpace& trial, VolumeForm form,
                   const MaterialTensor& material, int quad_order = -1);

Eigen::VectorXd assemble_load(const FeSpace& scalar,
                              const std::function<double(const Eigen::Vector2d&)>& f,
                              int quad_order = -1);

/// rhs_i = integral of tr(C^{-1} M(x)) v_i for a given moment field.
Eigen::VectorXd assemble_tr_moment_rhs(const FeSpace& scalar,
                                       const std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>& moment,
                                       const MaterialTensor& material, int quad_order);

/// Columns are L2 moments against the three fields (1,0), (0,1), (x1,x2)
/// spanning RT0; used to pin the quotient.
Eigen::MatrixXd rt0_moments(const FeSpace& vec_space);

QuadRule volume_rule(const Mesh& mesh, int order);

}  // namespace plate

#endif
