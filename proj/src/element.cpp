// SPDX-License-Identifier: Apache-2.0

#include "plate/element.hpp"

namespace plate {

ReferenceElement::ReferenceElement(CellKind kind, int degree) : kind_(kind), degree_(degree) {
  if (kind == CellKind::Quad && degree != 1)
    throw ShapeMismatch("quad elements support degree 1 only");
  if (degree < 1 || degree > 3)
    throw ShapeMismatch("element degree must be in {1,2,3}");

  const int k = degree;
  if (kind == CellKind::Triangle) {
    const Eigen::Vector2d v[3] = {{0, 0}, {1, 0}, {0, 1}};
    for (int i = 0; i < 3; ++i) nodes_.push_back(v[i]);
    for (int e = 0; e < 3; ++e) {
      auto [a, b] = edge_vertices(e);
      for (int m = 1; m < k; ++m)
        nodes_.push_back(v[a] + (v[b] - v[a]) * (static_cast<double>(m) / k));
    }
    for (int i = 1; i <= k - 1; ++i)
      for (int j = 1; i + j <= k - 1; ++j)
        nodes_.push_back(Eigen::Vector2d(static_cast<double>(i) / k, static_cast<double>(j) / k));

    const int m = (k + 1) * (k + 2) / 2;
    powers_.resize(m, 2);
    int q = 0;
    for (int d = 0; d <= k; ++d)
      for (int a = d; a >= 0; --a, ++q) powers_.row(q) << a, d - a;
  } else {
    nodes_ = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    powers_.resize(4, 2);
    powers_ << 0, 0, 1, 0, 0, 1, 1, 1;
  }

  const int m = static_cast<int>(nodes_.size());
  Eigen::MatrixXd vander(m, m);
  for (int i = 0; i < m; ++i) vander.row(i) = monomials(nodes_[i]).transpose();
  coeff_ = vander.inverse();
}

std::pair<int, int> ReferenceElement::edge_vertices(int e) const {
  if (kind_ == CellKind::Triangle) {
    constexpr int tri[3][2] = {{0, 1}, {1, 2}, {2, 0}};
    return {tri[e][0], tri[e][1]};
  }
  constexpr int quad[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  return {quad[e][0], quad[e][1]};
}

Eigen::VectorXd ReferenceElement::monomials(const Eigen::Vector2d& ref) const {
  const int m = static_cast<int>(powers_.rows());
  Eigen::VectorXd out(m);
  for (int q = 0; q < m; ++q)
    out[q] = std::pow(ref.x(), powers_(q, 0)) * std::pow(ref.y(), powers_(q, 1));
  return out;
}

Eigen::VectorXd ReferenceElement::values(const Eigen::Vector2d& ref) const {
  return coeff_.transpose() * monomials(ref);
}

Eigen::Matrix<double, Eigen::Dynamic, 2> ReferenceElement::gradients(const Eigen::Vector2d& ref) const {
  const int m = static_cast<int>(powers_.rows());
  Eigen::MatrixXd dm(m, 2);
  for (int q = 0; q < m; ++q) {
    const int a = powers_(q, 0), b = powers_(q, 1);
    dm(q, 0) = a == 0 ? 0.0 : a * std::pow(ref.x(), a - 1) * std::pow(ref.y(), b);
    dm(q, 1) = b == 0 ? 0.0 : b * std::pow(ref.x(), a) * std::pow(ref.y(), b - 1);
  }
  return coeff_.transpose() * dm;
}

}  // namespace plate
