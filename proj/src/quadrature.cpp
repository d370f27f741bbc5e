#include "timeops/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace timeops {

QuadratureRule gauss_hermite(Index n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: need at least one node");
  // Recurrence H_{k+1} = 2x H_k - 2k H_{k-1}; orthonormal Jacobi off-diagonal sqrt(k/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Index k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  if (es.info() != Eigen::Success) throw std::runtime_error("gauss_hermite: eigensolve failed");

  QuadratureRule rule{es.eigenvalues(), VectorXd(n)};
  const double mu0 = std::sqrt(std::numbers::pi);
  for (Index i = 0; i < n; ++i) rule.weights[i] = mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  // The rule is symmetric about 0; average mirrored pairs to remove solver noise.
  for (Index i = 0; i < n / 2; ++i) {
    const Index j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace timeops
