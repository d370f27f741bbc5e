#pragma once

#include "timeops/types.hpp"

namespace timeops {

struct QuadratureRule {
  VectorXd nodes;
  VectorXd weights;

  template <typename F>
  auto integrate(F&& f) const {
    decltype(f(0.0)) acc{};
    for (Index i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// n-point Gauss-Hermite rule for the weight e^{-x^2} on the real line
/// (Golub-Welsch on the symmetric Jacobi matrix, nodes symmetrized).
QuadratureRule gauss_hermite(Index n);

}  // namespace timeops
