#pragma once

#include <random>

#include "timeops/uwform.hpp"

namespace timeops {

using Rng = std::mt19937_64;

/// Coefficients uniform on [-1, 1]^2 in the complex plane.
inline VectorXcd random_coefficients(Rng& rng, Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXcd v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = u(rng);
    const double im = u(rng);
    v[i] = Complex(re, im);
  }
  return v;
}

/// Unit vector in span{e_n - e_m}: random coefficients minus their mean.
/// Needs n >= 2.
inline VectorXcd random_difference_vector(Rng& rng, Index n) {
  VectorXcd v = random_coefficients(rng, n);
  v.array() -= v.mean();
  return v.normalized();
}

/// Orthogonal projection onto {c : sum_n w_n c_n = 0} for a real weight w.
inline VectorXcd project_out(const VectorXcd& c, const VectorXd& w) {
  const Complex along = w.cast<Complex>().dot(c) / w.squaredNorm();
  return c - along * w.cast<Complex>();
}

/// Unit vector in the ultra-weak CCR domain of `form`; channels of size one
/// admit only the zero component. Returns the zero vector if every channel
/// has size one.
inline VectorXcd random_uw_vector(Rng& rng, const SesquilinearForm& form) {
  VectorXcd v = VectorXcd::Zero(form.dimension());
  for (const auto& c : form.channels()) {
    const Index n = c.eigenvalues.size();
    if (n < 2) continue;
    v.segment(c.offset, n) = project_out(random_coefficients(rng, n), c.eigenvalues);
  }
  const double norm = v.norm();
  return norm > 0.0 ? VectorXcd(v / norm) : v;
}

}  // namespace timeops
