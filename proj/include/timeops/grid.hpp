#pragma once

#include "timeops/types.hpp"

namespace timeops {

/// Wavefunction on the periodic grid x_j = -L + j (2L / N), j = 0..N-1.
///
/// Momentum index q carries k_q = (2 pi / 2L) q for q < N/2 and
/// (2 pi / 2L)(q - N) otherwise, matching the unshifted DFT ordering.
/// Norms and inner products use the quadrature weight dx = 2L / N.
class GridState {
 public:
  GridState(double half_width, Index n, double mass, VectorXcd samples);

  double half_width() const { return half_width_; }
  Index size() const { return samples_.size(); }
  double mass() const { return mass_; }
  double dx() const { return 2.0 * half_width_ / static_cast<double>(size()); }
  const VectorXcd& samples() const { return samples_; }

  VectorXd positions() const;
  VectorXd momenta() const;

  double norm() const;
  Complex inner(const GridState& other) const;  // (this, other), antilinear in this

  /// Same grid, new samples.
  GridState with_samples(VectorXcd samples) const;

  /// <x> and sqrt(2 Var x) under |psi|^2, the Gaussian width parameter.
  double mean_position() const;
  double width() const;

 private:
  double half_width_;
  double mass_;
  VectorXcd samples_;
};

/// Forward DFT (no normalization) and its inverse (1/N).
VectorXcd dft(const VectorXcd& x);
VectorXcd idft(const VectorXcd& x);

/// Continuous-transform samples psi_hat(k_q) = dx / sqrt(2 pi) sum_j psi_j e^{-i k_q x_j}.
VectorXcd momentum_amplitudes(const GridState& psi);

/// Fraction of ||psi||^2 carried by the k = 0 mode.
double zero_mode_fraction(const GridState& psi);

/// Normalized Gaussian packet e^{i k0 x} e^{-(x - x0)^2 / (2 sigma^2)}.
/// Requires N a power of two, |k0| >= 4 / sigma and |x0| + 6 sigma < L.
GridState make_packet(double half_width, Index n, double mass, double x0, double k0, double sigma);

/// Aharonov-Bohm operator (m/2)(Q P^-1 + P^-1 Q) with the k = 0 mode removed.
/// Rejects states with more than 1e-10 of their norm^2 on k = 0.
GridState ab_apply(const GridState& psi);

/// e^{-i t P^2 / 2m} psi, exact on the grid.
GridState free_evolve(const GridState& psi, double t);

struct WeylTolerances {
  double zero_mode_fraction = 1e-10;
  double containment_sigmas = 6.0;
};

/// || T e^{-itH} psi - e^{-itH} (T + t) psi || / ||psi|| for H = P^2/2m,
/// T the Aharonov-Bohm operator. Throws std::domain_error when the evolved
/// packet is not contained (|<x>| + 6 width < L) or carries k = 0 mass.
double weak_weyl_residual(const GridState& psi, double t, const WeylTolerances& tol = {});

/// || e^{itH} T e^{-itH} psi - (T + t) psi || / ||psi||, same preconditions.
double heisenberg_residual(const GridState& psi, double t, const WeylTolerances& tol = {});

}  // namespace timeops
