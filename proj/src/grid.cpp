#include "timeops/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace timeops {

namespace {

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

void require_contained(const GridState& psi, const WeylTolerances& tol) {
  if (std::abs(psi.mean_position()) + tol.containment_sigmas * psi.width() >= psi.half_width())
    throw std::domain_error("weak_weyl_residual: packet escapes the grid domain");
}

}  // namespace

GridState::GridState(double half_width, Index n, double mass, VectorXcd samples)
    : half_width_(half_width), mass_(mass), samples_(std::move(samples)) {
  if (!(half_width_ > 0.0)) throw std::invalid_argument("GridState: L must be positive");
  if (!(mass_ > 0.0)) throw std::invalid_argument("GridState: mass must be positive");
  if (!is_power_of_two(n) || n < 2) throw std::invalid_argument("GridState: N must be a power of two");
  if (samples_.size() != n) throw std::invalid_argument("GridState: sample count differs from N");
  if (!samples_.allFinite()) throw std::invalid_argument("GridState: non-finite samples");
}

VectorXd GridState::positions() const {
  const Index n = size();
  VectorXd x(n);
  for (Index j = 0; j < n; ++j) x[j] = -half_width_ + static_cast<double>(j) * dx();
  return x;
}

VectorXd GridState::momenta() const {
  const Index n = size();
  const double dk = std::numbers::pi / half_width_;
  VectorXd k(n);
  for (Index q = 0; q < n; ++q) k[q] = dk * static_cast<double>(q < n / 2 ? q : q - n);
  return k;
}

double GridState::norm() const { return std::sqrt(dx()) * samples_.norm(); }

Complex GridState::inner(const GridState& other) const {
  if (other.size() != size()) throw std::invalid_argument("GridState::inner: grid mismatch");
  return dx() * samples_.dot(other.samples_);
}

GridState GridState::with_samples(VectorXcd samples) const {
  return GridState(half_width_, size(), mass_, std::move(samples));
}

double GridState::mean_position() const {
  const VectorXd rho = samples_.cwiseAbs2();
  return rho.dot(positions()) / rho.sum();
}

double GridState::width() const {
  const VectorXd rho = samples_.cwiseAbs2();
  const VectorXd x = positions().array() - mean_position();
  return std::sqrt(2.0 * rho.dot(x.cwiseAbs2()) / rho.sum());
}

VectorXcd dft(const VectorXcd& x) {
  Eigen::FFT<double> fft;
  VectorXcd out(x.size());
  fft.fwd(out, x);
  return out;
}

VectorXcd idft(const VectorXcd& x) {
  Eigen::FFT<double> fft;
  VectorXcd out(x.size());
  fft.inv(out, x);
  return out;
}

VectorXcd momentum_amplitudes(const GridState& psi) {
  const VectorXd x0 = psi.positions();
  const VectorXd k = psi.momenta();
  VectorXcd hat = dft(psi.samples());
  // The DFT sums against e^{-i k (x - x_0)}; restore the e^{-i k x_0} phase.
  for (Index q = 0; q < hat.size(); ++q)
    hat[q] *= std::polar(psi.dx() / std::sqrt(2.0 * std::numbers::pi), -k[q] * x0[0]);
  return hat;
}

double zero_mode_fraction(const GridState& psi) {
  const VectorXcd hat = dft(psi.samples());
  const double total = hat.squaredNorm();
  return total == 0.0 ? 0.0 : std::norm(hat[0]) / total;
}

GridState make_packet(double half_width, Index n, double mass, double x0, double k0, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("make_packet: sigma must be positive");
  if (!(std::abs(k0) >= 4.0 / sigma))
    throw std::invalid_argument("make_packet: need |k0| >= 4 / sigma to stay away from k = 0");
  if (!(std::abs(x0) + 6.0 * sigma < half_width))
    throw std::invalid_argument("make_packet: packet does not fit, need |x0| + 6 sigma < L");
  GridState grid(half_width, n, mass, VectorXcd::Zero(n));
  const VectorXd x = grid.positions();
  VectorXcd s(n);
  for (Index j = 0; j < n; ++j) {
    const double u = (x[j] - x0) / sigma;
    s[j] = std::polar(std::exp(-0.5 * u * u), k0 * x[j]);
  }
  s /= std::sqrt(grid.dx()) * s.norm();
  return grid.with_samples(std::move(s));
}

GridState ab_apply(const GridState& psi) {
  if (zero_mode_fraction(psi) >= 1e-10)
    throw std::domain_error("ab_apply: state carries momentum mass at k = 0");
  const VectorXd x = psi.positions();
  const VectorXd k = psi.momenta();
  VectorXd inv_k(k.size());
  for (Index q = 0; q < k.size(); ++q) inv_k[q] = q == 0 ? 0.0 : 1.0 / k[q];

  auto p_inverse = [&](const VectorXcd& f) -> VectorXcd {
    return idft(inv_k.cwiseProduct(dft(f)).eval());
  };
  const VectorXcd& s = psi.samples();
  const VectorXcd q_pinv = x.cwiseProduct(p_inverse(s));
  const VectorXcd pinv_q = p_inverse(x.cwiseProduct(s).eval());
  return psi.with_samples(0.5 * psi.mass() * (q_pinv + pinv_q));
}

GridState free_evolve(const GridState& psi, double t) {
  if (t == 0.0) return psi;
  const VectorXd k = psi.momenta();
  VectorXcd hat = dft(psi.samples());
  for (Index q = 0; q < hat.size(); ++q) hat[q] *= std::polar(1.0, -t * k[q] * k[q] / (2.0 * psi.mass()));
  return psi.with_samples(idft(hat));
}

double weak_weyl_residual(const GridState& psi, double t, const WeylTolerances& tol) {
  require_contained(psi, tol);
  const GridState evolved = free_evolve(psi, t);
  require_contained(evolved, tol);
  if (zero_mode_fraction(evolved) >= tol.zero_mode_fraction)
    throw std::domain_error("weak_weyl_residual: evolved state carries k = 0 mass");

  const GridState lhs = ab_apply(evolved);
  const GridState shifted = psi.with_samples(ab_apply(psi).samples() + t * psi.samples());
  const GridState rhs = free_evolve(shifted, t);
  return lhs.with_samples(lhs.samples() - rhs.samples()).norm() / psi.norm();
}

double heisenberg_residual(const GridState& psi, double t, const WeylTolerances& tol) {
  require_contained(psi, tol);
  const GridState evolved = free_evolve(psi, t);
  require_contained(evolved, tol);
  const GridState back = free_evolve(ab_apply(evolved), -t);
  const VectorXcd rhs = ab_apply(psi).samples() + t * psi.samples();
  return psi.with_samples(back.samples() - rhs).norm() / psi.norm();
}

}  // namespace timeops
