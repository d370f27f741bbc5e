#include "timeops/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace timeops {

namespace {

std::string format_list(std::span<const double> xs) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  os << ']';
  return os.str();
}

}  // namespace

const char* to_string(Accumulation a) {
  return a == Accumulation::ToZero ? "to_zero" : "to_infinity";
}

DiscreteSpectrum::DiscreteSpectrum(std::vector<SpectralEntry> entries, Accumulation accumulation,
                                   std::string label)
    : entries_(std::move(entries)), accumulation_(accumulation), label_(std::move(label)) {
  if (entries_.empty()) throw std::invalid_argument("DiscreteSpectrum: no entries");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!std::isfinite(e.value)) throw std::invalid_argument("DiscreteSpectrum: non-finite value");
    if (e.multiplicity < 1) throw std::invalid_argument("DiscreteSpectrum: multiplicity < 1");
    if (i > 0 && !(entries_[i - 1].value < e.value))
      throw std::invalid_argument("DiscreteSpectrum: values must be strictly increasing");
  }
  if (accumulation_ == Accumulation::ToZero) {
    // Levels sit strictly on one side of the accumulation point; E_1 < ... < 0
    // is the usual case, the positive side comes from inverting a positive
    // spectrum that runs off to infinity.
    const bool negative = entries_.back().value < 0.0;
    const bool positive = entries_.front().value > 0.0;
    if (!negative && !positive)
      throw std::invalid_argument(
          "DiscreteSpectrum: to_zero spectrum must exclude 0 and lie on one side of it");
  }
}

int DiscreteSpectrum::total_multiplicity() const {
  int total = 0;
  for (const auto& e : entries_) total += e.multiplicity;
  return total;
}

VectorXd DiscreteSpectrum::values() const {
  VectorXd v(static_cast<Index>(entries_.size()));
  for (std::size_t i = 0; i < entries_.size(); ++i) v[static_cast<Index>(i)] = entries_[i].value;
  return v;
}

HermitianMatrix::HermitianMatrix(MatrixXcd data, std::vector<std::string> basis_labels)
    : data_(std::move(data)), basis_labels_(std::move(basis_labels)) {
  if (data_.rows() != data_.cols() || data_.rows() == 0)
    throw std::invalid_argument("HermitianMatrix: data must be square and non-empty");
  if (!basis_labels_.empty() && static_cast<Index>(basis_labels_.size()) != data_.rows())
    throw std::invalid_argument("HermitianMatrix: label count does not match dimension");
  if (hermiticity_defect(data_) > 1e-12)
    throw std::invalid_argument("HermitianMatrix: matrix is not Hermitian");
}

VectorXd HermitianMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(data_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
  return solver.eigenvalues();
}

DiscreteSpectrum harmonic_spectrum(std::span<const double> omega, int n_max) {
  if (omega.empty()) throw std::invalid_argument("harmonic_spectrum: empty frequency list");
  for (double w : omega)
    if (!(w > 0.0)) throw std::invalid_argument("harmonic_spectrum: frequencies must be positive");
  if (n_max < 1) throw std::invalid_argument("harmonic_spectrum: n_max must be >= 1");

  const std::size_t d = omega.size();
  std::vector<double> levels;
  std::vector<int> n(d, 0);
  // Odometer over the simplex sum n_j <= n_max.
  for (;;) {
    double e = 0.0;
    for (std::size_t j = 0; j < d; ++j) e += omega[j] * (n[j] + 0.5);
    levels.push_back(e);

    std::size_t j = 0;
    int used = 0;
    for (int v : n) used += v;
    while (j < d) {
      if (used < n_max) {
        ++n[j];
        break;
      }
      used -= n[j];
      n[j] = 0;
      ++j;
    }
    if (j == d) break;
  }
  std::sort(levels.begin(), levels.end());

  const double merge_tol = 1e-10 * *std::max_element(omega.begin(), omega.end());
  std::vector<SpectralEntry> entries;
  for (double e : levels) {
    if (!entries.empty() && e - entries.back().value <= merge_tol)
      ++entries.back().multiplicity;
    else
      entries.push_back({e, 1});
  }
  std::ostringstream label;
  label << "oscillator d=" << d << " omega=" << format_list(omega) << " n_max=" << n_max;
  return DiscreteSpectrum(std::move(entries), Accumulation::ToInfinity, label.str());
}

DiscreteSpectrum hydrogen_point_spectrum(double m, double gamma, int n_max) {
  if (!(m > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("hydrogen_point_spectrum: m and gamma must be positive");
  if (n_max < 1) throw std::invalid_argument("hydrogen_point_spectrum: n_max must be >= 1");
  std::vector<SpectralEntry> entries;
  entries.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n)
    entries.push_back({-m * gamma * gamma / (2.0 * n * n), n * n});
  std::ostringstream label;
  label.precision(17);
  label << "hydrogen m=" << m << " gamma=" << gamma << " n_max=" << n_max;
  return DiscreteSpectrum(std::move(entries), Accumulation::ToZero, label.str());
}

HermitianMatrix rabi_hamiltonian(double mu, double omega, double g, int fock_cutoff) {
  if (fock_cutoff < 2) throw std::invalid_argument("rabi_hamiltonian: fock_cutoff must be >= 2");
  const Index levels = fock_cutoff + 1;
  const Index dim = 2 * levels;
  if (dim > kMaxDenseDimension) throw std::invalid_argument("rabi_hamiltonian: dimension too large");

  MatrixXcd h = MatrixXcd::Zero(dim, dim);
  std::vector<std::string> labels(static_cast<std::size_t>(dim));
  for (Index s = 0; s < 2; ++s) {
    const double sz = s == 0 ? 1.0 : -1.0;
    for (Index n = 0; n < levels; ++n) {
      const Index i = s * levels + n;
      h(i, i) = mu * sz + omega * static_cast<double>(n);
      labels[static_cast<std::size_t>(i)] = (s == 0 ? "up," : "down,") + std::to_string(n);
    }
  }
  // g sigma_x (x) (a + a*): <n+1| a* |n> = sqrt(n+1), spin flipped.
  for (Index n = 0; n + 1 < levels; ++n) {
    const double c = g * std::sqrt(static_cast<double>(n + 1));
    const Index up_n = n, up_n1 = n + 1;
    const Index dn_n = levels + n, dn_n1 = levels + n + 1;
    h(up_n1, dn_n) = h(dn_n, up_n1) = c;
    h(dn_n1, up_n) = h(up_n, dn_n1) = c;
  }
  return HermitianMatrix(std::move(h), std::move(labels));
}

std::vector<bool> rabi_bound_check(std::span<const double> eigenvalues, double mu, double omega,
                                   double g, int count) {
  if (count < 1 || 2 * static_cast<std::size_t>(count) > eigenvalues.size())
    throw std::invalid_argument("rabi_bound_check: count too large for eigenvalue list");
  if (!std::is_sorted(eigenvalues.begin(), eigenvalues.end()))
    throw std::invalid_argument("rabi_bound_check: eigenvalues must be sorted ascending");
  std::vector<bool> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    const double nu = omega * n - g * g / omega;
    const double e = eigenvalues[2 * static_cast<std::size_t>(n)];
    out.push_back(nu - mu <= e && e <= nu + mu);
  }
  return out;
}

DiscreteSpectrum invert_spectrum(const DiscreteSpectrum& s) {
  std::vector<SpectralEntry> inv;
  inv.reserve(s.levels());
  for (const auto& e : s.entries()) {
    if (e.value == 0.0) throw std::invalid_argument("invert_spectrum: zero eigenvalue present");
    inv.push_back({1.0 / e.value, e.multiplicity});
  }
  std::sort(inv.begin(), inv.end(),
            [](const SpectralEntry& a, const SpectralEntry& b) { return a.value < b.value; });
  const auto acc = s.accumulation() == Accumulation::ToZero ? Accumulation::ToInfinity
                                                            : Accumulation::ToZero;
  return DiscreteSpectrum(std::move(inv), acc, "inverse of " + s.label());
}

}  // namespace timeops
