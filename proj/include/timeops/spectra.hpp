#pragma once

#include <span>
#include <string>
#include <vector>

#include "timeops/types.hpp"

namespace timeops {

enum class Accumulation { ToZero, ToInfinity };

struct SpectralEntry {
  double value;
  int multiplicity;

  friend bool operator==(const SpectralEntry&, const SpectralEntry&) = default;
};

/// Sorted list of distinct eigenvalues with multiplicities.
///
/// Construction validates the invariants: values strictly increasing, every
/// multiplicity at least one, and for `ToZero` all values strictly on one side
/// of the origin (usually E_1 < E_2 < ... < 0). Throws std::invalid_argument
/// otherwise.
class DiscreteSpectrum {
 public:
  DiscreteSpectrum(std::vector<SpectralEntry> entries, Accumulation accumulation,
                   std::string label = {});

  const std::vector<SpectralEntry>& entries() const { return entries_; }
  Accumulation accumulation() const { return accumulation_; }
  const std::string& label() const { return label_; }

  std::size_t levels() const { return entries_.size(); }
  int total_multiplicity() const;
  VectorXd values() const;

  friend bool operator==(const DiscreteSpectrum&, const DiscreteSpectrum&) = default;

 private:
  std::vector<SpectralEntry> entries_;
  Accumulation accumulation_;
  std::string label_;
};

/// Dense complex matrix that is Hermitian to 1e-12 relative to its largest entry.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(MatrixXcd data, std::vector<std::string> basis_labels = {});

  Index dimension() const { return data_.rows(); }
  const MatrixXcd& data() const { return data_; }
  const std::vector<std::string>& basis_labels() const { return basis_labels_; }

  /// Ascending eigenvalues, repeated according to multiplicity.
  VectorXd eigenvalues() const;

 private:
  MatrixXcd data_;
  std::vector<std::string> basis_labels_;
};

/// max |A - A^H| / max |A| (zero for the zero matrix).
template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

/// Levels sum_j omega_j (n_j + 1/2) over the lattice n_j >= 0, sum n_j <= n_max.
/// Values closer than 1e-10 * max(omega) are merged and their lattice counts added.
DiscreteSpectrum harmonic_spectrum(std::span<const double> omega, int n_max);

/// Bound-state energies -m gamma^2 / (2 n^2), n = 1..n_max, with the usual n^2
/// degeneracy of the Coulomb problem.
DiscreteSpectrum hydrogen_point_spectrum(double m, double gamma, int n_max);

/// Rabi Hamiltonian mu sigma_z (x) 1 + omega 1 (x) a*a + g sigma_x (x) (a + a*)
/// on spin (x) span{|0>, ..., |fock_cutoff>}. Basis index is spin * (cutoff + 1) + n
/// with spin 0 the sigma_z = +1 state. Couplings past the cutoff are dropped.
HermitianMatrix rabi_hamiltonian(double mu, double omega, double g, int fock_cutoff);

/// For n = 0..count-1, whether eigenvalues[2n] lies within mu of omega n - g^2/omega.
std::vector<bool> rabi_bound_check(std::span<const double> eigenvalues, double mu,
                                   double omega, double g, int count);

/// lambda -> 1/lambda, re-sorted; accumulation flips between ToZero and ToInfinity.
DiscreteSpectrum invert_spectrum(const DiscreteSpectrum& s);

const char* to_string(Accumulation a);

}  // namespace timeops
