#pragma once

#include <string>
#include <vector>

#include "timeops/decompose.hpp"
#include "timeops/spectra.hpp"
#include "timeops/timeop.hpp"

namespace timeops {

/// Ultra-weak time operator as a sesquilinear form over eigenbasis coefficients.
///
/// Each channel carries simple nonzero eigenvalues E and S, the Galapon matrix
/// of diag(1/E). On one channel
///
///   t[phi, psi] = -1/2 { (S phi, H^-2 psi) + (H^-2 phi, S psi) },
///
/// antilinear in phi. A multi-channel form is the channelwise sum over the
/// concatenated basis. The ultra-weak CCR domain is the direct sum of the
/// sets {c : sum_n E_n c_n = 0}, i.e. H^-1 applied to the difference span.
class SesquilinearForm {
 public:
  struct Channel {
    VectorXd eigenvalues;
    TimeOperatorMatrixd s;
    VectorXd inv_sq;  // 1 / E_n^2, applied as exact diagonal arithmetic
    Index offset = 0;
  };

  SesquilinearForm() = default;
  explicit SesquilinearForm(std::vector<Channel> channels);

  Index dimension() const { return dimension_; }
  const std::vector<Channel>& channels() const { return channels_; }
  std::size_t channel_count() const { return channels_.size(); }

  Complex operator()(const VectorXcd& phi, const VectorXcd& psi) const;

  /// H applied as the diagonal of all channel eigenvalues.
  VectorXcd apply_h(const VectorXcd& phi) const;
  VectorXd h_diagonal() const;

  /// Membership in the ultra-weak CCR domain: on every channel,
  /// |sum_n E_n c_n| <= tol * ||H c||.
  bool in_uw_domain(const VectorXcd& phi, double rel_tol = 1e-10) const;

 private:
  std::vector<Channel> channels_;
  Index dimension_ = 0;
};

/// Form on one simple channel of nonzero, pairwise distinct eigenvalues.
SesquilinearForm uwform_channel(const VectorXd& eigenvalues);

/// Form on one channel of strictly negative, strictly increasing eigenvalues.
SesquilinearForm uwform_point(const VectorXd& eigenvalues);

/// Channelwise sum; the basis is the concatenation of the channel bases.
SesquilinearForm direct_sum_form(const std::vector<SesquilinearForm>& forms);

/// |t[H phi, psi] - t[phi, H psi] + i (phi, psi)|. Throws std::domain_error if
/// either vector is outside the ultra-weak CCR domain.
double uw_ccr_residual(const SesquilinearForm& form, const VectorXcd& phi, const VectorXcd& psi);

struct UncertaintyResult {
  Complex z;              // (t - a)[(H - b) psi, psi]
  double value = 0.0;     // |z|
  bool passes = false;    // value >= 1/2 - 1e-10
  double im_identity_defect = 0.0;  // |Im z + 1/2|
  bool identity_holds = false;      // defect <= 1e-10
};

/// Evaluates the uncertainty product for a unit psi in the ultra-weak domain.
/// Throws std::domain_error for a non-unit or out-of-domain psi.
UncertaintyResult uncertainty_check(const SesquilinearForm& form, const VectorXcd& psi, double a,
                                    double b, double tol = 1e-10);

/// Decomposition of a point spectrum and the assembled form over its channels,
/// basis ordered channel by channel.
struct PointForm {
  ChannelDecomposition decomposition;
  SesquilinearForm form;
};

/// decompose -> per-channel uwform_channel -> direct_sum_form.
PointForm assemble_point_form(std::span<const SpectralEntry> levels, Accumulation accumulation,
                              double p = 2.0);
PointForm assemble_point_form(const DiscreteSpectrum& s, double p = 2.0);

// ---------------------------------------------------------------------------
// Functions of H.

struct FunctionSpec {
  enum class Kind { Exp, Polynomial, Sin };

  Kind kind = Kind::Polynomial;
  double beta = 0.0;                  // Exp: e^{-beta x}; Sin: sin(2 pi beta x)
  std::vector<double> coefficients;   // Polynomial: a_0 + a_1 x + ... + a_N x^N

  static FunctionSpec exp(double beta);
  static FunctionSpec sin(double beta);
  static FunctionSpec polynomial(std::vector<double> coefficients);
  static FunctionSpec identity() { return polynomial({0.0, 1.0}); }

  double operator()(double x) const;
  /// f(x) - f(0).
  double shifted(double x) const;
  std::string describe() const;
};

struct AdmissibilityWitness {
  std::string condition;
  std::size_t level = 0;  // 1-based level index n, 0 if not tied to a level
  long long k = 0;        // Sin resonance index
  double value = 0.0;
};

struct AdmissibilityReport {
  bool smooth_with_null_critical_set = true;  // f in C^2 with f' vanishing on a null set
  bool continuous_at_zero = true;
  bool nonvanishing_on_spectrum = true;       // f(E_n) != f(0) for every level
  bool nonvanishing_on_halfline = true;       // f(x) != f(0) for x >= 0 (up to a null set)
  bool finite_multiplicities = true;          // merging of f-values keeps multiplicities finite
  std::size_t distinct_values = 0;            // census of {f(E_n)}
  std::size_t levels = 0;
  long long k_max = 0;                        // Sin scan range
  std::vector<AdmissibilityWitness> witnesses;

  bool admissible() const {
    return smooth_with_null_critical_set && continuous_at_zero && nonvanishing_on_spectrum &&
           nonvanishing_on_halfline && finite_multiplicities;
  }
};

/// Checks the conditions under which f(H) inherits an ultra-weak time
/// operator, over the truncated spectrum. Requires a ToZero spectrum. Whether
/// f(sigma) is infinite cannot be decided from a truncation; the report gives
/// the distinctness census instead.
AdmissibilityReport f_condition_check(const FunctionSpec& f, const DiscreteSpectrum& s);

struct FTransform {
  AdmissibilityReport admissibility;
  std::vector<SpectralEntry> transformed;  // levels of f(H) - f(0), merged and sorted
  ChannelDecomposition decomposition;
  SesquilinearForm form;                   // declared for f(H); the shift f(0) drops out
};

/// Maps the spectrum through f - f(0), re-decomposes into simple channels
/// accumulating at zero and assembles the direct-sum form. Throws
/// std::domain_error when the admissibility check fails.
FTransform f_transform_form(const FunctionSpec& f, const DiscreteSpectrum& s, double p = 2.0);

}  // namespace timeops
