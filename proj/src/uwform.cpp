#include "timeops/uwform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace timeops {

SesquilinearForm::SesquilinearForm(std::vector<Channel> channels) : channels_(std::move(channels)) {
  Index offset = 0;
  for (auto& c : channels_) {
    if (c.s.dimension() != c.eigenvalues.size() || c.inv_sq.size() != c.eigenvalues.size())
      throw std::invalid_argument("SesquilinearForm: inconsistent channel dimensions");
    c.offset = offset;
    offset += c.eigenvalues.size();
  }
  dimension_ = offset;
}

Complex SesquilinearForm::operator()(const VectorXcd& phi, const VectorXcd& psi) const {
  if (phi.size() != dimension_ || psi.size() != dimension_)
    throw std::invalid_argument("SesquilinearForm: vector dimension mismatch");
  Complex total = 0.0;
  for (const auto& c : channels_) {
    const Index n = c.eigenvalues.size();
    const auto x = phi.segment(c.offset, n);
    const auto y = psi.segment(c.offset, n);
    const VectorXcd sx = c.s.data * x;
    const VectorXcd sy = c.s.data * y;
    // Eigen's dot is conjugate-linear in its left operand.
    total += -0.5 * (sx.dot(c.inv_sq.cwiseProduct(y)) + c.inv_sq.cwiseProduct(x).dot(sy));
  }
  return total;
}

VectorXd SesquilinearForm::h_diagonal() const {
  VectorXd h(dimension_);
  for (const auto& c : channels_) h.segment(c.offset, c.eigenvalues.size()) = c.eigenvalues;
  return h;
}

VectorXcd SesquilinearForm::apply_h(const VectorXcd& phi) const {
  if (phi.size() != dimension_) throw std::invalid_argument("apply_h: dimension mismatch");
  return h_diagonal().cwiseProduct(phi);
}

bool SesquilinearForm::in_uw_domain(const VectorXcd& phi, double rel_tol) const {
  if (phi.size() != dimension_) return false;
  for (const auto& c : channels_) {
    const VectorXcd hx = c.eigenvalues.cwiseProduct(phi.segment(c.offset, c.eigenvalues.size()));
    if (!in_difference_span(hx, rel_tol)) return false;
  }
  return true;
}

SesquilinearForm uwform_channel(const VectorXd& eigenvalues) {
  if (eigenvalues.size() == 0) throw std::invalid_argument("uwform: empty channel");
  for (Index n = 0; n < eigenvalues.size(); ++n)
    if (eigenvalues[n] == 0.0 || !std::isfinite(eigenvalues[n]))
      throw std::invalid_argument("uwform: eigenvalues must be finite and nonzero");
  SesquilinearForm::Channel c;
  c.eigenvalues = eigenvalues;
  // Time operator of H^-1: the Galapon matrix of the reciprocal spectrum.
  c.s = galapon_matrix<double>(eigenvalues.cwiseInverse(), TimeOperatorKind::Direct);
  c.inv_sq = eigenvalues.cwiseInverse().cwiseAbs2();
  std::vector<SesquilinearForm::Channel> cs;
  cs.push_back(std::move(c));
  return SesquilinearForm(std::move(cs));
}

SesquilinearForm uwform_point(const VectorXd& eigenvalues) {
  for (Index n = 0; n < eigenvalues.size(); ++n) {
    if (!(eigenvalues[n] < 0.0)) throw std::invalid_argument("uwform_point: eigenvalues must be negative");
    if (n > 0 && !(eigenvalues[n - 1] < eigenvalues[n]))
      throw std::invalid_argument("uwform_point: eigenvalues must be strictly increasing");
  }
  return uwform_channel(eigenvalues);
}

SesquilinearForm direct_sum_form(const std::vector<SesquilinearForm>& forms) {
  std::vector<SesquilinearForm::Channel> all;
  for (const auto& f : forms)
    for (const auto& c : f.channels()) all.push_back(c);
  return SesquilinearForm(std::move(all));
}

double uw_ccr_residual(const SesquilinearForm& form, const VectorXcd& phi, const VectorXcd& psi) {
  if (!form.in_uw_domain(phi) || !form.in_uw_domain(psi))
    throw std::domain_error("uw_ccr_residual: vector outside the ultra-weak CCR domain");
  const Complex lhs = form(form.apply_h(phi), psi) - form(phi, form.apply_h(psi));
  return std::abs(lhs + Complex(0, 1) * phi.dot(psi));
}

UncertaintyResult uncertainty_check(const SesquilinearForm& form, const VectorXcd& psi, double a,
                                    double b, double tol) {
  if (psi.size() != form.dimension()) throw std::invalid_argument("uncertainty_check: dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-12) throw std::domain_error("uncertainty_check: psi is not a unit vector");
  if (!form.in_uw_domain(psi)) throw std::domain_error("uncertainty_check: psi outside the ultra-weak CCR domain");

  const VectorXcd shifted = form.apply_h(psi) - b * psi;
  UncertaintyResult r;
  r.z = form(shifted, psi) - a * shifted.dot(psi);
  r.value = std::abs(r.z);
  r.passes = r.value >= 0.5 - tol;
  r.im_identity_defect = std::abs(r.z.imag() + 0.5);
  r.identity_holds = r.im_identity_defect <= tol;
  return r;
}

PointForm assemble_point_form(std::span<const SpectralEntry> levels, Accumulation accumulation,
                              double p) {
  PointForm out{decompose_levels(levels, accumulation, p), {}};
  std::vector<SesquilinearForm> forms;
  forms.reserve(out.decomposition.channel_count());
  for (std::size_t j = 0; j < out.decomposition.channel_count(); ++j)
    forms.push_back(uwform_channel(out.decomposition.channel_values(j)));
  out.form = direct_sum_form(forms);
  return out;
}

PointForm assemble_point_form(const DiscreteSpectrum& s, double p) {
  return assemble_point_form(s.entries(), s.accumulation(), p);
}

// ---------------------------------------------------------------------------

FunctionSpec FunctionSpec::exp(double beta) {
  if (beta == 0.0 || !std::isfinite(beta)) throw std::invalid_argument("FunctionSpec: exp needs beta != 0");
  return FunctionSpec{Kind::Exp, beta, {}};
}

FunctionSpec FunctionSpec::sin(double beta) {
  if (beta == 0.0 || !std::isfinite(beta)) throw std::invalid_argument("FunctionSpec: sin needs beta != 0");
  return FunctionSpec{Kind::Sin, beta, {}};
}

FunctionSpec FunctionSpec::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty() || coefficients.back() == 0.0)
    throw std::invalid_argument("FunctionSpec: polynomial needs a nonzero leading coefficient");
  return FunctionSpec{Kind::Polynomial, 0.0, std::move(coefficients)};
}

double FunctionSpec::operator()(double x) const {
  switch (kind) {
    case Kind::Exp:
      return std::exp(-beta * x);
    case Kind::Sin:
      return std::sin(2.0 * std::numbers::pi * beta * x);
    case Kind::Polynomial: {
      double acc = 0.0;
      for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
  }
  return 0.0;
}

namespace {

// q(x) = sum_{j>=1} a_j x^{j-1}, so that f(x) - f(0) = x q(x).
double poly_quotient(const std::vector<double>& a, double x) {
  double acc = 0.0;
  for (std::size_t j = a.size(); j-- > 1;) acc = acc * x + a[j];
  return acc;
}

double poly_quotient_scale(const std::vector<double>& a, double x) {
  double acc = 0.0;
  for (std::size_t j = a.size(); j-- > 1;) acc = acc * std::abs(x) + std::abs(a[j]);
  return acc;
}

// Real roots of q in [0, inf) from companion-matrix eigenvalues.
std::vector<double> quotient_nonnegative_roots(const std::vector<double>& a) {
  std::vector<double> q(a.begin() + 1, a.end());  // q_0 .. q_{N-1}
  const Index deg = static_cast<Index>(q.size()) - 1;
  std::vector<double> roots;
  if (deg < 1) return roots;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (Index i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (Index i = 0; i < deg; ++i) companion(i, deg - 1) = -q[static_cast<std::size_t>(i)] / q.back();
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  for (Index i = 0; i < deg; ++i) {
    const Complex r = es.eigenvalues()[i];
    if (std::abs(r.imag()) <= 1e-9 * std::max(1.0, std::abs(r)) && r.real() >= -1e-12)
      roots.push_back(std::max(0.0, r.real()));
  }
  return roots;
}

}  // namespace

double FunctionSpec::shifted(double x) const {
  switch (kind) {
    case Kind::Exp:
      return std::expm1(-beta * x);
    case Kind::Sin:
      return std::sin(2.0 * std::numbers::pi * beta * x);
    case Kind::Polynomial:
      return x * poly_quotient(coefficients, x);
  }
  return 0.0;
}

std::string FunctionSpec::describe() const {
  std::ostringstream os;
  os.precision(15);
  switch (kind) {
    case Kind::Exp:
      os << "exp(-" << beta << " x)";
      break;
    case Kind::Sin:
      os << "sin(2 pi " << beta << " x)";
      break;
    case Kind::Polynomial:
      os << "poly[";
      for (std::size_t j = 0; j < coefficients.size(); ++j) os << (j ? "," : "") << coefficients[j];
      os << "]";
      break;
  }
  return os.str();
}

AdmissibilityReport f_condition_check(const FunctionSpec& f, const DiscreteSpectrum& s) {
  if (s.accumulation() != Accumulation::ToZero)
    throw std::invalid_argument("f_condition_check: spectrum must accumulate at zero");
  AdmissibilityReport r;
  r.levels = s.levels();
  double max_abs_e = 0.0;
  for (const auto& e : s.entries()) max_abs_e = std::max(max_abs_e, std::abs(e.value));

  if (f.kind == FunctionSpec::Kind::Polynomial && f.coefficients.size() < 2) {
    r.smooth_with_null_critical_set = false;
    r.witnesses.push_back({"constant_function", 0, 0, f.coefficients.front()});
  }

  if (f.kind == FunctionSpec::Kind::Sin)
    r.k_max = static_cast<long long>(std::ceil(2.0 * std::abs(f.beta) * max_abs_e)) + 1;

  for (std::size_t n = 0; n < s.levels(); ++n) {
    const double e = s.entries()[n].value;
    bool vanishes = false;
    switch (f.kind) {
      case FunctionSpec::Kind::Exp:
        vanishes = f.shifted(e) == 0.0;
        break;
      case FunctionSpec::Kind::Polynomial:
        vanishes = std::abs(poly_quotient(f.coefficients, e)) <=
                   1e-12 * poly_quotient_scale(f.coefficients, e);
        break;
      case FunctionSpec::Kind::Sin: {
        // sin(2 pi beta E) = 0  <=>  beta = k / (2 E) for an integer k.
        const double twice = 2.0 * f.beta * e;
        const long long k = std::llround(twice);
        if (k != 0 && std::llabs(k) <= r.k_max &&
            std::abs(f.beta - static_cast<double>(k) / (2.0 * e)) <= 1e-12 * std::abs(f.beta)) {
          vanishes = true;
          r.witnesses.push_back({"sin_resonance", n + 1, k, f.beta});
          r.nonvanishing_on_spectrum = false;
          continue;
        }
        vanishes = f.shifted(e) == 0.0;
        break;
      }
    }
    if (vanishes) {
      r.nonvanishing_on_spectrum = false;
      r.witnesses.push_back({"f(E_n) == f(0)", n + 1, 0, e});
    }
  }

  if (f.kind == FunctionSpec::Kind::Polynomial && f.coefficients.size() >= 2) {
    const double x_hi = 10.0 * max_abs_e;
    constexpr int kSamples = 1000;
    double prev = poly_quotient(f.coefficients, 0.0);
    for (int i = 0; i <= kSamples; ++i) {
      const double x = x_hi * i / kSamples;
      const double q = poly_quotient(f.coefficients, x);
      const bool tiny = std::abs(q) <= 1e-12 * poly_quotient_scale(f.coefficients, x);
      if (tiny || (i > 0 && ((prev < 0.0) != (q < 0.0)))) {
        r.nonvanishing_on_halfline = false;
        r.witnesses.push_back({"quotient_sign_change", 0, 0, x});
        break;
      }
      prev = q;
    }
    for (double root : quotient_nonnegative_roots(f.coefficients)) {
      r.nonvanishing_on_halfline = false;
      r.witnesses.push_back({"quotient_root", 0, 0, root});
    }
  }

  std::vector<double> fv;
  for (const auto& e : s.entries()) fv.push_back(f.shifted(e.value));
  std::sort(fv.begin(), fv.end());
  const double scale = fv.empty() ? 0.0 : std::max(std::abs(fv.front()), std::abs(fv.back()));
  for (std::size_t i = 0; i < fv.size(); ++i)
    if (i == 0 || fv[i] - fv[i - 1] > 1e-12 * scale) ++r.distinct_values;
  return r;
}

FTransform f_transform_form(const FunctionSpec& f, const DiscreteSpectrum& s, double p) {
  FTransform out;
  out.admissibility = f_condition_check(f, s);
  if (!out.admissibility.admissible())
    throw std::domain_error("f_transform_form: function is not admissible on this spectrum");

  std::vector<SpectralEntry> mapped;
  for (const auto& e : s.entries()) mapped.push_back({f.shifted(e.value), e.multiplicity});
  std::sort(mapped.begin(), mapped.end(),
            [](const SpectralEntry& a, const SpectralEntry& b) { return a.value < b.value; });
  double scale = 0.0;
  for (const auto& e : mapped) scale = std::max(scale, std::abs(e.value));
  for (const auto& e : mapped) {
    if (!out.transformed.empty() && e.value - out.transformed.back().value <= 1e-12 * scale)
      out.transformed.back().multiplicity += e.multiplicity;
    else
      out.transformed.push_back(e);
  }

  PointForm pf = assemble_point_form(out.transformed, Accumulation::ToZero, p);
  out.decomposition = std::move(pf.decomposition);
  out.form = std::move(pf.form);
  return out;
}

}  // namespace timeops
