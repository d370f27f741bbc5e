#include "timeops/s0.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace timeops {

namespace {
constexpr Complex kI(0.0, 1.0);
}

Complex ExpCombination::operator()(double lambda) const {
  Complex acc = 0.0;
  for (const auto& t : terms) acc += t.coefficient * std::polar(1.0, t.total_frequency() * lambda);
  return acc;
}

Complex ExpCombination::derivative(double lambda) const {
  Complex acc = 0.0;
  for (const auto& t : terms) {
    const double w = t.total_frequency();
    acc += kI * w * t.coefficient * std::polar(1.0, w * lambda);
  }
  return acc;
}

double ExpCombination::max_abs_frequency() const {
  double m = 0.0;
  for (const auto& t : terms) m = std::max(m, std::abs(t.total_frequency()));
  return m;
}

Complex AffineExpCombination::operator()(double lambda) const {
  Complex acc = 0.0;
  for (const auto& t : terms)
    acc += (t.constant + t.slope * lambda) * std::polar(1.0, (t.frequency + t.shift) * lambda);
  return acc;
}

double GaussianDensity::value(double lambda) const {
  return std::exp(-lambda * lambda) / std::sqrt(std::numbers::pi);
}

QuadratureRule GaussianDensity::quadrature(Index order) const {
  QuadratureRule rule = gauss_hermite(order);
  rule.weights /= std::sqrt(std::numbers::pi);
  return rule;
}

ExpCombination multiply_phase(ExpCombination f, double tau) {
  for (auto& t : f.terms) t.shift += tau;
  return f;
}

AffineExpCombination multiply_phase(AffineExpCombination f, double tau) {
  for (auto& t : f.terms) t.shift += tau;
  return f;
}

AffineExpCombination s0_apply(const ExpCombination& f) {
  AffineExpCombination out;
  out.terms.reserve(f.terms.size());
  for (const auto& t : f.terms) {
    // i d/dlambda contributes i * (i w) = -w; (i/2) W = -i lambda. The
    // frequency and shift parts stay separate so that a phase and its inverse
    // cancel bit for bit.
    const Complex constant = t.coefficient * (-t.frequency) + t.coefficient * (-t.shift);
    out.terms.push_back({constant, t.coefficient * (-kI), t.frequency, t.shift});
  }
  return out;
}

StrongRelationResult s0_strong_relation_check(const ExpCombination& f, double t) {
  const AffineExpCombination lhs = multiply_phase(s0_apply(multiply_phase(f, -t)), t);

  AffineExpCombination rhs = s0_apply(f);
  for (std::size_t j = 0; j < rhs.terms.size(); ++j) rhs.terms[j].constant += t * f.terms[j].coefficient;

  StrongRelationResult r{lhs.terms.size() == rhs.terms.size(), 0.0};
  for (std::size_t j = 0; r.exact && j < lhs.terms.size(); ++j) {
    const auto& a = lhs.terms[j];
    const auto& b = rhs.terms[j];
    r.defect = std::max({r.defect, std::abs(a.constant - b.constant), std::abs(a.slope - b.slope),
                         std::abs((a.frequency + a.shift) - (b.frequency + b.shift))});
    r.exact = r.exact && a == b;
  }
  return r;
}

StrongRelationResult s0_strong_relation_check(double s, double t) {
  return s0_strong_relation_check(ExpCombination{{{1.0, s, 0.0}}}, t);
}

double s0_symmetry_residual(const ExpCombination& f, const ExpCombination& g,
                            std::optional<Index> order, const SpectralDensity& density) {
  const double smax = std::max(f.max_abs_frequency(), g.max_abs_frequency());
  const auto needed = static_cast<Index>(std::ceil(8.0 * smax)) + 16;
  if (order && *order < needed)
    throw std::invalid_argument("s0_symmetry_residual: quadrature order too low for the frequencies");
  const Index n = order ? *order : std::max<Index>(64, needed);
  const QuadratureRule rule = density.quadrature(n);

  auto apply_y = [&density](const ExpCombination& h, double x) {
    return kI * h.derivative(x) + 0.5 * kI * density.log_derivative(x) * h(x);
  };
  const Complex diff = rule.integrate([&](double x) {
    return std::conj(f(x)) * apply_y(g, x) - std::conj(apply_y(f, x)) * g(x);
  });
  return std::abs(diff);
}

}  // namespace timeops
