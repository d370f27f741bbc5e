#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "timeops/quadrature.hpp"
#include "timeops/types.hpp"

namespace timeops {

// Multiplication operator M_X on L^2(R, rho dlambda) with the time operator
// Y = i d/dlambda + (i/2) W, W = rho'/rho. Functions are finite sums of
// exponentials e^{i s lambda}; a phase e^{i tau lambda} applied to a term is
// recorded in `shift` so that conjugations e^{i t} ... e^{-i t} cancel exactly.

struct ExpTerm {
  Complex coefficient;
  double frequency = 0.0;
  double shift = 0.0;

  double total_frequency() const { return frequency + shift; }
};

struct ExpCombination {
  std::vector<ExpTerm> terms;

  Complex operator()(double lambda) const;
  Complex derivative(double lambda) const;
  double max_abs_frequency() const;
};

/// (constant + slope * lambda) e^{i (frequency + shift) lambda}
struct AffineExpTerm {
  Complex constant;
  Complex slope;
  double frequency = 0.0;
  double shift = 0.0;

  friend bool operator==(const AffineExpTerm&, const AffineExpTerm&) = default;
};

struct AffineExpCombination {
  std::vector<AffineExpTerm> terms;

  Complex operator()(double lambda) const;
};

/// Spectral density of a cyclic vector: value, log-derivative W = rho'/rho and
/// a quadrature rule for integrals against rho.
class SpectralDensity {
 public:
  virtual ~SpectralDensity() = default;
  virtual double value(double lambda) const = 0;
  virtual double log_derivative(double lambda) const = 0;
  virtual QuadratureRule quadrature(Index order) const = 0;
  virtual std::string name() const = 0;
};

/// rho(lambda) = e^{-lambda^2} / sqrt(pi), W(lambda) = -2 lambda.
class GaussianDensity final : public SpectralDensity {
 public:
  double value(double lambda) const override;
  double log_derivative(double lambda) const override { return -2.0 * lambda; }
  QuadratureRule quadrature(Index order) const override;
  std::string name() const override { return "gaussian"; }
};

ExpCombination multiply_phase(ExpCombination f, double tau);
AffineExpCombination multiply_phase(AffineExpCombination f, double tau);

/// Y applied to a sum of exponentials under the Gaussian density:
/// Y e^{i s lambda} = (-s - i lambda) e^{i s lambda}.
AffineExpCombination s0_apply(const ExpCombination& f);

struct StrongRelationResult {
  bool exact = false;
  double defect = 0.0;  // largest coefficient difference
};

/// Compares e^{i t lambda} Y [e^{-i t lambda} f] with (Y + t) f term by term.
StrongRelationResult s0_strong_relation_check(const ExpCombination& f, double t);
StrongRelationResult s0_strong_relation_check(double s, double t);

/// |(f, Y g) - (Y f, g)| in L^2(rho), by quadrature. Without an explicit order
/// uses max(64, 8 max|s| + 16); an explicit order below 8 max|s| + 16 throws.
double s0_symmetry_residual(const ExpCombination& f, const ExpCombination& g,
                            std::optional<Index> order = std::nullopt,
                            const SpectralDensity& density = GaussianDensity{});

}  // namespace timeops
