#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "timeops/grid.hpp"
#include "timeops/quadrature.hpp"
#include "timeops/s0.hpp"

using namespace timeops;

namespace {

const Complex I(0.0, 1.0);
const double kPi = std::numbers::pi;

GridState default_packet(Index n = 1024) { return make_packet(50.0, n, 1.0, 0.0, 5.0, 2.0); }

double rel_distance(const GridState& a, const GridState& b) {
  return a.with_samples(a.samples() - b.samples()).norm() / b.norm();
}

ExpCombination random_combination(std::mt19937_64& rng, int terms, double max_freq) {
  std::uniform_real_distribution<double> c(-1.0, 1.0), s(-max_freq, max_freq);
  ExpCombination f;
  for (int i = 0; i < terms; ++i) f.terms.push_back({Complex(c(rng), c(rng)), s(rng), 0.0});
  return f;
}

}  // namespace

TEST_CASE("DFT against the defining sum") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXcd x(8);
  for (Index i = 0; i < 8; ++i) x[i] = Complex(u(rng), u(rng));
  const VectorXcd y = dft(x);
  for (Index k = 0; k < 8; ++k) {
    Complex acc = 0.0;
    for (Index j = 0; j < 8; ++j) acc += x[j] * std::exp(-2.0 * kPi * I * static_cast<double>(j * k) / 8.0);
    CHECK(std::abs(y[k] - acc) <= 1e-13);
  }
  CHECK((idft(y) - x).norm() <= 1e-14);
}

TEST_CASE("Gaussian packet on the grid") {
  const auto psi = default_packet();
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(psi.mean_position() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(psi.width() == doctest::Approx(2.0).epsilon(1e-10));

  // |psi_hat(k)| = sqrt(sigma) pi^-1/4 e^{-sigma^2 (k - k0)^2 / 2}.
  const VectorXcd amp = momentum_amplitudes(psi);
  const VectorXd k = psi.momenta();
  for (Index q = 0; q < k.size(); ++q) {
    const double expect = std::sqrt(2.0) * std::pow(kPi, -0.25) * std::exp(-2.0 * (k[q] - 5.0) * (k[q] - 5.0));
    CHECK(std::abs(std::abs(amp[q]) - expect) <= 1e-10);
    if (std::abs(k[q]) < 1.0) CHECK(std::abs(amp[q]) < 1e-8);
  }
  CHECK(zero_mode_fraction(psi) <= 1e-10);

  const auto moved = make_packet(50.0, 1024, 1.0, 7.5, 5.0, 2.0);
  CHECK(moved.mean_position() == doctest::Approx(7.5).epsilon(1e-12));
  CHECK(moved.norm() == doctest::Approx(1.0).epsilon(1e-13));

  CHECK_THROWS_AS(make_packet(50.0, 1000, 1.0, 0.0, 5.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_packet(50.0, 1024, 1.0, 0.0, 0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_packet(50.0, 1024, 1.0, 45.0, 5.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_packet(50.0, 1024, 0.0, 0.0, 5.0, 2.0), std::invalid_argument);
}

TEST_CASE("free evolution") {
  const auto psi = default_packet();
  CHECK(rel_distance(free_evolve(psi, 0.0), psi) <= 1e-15);
  for (double t : {0.3, 1.0, 2.5}) CHECK(free_evolve(psi, t).norm() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rel_distance(free_evolve(free_evolve(psi, 0.4), 0.7), free_evolve(psi, 1.1)) <= 1e-12);
  CHECK(rel_distance(free_evolve(free_evolve(psi, 0.9), -0.9), psi) <= 1e-12);

  // Free Gaussian: center moves with k0 / m, width grows as sigma sqrt(1 + (t / m sigma^2)^2).
  const double t = 2.0;
  const auto later = free_evolve(psi, t);
  CHECK(later.mean_position() == doctest::Approx(5.0 * t).epsilon(1e-10));
  CHECK(later.width() == doctest::Approx(2.0 * std::sqrt(1.0 + 0.25)).epsilon(1e-10));
}

TEST_CASE("Aharonov-Bohm operator") {
  const auto psi = make_packet(50.0, 1024, 1.0, 0.0, 20.0, 2.0);
  const auto tpsi = ab_apply(psi);
  // Sharp momentum k0: T psi is close to (m / k0) x psi.
  const VectorXd x = psi.positions();
  const auto approx = psi.with_samples((x.cast<Complex>().cwiseProduct(psi.samples()) / 20.0).eval());
  CHECK(rel_distance(tpsi, approx) <= 0.05);

  const auto phi = make_packet(50.0, 1024, 1.0, 3.0, -6.0, 1.5);
  const Complex a(0.4, -1.1);
  const auto combo = psi.with_samples(a * psi.samples() + phi.samples());
  const auto lhs = ab_apply(combo);
  CHECK(rel_distance(lhs, tpsi.with_samples(a * tpsi.samples() + ab_apply(phi).samples())) <= 1e-12);

  const Complex left = phi.inner(ab_apply(psi)), right = ab_apply(phi).inner(psi);
  CHECK(std::abs(left - right) <= 1e-8 * std::max(1.0, std::abs(left)));

  const auto flat = psi.with_samples(VectorXcd::Ones(1024));
  CHECK_THROWS_AS(ab_apply(flat), std::domain_error);

  // Mass enters linearly.
  const auto heavy = make_packet(50.0, 1024, 3.0, 0.0, 20.0, 2.0);
  CHECK(rel_distance(ab_apply(heavy), tpsi.with_samples(3.0 * tpsi.samples())) <= 1e-12);
}

TEST_CASE("weak Weyl relation") {
  const auto psi = default_packet();
  CHECK(weak_weyl_residual(psi, 0.0) <= 1e-13);
  for (double t : {0.25, 0.5, 1.0}) {
    const double coarse = weak_weyl_residual(psi, t);
    const double fine = weak_weyl_residual(default_packet(2048), t);
    CHECK(coarse <= 1e-6);
    CHECK(fine <= coarse);
    CHECK(heisenberg_residual(psi, t) <= 1e-6);
  }

  const auto edge = make_packet(50.0, 1024, 1.0, 30.0, 5.0, 2.0);
  CHECK_NOTHROW(weak_weyl_residual(edge, 0.1));
  CHECK_THROWS_AS(weak_weyl_residual(edge, 4.0), std::domain_error);
}

TEST_CASE("Gauss-Hermite moments") {
  const double sp = std::sqrt(kPi);
  for (Index n : {1, 5, 20, 64}) {
    const auto rule = gauss_hermite(n);
    CHECK(rule.nodes.size() == n);
    CHECK(rule.integrate([](double) { return 1.0; }) == doctest::Approx(sp).epsilon(1e-13));
    CHECK(std::abs(rule.integrate([](double x) { return x; })) <= 1e-13);
    if (n >= 2) CHECK(rule.integrate([](double x) { return x * x; }) == doctest::Approx(sp / 2.0).epsilon(1e-13));
    if (n >= 3) {
      CHECK(rule.integrate([](double x) { return x * x * x * x; }) == doctest::Approx(0.75 * sp).epsilon(1e-12));
      CHECK(std::abs(rule.integrate([](double x) { return x * x * x; })) <= 1e-12);
    }
  }
  // e^{-s^2/4} sqrt(pi) = integral of cos(s x) e^{-x^2}.
  const auto rule = gauss_hermite(64);
  CHECK(rule.integrate([](double x) { return std::cos(3.0 * x); }) ==
        doctest::Approx(sp * std::exp(-9.0 / 4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(gauss_hermite(0), std::invalid_argument);
}

TEST_CASE("S0 operator on exponentials") {
  const ExpCombination one{{{1.0, 0.0, 0.0}}};
  const auto y1 = s0_apply(one);
  REQUIRE(y1.terms.size() == 1);
  CHECK(y1.terms[0].constant == Complex(0.0));
  CHECK(y1.terms[0].slope == -I);

  const ExpCombination e1{{{1.0, 1.0, 0.0}}};
  const auto ye = s0_apply(e1);
  CHECK(ye.terms[0].constant == Complex(-1.0));
  CHECK(ye.terms[0].slope == -I);

  GaussianDensity rho;
  CHECK(rho.log_derivative(0.7) == -1.4);
  CHECK(rho.value(0.0) == doctest::Approx(1.0 / std::sqrt(kPi)));

  // Oracle: Y f = i f' + (i/2) W f with a central difference for f'.
  std::mt19937_64 rng(43);
  const auto f = random_combination(rng, 4, 3.0);
  const auto yf = s0_apply(f);
  for (double lambda : {-1.3, 0.0, 0.4, 2.2}) {
    const double h = 1e-5;
    const Complex fd = (f(lambda + h) - f(lambda - h)) / (2.0 * h);
    const Complex expect = I * fd + 0.5 * I * rho.log_derivative(lambda) * f(lambda);
    CHECK(std::abs(yf(lambda) - expect) <= 1e-8);
    CHECK(std::abs(f.derivative(lambda) - fd) <= 1e-8);
  }
}

TEST_CASE("strong relation holds exactly") {
  const auto a = s0_strong_relation_check(2.0, 3.0);
  CHECK(a.exact);
  CHECK(a.defect == 0.0);
  const auto b = s0_strong_relation_check(0.0, 0.0);
  CHECK(b.exact);
  CHECK(b.defect == 0.0);

  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> t(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const auto r = s0_strong_relation_check(random_combination(rng, 3, 4.0), t(rng));
    CHECK(r.exact);
    CHECK(r.defect == 0.0);
  }
}

TEST_CASE("multiply_phase records the shift") {
  const ExpCombination f{{{Complex(0.5, 1.0), 2.0, 0.0}}};
  const auto g = multiply_phase(f, -0.75);
  CHECK(g.terms[0].frequency == 2.0);
  CHECK(g.terms[0].shift == -0.75);
  CHECK(std::abs(g(1.3) - std::exp(-0.75 * I * 1.3) * f(1.3)) <= 1e-14);
  CHECK(multiply_phase(g, 0.75).terms[0].shift == 0.0);
}

TEST_CASE("S0 symmetry under the Gaussian density") {
  const ExpCombination one{{{1.0, 0.0, 0.0}}};
  const ExpCombination e1{{{1.0, 1.0, 0.0}}};
  CHECK(s0_symmetry_residual(one, one) <= 1e-12);
  CHECK(s0_symmetry_residual(e1, e1) <= 1e-10);

  std::mt19937_64 rng(53);
  for (int i = 0; i < 30; ++i) {
    const auto f = random_combination(rng, 3, 4.0);
    const auto g = random_combination(rng, 3, 4.0);
    CHECK(s0_symmetry_residual(f, g) <= 1e-9);
  }

  const ExpCombination fast{{{1.0, 4.0, 0.0}}};
  CHECK_THROWS_AS(s0_symmetry_residual(fast, one, Index{20}), std::invalid_argument);
  CHECK_NOTHROW(s0_symmetry_residual(fast, one, Index{48}));
}
