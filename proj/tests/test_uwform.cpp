#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "timeops/sampling.hpp"
#include "timeops/serialize.hpp"
#include "timeops/uwform.hpp"

using namespace timeops;

namespace {

const Complex I(0.0, 1.0);

VectorXcd cvec(std::initializer_list<Complex> xs) {
  VectorXcd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (Complex x : xs) v[i++] = x;
  return v;
}

VectorXd two_levels() {
  VectorXd e(2);
  e << -1.0, -0.5;
  return e;
}

}  // namespace

TEST_CASE("hand-computed 2x2 form") {
  // 1/E = {-1, -2}: S = [[0, i], [-i, 0]], H^-2 = diag(1, 4).
  const auto form = uwform_point(two_levels());
  const VectorXcd e0 = cvec({1.0, 0.0}), e1 = cvec({0.0, 1.0});
  CHECK(std::abs(form(e0, e1) - Complex(0.0, -2.5)) <= 1e-15);
  CHECK(std::abs(form(e1, e0) - Complex(0.0, 2.5)) <= 1e-15);
  CHECK(std::abs(form(e0, e0)) == 0.0);
  CHECK(std::abs(form(e1, e1)) == 0.0);
}

TEST_CASE("form is Hermitian and sesquilinear") {
  Rng rng(21);
  const auto pf = assemble_point_form(hydrogen_point_spectrum(1.0, 1.0, 5));
  const auto& form = pf.form;
  for (int i = 0; i < 50; ++i) {
    const VectorXcd phi = random_coefficients(rng, form.dimension());
    const VectorXcd psi = random_coefficients(rng, form.dimension());
    const VectorXcd chi = random_coefficients(rng, form.dimension());
    const Complex a(0.3, -1.7);
    const double scale = std::max({1.0, std::abs(form(phi, psi)), std::abs(form(chi, psi))});

    CHECK(std::abs(form(phi, phi).imag()) <= 1e-12 * std::max(1.0, std::abs(form(phi, phi))));
    CHECK(std::abs(std::conj(form(phi, psi)) - form(psi, phi)) <= 1e-12 * scale);
    CHECK(std::abs(form(a * phi + chi, psi) - (std::conj(a) * form(phi, psi) + form(chi, psi))) <= 1e-12 * 4 * scale);
    CHECK(std::abs(form(psi, a * phi) - a * form(psi, phi)) <= 1e-12 * 4 * scale);
  }
}

TEST_CASE("ultra-weak CCR on H^-1 (e_1 - e_2)") {
  const auto form = uwform_point(two_levels());
  const VectorXcd phi = cvec({-1.0, 2.0});
  CHECK(form.in_uw_domain(phi));
  CHECK(uw_ccr_residual(form, phi, phi) <= 1e-12);

  const VectorXcd outside = cvec({1.0, 0.0});
  CHECK_FALSE(form.in_uw_domain(outside));
  CHECK_THROWS_AS(uw_ccr_residual(form, outside, phi), std::domain_error);
  CHECK_THROWS_AS(uw_ccr_residual(form, phi, outside), std::domain_error);
}

TEST_CASE("ultra-weak CCR on random 20-dimensional channels") {
  Rng rng(23);
  std::uniform_real_distribution<double> gap(0.01, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    VectorXd e(20);
    double acc = -7.0;
    for (Index i = 0; i < 20; ++i) e[i] = acc += gap(rng);
    const auto form = uwform_point(e);
    for (int i = 0; i < 20; ++i) {
      const VectorXcd phi = random_uw_vector(rng, form);
      const VectorXcd psi = random_uw_vector(rng, form);
      CHECK(uw_ccr_residual(form, phi, psi) <= 1e-10);
    }
  }
}

TEST_CASE("uwform constructors reject bad channels") {
  VectorXd bad(2);
  bad << -1.0, 0.0;
  CHECK_THROWS_AS(uwform_channel(bad), std::invalid_argument);
  CHECK_THROWS_AS(uwform_point(bad), std::invalid_argument);
  bad << -0.5, -1.0;
  CHECK_THROWS_AS(uwform_point(bad), std::invalid_argument);
  CHECK_NOTHROW(uwform_channel(bad));
  bad << -0.5, -0.5;
  CHECK_THROWS_AS(uwform_channel(bad), std::invalid_argument);
  CHECK_THROWS_AS(uwform_channel(VectorXd()), std::invalid_argument);
}

TEST_CASE("direct sums of forms") {
  const auto single = uwform_point(two_levels());
  const auto wrapped = direct_sum_form({single});
  Rng rng(25);
  for (int i = 0; i < 10; ++i) {
    const VectorXcd phi = random_coefficients(rng, 2), psi = random_coefficients(rng, 2);
    CHECK(wrapped(phi, psi) == single(phi, psi));
  }

  VectorXd other(3);
  other << -0.3, -0.2, -0.1;
  const auto sum = direct_sum_form({single, uwform_point(other)});
  CHECK(sum.dimension() == 5);
  CHECK(sum.channel_count() == 2);
  CHECK(sum.channels()[1].offset == 2);
  // Supports on different channels do not interact.
  VectorXcd a = VectorXcd::Zero(5), b = VectorXcd::Zero(5);
  a.head(2) = random_coefficients(rng, 2);
  b.tail(3) = random_coefficients(rng, 3);
  CHECK(sum(a, b) == Complex(0.0));

  // Domain membership is per channel, not on the concatenation.
  VectorXcd across = VectorXcd::Zero(5);
  across[0] = 1.0 / -1.0;
  across[2] = -1.0 / -0.3;
  CHECK_FALSE(sum.in_uw_domain(across));
}

TEST_CASE("uncertainty product") {
  const auto form = uwform_point(two_levels());
  const VectorXcd psi = cvec({1.0, -2.0}) / std::sqrt(5.0);
  // By hand: t[H psi, psi] = -i/2.
  const auto r = uncertainty_check(form, psi, 0.0, 0.0);
  CHECK(std::abs(r.z - Complex(0.0, -0.5)) <= 1e-15);
  CHECK(r.passes);
  CHECK(r.identity_holds);

  const auto shifted = uncertainty_check(form, psi, 1.3, -0.4);
  CHECK(shifted.z.imag() == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(shifted.value >= 0.5 - 1e-10);

  CHECK_THROWS_AS(uncertainty_check(form, (2.0 * psi).eval(), 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(uncertainty_check(form, cvec({1.0, 0.0}), 0.0, 0.0), std::domain_error);
}

TEST_CASE("uncertainty on random domain vectors of hydrogen n_max = 3") {
  const auto pf = assemble_point_form(hydrogen_point_spectrum(1.0, 1.0, 3));
  Rng rng(27);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const VectorXcd psi = random_uw_vector(rng, pf.form);
    REQUIRE(psi.norm() == doctest::Approx(1.0));
    const auto r = uncertainty_check(pf.form, psi, u(rng), u(rng));
    CHECK(r.value >= 0.5 - 1e-10);
    CHECK(r.im_identity_defect <= 1e-10);
  }
}

TEST_CASE("Im t[H psi, psi] = -||psi||^2 / 2 on the domain") {
  const auto pf = assemble_point_form(hydrogen_point_spectrum(1.0, 1.0, 4));
  Rng rng(29);
  for (int i = 0; i < 50; ++i) {
    const VectorXcd psi = 3.7 * random_uw_vector(rng, pf.form);
    const Complex z = pf.form(pf.form.apply_h(psi), psi);
    CHECK(z.imag() == doctest::Approx(-0.5 * psi.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("admissibility of functions of H") {
  const auto s = hydrogen_point_spectrum(1.0, 1.0, 3);

  const auto ex = f_condition_check(FunctionSpec::exp(1.0), s);
  CHECK(ex.admissible());
  CHECK(ex.distinct_values == 3);
  CHECK(ex.witnesses.empty());

  CHECK(f_condition_check(FunctionSpec::identity(), s).admissible());
  CHECK(f_condition_check(FunctionSpec::sin(0.3), s).admissible());

  // sin(2 pi beta E_1) = 0 at beta = 1 / (2 E_1) = -1.
  const auto res = f_condition_check(FunctionSpec::sin(-1.0), s);
  CHECK_FALSE(res.admissible());
  CHECK_FALSE(res.nonvanishing_on_spectrum);
  REQUIRE_FALSE(res.witnesses.empty());
  CHECK(res.witnesses.front().condition == "sin_resonance");
  CHECK(res.witnesses.front().level == 1);
  CHECK(res.witnesses.front().k == 1);

  // x^2 + x: quotient 1 + x has no root on [0, inf).
  CHECK(f_condition_check(FunctionSpec::polynomial({0.0, 1.0, 1.0}), s).admissible());
  // x^2 - x: quotient x - 1 vanishes at 1.
  const auto root = f_condition_check(FunctionSpec::polynomial({0.0, -1.0, 1.0}), s);
  CHECK(root.nonvanishing_on_spectrum);
  CHECK_FALSE(root.nonvanishing_on_halfline);
  // x^2 + x / 2: quotient x + 1/2 vanishes at E_1.
  const auto on_spec = f_condition_check(FunctionSpec::polynomial({0.0, 0.5, 1.0}), s);
  CHECK_FALSE(on_spec.nonvanishing_on_spectrum);
  CHECK(on_spec.witnesses.front().level == 1);

  const auto constant = f_condition_check(FunctionSpec::polynomial({3.0}), s);
  CHECK_FALSE(constant.smooth_with_null_critical_set);

  CHECK_THROWS_AS(f_condition_check(FunctionSpec::identity(), harmonic_spectrum(std::vector<double>{1.0}, 3)),
                  std::invalid_argument);
}

TEST_CASE("FunctionSpec values and validation") {
  CHECK(FunctionSpec::exp(2.0)(0.5) == doctest::Approx(std::exp(-1.0)));
  CHECK(FunctionSpec::exp(2.0).shifted(0.5) == doctest::Approx(std::exp(-1.0) - 1.0));
  CHECK(FunctionSpec::sin(0.25)(1.0) == doctest::Approx(1.0));
  CHECK(FunctionSpec::polynomial({1.0, 2.0, 3.0})(2.0) == 17.0);
  CHECK(FunctionSpec::polynomial({1.0, 2.0, 3.0}).shifted(2.0) == 16.0);
  CHECK(FunctionSpec::sin(0.3).describe() == "sin(2 pi 0.3 x)");

  CHECK_THROWS_AS(FunctionSpec::exp(0.0), std::invalid_argument);
  CHECK_THROWS_AS(FunctionSpec::sin(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(FunctionSpec::polynomial({}), std::invalid_argument);
  CHECK_THROWS_AS(FunctionSpec::polynomial({1.0, 0.0}), std::invalid_argument);

  for (const auto& f : {FunctionSpec::exp(1.5), FunctionSpec::sin(-0.2), FunctionSpec::polynomial({0.0, 1.0, 2.0})}) {
    const auto back = function_spec_from_json(function_spec_to_json(f));
    CHECK(back.kind == f.kind);
    CHECK(back.beta == f.beta);
    CHECK(back.coefficients == f.coefficients);
  }
  CHECK_THROWS_AS(function_spec_from_json(json{{"kind", "cos"}, {"params", {1.0}}}), std::invalid_argument);
  CHECK_THROWS_AS(function_spec_from_json(json{{"kind", "exp"}, {"params", {1.0, 2.0}}}), std::invalid_argument);
}

TEST_CASE("f-transformed forms") {
  const auto s = hydrogen_point_spectrum(1.0, 1.0, 4);

  // The identity reproduces the plain form.
  const auto plain = assemble_point_form(s);
  const auto same = f_transform_form(FunctionSpec::identity(), s);
  CHECK(same.decomposition.channels == plain.decomposition.channels);
  Rng rng(31);
  for (int i = 0; i < 10; ++i) {
    const VectorXcd phi = random_coefficients(rng, plain.form.dimension());
    const VectorXcd psi = random_coefficients(rng, plain.form.dimension());
    CHECK(std::abs(same.form(phi, psi) - plain.form(phi, psi)) <= 1e-12 * std::max(1.0, std::abs(plain.form(phi, psi))));
  }

  for (const auto& f : {FunctionSpec::exp(1.0), FunctionSpec::sin(0.3)}) {
    const auto ft = f_transform_form(f, s);
    CHECK(ft.admissibility.admissible());
    // Injective on these levels: nothing merges and multiplicities carry over.
    CHECK(ft.transformed.size() == s.levels());
    int total = 0;
    for (const auto& e : ft.transformed) total += e.multiplicity;
    CHECK(total == s.total_multiplicity());
    CHECK(ft.form.dimension() == total);
    for (std::size_t n = 0; n < s.levels(); ++n) {
      const double v = f.shifted(s.entries()[n].value);
      CHECK(std::any_of(ft.transformed.begin(), ft.transformed.end(),
                        [&](const SpectralEntry& e) { return e.value == v && e.multiplicity == s.entries()[n].multiplicity; }));
    }
    for (int i = 0; i < 50; ++i) {
      const VectorXcd phi = random_uw_vector(rng, ft.form);
      const VectorXcd psi = random_uw_vector(rng, ft.form);
      CHECK(uw_ccr_residual(ft.form, phi, psi) <= 1e-10);
      const auto u = uncertainty_check(ft.form, phi, 0.0, 0.0);
      CHECK(u.value >= 0.5 - 1e-10);
    }
  }

  CHECK_THROWS_AS(f_transform_form(FunctionSpec::sin(-1.0), s), std::domain_error);
}
