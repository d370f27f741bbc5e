#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "internal.hpp"
#include "timeops/decompose.hpp"
#include "timeops/grid.hpp"
#include "timeops/pipeline.hpp"
#include "timeops/s0.hpp"
#include "timeops/spectra.hpp"
#include "timeops/timeop.hpp"
#include "timeops/uwform.hpp"

namespace timeops {

namespace {

using detail::stream_rng;

struct Measured {
  bool ok = true;
  json m = json::object();
  void require(bool condition) { ok = ok && condition; }
};

// Exact CCR on every e_k - e_l of every channel, relative to max |T|.
Measured ccr_on_differences(const Tolerances& tol, std::uint64_t seed) {
  Measured out;
  const double bound = tol.get("ccr_exact");
  auto sweep = [&](const ChannelDecomposition& c, TimeOperatorKind kind, const std::string& key) {
    double worst = 0.0;
    std::size_t pairs = 0;
    for (std::size_t j = 0; j < c.channel_count(); ++j) {
      const auto t = galapon_matrix<double>(c.channel_values(j), kind);
      Rng rng = stream_rng(seed, j);
      const auto r = detail::pairwise_ccr(t, rng, 0, std::numeric_limits<Index>::max());
      if (t.max_abs_entry() > 0.0) worst = std::max(worst, r.max_residual / t.max_abs_entry());
      pairs += r.pairs;
    }
    out.m[key] = {{"max_relative_residual", worst}, {"pairs", pairs}};
    out.require(worst <= bound);
  };

  const ChannelDecomposition hyd = decompose_spectrum(hydrogen_point_spectrum(1.0, 1.0, 4));
  out.m["hydrogen_slots"] = hyd.slot_count();
  out.m["hydrogen_channels"] = hyd.channel_count();
  out.require(hyd.slot_count() == 30 && hyd.channel_count() == 16);
  sweep(hyd, TimeOperatorKind::InverseConjugate, "hydrogen_inverse_conjugate");
  sweep(hyd, TimeOperatorKind::Direct, "hydrogen_direct");

  const std::vector<double> omega{1.0};
  const ChannelDecomposition osc = decompose_spectrum(harmonic_spectrum(omega, 50));
  out.m["oscillator_channels"] = osc.channel_count();
  out.m["oscillator_slots"] = osc.slot_count();
  sweep(osc, TimeOperatorKind::Direct, "oscillator_direct");
  out.m["tolerance"] = "ccr_exact";
  return out;
}

// Ultra-weak CCR on each hydrogen channel and on the direct sum.
Measured ultra_weak_ccr(const Tolerances& tol, std::uint64_t seed) {
  Measured out;
  const double bound = tol.get("uw_ccr");
  const PointForm pf = assemble_point_form(hydrogen_point_spectrum(1.0, 1.0, 4));

  std::vector<SesquilinearForm> channels;
  for (std::size_t j = 0; j < pf.decomposition.channel_count(); ++j)
    if (pf.decomposition.channels[j].size() >= 2)
      channels.push_back(uwform_channel(pf.decomposition.channel_values(j)));

  Rng rng = stream_rng(seed, 2);
  double worst_channel = 0.0, worst_sum = 0.0;
  constexpr int kPairs = 200;
  for (int i = 0; i < kPairs; ++i) {
    const SesquilinearForm& f = channels[static_cast<std::size_t>(i) % channels.size()];
    const VectorXcd phi = random_uw_vector(rng, f), psi = random_uw_vector(rng, f);
    worst_channel = std::max(worst_channel, uw_ccr_residual(f, phi, psi) / (phi.norm() * psi.norm()));
  }
  for (int i = 0; i < kPairs; ++i) {
    const VectorXcd phi = random_uw_vector(rng, pf.form), psi = random_uw_vector(rng, pf.form);
    worst_sum = std::max(worst_sum, uw_ccr_residual(pf.form, phi, psi) / (phi.norm() * psi.norm()));
  }
  out.m = {{"pairs", kPairs},
           {"channels_checked", channels.size()},
           {"max_channel_residual", worst_channel},
           {"max_direct_sum_residual", worst_sum},
           {"tolerance", "uw_ccr"}};
  out.require(worst_channel <= bound && worst_sum <= bound);
  return out;
}

// Im (t - a)[(H - b) psi, psi] = -1/2 and the modulus bound.
Measured uncertainty(const Tolerances& tol, std::uint64_t seed) {
  Measured out;
  const double t = tol.get("uncertainty");
  const PointForm pf = assemble_point_form(hydrogen_point_spectrum(1.0, 1.0, 4));
  const VectorXd h = pf.form.h_diagonal();

  // Hand case on the first channel: psi = H^-1 (e_1 - e_2), a = b = 0.
  VectorXcd hand = VectorXcd::Zero(pf.form.dimension());
  hand[0] = 1.0 / h[0];
  hand[1] = -1.0 / h[1];
  hand.normalize();
  const UncertaintyResult base = uncertainty_check(pf.form, hand, 0.0, 0.0, t);

  Rng rng = stream_rng(seed, 3);
  std::uniform_real_distribution<double> ua(-5.0, 5.0), ub(h.minCoeff(), h.maxCoeff());
  double min_value = std::numeric_limits<double>::infinity(), worst_defect = 0.0;
  bool all = true;
  constexpr int kSamples = 100;
  for (int i = 0; i < kSamples; ++i) {
    const double a = ua(rng), b = ub(rng);
    const UncertaintyResult r = uncertainty_check(pf.form, random_uw_vector(rng, pf.form), a, b, t);
    min_value = std::min(min_value, r.value);
    worst_defect = std::max(worst_defect, r.im_identity_defect);
    all = all && r.passes && r.identity_holds;
  }
  out.m = {{"hand_case_imaginary_part", base.z.imag()},
           {"samples", kSamples},
           {"min_value", min_value},
           {"max_im_identity_defect", worst_defect},
           {"tolerance", "uncertainty"}};
  out.require(base.identity_holds && base.passes && all);
  return out;
}

Measured toeplitz(const Tolerances& tol, std::uint64_t) {
  Measured out;
  const double bound = tol.get("toeplitz_bound");
  const std::vector<Index> sizes{100, 200, 400, 800};
  json rows = json::array();
  double previous = -std::numeric_limits<double>::infinity();
  bool monotone = true, bounded = true;
  double last = 0.0;
  for (Index n : sizes) {
    const auto s = osc_timeop_spectrum(1.0, n);
    rows.push_back({{"N", n}, {"lambda_min", s.min}, {"lambda_max", s.max}});
    bounded = bounded && s.max <= std::numbers::pi + bound && s.min >= -std::numbers::pi - bound;
    monotone = monotone && s.max >= previous;
    previous = last = s.max;
  }
  out.m = {{"rows", rows}, {"bounded_by_pi", bounded}, {"max_nondecreasing", monotone},
           {"lambda_max_800", last}, {"tolerance", "toeplitz_bound"}};
  out.require(bounded && monotone && last >= 3.0);
  return out;
}

Measured partition(const Tolerances&, std::uint64_t seed) {
  Measured out;
  std::vector<double> harmonic, root;
  for (int n = 1; n <= 8; ++n) {
    harmonic.push_back(-1.0 / n);
    root.push_back(-1.0 / std::sqrt(static_cast<double>(n)));
  }
  const auto a = partition_null_sequence(harmonic);
  const auto b = partition_null_sequence(root);
  const std::vector<std::vector<std::size_t>> expect_a{{0, 1, 2, 3, 4, 5, 6, 7}};
  const std::vector<std::vector<std::size_t>> expect_b{{0, 3}, {1, 4}, {2, 5}, {6}, {7}};
  out.m["harmonic_channels"] = a.channels;
  out.m["root_channels"] = b.channels;
  out.require(a.channels == expect_a && b.channels == expect_b);

  Rng rng = stream_rng(seed, 5);
  std::uniform_int_distribution<int> length(1, 40);
  std::uniform_real_distribution<double> scale(0.5, 1.5), decay(0.3, 2.0), exponent(1.2, 3.0);
  std::bernoulli_distribution sign(0.5);
  int good = 0;
  constexpr int kSequences = 1000;
  for (int i = 0; i < kSequences; ++i) {
    const int n = length(rng);
    const double q = decay(rng);
    std::vector<double> v;
    for (int k = 1; k <= n; ++k) v.push_back((sign(rng) ? -1.0 : 1.0) * scale(rng) / std::pow(k, q));
    if (verify_decomposition(partition_null_sequence(v, exponent(rng))).ok()) ++good;
  }
  out.m["random_sequences"] = kSequences;
  out.m["random_passing"] = good;
  out.require(good == kSequences);
  return out;
}

Measured rabi(const Tolerances& tol, std::uint64_t) {
  Measured out;
  constexpr double mu = 0.5, omega = 1.0, g = 0.3;
  constexpr int count = 20;
  const VectorXd fine = detail::rabi_lowest(mu, omega, g, 200, 2 * count);
  const VectorXd coarse = detail::rabi_lowest(mu, omega, g, 150, 2 * count);
  const std::vector<double> list(fine.data(), fine.data() + fine.size());
  const auto bounds = rabi_bound_check(list, mu, omega, g, count);
  bool all = true;
  for (bool x : bounds) all = all && x;
  const double shift = (fine - coarse).cwiseAbs().maxCoeff();
  out.m = {{"bounds", bounds}, {"max_eigenvalue_shift_150_200", shift}, {"tolerance", "rabi_stability"}};
  out.require(all && shift <= tol.get("rabi_stability"));
  return out;
}

Measured weyl(const Tolerances& tol, std::uint64_t) {
  Measured out;
  const WeylTolerances wt{tol.get("zero_mode_fraction"), 6.0};
  const GridState coarse = make_packet(50.0, 1024, 1.0, 0.0, 5.0, 2.0);
  const GridState fine = make_packet(50.0, 2048, 1.0, 0.0, 5.0, 2.0);
  json rows = json::array();
  for (double t : {0.25, 0.5, 1.0}) {
    const double r1 = weak_weyl_residual(coarse, t, wt);
    const double r2 = weak_weyl_residual(fine, t, wt);
    rows.push_back({{"t", t}, {"residual_1024", r1}, {"residual_2048", r2}});
    out.require(r1 <= tol.get("weyl_residual") && r2 <= r1);
  }
  out.m = {{"rows", rows}, {"tolerance", "weyl_residual"}};
  return out;
}

Measured s0(const Tolerances& tol, std::uint64_t seed) {
  Measured out;
  Rng rng = stream_rng(seed, 8);
  std::uniform_real_distribution<double> st(-10.0, 10.0), freq(-4.0, 4.0);
  bool exact = true;
  constexpr int kPairs = 100;
  for (int i = 0; i < kPairs; ++i) {
    const double s = st(rng), t = st(rng);
    exact = exact && s0_strong_relation_check(s, t).exact;
  }
  auto combination = [&] {
    const VectorXcd c = random_coefficients(rng, 3);
    ExpCombination f;
    for (Index k = 0; k < 3; ++k) f.terms.push_back({c[k], freq(rng), 0.0});
    return f;
  };
  const ExpCombination wave{{{1.0, 1.0, 0.0}}};
  double worst = s0_symmetry_residual(wave, wave);
  for (int i = 0; i < kPairs; ++i) worst = std::max(worst, s0_symmetry_residual(combination(), combination()));
  out.m = {{"strong_relation_samples", kPairs}, {"strong_relation_all_exact", exact},
           {"symmetry_max_residual", worst}, {"tolerance", "s0_symmetry"}};
  out.require(exact && worst <= tol.get("s0_symmetry"));
  return out;
}

Measured f_transforms(const Tolerances& tol, std::uint64_t seed) {
  Measured out;
  const DiscreteSpectrum hyd = hydrogen_point_spectrum(1.0, 1.0, 4);
  const double bound = tol.get("uw_ccr");
  Rng rng = stream_rng(seed, 9);
  json cases = json::array();
  for (const FunctionSpec& f : {FunctionSpec::exp(1.0), FunctionSpec::identity(), FunctionSpec::sin(0.3)}) {
    const AdmissibilityReport adm = f_condition_check(f, hyd);
    double worst = std::numeric_limits<double>::infinity();
    if (adm.admissible()) {
      const FTransform ft = f_transform_form(f, hyd);
      worst = 0.0;
      for (int i = 0; i < 100; ++i) {
        const VectorXcd phi = random_uw_vector(rng, ft.form), psi = random_uw_vector(rng, ft.form);
        worst = std::max(worst, uw_ccr_residual(ft.form, phi, psi) / (phi.norm() * psi.norm()));
      }
    }
    cases.push_back({{"f", f.describe()}, {"admissible", adm.admissible()}, {"max_uw_ccr_residual", worst}});
    out.require(adm.admissible() && worst <= bound);
  }

  // beta = 1/(2 E_1) puts sin(2 pi beta E_1) at a zero: k = 1, n = 1.
  const double beta = 1.0 / (2.0 * hyd.entries().front().value);
  const AdmissibilityReport bad = f_condition_check(FunctionSpec::sin(beta), hyd);
  bool witness = false;
  for (const auto& w : bad.witnesses) witness = witness || (w.condition == "sin_resonance" && w.k == 1 && w.level == 1);
  out.m = {{"cases", cases},
           {"resonant_beta", beta},
           {"resonant_admissible", bad.admissible()},
           {"resonant_witness_k1_n1", witness},
           {"tolerance", "uw_ccr"}};
  out.require(!bad.admissible() && witness);
  return out;
}

Measured scaling(const Tolerances& tol, std::uint64_t seed) {
  Measured out;
  std::vector<VectorXd> lists;
  lists.push_back(harmonic_spectrum(std::vector<double>{1.0}, 20).values());
  lists.push_back(hydrogen_point_spectrum(1.0, 1.0, 6).values());
  Rng rng = stream_rng(seed, 10);
  VectorXd random(12);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  double acc = -3.0;
  for (Index i = 0; i < random.size(); ++i) random[i] = acc += u(rng);
  lists.push_back(random);

  double worst = 0.0;
  for (const VectorXd& e : lists) {
    const MatrixXcd base = galapon_matrix<double>(e).data;
    for (double alpha : {0.5, 2.0, 10.0}) {
      const MatrixXcd scaled = galapon_matrix<double>((alpha * e).eval()).data;
      const MatrixXcd expect = base / alpha;
      for (Index r = 0; r < e.size(); ++r)
        for (Index c = 0; c < e.size(); ++c)
          if (r != c) worst = std::max(worst, std::abs(scaled(r, c) - expect(r, c)) / std::abs(expect(r, c)));
    }
  }
  out.m = {{"max_relative_entry_error", worst}, {"alphas", {0.5, 2.0, 10.0}}, {"tolerance", "scaling"}};
  out.require(worst <= tol.get("scaling"));
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double runtime_limit;  // seconds, 0 for none
  Measured (*run)(const Tolerances&, std::uint64_t);
};

constexpr Criterion kCriteria[] = {
    {1, "exact CCR on difference vectors", 1.0, ccr_on_differences},
    {2, "ultra-weak CCR on hydrogen channels", 1.0, ultra_weak_ccr},
    {3, "uncertainty identity", 1.0, uncertainty},
    {4, "oscillator time-operator spectrum", 30.0, toeplitz},
    {5, "null-sequence partition", 1.0, partition},
    {6, "Rabi eigenvalue bounds", 5.0, rabi},
    {7, "weak Weyl relation on the grid", 5.0, weyl},
    {8, "S0 strong time operator", 1.0, s0},
    {9, "f(H) transforms", 2.0, f_transforms},
    {10, "scaling covariance", 0.0, scaling},
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const Tolerances& tolerances, std::uint64_t seed) {
  std::vector<CriterionResult> out;
  for (const Criterion& c : kCriteria) {
    CriterionResult r{c.id, c.name, false, 0.0, c.runtime_limit, {}};
    detail::Stopwatch clock;
    Measured m;
    try {
      m = c.run(tolerances, seed);
    } catch (const std::exception& e) {
      m.ok = false;
      m.m["error"] = e.what();
    }
    r.seconds = clock.seconds();
    const bool in_time = c.runtime_limit == 0.0 || r.seconds < c.runtime_limit;
    m.m["within_runtime_limit"] = in_time;
    r.passed = m.ok && in_time;
    r.measurements = std::move(m.m);
    out.push_back(std::move(r));
  }
  return out;
}

Report selftest(const Tolerances& tolerances, std::uint64_t seed) {
  detail::Stopwatch clock;
  Report report;
  report.passed = true;
  json criteria = json::array(), checks = json::array(), timings = json::object();
  for (const CriterionResult& r : run_acceptance(tolerances, seed)) {
    criteria.push_back({{"id", r.id},
                        {"name", r.name},
                        {"passed", r.passed},
                        {"runtime_limit_seconds", r.runtime_limit},
                        {"measurements", r.measurements}});
    checks.push_back({{"name", "criterion_" + std::to_string(r.id)}, {"passed", r.passed}});
    timings["criterion_" + std::to_string(r.id) + "_seconds"] = r.seconds;
    report.passed = report.passed && r.passed;
  }
  timings["total_seconds"] = clock.seconds();
  report.document = {{"tool", "timeops"},
                     {"pipeline", "selftest"},
                     {"seed", seed},
                     {"tolerances", tolerances.values()},
                     {"results", {{"criteria", criteria}}},
                     {"checks", checks},
                     {"passed", report.passed},
                     {"timings", timings}};
  return report;
}

}  // namespace timeops
