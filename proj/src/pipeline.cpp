#include "timeops/pipeline.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "internal.hpp"
#include "timeops/decompose.hpp"
#include "timeops/grid.hpp"
#include "timeops/s0.hpp"
#include "timeops/spectra.hpp"
#include "timeops/timeop.hpp"
#include "timeops/uwform.hpp"

namespace timeops {

Tolerances::Tolerances()
    : values_{{"ccr_exact", 1e-12},     {"ccr_random", 1e-10},         {"hermiticity", 1e-12},
              {"uw_ccr", 1e-10},        {"uncertainty", 1e-10},        {"toeplitz_bound", 1e-9},
              {"rabi_stability", 1e-8}, {"weyl_residual", 1e-6},       {"zero_mode_fraction", 1e-10},
              {"s0_symmetry", 1e-9},    {"scaling", 1e-13},            {"refinement_floor", 1e-12}} {}

double Tolerances::get(const std::string& name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) throw std::invalid_argument("unknown tolerance \"" + name + "\"");
  return it->second;
}

void Tolerances::set(const std::string& name, double value) {
  auto it = values_.find(name);
  if (it == values_.end()) throw std::invalid_argument("unknown tolerance \"" + name + "\"");
  if (!(value >= 0.0) || !std::isfinite(value))
    throw std::invalid_argument("tolerance \"" + name + "\" must be a finite nonnegative number");
  it->second = value;
}

json without_timings(json report) {
  if (report.is_object()) report.erase("timings");
  return report;
}

namespace detail {

VectorXd rabi_lowest(double mu, double omega, double g, int cutoff, Index count) {
  const VectorXd eig = rabi_hamiltonian(mu, omega, g, cutoff).eigenvalues();
  if (count > eig.size()) throw std::invalid_argument("rabi: fewer eigenvalues than requested");
  return eig.head(count);
}

UwStatistics uw_statistics(const SesquilinearForm& form, Rng& rng, std::size_t samples,
                           double uncertainty_tol) {
  UwStatistics s;
  if (random_uw_vector(rng, form).norm() == 0.0) return s;
  const VectorXd h = form.h_diagonal();
  std::uniform_real_distribution<double> ua(-5.0, 5.0);
  std::uniform_real_distribution<double> ub(h.minCoeff(), h.maxCoeff());
  s.min_uncertainty_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const VectorXcd phi = random_uw_vector(rng, form);
    const VectorXcd psi = random_uw_vector(rng, form);
    s.max_ccr_residual = std::max(s.max_ccr_residual, uw_ccr_residual(form, phi, psi) / (phi.norm() * psi.norm()));
    const double a = ua(rng);
    const double b = ub(rng);
    const UncertaintyResult u = uncertainty_check(form, random_uw_vector(rng, form), a, b, uncertainty_tol);
    s.min_uncertainty_value = std::min(s.min_uncertainty_value, u.value);
    s.max_im_identity_defect = std::max(s.max_im_identity_defect, u.im_identity_defect);
  }
  s.samples = samples;
  return s;
}

json uw_statistics_to_json(const UwStatistics& s) {
  return json{{"max_uw_ccr_residual", s.max_ccr_residual},
              {"min_uncertainty_value", s.min_uncertainty_value},
              {"im_identity_defect", s.max_im_identity_defect},
              {"samples", s.samples}};
}

}  // namespace detail

namespace {

using detail::CheckList;

// ---------------------------------------------------------------------------
// Config parsing

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
}

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) throw std::invalid_argument(where + ": unknown key \"" + k + "\"");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Model model_from_json(const json& j) {
  require_object(j, "model");
  const std::string type = j.value("type", std::string{});
  if (type == "oscillator") {
    allow_keys(j, {"type", "omega", "n_max"}, "model");
    OscillatorModel m;
    read(j, "omega", m.omega);
    read(j, "n_max", m.n_max);
    return m;
  }
  if (type == "hydrogen") {
    allow_keys(j, {"type", "m", "gamma", "n_max"}, "model");
    HydrogenModel m;
    read(j, "m", m.m);
    read(j, "gamma", m.gamma);
    read(j, "n_max", m.n_max);
    return m;
  }
  if (type == "rabi") {
    allow_keys(j, {"type", "mu", "omega", "g", "cutoff", "count"}, "model");
    RabiModel m;
    read(j, "mu", m.mu);
    read(j, "omega", m.omega);
    read(j, "g", m.g);
    read(j, "cutoff", m.cutoff);
    read(j, "count", m.count);
    if (m.count < 1) throw std::invalid_argument("model: rabi count must be positive");
    return m;
  }
  if (type == "custom") {
    allow_keys(j, {"type", "path"}, "model");
    CustomSpectrumModel m;
    read(j, "path", m.path);
    if (m.path.empty()) throw std::invalid_argument("model: custom spectrum needs \"path\"");
    return m;
  }
  throw std::invalid_argument("model: unknown type \"" + type + "\"");
}

json model_to_json(const Model& model) {
  return std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, OscillatorModel>)
          return {{"type", "oscillator"}, {"omega", m.omega}, {"n_max", m.n_max}};
        else if constexpr (std::is_same_v<M, HydrogenModel>)
          return {{"type", "hydrogen"}, {"m", m.m}, {"gamma", m.gamma}, {"n_max", m.n_max}};
        else if constexpr (std::is_same_v<M, RabiModel>)
          return {{"type", "rabi"}, {"mu", m.mu}, {"omega", m.omega}, {"g", m.g},
                  {"cutoff", m.cutoff}, {"count", m.count}};
        else
          return {{"type", "custom"}, {"path", m.path}};
      },
      model);
}

std::vector<Index> read_sizes(const json& j, const char* key, std::vector<Index> fallback) {
  if (!j.contains(key)) return fallback;
  auto sizes = j.at(key).get<std::vector<Index>>();
  for (Index n : sizes)
    if (n < 2) throw std::invalid_argument(std::string("pipeline: ") + key + " entries must be >= 2");
  return sizes;
}

Pipeline pipeline_from_json(const json& j) {
  require_object(j, "pipeline");
  const std::string type = j.value("type", std::string{});
  if (type == "spectrum") {
    allow_keys(j, {"type", "emit_matrix"}, "pipeline");
    SpectrumPipeline p;
    read(j, "emit_matrix", p.emit_matrix);
    return p;
  }
  if (type == "decompose") {
    allow_keys(j, {"type"}, "pipeline");
    return DecomposePipeline{};
  }
  if (type == "timeop") {
    allow_keys(j, {"type", "toeplitz_omega", "toeplitz_sizes"}, "pipeline");
    TimeOpPipeline p;
    read(j, "toeplitz_omega", p.toeplitz_omega);
    p.toeplitz_sizes = read_sizes(j, "toeplitz_sizes", p.toeplitz_sizes);
    return p;
  }
  if (type == "uwform") {
    allow_keys(j, {"type", "f"}, "pipeline");
    UWFormPipeline p;
    if (j.contains("f") && !j.at("f").is_null()) p.f = function_spec_from_json(j.at("f"));
    return p;
  }
  if (type == "ftransform") {
    allow_keys(j, {"type", "f"}, "pipeline");
    if (!j.contains("f")) throw std::invalid_argument("pipeline: ftransform needs an f-spec \"f\"");
    return FTransformPipeline{function_spec_from_json(j.at("f"))};
  }
  if (type == "oscspec") {
    allow_keys(j, {"type", "omega", "sizes"}, "pipeline");
    OscSpectrumPipeline p;
    read(j, "omega", p.omega);
    p.sizes = read_sizes(j, "sizes", p.sizes);
    return p;
  }
  if (type == "abweyl") {
    allow_keys(j, {"type", "L", "N", "m", "x0", "k0", "sigma", "tmax", "steps"}, "pipeline");
    ABWeylPipeline p;
    read(j, "L", p.half_width);
    read(j, "N", p.n);
    read(j, "m", p.mass);
    read(j, "x0", p.x0);
    read(j, "k0", p.k0);
    read(j, "sigma", p.sigma);
    read(j, "tmax", p.t_max);
    read(j, "steps", p.steps);
    if (p.steps < 1) throw std::invalid_argument("pipeline: abweyl steps must be positive");
    return p;
  }
  if (type == "s0check") {
    allow_keys(j, {"type", "terms", "max_frequency"}, "pipeline");
    S0CheckPipeline p;
    read(j, "terms", p.combination_terms);
    read(j, "max_frequency", p.max_frequency);
    if (p.combination_terms < 1) throw std::invalid_argument("pipeline: s0check terms must be positive");
    return p;
  }
  if (type == "selftest") {
    allow_keys(j, {"type"}, "pipeline");
    return SelfTestPipeline{};
  }
  throw std::invalid_argument("pipeline: unknown type \"" + type + "\"");
}

json pipeline_to_json(const Pipeline& pipeline) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SpectrumPipeline>)
          return {{"type", "spectrum"}, {"emit_matrix", p.emit_matrix}};
        else if constexpr (std::is_same_v<P, DecomposePipeline>)
          return {{"type", "decompose"}};
        else if constexpr (std::is_same_v<P, TimeOpPipeline>)
          return {{"type", "timeop"}, {"toeplitz_omega", p.toeplitz_omega}, {"toeplitz_sizes", p.toeplitz_sizes}};
        else if constexpr (std::is_same_v<P, UWFormPipeline>)
          return {{"type", "uwform"}, {"f", p.f ? function_spec_to_json(*p.f) : json(nullptr)}};
        else if constexpr (std::is_same_v<P, FTransformPipeline>)
          return {{"type", "ftransform"}, {"f", function_spec_to_json(p.f)}};
        else if constexpr (std::is_same_v<P, OscSpectrumPipeline>)
          return {{"type", "oscspec"}, {"omega", p.omega}, {"sizes", p.sizes}};
        else if constexpr (std::is_same_v<P, ABWeylPipeline>)
          return {{"type", "abweyl"}, {"L", p.half_width}, {"N", p.n},       {"m", p.mass},
                  {"x0", p.x0},       {"k0", p.k0},         {"sigma", p.sigma}, {"tmax", p.t_max},
                  {"steps", p.steps}};
        else if constexpr (std::is_same_v<P, S0CheckPipeline>)
          return {{"type", "s0check"}, {"terms", p.combination_terms}, {"max_frequency", p.max_frequency}};
        else
          return {{"type", "selftest"}};
      },
      pipeline);
}

std::string pipeline_name(const Pipeline& p) { return pipeline_to_json(p).at("type").get<std::string>(); }

// ---------------------------------------------------------------------------
// Execution

struct Context {
  const RunConfig& config;
  CheckList checks;
  json results = json::object();
  json timings = json::object();
  std::map<std::string, std::string> tables;

  explicit Context(const RunConfig& c) : config(c), checks(c.tolerances) {}
  double tol(const std::string& name) const { return config.tolerances.get(name); }
};

DiscreteSpectrum rabi_spectrum(const RabiModel& m, Context& ctx) {
  const Index count = 2 * static_cast<Index>(m.count);
  const VectorXd eig = detail::rabi_lowest(m.mu, m.omega, m.g, m.cutoff, count);

  const std::vector<double> list(eig.data(), eig.data() + eig.size());
  const std::vector<bool> bounds = rabi_bound_check(list, m.mu, m.omega, m.g, m.count);
  bool all = true;
  for (bool b : bounds) all = all && b;
  json rabi{{"bounds", bounds}, {"lowest", list}};

  // Stability against a coarser Fock truncation (150 for the default 200).
  const int coarse = m.cutoff * 3 / 4;
  if (2 * (coarse + 1) >= count && coarse >= 2) {
    const VectorXd other = detail::rabi_lowest(m.mu, m.omega, m.g, coarse, count);
    const double shift = (eig - other).cwiseAbs().maxCoeff();
    rabi["stability_cutoff"] = coarse;
    rabi["max_eigenvalue_shift"] = shift;
    ctx.checks.at_most("rabi_cutoff_stability", shift, "rabi_stability");
  } else {
    rabi["stability_cutoff"] = nullptr;
  }
  ctx.checks.holds("rabi_bounds", all);
  ctx.results["rabi"] = rabi;

  // Merge numerically coincident eigenvalues into multiplicities.
  std::vector<SpectralEntry> entries;
  for (double v : list) {
    if (!entries.empty() && std::abs(v - entries.back().value) <= 1e-9 * std::max(1.0, std::abs(v)))
      ++entries.back().multiplicity;
    else
      entries.push_back({v, 1});
  }
  std::ostringstream label;
  label << "rabi mu=" << m.mu << " omega=" << m.omega << " g=" << m.g << " cutoff=" << m.cutoff
        << " count=" << m.count;
  return DiscreteSpectrum(std::move(entries), Accumulation::ToInfinity, label.str());
}

DiscreteSpectrum build_spectrum(Context& ctx) {
  if (!ctx.config.model) throw std::invalid_argument("pipeline needs a model");
  detail::Stopwatch clock;
  DiscreteSpectrum s = std::visit(
      [&](const auto& m) -> DiscreteSpectrum {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, OscillatorModel>) {
          return harmonic_spectrum(m.omega, m.n_max);
        } else if constexpr (std::is_same_v<M, HydrogenModel>) {
          ctx.results["note"] = "hydrogen multiplicities n^2 are the standard Coulomb degeneracy, supplied as input";
          return hydrogen_point_spectrum(m.m, m.gamma, m.n_max);
        } else if constexpr (std::is_same_v<M, RabiModel>) {
          return rabi_spectrum(m, ctx);
        } else {
          try {
            return spectrum_from_json(read_json_file(m.path));
          } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(m.path + ": " + e.what());
          }
        }
      },
      *ctx.config.model);
  ctx.timings["spectrum_seconds"] = clock.seconds();
  ctx.results["spectrum"] = spectrum_to_json(s);
  ctx.results["levels"] = s.levels();
  ctx.results["total_multiplicity"] = s.total_multiplicity();
  return s;
}

std::string spectrum_csv(const DiscreteSpectrum& s) {
  std::ostringstream out;
  out.precision(17);
  out << "value,multiplicity\n";
  for (const auto& e : s.entries()) out << e.value << ',' << e.multiplicity << '\n';
  return out.str();
}

json decomposition_report_json(const ChannelDecomposition& c, const DecompositionReport& r) {
  std::vector<std::size_t> sizes;
  for (const auto& ch : c.channels) sizes.push_back(ch.size());
  json j = decomposition_to_json(c);
  j["channel_count"] = c.channel_count();
  j["slot_count"] = c.slot_count();
  j["channel_sizes"] = sizes;
  j["verification"] = {{"disjoint_cover", r.disjoint_cover},
                       {"simple_channels", r.simple_channels},
                       {"increasing_buckets", r.increasing_buckets},
                       {"certificates_consistent", r.certificates_consistent},
                       {"certificate_bound", r.certificate_bound},
                       {"certificate_sums", r.certificate_sums},
                       {"partial_zeta", r.partial_zeta},
                       {"zeta_p", r.zeta_p},
                       {"violations", r.violations}};
  return j;
}

void run_spectrum(const SpectrumPipeline& p, Context& ctx) {
  const DiscreteSpectrum s = build_spectrum(ctx);
  ctx.tables["spectrum.csv"] = spectrum_csv(s);
  if (p.emit_matrix) {
    const auto* rabi = std::get_if<RabiModel>(&*ctx.config.model);
    if (!rabi) throw std::invalid_argument("spectrum: emit_matrix applies to the rabi model only");
    const HermitianMatrix h = rabi_hamiltonian(rabi->mu, rabi->omega, rabi->g, rabi->cutoff);
    ctx.results["matrix"] = matrix_to_json(h.data());
    ctx.results["basis_labels"] = h.basis_labels();
  }
}

void run_decompose(const DecomposePipeline&, Context& ctx) {
  const DiscreteSpectrum s = build_spectrum(ctx);
  detail::Stopwatch clock;
  const ChannelDecomposition c = decompose_spectrum(s, ctx.config.p);
  const DecompositionReport r = verify_decomposition(c);
  ctx.timings["decompose_seconds"] = clock.seconds();
  ctx.results["decomposition"] = decomposition_report_json(c, r);
  ctx.checks.holds("decomposition_invariants", r.ok());

  std::ostringstream csv;
  csv.precision(17);
  csv << "channel,position,slot,level,copy,value,bucket\n";
  for (std::size_t j = 0; j < c.channel_count(); ++j)
    for (std::size_t i = 0; i < c.channels[j].size(); ++i) {
      const std::size_t slot = c.channels[j][i];
      csv << j << ',' << i << ',' << slot << ',' << c.slots[slot].level << ',' << c.slots[slot].copy << ','
          << c.levels[c.slots[slot].level].value << ',' << c.certificates[j][i] << '\n';
    }
  ctx.tables["channels.csv"] = csv.str();
}

void toeplitz_study(double omega, const std::vector<Index>& sizes, Context& ctx) {
  detail::Stopwatch clock;
  std::vector<ToeplitzSpectrum<double>> spectra(sizes.size());
  detail::parallel_for(sizes.size(), ctx.config.jobs,
                       [&](std::size_t i) { spectra[i] = osc_timeop_spectrum(omega, sizes[i]); });
  const double limit = std::numbers::pi / omega;
  std::ostringstream csv;
  csv.precision(17);
  csv << "N,lambda_min,lambda_max,pi_over_omega\n";
  json rows = json::array();
  double upper = -std::numeric_limits<double>::infinity();
  double lower = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    csv << sizes[i] << ',' << spectra[i].min << ',' << spectra[i].max << ',' << limit << '\n';
    rows.push_back({{"N", sizes[i]}, {"lambda_min", spectra[i].min}, {"lambda_max", spectra[i].max}});
    upper = std::max(upper, spectra[i].max);
    lower = std::min(lower, spectra[i].min);
    if (i > 0 && sizes[i] > sizes[i - 1]) monotone = monotone && spectra[i].max >= spectra[i - 1].max;
  }
  ctx.tables["toeplitz.csv"] = csv.str();
  ctx.results["toeplitz"] = {{"omega", omega}, {"pi_over_omega", limit}, {"rows", rows}};
  if (!sizes.empty()) {
    ctx.checks.at_most("toeplitz_upper_excess", upper - limit, "toeplitz_bound");
    ctx.checks.at_most("toeplitz_lower_excess", -limit - lower, "toeplitz_bound");
    ctx.checks.holds("toeplitz_max_nondecreasing", monotone);
  }
  ctx.timings["toeplitz_seconds"] = clock.seconds();
}

void run_timeop(const TimeOpPipeline& p, Context& ctx) {
  const DiscreteSpectrum s = build_spectrum(ctx);
  detail::Stopwatch clock;
  const ChannelDecomposition c = decompose_spectrum(s, ctx.config.p);
  const auto kind = s.accumulation() == Accumulation::ToZero ? TimeOperatorKind::InverseConjugate
                                                             : TimeOperatorKind::Direct;

  struct Row {
    TimeOperatorMatrixd t;
    detail::PairwiseCcr ccr;
    double hermiticity = 0.0;
    double inverse_square_sum = 0.0;
  };
  std::vector<Row> rows(c.channel_count());
  const auto samples = static_cast<std::size_t>(ctx.config.samples);
  detail::parallel_for(rows.size(), ctx.config.jobs, [&](std::size_t j) {
    Row& r = rows[j];
    r.t = galapon_matrix<double>(c.channel_values(j), kind);
    Rng rng = detail::stream_rng(ctx.config.seed, j);
    r.ccr = detail::pairwise_ccr(r.t, rng, samples);
    r.hermiticity = hermiticity_defect(r.t.data);
    r.inverse_square_sum = r.t.eigenvalues.cwiseInverse().squaredNorm();
  });

  json channels = json::array();
  double worst_relative = 0.0, worst_hermiticity = 0.0;
  std::vector<TimeOperatorMatrixd> blocks;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const Row& r = rows[j];
    const double scale = r.t.max_abs_entry();
    if (scale > 0.0) worst_relative = std::max(worst_relative, r.ccr.max_residual / scale);
    worst_hermiticity = std::max(worst_hermiticity, r.hermiticity);
    channels.push_back({{"channel_id", j},
                        {"dimension", r.t.dimension()},
                        {"max_ccr_residual", r.ccr.max_residual},
                        {"t_max_abs_entry", scale},
                        {"pairs_checked", r.ccr.pairs},
                        {"exhaustive", r.ccr.exhaustive},
                        {"hermiticity_defect", r.hermiticity},
                        {"inverse_square_sum", r.inverse_square_sum}});
    blocks.push_back(r.t);
  }
  ctx.results["kind"] = kind == TimeOperatorKind::Direct ? "direct" : "inverse_conjugate";
  ctx.results["channels"] = channels;
  ctx.results["channel_count"] = c.channel_count();
  ctx.results["max_ccr_residual_relative"] = worst_relative;
  ctx.results["inverse_square_sum_note"] =
      "sum of 1/E^2 per channel is reported only; a truncation cannot tell convergent from divergent growth";
  ctx.checks.at_most("ccr_pairwise_relative", worst_relative, "ccr_exact");
  ctx.checks.at_most("hermiticity_defect", worst_hermiticity, "hermiticity");

  // Random vectors of the direct-sum CCR domain.
  const BlockOperator op = direct_sum(std::move(blocks));
  Rng rng = detail::stream_rng(ctx.config.seed, rows.size());
  double worst_random = 0.0;
  bool nontrivial = false;
  for (std::size_t i = 0; i < std::min<std::size_t>(samples, 50); ++i) {
    VectorXcd v = VectorXcd::Zero(op.dimension());
    for (std::size_t b = 0; b < op.block_count(); ++b) {
      const Index n = op.blocks[b].dimension();
      if (n >= 2) v.segment(op.offsets[b], n) = random_difference_vector(rng, n);
    }
    if (v.norm() == 0.0) break;
    nontrivial = true;
    v.normalize();
    worst_random = std::max(worst_random, ccr_residual(op, v));
  }
  ctx.results["direct_sum"] = {{"dimension", op.dimension()}, {"blocks", op.block_count()},
                               {"max_random_residual", worst_random}};
  if (nontrivial) ctx.checks.at_most("ccr_direct_sum_random", worst_random, "ccr_random");
  ctx.timings["timeop_seconds"] = clock.seconds();

  if (!p.toeplitz_sizes.empty()) toeplitz_study(p.toeplitz_omega, p.toeplitz_sizes, ctx);
}

json admissibility_to_json(const AdmissibilityReport& r) {
  json witnesses = json::array();
  for (const auto& w : r.witnesses)
    witnesses.push_back({{"condition", w.condition}, {"level", w.level}, {"k", w.k}, {"value", w.value}});
  return {{"admissible", r.admissible()},
          {"smooth_with_null_critical_set", r.smooth_with_null_critical_set},
          {"continuous_at_zero", r.continuous_at_zero},
          {"nonvanishing_on_spectrum", r.nonvanishing_on_spectrum},
          {"nonvanishing_on_halfline", r.nonvanishing_on_halfline},
          {"finite_multiplicities", r.finite_multiplicities},
          {"distinct_values", r.distinct_values},
          {"levels", r.levels},
          {"k_max", r.k_max},
          {"witnesses", witnesses},
          {"infinitude_note", "whether f(spectrum) is infinite is not decidable from a truncation; see distinct_values"}};
}

void uw_checks(const SesquilinearForm& form, Context& ctx) {
  detail::Stopwatch clock;
  Rng rng = detail::stream_rng(ctx.config.seed, 0);
  const auto stats = detail::uw_statistics(form, rng, static_cast<std::size_t>(ctx.config.samples),
                                           ctx.tol("uncertainty"));
  ctx.results.update(detail::uw_statistics_to_json(stats));
  ctx.results["channel_count"] = form.channel_count();
  ctx.results["dimension"] = form.dimension();
  if (stats.samples == 0) {
    ctx.results["domain_note"] = "every channel is one-dimensional; the ultra-weak CCR domain is {0}";
  } else {
    ctx.checks.at_most("max_uw_ccr_residual", stats.max_ccr_residual, "uw_ccr");
    ctx.checks.at_least("min_uncertainty_value", stats.min_uncertainty_value, 0.5 - ctx.tol("uncertainty"));
    ctx.checks.at_most("im_identity_defect", stats.max_im_identity_defect, "uncertainty");
  }
  ctx.timings["uwform_seconds"] = clock.seconds();
}

DiscreteSpectrum to_zero_spectrum(Context& ctx) {
  DiscreteSpectrum s = build_spectrum(ctx);
  if (s.accumulation() != Accumulation::ToZero)
    throw std::invalid_argument("ultra-weak forms need a spectrum accumulating at zero");
  return s;
}

// Shared by uwform with an f-spec and ftransform. Returns false when f is not admissible.
bool transformed_form(const FunctionSpec& f, const DiscreteSpectrum& s, Context& ctx, bool detail_out) {
  const AdmissibilityReport adm = f_condition_check(f, s);
  ctx.results["f"] = function_spec_to_json(f);
  ctx.results["f_description"] = f.describe();
  ctx.results["admissibility"] = admissibility_to_json(adm);
  ctx.results["admissible"] = adm.admissible();
  ctx.results["witnesses"] = ctx.results["admissibility"]["witnesses"];
  ctx.checks.holds("f_admissible", adm.admissible());
  if (!adm.admissible()) return false;

  const FTransform ft = f_transform_form(f, s, ctx.config.p);
  if (detail_out) {
    json levels = json::array();
    for (const auto& e : ft.transformed) levels.push_back(json::array({e.value, e.multiplicity}));
    ctx.results["transformed_levels"] = levels;
    ctx.results["decomposition"] = decomposition_report_json(ft.decomposition, verify_decomposition(ft.decomposition));
    ctx.checks.holds("decomposition_invariants", verify_decomposition(ft.decomposition).ok());
  }
  uw_checks(ft.form, ctx);
  return true;
}

void run_uwform(const UWFormPipeline& p, Context& ctx) {
  const DiscreteSpectrum s = to_zero_spectrum(ctx);
  if (p.f) {
    transformed_form(*p.f, s, ctx, false);
    return;
  }
  ctx.results["admissible"] = true;
  ctx.results["witnesses"] = json::array();
  uw_checks(assemble_point_form(s, ctx.config.p).form, ctx);
}

void run_ftransform(const FTransformPipeline& p, Context& ctx) {
  transformed_form(p.f, to_zero_spectrum(ctx), ctx, true);
}

void run_oscspec(const OscSpectrumPipeline& p, Context& ctx) {
  if (p.sizes.empty()) throw std::invalid_argument("oscspec: no sizes given");
  toeplitz_study(p.omega, p.sizes, ctx);
}

void run_abweyl(const ABWeylPipeline& p, Context& ctx) {
  detail::Stopwatch clock;
  const GridState coarse = make_packet(p.half_width, p.n, p.mass, p.x0, p.k0, p.sigma);
  const GridState fine = make_packet(p.half_width, 2 * p.n, p.mass, p.x0, p.k0, p.sigma);
  const WeylTolerances wt{ctx.tol("zero_mode_fraction"), 6.0};

  const std::size_t points = static_cast<std::size_t>(p.steps) + 1;
  std::vector<double> times(points), res(points), res_fine(points);
  for (std::size_t i = 0; i < points; ++i) times[i] = p.t_max * static_cast<double>(i) / p.steps;
  detail::parallel_for(2 * points, ctx.config.jobs, [&](std::size_t w) {
    const std::size_t i = w / 2;
    if (w % 2 == 0)
      res[i] = weak_weyl_residual(coarse, times[i], wt);
    else
      res_fine[i] = weak_weyl_residual(fine, times[i], wt);
  });

  std::ostringstream csv;
  csv.precision(17);
  csv << "t,residual,residual_refined\n";
  double max_res = 0.0, max_fine = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    csv << times[i] << ',' << res[i] << ',' << res_fine[i] << '\n';
    max_res = std::max(max_res, res[i]);
    max_fine = std::max(max_fine, res_fine[i]);
  }
  ctx.tables["abweyl.csv"] = csv.str();
  const double ratio = max_res > 0.0 ? max_fine / max_res : 0.0;
  ctx.results["max_residual"] = max_res;
  ctx.results["max_residual_refined"] = max_fine;
  ctx.results["refinement_ratio"] = ratio;
  ctx.results["N"] = p.n;
  ctx.results["N_refined"] = 2 * p.n;
  ctx.results["packet_zero_mode_fraction"] = zero_mode_fraction(coarse);
  ctx.checks.at_most("max_weyl_residual", max_res, "weyl_residual");
  // Below the floor both residuals are FFT roundoff and their order is noise.
  const double floor = ctx.tol("refinement_floor");
  ctx.results["refinement_floor"] = floor;
  ctx.checks.holds("refinement_nonincreasing", max_fine <= max_res || max_fine <= floor);
  ctx.timings["abweyl_seconds"] = clock.seconds();
}

ExpCombination random_combination(Rng& rng, int terms, double max_frequency) {
  std::uniform_real_distribution<double> freq(-max_frequency, max_frequency);
  const VectorXcd c = random_coefficients(rng, terms);
  ExpCombination f;
  for (int i = 0; i < terms; ++i) f.terms.push_back({c[i], freq(rng), 0.0});
  return f;
}

void run_s0check(const S0CheckPipeline& p, Context& ctx) {
  detail::Stopwatch clock;
  Rng rng = detail::stream_rng(ctx.config.seed, 0);
  const auto samples = static_cast<std::size_t>(ctx.config.samples);

  std::uniform_real_distribution<double> st(-10.0, 10.0);
  bool all_exact = true;
  double worst_defect = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = st(rng);
    const double t = st(rng);
    const auto r = s0_strong_relation_check(s, t);
    all_exact = all_exact && r.exact;
    worst_defect = std::max(worst_defect, r.defect);
  }

  const ExpCombination one{{{1.0, 0.0, 0.0}}};
  const ExpCombination wave{{{1.0, 1.0, 0.0}}};
  double worst = std::max(s0_symmetry_residual(one, one), s0_symmetry_residual(wave, wave));
  for (std::size_t i = 0; i < samples; ++i) {
    const ExpCombination f = random_combination(rng, p.combination_terms, p.max_frequency);
    const ExpCombination g = random_combination(rng, p.combination_terms, p.max_frequency);
    worst = std::max(worst, s0_symmetry_residual(f, g));
  }

  ctx.results["density"] = GaussianDensity{}.name();
  ctx.results["symmetry_max_residual"] = worst;
  ctx.results["strong_relation_all_exact"] = all_exact;
  ctx.results["strong_relation_max_defect"] = worst_defect;
  ctx.results["strong_relation_samples"] = samples;
  ctx.checks.holds("strong_relation_exact", all_exact);
  ctx.checks.at_most("symmetry_max_residual", worst, "s0_symmetry");
  ctx.timings["s0check_seconds"] = clock.seconds();
}

}  // namespace

RunConfig config_from_json(const json& j) {
  try {
    require_object(j, "config");
    allow_keys(j, {"model", "pipeline", "tolerances", "seed", "p", "jobs", "samples"}, "config");
    RunConfig c;
    if (j.contains("model") && !j.at("model").is_null()) c.model = model_from_json(j.at("model"));
    if (j.contains("pipeline")) c.pipeline = pipeline_from_json(j.at("pipeline"));
    if (j.contains("tolerances")) {
      require_object(j.at("tolerances"), "tolerances");
      for (const auto& [name, value] : j.at("tolerances").items()) {
        const double v = value.get<double>();
        if (!(v > 0.0)) throw std::invalid_argument("tolerance \"" + name + "\" must be positive");
        c.tolerances.set(name, v);
      }
    }
    read(j, "seed", c.seed);
    read(j, "p", c.p);
    read(j, "jobs", c.jobs);
    read(j, "samples", c.samples);
    if (!(c.p > 1.0)) throw std::invalid_argument("config: p must exceed 1");
    if (c.jobs < 1) throw std::invalid_argument("config: jobs must be positive");
    if (c.samples < 1) throw std::invalid_argument("config: samples must be positive");
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

json config_to_json(const RunConfig& c) {
  return {{"model", c.model ? model_to_json(*c.model) : json(nullptr)},
          {"pipeline", pipeline_to_json(c.pipeline)},
          {"tolerances", c.tolerances.values()},
          {"seed", c.seed},
          {"p", c.p},
          {"jobs", c.jobs},
          {"samples", c.samples}};
}

Report run(const RunConfig& config) {
  if (std::holds_alternative<SelfTestPipeline>(config.pipeline)) {
    Report r = selftest(config.tolerances, config.seed);
    r.document["config"] = config_to_json(config);
    return r;
  }

  detail::Stopwatch clock;
  Context ctx(config);
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SpectrumPipeline>) run_spectrum(p, ctx);
        else if constexpr (std::is_same_v<P, DecomposePipeline>) run_decompose(p, ctx);
        else if constexpr (std::is_same_v<P, TimeOpPipeline>) run_timeop(p, ctx);
        else if constexpr (std::is_same_v<P, UWFormPipeline>) run_uwform(p, ctx);
        else if constexpr (std::is_same_v<P, FTransformPipeline>) run_ftransform(p, ctx);
        else if constexpr (std::is_same_v<P, OscSpectrumPipeline>) run_oscspec(p, ctx);
        else if constexpr (std::is_same_v<P, ABWeylPipeline>) run_abweyl(p, ctx);
        else if constexpr (std::is_same_v<P, S0CheckPipeline>) run_s0check(p, ctx);
      },
      config.pipeline);
  ctx.timings["total_seconds"] = clock.seconds();

  Report r;
  r.passed = ctx.checks.passed();
  r.tables = std::move(ctx.tables);
  r.document = {{"tool", "timeops"},
                {"pipeline", pipeline_name(config.pipeline)},
                {"config", config_to_json(config)},
                {"tolerances", config.tolerances.values()},
                {"results", std::move(ctx.results)},
                {"checks", ctx.checks.to_json()},
                {"passed", r.passed},
                {"timings", std::move(ctx.timings)}};
  return r;
}

}  // namespace timeops
