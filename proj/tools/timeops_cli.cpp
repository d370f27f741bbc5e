// timeops: batch driver for the time-operator pipelines.
//
// Flags are merged onto the JSON config given by --config (flags win). The
// report goes to <out>/report.json plus one CSV per table, or to stdout when
// --out is absent. Exit status: 0 all checks passed, 1 a check failed,
// 2 invalid flags or configuration, 3 runtime or I/O failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "timeops/pipeline.hpp"

namespace {

using timeops::json;

struct Flags {
  std::string config;
  std::string out;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> p;
  std::vector<std::string> tolerances;  // name=value

  std::optional<std::string> model;
  std::vector<double> omega;
  std::optional<int> n_max;
  std::optional<double> m, gamma, mu, g;
  std::optional<int> cutoff, count;
  std::optional<std::string> spectrum;
  std::optional<std::string> f;

  // abweyl
  std::optional<double> half_width, x0, k0, sigma, t_max;
  std::optional<long long> grid_n;
  std::optional<int> steps;
  // oscspec
  std::vector<long long> sizes;
  // spectrum
  bool emit_matrix = false;
};

json parse_f(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && text[first] == '{') return json::parse(text);
  return timeops::read_json_file(text);
}

json merged_config(const Flags& fl, const std::string& subcommand) {
  json cfg = fl.config.empty() ? json::object() : timeops::read_json_file(fl.config);
  if (!cfg.is_object()) throw std::invalid_argument("config: expected a JSON object");

  // Pipeline: keep the file's parameters only if it names the same pipeline.
  if (!cfg.contains("pipeline") || !cfg["pipeline"].is_object() || cfg["pipeline"].value("type", "") != subcommand)
    cfg["pipeline"] = json{{"type", subcommand}};
  json& pipe = cfg["pipeline"];

  if (fl.spectrum) cfg["model"] = json{{"type", "custom"}, {"path", *fl.spectrum}};
  if (fl.model) {
    if (!cfg.contains("model") || !cfg["model"].is_object() || cfg["model"].value("type", "") != *fl.model)
      cfg["model"] = json{{"type", *fl.model}};
  }
  const bool grid = subcommand == "abweyl";
  const bool osc = subcommand == "oscspec";
  auto model_key = [&](const char* key, const json& value) {
    if (!cfg.contains("model") || !cfg["model"].is_object())
      throw std::invalid_argument(std::string("--") + key + " needs --model, --spectrum or a model in --config");
    cfg["model"][key] = value;
  };
  const std::string model_type =
      cfg.contains("model") && cfg["model"].is_object() ? cfg["model"].value("type", "") : "";

  if (!fl.omega.empty()) {
    if (osc)
      pipe["omega"] = fl.omega.front();
    else if (model_type == "rabi")
      model_key("omega", fl.omega.front());
    else
      model_key("omega", fl.omega);
  }
  if (fl.n_max) model_key("n_max", *fl.n_max);
  if (fl.m) {
    if (grid)
      pipe["m"] = *fl.m;
    else
      model_key("m", *fl.m);
  }
  if (fl.gamma) model_key("gamma", *fl.gamma);
  if (fl.mu) model_key("mu", *fl.mu);
  if (fl.g) model_key("g", *fl.g);
  if (fl.cutoff) model_key("cutoff", *fl.cutoff);
  if (fl.count) model_key("count", *fl.count);

  if (fl.f) pipe["f"] = parse_f(*fl.f);
  if (fl.half_width) pipe["L"] = *fl.half_width;
  if (fl.grid_n) pipe["N"] = *fl.grid_n;
  if (fl.x0) pipe["x0"] = *fl.x0;
  if (fl.k0) pipe["k0"] = *fl.k0;
  if (fl.sigma) pipe["sigma"] = *fl.sigma;
  if (fl.t_max) pipe["tmax"] = *fl.t_max;
  if (fl.steps) pipe["steps"] = *fl.steps;
  if (!fl.sizes.empty()) pipe["sizes"] = fl.sizes;
  if (fl.emit_matrix) pipe["emit_matrix"] = true;

  if (fl.jobs) cfg["jobs"] = *fl.jobs;
  if (fl.seed) cfg["seed"] = *fl.seed;
  if (fl.samples) cfg["samples"] = *fl.samples;
  if (fl.p) cfg["p"] = *fl.p;
  for (const auto& kv : fl.tolerances) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--tol expects name=value, got \"" + kv + "\"");
    double v = 0.0;
    try {
      v = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("--tol: bad number in \"" + kv + "\"");
    }
    cfg["tolerances"][kv.substr(0, eq)] = v;
  }
  return cfg;
}

void emit(const timeops::Report& report, const std::string& out) {
  if (out.empty()) {
    std::cout << report.document.dump(2) << '\n';
    return;
  }
  std::filesystem::create_directories(out);
  const std::filesystem::path dir(out);
  timeops::write_text_file((dir / "report.json").string(), report.document.dump(2) + "\n");
  for (const auto& [name, text] : report.tables) timeops::write_text_file((dir / name).string(), text);
}

void summarize(const timeops::Report& report) {
  for (const auto& c : report.document.at("checks"))
    std::cerr << (c.at("passed").get<bool>() ? "PASS " : "FAIL ") << c.at("name").get<std::string>() << '\n';
  std::cerr << (report.passed ? "all checks passed" : "some checks failed") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time operators from spectra: construction and verification at finite truncation"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags fl;

  app.add_option("--config", fl.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", fl.out, "Output directory for report.json and CSV tables");
  app.add_option("--jobs", fl.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", fl.seed, "Seed for random test vectors");
  app.add_option("--samples", fl.samples, "Random vectors or pairs per check")->check(CLI::PositiveNumber);
  app.add_option("--p", fl.p, "Summability exponent of the channel decomposition");
  app.add_option("--tol", fl.tolerances, "Tolerance override name=value (repeatable)");

  app.add_option("--model", fl.model, "oscillator | hydrogen | rabi")
      ->check(CLI::IsMember({"oscillator", "hydrogen", "rabi"}));
  app.add_option("--omega", fl.omega, "Oscillator frequencies; rabi and oscspec use the first");
  app.add_option("--nmax", fl.n_max, "Oscillator or hydrogen truncation");
  app.add_option("--m", fl.m, "Mass (hydrogen, or the abweyl particle)");
  app.add_option("--gamma", fl.gamma, "Hydrogen coupling");
  app.add_option("--mu", fl.mu, "Rabi spin splitting");
  app.add_option("--g", fl.g, "Rabi coupling");
  app.add_option("--cutoff", fl.cutoff, "Rabi Fock cutoff");
  app.add_option("--count", fl.count, "Rabi bound checks (uses 2*count eigenvalues)");
  app.add_option("--spectrum", fl.spectrum, "Spectrum JSON file (custom model)")->check(CLI::ExistingFile);
  app.add_option("--f", fl.f, "f-spec: JSON file or inline JSON {\"kind\":..., \"params\":[...]}");

  auto* spectrum = app.add_subcommand("spectrum", "Build and serialize the model spectrum");
  spectrum->add_flag("--emit-matrix", fl.emit_matrix, "Include the Rabi Hamiltonian matrix");
  app.add_subcommand("decompose", "Split the spectrum into simple channels");
  app.add_subcommand("timeop", "Per-channel time operators and exact CCR checks");
  app.add_subcommand("uwform", "Ultra-weak form: CCR and uncertainty checks (optional --f)");
  app.add_subcommand("ftransform", "Ultra-weak form of f(H) with admissibility report");
  auto* oscspec = app.add_subcommand("oscspec", "Spectrum of truncated oscillator time operators");
  oscspec->add_option("--sizes", fl.sizes, "Matrix sizes");
  auto* abweyl = app.add_subcommand("abweyl", "Weak Weyl relation of the Aharonov-Bohm operator on a grid");
  abweyl->add_option("--L", fl.half_width, "Half-width of the periodic domain");
  abweyl->add_option("--N", fl.grid_n, "Grid size (power of two)");
  abweyl->add_option("--x0", fl.x0, "Packet center");
  abweyl->add_option("--k0", fl.k0, "Packet mean momentum");
  abweyl->add_option("--sigma", fl.sigma, "Packet width");
  abweyl->add_option("--tmax", fl.t_max, "Largest evolution time");
  abweyl->add_option("--steps", fl.steps, "Number of time steps in (0, tmax]");
  app.add_subcommand("s0check", "Strong time operator of the S0 class under a Gaussian density");
  app.add_subcommand("selftest", "Acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  timeops::Report report;
  try {
    const json cfg = merged_config(fl, sub);
    report = timeops::run(timeops::config_from_json(cfg));
    emit(report, fl.out);
  } catch (const json::exception& e) {
    std::cerr << "timeops: invalid JSON: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "timeops: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "timeops " << sub << ": " << e.what() << '\n';
    return 3;
  }
  summarize(report);
  return report.passed ? 0 : 1;
}
