#include <doctest.h>

#include <filesystem>
#include <set>
#include <string>

#include "timeops/pipeline.hpp"

using namespace timeops;

namespace {

const json* find_check(const json& doc, const std::string& name) {
  for (const auto& c : doc.at("checks"))
    if (c.at("name") == name) return &c;
  return nullptr;
}

bool check_passed(const json& doc, const std::string& name) {
  const json* c = find_check(doc, name);
  REQUIRE(c != nullptr);
  return c->at("passed").get<bool>();
}

RunConfig parse(const std::string& text) { return config_from_json(json::parse(text)); }

}  // namespace

TEST_CASE("tolerances") {
  Tolerances t;
  CHECK(t.get("ccr_exact") == 1e-12);
  CHECK(t.get("uw_ccr") == 1e-10);
  CHECK(t.get("weyl_residual") == 1e-6);
  CHECK_THROWS_AS(t.get("nope"), std::invalid_argument);
  CHECK_THROWS_AS(t.set("nope", 1.0), std::invalid_argument);
  CHECK_THROWS_AS(t.set("ccr_exact", -1.0), std::invalid_argument);
  t.set("ccr_exact", 1e-9);
  CHECK(t.get("ccr_exact") == 1e-9);
}

TEST_CASE("config parsing and echo") {
  const auto c = parse(R"({"model": {"type": "hydrogen", "m": 2.0, "n_max": 4},
                           "pipeline": {"type": "uwform", "f": {"kind": "exp", "params": [1.0]}},
                           "tolerances": {"uw_ccr": 1e-9}, "seed": 7, "jobs": 2, "samples": 50})");
  REQUIRE(c.model);
  const auto& h = std::get<HydrogenModel>(*c.model);
  CHECK(h.m == 2.0);
  CHECK(h.gamma == 1.0);
  CHECK(h.n_max == 4);
  CHECK(std::get<UWFormPipeline>(c.pipeline).f->kind == FunctionSpec::Kind::Exp);
  CHECK(c.tolerances.get("uw_ccr") == 1e-9);
  CHECK(c.seed == 7);
  CHECK(c.jobs == 2);
  CHECK(c.samples == 50);

  const json echo = config_to_json(c);
  CHECK(config_to_json(config_from_json(echo)) == echo);

  const auto d = parse(R"({})");
  CHECK_FALSE(d.model);
  CHECK(std::holds_alternative<SelfTestPipeline>(d.pipeline));
  CHECK(d.seed == 20140301);
}

TEST_CASE("config rejections") {
  const char* bad[] = {
      R"({"model": {"type": "hydrogen", "nmax": 3}})",
      R"({"model": {"type": "quark"}})",
      R"({"model": {"type": "oscillator", "omega": "fast"}})",
      R"({"pipeline": {"type": "timeop", "extra": 1}})",
      R"({"pipeline": {"type": "ftransform"}})",
      R"({"pipeline": {"type": "oscspec", "sizes": [1]}})",
      R"({"tolerances": {"made_up": 1e-3}})",
      R"({"tolerances": {"ccr_exact": 0}})",
      R"({"tolerances": {"ccr_exact": -1e-3}})",
      R"({"jobs": 0})",
      R"({"surprise": true})",
      R"([1, 2])",
      R"({"model": {"type": "custom"}})",
      R"({"pipeline": {"type": "uwform", "f": {"kind": "cos", "params": [1]}}})",
  };
  for (const char* text : bad) {
    INFO(text);
    CHECK_THROWS_AS(parse(text), std::invalid_argument);
  }
}

TEST_CASE("hydrogen ultra-weak form") {
  const auto report = run(parse(R"({"model": {"type": "hydrogen", "m": 1, "gamma": 1, "n_max": 3},
                                     "pipeline": {"type": "uwform"}})"));
  CHECK(report.passed);
  const json& r = report.document.at("results");
  CHECK(r.at("max_uw_ccr_residual").get<double>() <= 1e-10);
  CHECK(r.at("min_uncertainty_value").get<double>() >= 0.5 - 1e-10);
  CHECK(r.at("channel_count") == 9);
  CHECK(r.at("dimension") == 14);
  CHECK(check_passed(report.document, "max_uw_ccr_residual"));
}

TEST_CASE("oscillator time operator") {
  const auto report = run(parse(R"({"model": {"type": "oscillator", "omega": [1], "n_max": 20},
                                     "pipeline": {"type": "timeop"}})"));
  CHECK(report.passed);
  const json& r = report.document.at("results");
  CHECK(r.at("kind") == "direct");
  CHECK(r.at("max_ccr_residual_relative").get<double>() <= 1e-12);
  CHECK(report.tables.count("toeplitz.csv") == 1);
}

TEST_CASE("hydrogen time operator uses the inverse-conjugate kind") {
  const auto report = run(parse(R"({"model": {"type": "hydrogen", "n_max": 4}, "pipeline": {"type": "timeop"}})"));
  CHECK(report.passed);
  CHECK(report.document.at("results").at("kind") == "inverse_conjugate");
  CHECK(report.document.at("results").at("channel_count") == 16);
}

TEST_CASE("Rabi defaults") {
  const auto report = run(parse(R"({"model": {"type": "rabi"}, "pipeline": {"type": "spectrum"}})"));
  CHECK(report.passed);
  const json& rabi = report.document.at("results").at("rabi");
  REQUIRE(rabi.at("bounds").size() == 20);
  for (const auto& b : rabi.at("bounds")) CHECK(b.get<bool>());
  CHECK(rabi.at("stability_cutoff") == 150);
  CHECK(rabi.at("max_eigenvalue_shift").get<double>() <= 1e-8);
  CHECK(report.tables.count("spectrum.csv") == 1);
}

TEST_CASE("oscspec and abweyl and s0check pipelines") {
  const auto osc = run(parse(R"({"pipeline": {"type": "oscspec", "sizes": [10, 20, 40]}})"));
  CHECK(osc.passed);
  CHECK(osc.tables.count("toeplitz.csv") == 1);

  const auto ab = run(parse(R"({"pipeline": {"type": "abweyl", "N": 512, "steps": 2}})"));
  CHECK(ab.passed);
  CHECK(ab.document.at("results").at("N_refined") == 1024);

  const auto s0 = run(parse(R"({"pipeline": {"type": "s0check"}, "samples": 20})"));
  CHECK(s0.passed);
  CHECK(s0.document.at("results").at("strong_relation_all_exact").get<bool>());
}

TEST_CASE("grid refinement is compared above the roundoff floor") {
  // At tmax = 2 both grids sit at ~1e-14 and the refined residual is not always smaller.
  const std::string text = R"({"pipeline": {"type": "abweyl", "N": 2048, "tmax": 2, "steps": 8}})";
  const auto report = run(parse(text));
  CHECK(report.passed);
  CHECK(report.document.at("results").at("max_residual").get<double>() <= 1e-12);

  json strict = json::parse(text);
  strict["tolerances"] = {{"refinement_floor", 1e-20}};
  const auto r = run(config_from_json(strict));
  const json& res = r.document.at("results");
  CHECK(check_passed(r.document, "refinement_nonincreasing") ==
        (res.at("max_residual_refined").get<double>() <= res.at("max_residual").get<double>()));
}

TEST_CASE("ftransform reports inadmissible f without throwing") {
  const auto report = run(parse(R"({"model": {"type": "hydrogen", "n_max": 3},
                                     "pipeline": {"type": "ftransform", "f": {"kind": "sin", "params": [-1]}}})"));
  CHECK_FALSE(report.passed);
  CHECK_FALSE(check_passed(report.document, "f_admissible"));
  const json& w = report.document.at("results").at("witnesses");
  REQUIRE(w.size() >= 1);
  CHECK(w[0].at("level") == 1);
  CHECK(w[0].at("k") == 1);

  const auto ok = run(parse(R"({"model": {"type": "hydrogen", "n_max": 3},
                                 "pipeline": {"type": "ftransform", "f": {"kind": "exp", "params": [1]}}})"));
  CHECK(ok.passed);
}

TEST_CASE("module rejections propagate") {
  CHECK_THROWS(run(parse(R"({"model": {"type": "oscillator"}, "pipeline": {"type": "uwform"}})")));
  CHECK_THROWS(run(parse(R"({"pipeline": {"type": "timeop"}})")));
  CHECK_THROWS(run(parse(R"({"pipeline": {"type": "abweyl", "N": 1000}})")));
}

TEST_CASE("every referenced tolerance is echoed") {
  const auto report = run(parse(R"({"model": {"type": "hydrogen", "n_max": 3}, "pipeline": {"type": "timeop"}})"));
  const json& tol = report.document.at("tolerances");
  CHECK(tol.size() == Tolerances{}.values().size());
  for (const auto& c : report.document.at("checks"))
    if (c.contains("tolerance")) CHECK(tol.contains(c.at("tolerance").get<std::string>()));
}

TEST_CASE("reports are deterministic") {
  const std::string text = R"({"model": {"type": "hydrogen", "n_max": 4}, "pipeline": {"type": "timeop"}, "jobs": 1})";
  const auto a = run(parse(text));
  const auto b = run(parse(text));
  CHECK(without_timings(a.document).dump() == without_timings(b.document).dump());
  CHECK_FALSE(without_timings(a.document).contains("timings"));

  json threaded = json::parse(text);
  threaded["jobs"] = 4;
  const auto c = run(config_from_json(threaded));
  CHECK(c.document.at("results") == a.document.at("results"));
  CHECK(c.document.at("checks") == a.document.at("checks"));
  CHECK(c.tables == a.tables);
}

TEST_CASE("custom spectrum from a file") {
  const auto path = std::filesystem::temp_directory_path() / "timeops_custom_spectrum.json";
  write_text_file(path.string(), R"({"accumulation": "to_zero", "entries": [[-1.0, 2], [-0.25, 1], [-0.1, 3]]})");
  json cfg = {{"model", {{"type", "custom"}, {"path", path.string()}}}, {"pipeline", {{"type", "uwform"}}}};
  const auto report = run(config_from_json(cfg));
  CHECK(report.passed);
  CHECK(report.document.at("results").at("dimension") == 6);
  std::filesystem::remove(path);

  cfg["model"]["path"] = "/nonexistent/spectrum.json";
  CHECK_THROWS(run(config_from_json(cfg)));
}

TEST_CASE("selftest") {
  const auto report = selftest();
  CHECK(report.passed);
  CHECK(report.document.at("results").at("criteria").size() == 10);

  const auto again = selftest();
  json a = without_timings(report.document), b = without_timings(again.document);
  CHECK(a.dump() == b.dump());

  const Tolerances defaults;
  Tolerances zero;
  for (const auto& [name, value] : defaults.values()) zero.set(name, 0.0);
  const auto strict = selftest(zero);
  CHECK_FALSE(strict.passed);
  std::set<int> failed;
  for (const auto& c : strict.document.at("results").at("criteria"))
    if (!c.at("passed").get<bool>()) failed.insert(c.at("id").get<int>());
  // Roundoff-limited residuals cannot meet a zero bound.
  CHECK(failed.count(2) == 1);
  CHECK(failed.count(7) == 1);

  const auto via_run = run(RunConfig{});
  CHECK(via_run.passed);
  CHECK(via_run.document.contains("config"));
}
