#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "timeops/serialize.hpp"

namespace timeops {

/// Named tolerances, all echoed into every report. Unknown names throw.
class Tolerances {
 public:
  Tolerances();  // defaults

  double get(const std::string& name) const;
  void set(const std::string& name, double value);
  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

struct OscillatorModel {
  std::vector<double> omega{1.0};
  int n_max = 20;
};
struct HydrogenModel {
  double m = 1.0;
  double gamma = 1.0;
  int n_max = 3;
};
struct RabiModel {
  double mu = 0.5;
  double omega = 1.0;
  double g = 0.3;
  int cutoff = 200;
  int count = 20;
};
struct CustomSpectrumModel {
  std::string path;
};
using Model = std::variant<OscillatorModel, HydrogenModel, RabiModel, CustomSpectrumModel>;

struct SpectrumPipeline {
  bool emit_matrix = false;
};
struct DecomposePipeline {};
struct TimeOpPipeline {
  // Toeplitz side study; an empty size list skips it.
  double toeplitz_omega = 1.0;
  std::vector<Index> toeplitz_sizes{50, 100, 200};
};
struct UWFormPipeline {
  std::optional<FunctionSpec> f;
};
struct FTransformPipeline {
  FunctionSpec f = FunctionSpec::identity();
};
struct OscSpectrumPipeline {
  double omega = 1.0;
  std::vector<Index> sizes{100, 200, 400, 800};
};
struct ABWeylPipeline {
  double half_width = 50.0;
  Index n = 1024;
  double mass = 1.0;
  double x0 = 0.0;
  double k0 = 5.0;
  double sigma = 2.0;
  double t_max = 1.0;
  int steps = 4;
};
struct S0CheckPipeline {
  int combination_terms = 3;
  double max_frequency = 4.0;
};
struct SelfTestPipeline {};
using Pipeline = std::variant<SpectrumPipeline, DecomposePipeline, TimeOpPipeline, UWFormPipeline,
                              FTransformPipeline, OscSpectrumPipeline, ABWeylPipeline,
                              S0CheckPipeline, SelfTestPipeline>;

struct RunConfig {
  std::optional<Model> model;
  Pipeline pipeline = SelfTestPipeline{};
  Tolerances tolerances;
  std::uint64_t seed = 20140301;
  double p = 2.0;
  int jobs = 1;
  int samples = 200;  // random test vectors / pairs per check
};

/// Parses the JSON run configuration; throws std::invalid_argument on schema
/// violations (unknown types, nonpositive tolerances, missing fields).
RunConfig config_from_json(const json& j);
json config_to_json(const RunConfig& c);

struct Report {
  json document;                               // machine-readable report
  std::map<std::string, std::string> tables;   // file name -> CSV text
  bool passed = false;
};

/// Executes the configured pipeline. Module-level rejections propagate as
/// exceptions; checks that fail their tolerance only clear `passed`.
Report run(const RunConfig& config);

/// Acceptance suite with the given tolerances and seed.
Report selftest(const Tolerances& tolerances = {}, std::uint64_t seed = 20140301);

/// Strips wall-clock fields so two reports can be compared byte for byte.
json without_timings(json report);

// Exposed for the acceptance binary.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  double runtime_limit = 0.0;
  json measurements;
};
std::vector<CriterionResult> run_acceptance(const Tolerances& tolerances, std::uint64_t seed);

}  // namespace timeops
