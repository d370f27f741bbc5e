#include "timeops/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace timeops {

json spectrum_to_json(const DiscreteSpectrum& s) {
  json entries = json::array();
  for (const auto& e : s.entries()) entries.push_back(json::array({e.value, e.multiplicity}));
  return json{{"label", s.label()}, {"accumulation", to_string(s.accumulation())}, {"entries", entries}};
}

DiscreteSpectrum spectrum_from_json(const json& j) {
  if (!j.is_object() || !j.contains("entries") || !j.contains("accumulation"))
    throw std::invalid_argument("spectrum JSON needs \"entries\" and \"accumulation\"");
  const std::string acc = j.at("accumulation").get<std::string>();
  Accumulation a;
  if (acc == "to_zero")
    a = Accumulation::ToZero;
  else if (acc == "to_infinity")
    a = Accumulation::ToInfinity;
  else
    throw std::invalid_argument("spectrum JSON: unknown accumulation \"" + acc + "\"");
  std::vector<SpectralEntry> entries;
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("spectrum JSON: entry must be [value, multiplicity]");
    entries.push_back({e[0].get<double>(), e[1].get<int>()});
  }
  return DiscreteSpectrum(std::move(entries), a, j.value("label", std::string{}));
}

json matrix_to_json(const MatrixXcd& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) out.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
  return out;
}

MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("matrix JSON must be an array of [re, im] pairs");
  const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(j.size()))));
  if (n * n != static_cast<Index>(j.size())) throw std::invalid_argument("matrix JSON is not square");
  MatrixXcd m(n, n);
  for (Index k = 0; k < n * n; ++k) {
    const auto& e = j[static_cast<std::size_t>(k)];
    m(k / n, k % n) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
  }
  return m;
}

json decomposition_to_json(const ChannelDecomposition& c) {
  return json{{"prescale", c.prescale}, {"p", c.p}, {"channels", c.channels}, {"certificates", c.certificates}};
}

json function_spec_to_json(const FunctionSpec& f) {
  switch (f.kind) {
    case FunctionSpec::Kind::Exp:
      return json{{"kind", "exp"}, {"params", {f.beta}}};
    case FunctionSpec::Kind::Sin:
      return json{{"kind", "sin"}, {"params", {f.beta}}};
    case FunctionSpec::Kind::Polynomial:
      return json{{"kind", "poly"}, {"params", f.coefficients}};
  }
  return {};
}

FunctionSpec function_spec_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto params = j.at("params").get<std::vector<double>>();
  if (kind == "exp" || kind == "sin") {
    if (params.size() != 1) throw std::invalid_argument("f-spec: " + kind + " takes exactly one parameter");
    return kind == "exp" ? FunctionSpec::exp(params[0]) : FunctionSpec::sin(params[0]);
  }
  if (kind == "poly") return FunctionSpec::polynomial(params);
  throw std::invalid_argument("f-spec: unknown kind \"" + kind + "\"");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace timeops
