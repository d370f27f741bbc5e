#pragma once

#include <string>

#include <json.hpp>

#include "timeops/decompose.hpp"
#include "timeops/spectra.hpp"
#include "timeops/uwform.hpp"

namespace timeops {

using json = nlohmann::json;

/// {"label": str, "accumulation": "to_zero"|"to_infinity", "entries": [[value, multiplicity], ...]}
json spectrum_to_json(const DiscreteSpectrum& s);
DiscreteSpectrum spectrum_from_json(const json& j);

/// Row-major array of [re, im] pairs.
json matrix_to_json(const MatrixXcd& m);
MatrixXcd matrix_from_json(const json& j);

/// {"prescale": real, "p": real, "channels": [[slot, ...], ...], "certificates": [[k, ...], ...]}
json decomposition_to_json(const ChannelDecomposition& c);

/// {"kind": "exp"|"poly"|"sin", "params": [...]}; exp/sin take [beta],
/// poly takes [a_0, ..., a_N].
json function_spec_to_json(const FunctionSpec& f);
FunctionSpec function_spec_from_json(const json& j);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace timeops
