#pragma once

// JSON encodings used by the command-line front end. Matrices are
// {"re": [[...]], "im": [[...]]} in row-major order; real vectors are plain
// arrays.

#include "bihamkit/heisenberg_double.hpp"
#include "bihamkit/spin_model.hpp"

#include <json.hpp>

#include <string>

namespace bihamkit {

using Json = nlohmann::json;

Json to_json(const CMatrix& X);
Json to_json(const RVector& v);
Json to_json(const PhasePoint& x);       // {"g", "J"}
Json to_json(const ReducedPoint& y);     // {"q", "J"}
Json to_json(const SpinCoordinates& s);  // {"q", "p", "xi_l", "xi_r"}
Json to_json(const DoublePoint& x);      // {"g1", "g2"}

// All parsers throw DomainError on malformed input (missing keys, ragged
// rows, non-numeric entries, mismatched re/im shapes).
CMatrix matrix_from_json(const Json& j);
RVector vector_from_json(const Json& j);
PhasePoint phase_point_from_json(const Json& j);
ReducedPoint reduced_point_from_json(const Json& j);
SpinCoordinates spin_from_json(const Json& j);
DoublePoint double_point_from_json(const Json& j);

// Parses a file, or standard input when path is "-".
Json read_json(const std::string& path);

}  // namespace bihamkit
