#pragma once

// Structured-text (JSON) form of the library's values. Matrices are nested arrays in
// row-major order, vectors are flat arrays, and a chaos expansion is
//   [{"degree": n, "terms": [{"coeff": c, "base": [[...], ...]}, ...]}, ...]
// Readers throw ConfigError naming the offending field.

#include <string>

#include <nlohmann/json.hpp>

#include "seqgauss/chaos.hpp"
#include "seqgauss/linalg.hpp"

namespace seqgauss {

using Json = nlohmann::json;

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const SeqVec& f);
Json to_json(const ChaosExpansion& e);

// `field` is used in error messages.
Matrix matrix_from_json(const Json& j, const std::string& field);
Vector vector_from_json(const Json& j, const std::string& field);
SeqVec seqvec_from_json(const Json& j, const std::string& field);
CovOp covop_from_json(const Json& j, const std::string& field);
ChaosExpansion expansion_from_json(const Json& j, const std::string& field);

// Parses a whole document; throws ConfigError("<path>", ...) on I/O or syntax errors.
Json load_json_file(const std::string& path);

// Required member lookup: throws ConfigError(field) when absent.
const Json& require_member(const Json& obj, const std::string& key, const std::string& context = "");

}  // namespace seqgauss
