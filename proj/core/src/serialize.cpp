#include "seqgauss/serialize.hpp"

#include <cmath>
#include <fstream>
#include <optional>

namespace seqgauss {

namespace {

std::string join(const std::string& ctx, const std::string& key) { return ctx.empty() ? key : ctx + "." + key; }

double number_at(const Json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field, "value is not finite");
  return v;
}

}  // namespace

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const SeqVec& f) { return to_json(f.matrix()); }

Json to_json(const ChaosExpansion& e) {
  Json out = Json::array();
  for (const auto& [n, k] : e.kernels()) {
    Json terms = Json::array();
    for (const auto& t : k.terms()) terms.push_back({{"coeff", t.coeff}, {"base", to_json(t.base)}});
    out.push_back({{"degree", n}, {"terms", std::move(terms)}});
  }
  return out;
}

Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw ConfigError(field + "[0]", "expected a non-empty array");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string rf = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != cols) throw ConfigError(rf, "expected " + std::to_string(cols) + " entries");
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          number_at(j[i][k], rf + "[" + std::to_string(k) + "]");
    }
  }
  return m;
}

Vector vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_at(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

SeqVec seqvec_from_json(const Json& j, const std::string& field) { return SeqVec(matrix_from_json(j, field)); }

CovOp covop_from_json(const Json& j, const std::string& field) {
  Matrix a = matrix_from_json(j, field);
  try {
    return CovOp(std::move(a));
  } catch (const std::exception& e) {
    throw ConfigError(field, e.what());
  }
}

ChaosExpansion expansion_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array of kernels");
  std::optional<ChaosExpansion> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string kf = field + "[" + std::to_string(i) + "]";
    const Json& deg = require_member(j[i], "degree", kf);
    if (!deg.is_number_integer() || deg.get<int>() < 0) throw ConfigError(kf + ".degree", "expected a non-negative integer");
    const Json& terms = require_member(j[i], "terms", kf);
    if (!terms.is_array() || terms.empty()) throw ConfigError(kf + ".terms", "expected a non-empty array");
    std::optional<SymKernel> kernel;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const std::string tf = kf + ".terms[" + std::to_string(t) + "]";
      const double c = number_at(require_member(terms[t], "coeff", tf), tf + ".coeff");
      SeqVec base = seqvec_from_json(require_member(terms[t], "base", tf), tf + ".base");
      if (!kernel) kernel.emplace(deg.get<int>(), base.dims());
      if (!(base.dims() == kernel->dims())) throw ConfigError(tf + ".base", "dimension differs from earlier terms");
      kernel->add_term(c, std::move(base));
    }
    if (!out) out.emplace(kernel->dims());
    if (!(kernel->dims() == out->dims())) throw ConfigError(kf, "dimension differs from earlier kernels");
    out->add(*kernel);
  }
  return *out;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
}

const Json& require_member(const Json& obj, const std::string& key, const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context.empty() ? "<root>" : context, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(context, key), "missing required field");
  return *it;
}

}  // namespace seqgauss
