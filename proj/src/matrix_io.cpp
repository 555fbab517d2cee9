#include "qcm/matrix_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qcm {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& m) {
  ensure_finite(m, "matrix_to_json");
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      data.push_back({m(i, j).real(), m(i, j).imag()});
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

ComplexMatrix matrix_from_json(const json& doc) {
  if (!doc.is_object())
    throw ValidationError("matrix document: expected a JSON object");
  for (const char* field : {"rows", "cols", "data"})
    if (!doc.contains(field))
      throw ValidationError(std::string("matrix document: missing field '") +
                            field + "'");
  if (!doc["rows"].is_number_integer() || !doc["cols"].is_number_integer())
    throw ValidationError("matrix document: 'rows'/'cols' must be integers");
  const Eigen::Index rows = doc["rows"].get<Eigen::Index>();
  const Eigen::Index cols = doc["cols"].get<Eigen::Index>();
  if (rows <= 0 || cols <= 0)
    throw ValidationError("matrix document: dimensions must be positive");
  const json& data = doc["data"];
  if (!data.is_array())
    throw ValidationError("matrix document: 'data' must be an array");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    std::ostringstream err;
    err << "matrix document: 'data' has " << data.size() << " entries, expected "
        << rows * cols << " (" << rows << "x" << cols << ")";
    throw ValidationError(err.str());
  }
  ComplexMatrix m(rows, cols);
  for (Eigen::Index k = 0; k < rows * cols; ++k) {
    const json& e = data[static_cast<size_t>(k)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      std::ostringstream err;
      err << "matrix document: data[" << k << "] must be a [re, im] pair";
      throw ValidationError(err.str());
    }
    const double re = e[0].get<double>();
    const double im = e[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im)) {
      std::ostringstream err;
      err << "matrix document: data[" << k << "] is not finite";
      throw ValidationError(err.str());
    }
    m(k / cols, k % cols) = Complex(re, im);
  }
  return m;
}

std::string serialize_matrix(const ComplexMatrix& m) {
  return matrix_to_json(m).dump();
}

ComplexMatrix parse_matrix(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {  // parse errors and numeric overflow
    throw ValidationError(std::string("matrix document: ") + e.what());
  }
  return matrix_from_json(doc);
}

ComplexMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open matrix file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_matrix(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void save_matrix(const std::string& path, const ComplexMatrix& m) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write matrix file: " + path);
  out << matrix_to_json(m).dump(2) << "\n";
}

}  // namespace qcm
