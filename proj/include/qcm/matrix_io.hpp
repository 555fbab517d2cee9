#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "qcm/linalg.hpp"

namespace qcm {

// Matrix document schema: {"rows": n, "cols": n, "data": [[re, im], ...]}
// row-major, doubles, NaN/Inf forbidden. Round-trips finite doubles exactly.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& doc);

std::string serialize_matrix(const ComplexMatrix& m);
ComplexMatrix parse_matrix(const std::string& text);

ComplexMatrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const ComplexMatrix& m);

}  // namespace qcm
