#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "kyfan/matrix.hpp"
#include "kyfan/subspace.hpp"

namespace kyfan::io {

using nlohmann::json;

/// Accepts {"rows": m, "cols": n, "data": ...} where data is row-major, either flat
/// (m*n entries) or nested (m rows of n entries).  Entries are bare reals or [re, im].
/// rows/cols may be omitted when the shape can be inferred (nested data, or flat data
/// of square length).  A bare top-level array is read as the data field.
CMatrix matrix_from_json(const json& j);
CMatrix parse_matrix_text(const std::string& text, const std::string& origin = "<input>");
CMatrix parse_matrix_file(const std::string& path);

/// {"field": "real" | "complex", "basis": [matrix, ...]}; field defaults to complex.
MatrixSubspace subspace_from_json(const json& j);
MatrixSubspace parse_subspace_file(const std::string& path);

/// {"rows", "cols", "data": [[re, im], ...]} in row-major order.
json to_json(const CMatrix& A);
json to_json(const RVector& v);
json to_json(const CVector& v);
json to_json(cplx z);

std::string read_file(const std::string& path);

} // namespace kyfan::io
