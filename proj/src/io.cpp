#include "kyfan/io.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace kyfan::io {

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { fail(ErrorCode::ParseError, msg); }

bool is_scalar(const json& e) { return e.is_number() || (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()); }

cplx scalar(const json& e, const std::string& where)
{
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  parse_fail("entry " + where + " must be a number or a [re, im] pair");
}

Index dimension(const json& j, const char* key)
{
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) parse_fail(std::string("'") + key + "' must be a positive integer");
  return static_cast<Index>(v.get<long long>());
}

std::string line_context(const std::string& text, std::size_t byte)
{
  byte = std::min(byte, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(const std::string& text, const std::string& origin)
{
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(origin + ": malformed JSON at " + line_context(text, e.byte) + ": " + e.what());
  }
}

} // namespace

CMatrix matrix_from_json(const json& j)
{
  const json* data = &j;
  std::optional<Index> rows, cols;
  if (j.is_object()) {
    if (!j.contains("data")) parse_fail("matrix object needs a 'data' field");
    data = &j.at("data");
    if (j.contains("rows")) rows = dimension(j, "rows");
    if (j.contains("cols")) cols = dimension(j, "cols");
  }
  if (!data->is_array() || data->empty()) parse_fail("matrix data must be a non-empty array");
  const json& d = *data;
  const std::size_t len = d.size();

  bool flat = true;
  for (const auto& e : d) flat = flat && is_scalar(e);
  bool nested = true;
  for (const auto& row : d) {
    nested = nested && row.is_array() && !row.empty() && row.size() == d[0].size();
    if (nested)
      for (const auto& e : row) nested = nested && is_scalar(e);
  }

  // flat wins whenever the declared shape accepts it, which keeps [[re, im], ...] unambiguous
  if (flat && (!rows || !cols || static_cast<std::size_t>(*rows * *cols) == len)) {
    Index m, n;
    if (rows && cols) {
      m = *rows;
      n = *cols;
    } else if (rows || cols) {
      const Index known = rows ? *rows : *cols;
      if (len % static_cast<std::size_t>(known) != 0)
        parse_fail("data length " + std::to_string(len) + " is not a multiple of " + std::to_string(known));
      m = rows ? known : static_cast<Index>(len) / known;
      n = cols ? known : static_cast<Index>(len) / known;
    } else {
      const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(len))));
      m = n = side;
      if (static_cast<std::size_t>(side * side) != len) {
        if (!nested) parse_fail("cannot infer the shape of " + std::to_string(len) + " entries; give rows and cols");
        flat = false; // read as rows instead
      }
    }
    if (flat) {
      CMatrix A(m, n);
      for (Index i = 0; i < m; ++i)
        for (Index c = 0; c < n; ++c)
          A(i, c) = scalar(d[static_cast<std::size_t>(i * n + c)], std::to_string(i * n + c));
      require_finite(A, "matrix");
      return A;
    }
  }

  if (!nested) {
    if (rows && cols)
      parse_fail("data has " + std::to_string(len) + " entries, expected " + std::to_string(*rows * *cols) +
                 " (flat) or " + std::to_string(*rows) + " rows of " + std::to_string(*cols));
    parse_fail("matrix data is neither flat nor a list of equal-length rows");
  }
  const auto m = static_cast<Index>(len);
  const auto n = static_cast<Index>(d[0].size());
  if ((rows && *rows != m) || (cols && *cols != n))
    parse_fail("nested data is " + std::to_string(m) + "x" + std::to_string(n) + ", header says " +
               std::to_string(rows.value_or(m)) + "x" + std::to_string(cols.value_or(n)));
  CMatrix A(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index c = 0; c < n; ++c)
      A(i, c) = scalar(d[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)],
                       "(" + std::to_string(i) + ", " + std::to_string(c) + ")");
  require_finite(A, "matrix");
  return A;
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CMatrix parse_matrix_text(const std::string& text, const std::string& origin)
{
  const json j = parse_json(text, origin);
  try {
    return matrix_from_json(j);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) parse_fail(origin + ": " + e.what());
    throw;
  }
}

CMatrix parse_matrix_file(const std::string& path) { return parse_matrix_text(read_file(path), path); }

MatrixSubspace subspace_from_json(const json& j)
{
  if (!j.is_object() || !j.contains("basis") || !j.at("basis").is_array())
    parse_fail("subspace needs a 'basis' array");
  Field field = Field::Complex;
  if (j.contains("field")) {
    const json& f = j.at("field");
    if (!f.is_string()) parse_fail("'field' must be \"real\" or \"complex\"");
    const std::string s = f.get<std::string>();
    if (s == "real") field = Field::Real;
    else if (s != "complex") parse_fail("'field' must be \"real\" or \"complex\", got \"" + s + "\"");
  }
  std::vector<CMatrix> basis;
  for (const auto& b : j.at("basis")) basis.push_back(matrix_from_json(b));
  if (basis.empty()) {
    if (!j.contains("rows") || !j.contains("cols")) parse_fail("an empty basis needs rows and cols");
    return MatrixSubspace(dimension(j, "rows"), dimension(j, "cols"), {}, field);
  }
  for (const auto& b : basis)
    if (b.rows() != basis[0].rows() || b.cols() != basis[0].cols()) parse_fail("basis matrices differ in shape");
  const Index rows = basis[0].rows(), cols = basis[0].cols();
  return MatrixSubspace(rows, cols, std::move(basis), field);
}

MatrixSubspace parse_subspace_file(const std::string& path)
{
  const std::string text = read_file(path);
  const json j = parse_json(text, path);
  try {
    return subspace_from_json(j);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) parse_fail(path + ": " + e.what());
    throw;
  }
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const CMatrix& A)
{
  json data = json::array();
  for (Index i = 0; i < A.rows(); ++i)
    for (Index c = 0; c < A.cols(); ++c) data.push_back(to_json(A(i, c)));
  return {{"rows", A.rows()}, {"cols", A.cols()}, {"data", data}};
}

json to_json(const RVector& v)
{
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const CVector& v)
{
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v[i]));
  return out;
}

} // namespace kyfan::io
