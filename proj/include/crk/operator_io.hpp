#pragma once

// JSON operator definition files:
//   {"name": str, "n": int, "k": int, "dimV": int, "dimW": int,
//    "terms": [{"alpha": [int, ...], "matrix": [[scalar, ...], ...]}]}
// A scalar is a JSON number or a "p/q" / decimal string. Serialization writes
// integers as numbers and everything else as "p/q" strings, so rational
// entries round-trip exactly.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "crk/error.hpp"
#include "crk/operator.hpp"
#include "crk/rational.hpp"

namespace crk {

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path, std::string("missing field '") + key + "'");
  return *it;
}

inline int require_int(const nlohmann::json& obj, const char* key, const std::string& path, int min_value) {
  const auto& v = require(obj, key, path);
  const std::string where = path + "/" + key;
  if (!v.is_number_integer()) throw ParseError(where, "expected an integer");
  const auto x = v.get<long long>();
  if (x < min_value || x > 1'000'000) throw ParseError(where, "value out of range");
  return static_cast<int>(x);
}

inline Rational parse_scalar(const nlohmann::json& v, const std::string& where) {
  if (v.is_number_integer()) {
    if (v.is_number_unsigned()) return Rational(mpz_class(std::to_string(v.get<unsigned long long>())));
    return Rational(mpz_class(std::to_string(v.get<long long>())));
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
    if (ec != std::errc()) throw ParseError(where, "unrepresentable number");
    if (auto r = parse_rational(std::string_view(buf, static_cast<std::size_t>(end - buf)))) return *r;
    throw ParseError(where, "non-finite coefficient entry");
  }
  if (v.is_string()) {
    if (auto r = parse_rational(v.get<std::string>())) return *r;
    throw ParseError(where, "non-numeric coefficient entry '" + v.get<std::string>() + "'");
  }
  throw ParseError(where, "non-numeric coefficient entry");
}

inline ordered_json scalar_to_json(const Rational& x) {
  if (x.get_den() == 1 && x.get_num().fits_slong_p()) return ordered_json(x.get_num().get_si());
  return ordered_json(format_rational(x));
}

}  // namespace detail

inline Operator parse_operator(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "malformed JSON");
  }
  if (!doc.is_object()) throw ParseError("/", "operator definition must be a JSON object");

  const auto& name_v = detail::require(doc, "name", "");
  if (!name_v.is_string()) throw ParseError("/name", "expected a string");
  const int n = detail::require_int(doc, "n", "", 1);
  const int k = detail::require_int(doc, "k", "", 0);
  const int dim_v = detail::require_int(doc, "dimV", "", 1);
  const int dim_w = detail::require_int(doc, "dimW", "", 1);

  Operator op(name_v.get<std::string>(), n, k, dim_v, dim_w);
  const auto& terms = detail::require(doc, "terms", "");
  if (!terms.is_array()) throw ParseError("/terms", "expected an array");

  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string path = "/terms/" + std::to_string(t);
    const auto& term = terms[t];
    if (!term.is_object()) throw ParseError(path, "expected an object");

    const auto& alpha_v = detail::require(term, "alpha", path);
    if (!alpha_v.is_array() || alpha_v.size() != static_cast<std::size_t>(n))
      throw ParseError(path + "/alpha", "expected an array of " + std::to_string(n) + " integers");
    std::vector<int> alpha;
    for (std::size_t i = 0; i < alpha_v.size(); ++i) {
      if (!alpha_v[i].is_number_integer() || alpha_v[i].get<long long>() < 0 || alpha_v[i].get<long long>() > k)
        throw ParseError(path + "/alpha/" + std::to_string(i), "expected a non-negative integer not above k");
      alpha.push_back(alpha_v[i].get<int>());
    }
    MultiIndex index(std::move(alpha));
    if (index.order() != k)
      throw ParseError(path + "/alpha", "index order mismatch (order " + std::to_string(index.order()) +
                                            ", k = " + std::to_string(k) + ")");

    const auto& mat_v = detail::require(term, "matrix", path);
    if (!mat_v.is_array() || mat_v.size() != static_cast<std::size_t>(dim_w))
      throw ParseError(path + "/matrix", "expected " + std::to_string(dim_w) + " rows (dimW)");
    Matrix<Rational> coeff(dim_w, dim_v);
    for (int i = 0; i < dim_w; ++i) {
      const auto& row = mat_v[static_cast<std::size_t>(i)];
      const std::string row_path = path + "/matrix/" + std::to_string(i);
      if (!row.is_array() || row.size() != static_cast<std::size_t>(dim_v))
        throw ParseError(row_path, "expected " + std::to_string(dim_v) + " columns (dimV)");
      for (int j = 0; j < dim_v; ++j)
        coeff(i, j) = detail::parse_scalar(row[static_cast<std::size_t>(j)], row_path + "/" + std::to_string(j));
    }
    op.add_term(index, coeff);
  }
  return op;
}

/// Canonical text form: fixed key order, indices in descending lexicographic order.
inline std::string serialize_operator(const Operator& op) {
  detail::ordered_json doc;
  doc["name"] = op.name();
  doc["n"] = op.n();
  doc["k"] = op.k();
  doc["dimV"] = op.dim_v();
  doc["dimW"] = op.dim_w();
  auto terms = detail::ordered_json::array();
  for (const auto& [alpha, c] : op.coeffs()) {
    detail::ordered_json term;
    term["alpha"] = alpha.entries;
    auto rows = detail::ordered_json::array();
    for (int i = 0; i < c.rows(); ++i) {
      auto row = detail::ordered_json::array();
      for (int j = 0; j < c.cols(); ++j) row.push_back(detail::scalar_to_json(c(i, j)));
      rows.push_back(std::move(row));
    }
    term["matrix"] = std::move(rows);
    terms.push_back(std::move(term));
  }
  doc["terms"] = std::move(terms);
  return doc.dump(2) + "\n";
}

inline Operator load_operator(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open operator file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_operator(buf.str());
}

inline void save_operator(const Operator& op, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write operator file '" + path + "'");
  out << serialize_operator(op);
}

}  // namespace crk
