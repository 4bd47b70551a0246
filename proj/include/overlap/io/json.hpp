#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "overlap/io/text.hpp"
#include "overlap/lab/identities.hpp"
#include "overlap/lab/integrate.hpp"
#include "overlap/polynomial.hpp"
#include "overlap/theorem.hpp"

namespace overlap::io {

using Json = nlohmann::ordered_json;

/// A JSON document that does not match the report schema.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object()) throw SchemaError("expected a JSON object holding '" + std::string(key) + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError("missing field '" + std::string(key) + "'");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("field '" + std::string(key) + "' has the wrong type: " + e.what());
  }
}

inline void expect_kind(const Json& j, const char* kind) {
  const auto k = field<std::string>(j, "kind");
  if (k != kind) throw SchemaError("expected kind '" + std::string(kind) + "', got '" + k + "'");
}

inline Coefficient parse_coefficient(const std::string& s) {
  const std::size_t start = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (s.size() == start) throw SchemaError("empty coefficient string");
  for (std::size_t i = start; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') throw SchemaError("coefficient '" + s + "' is not a decimal integer");
  return Coefficient(s);
}

}  // namespace detail

/// Exact integers travel as decimal strings.
inline Json coefficient_to_json(const Coefficient& c) { return c.str(); }

inline Coefficient coefficient_from_json(const Json& j) {
  if (!j.is_string()) throw SchemaError("coefficient must be a decimal string");
  return detail::parse_coefficient(j.get<std::string>());
}

/// [{"monomial": "{1,2}^2", "coefficient": "2"}, ...] in canonical order.
inline Json polynomial_to_json(const GraphPolynomial& p) {
  Json out = Json::array();
  for (const auto& [g, c] : p.terms())
    out.push_back({{"monomial", format_monomial(g.graph())}, {"coefficient", c.str()}});
  return out;
}

inline GraphPolynomial polynomial_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("polynomial must be an array of terms");
  GraphPolynomial p;
  for (const auto& t : j) {
    const auto text = detail::field<std::string>(t, "monomial");
    Multigraph g;
    try {
      g = parse_monomial(text);
    } catch (const ParseError& e) {
      throw SchemaError("bad monomial '" + text + "': " + e.what());
    }
    const auto it = t.find("coefficient");
    if (it == t.end()) throw SchemaError("missing field 'coefficient'");
    p.add_term(g, coefficient_from_json(*it));
  }
  return p;
}

inline Json to_json(const TermCounts& c) {
  return {{"raw_lhs", c.raw_lhs},           {"raw_rhs", c.raw_rhs},
          {"emitted_lhs", c.emitted_lhs},   {"emitted_rhs", c.emitted_rhs},
          {"canonical_lhs", c.canonical_lhs}, {"canonical_rhs", c.canonical_rhs}};
}

inline TermCounts term_counts_from_json(const Json& j) {
  TermCounts c;
  c.raw_lhs = detail::field<std::size_t>(j, "raw_lhs");
  c.raw_rhs = detail::field<std::size_t>(j, "raw_rhs");
  c.emitted_lhs = detail::field<std::size_t>(j, "emitted_lhs");
  c.emitted_rhs = detail::field<std::size_t>(j, "emitted_rhs");
  c.canonical_lhs = detail::field<std::size_t>(j, "canonical_lhs");
  c.canonical_rhs = detail::field<std::size_t>(j, "canonical_rhs");
  return c;
}

/// Payload of a theorem report. The wall time is not part of it; see
/// `timings_to_json`.
inline Json to_json(const TheoremReport& r) {
  return {{"kind", "theorem"},
          {"input", format_monomial(r.input)},
          {"operator_word", "C d^" + std::to_string(2 * r.n) + " = " + std::to_string(2 * r.n - 1) +
                                "!! D^" + std::to_string(r.n)},
          {"n", r.n},
          {"factor", coefficient_to_json(r.factor)},
          {"lhs", polynomial_to_json(r.lhs)},
          {"rhs", polynomial_to_json(r.rhs)},
          {"equal", r.equal},
          {"counts", to_json(r.counts)}};
}

inline TheoremReport theorem_report_from_json(const Json& j, const Json* timings = nullptr) {
  detail::expect_kind(j, "theorem");
  TheoremReport r;
  try {
    r.input = parse_monomial(detail::field<std::string>(j, "input"));
  } catch (const ParseError& e) {
    throw SchemaError(std::string("bad input monomial: ") + e.what());
  }
  r.n = detail::field<int>(j, "n");
  r.factor = coefficient_from_json(j.at("factor"));
  r.lhs = polynomial_from_json(j.at("lhs"));
  r.rhs = polynomial_from_json(j.at("rhs"));
  r.equal = detail::field<bool>(j, "equal");
  r.counts = term_counts_from_json(j.at("counts"));
  if (timings && timings->contains("wall_seconds"))
    r.wall_seconds = detail::field<double>(*timings, "wall_seconds");
  return r;
}

inline lab::Method method_from_string(const std::string& s) {
  if (s == "mc") return lab::Method::monte_carlo;
  if (s == "quadrature") return lab::Method::quadrature;
  throw SchemaError("unknown method '" + s + "'");
}

inline Json to_json(const lab::QuenchedEstimate& e) {
  return {{"kind", "estimate"},
          {"mean", e.mean},
          {"stderr", e.std_error},
          {"samples", e.samples},
          {"seed", e.seed},
          {"method", lab::method_name(e.method)},
          {"truncation_bound", e.truncation_bound}};
}

inline lab::QuenchedEstimate estimate_from_json(const Json& j) {
  detail::expect_kind(j, "estimate");
  lab::QuenchedEstimate e;
  e.mean = detail::field<double>(j, "mean");
  e.std_error = detail::field<double>(j, "stderr");
  if (e.std_error < 0) throw SchemaError("stderr must be non-negative");
  e.samples = detail::field<std::size_t>(j, "samples");
  e.seed = detail::field<std::uint64_t>(j, "seed");
  e.method = method_from_string(detail::field<std::string>(j, "method"));
  e.truncation_bound = detail::field<double>(j, "truncation_bound");
  return e;
}

inline Json to_json(const lab::IdentityRow& r) {
  return {{"label", r.label},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"difference", r.difference},
          {"combined_stderr", r.combined_stderr},
          {"tolerance", r.tolerance},
          {"passed", r.passed}};
}

inline Json to_json(const lab::IdentityReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  return {{"kind", "identity"},
          {"identity", r.identity},
          {"model", r.model},
          {"method", lab::method_name(r.method)},
          {"samples", r.samples},
          {"seed", r.seed},
          {"lambda_grid", r.lambda_grid},
          {"rows", rows},
          {"passed", r.passed()}};
}

inline lab::IdentityReport identity_report_from_json(const Json& j) {
  detail::expect_kind(j, "identity");
  lab::IdentityReport r;
  r.identity = detail::field<std::string>(j, "identity");
  r.model = detail::field<std::string>(j, "model");
  r.method = method_from_string(detail::field<std::string>(j, "method"));
  r.samples = detail::field<std::size_t>(j, "samples");
  r.seed = detail::field<std::uint64_t>(j, "seed");
  r.lambda_grid = detail::field<std::vector<double>>(j, "lambda_grid");
  const auto it = j.find("rows");
  if (it == j.end() || !it->is_array()) throw SchemaError("field 'rows' must be an array");
  for (const auto& row : *it) {
    lab::IdentityRow x;
    x.label = detail::field<std::string>(row, "label");
    x.lhs = detail::field<double>(row, "lhs");
    x.rhs = detail::field<double>(row, "rhs");
    x.difference = detail::field<double>(row, "difference");
    x.combined_stderr = detail::field<double>(row, "combined_stderr");
    x.tolerance = detail::field<double>(row, "tolerance");
    x.passed = detail::field<bool>(row, "passed");
    r.rows.push_back(std::move(x));
  }
  return r;
}

/// 64-bit FNV-1a of `text`, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// {"payload": ..., "payload_hash": ..., "timings": ...}. The hash covers the
/// compact dump of the payload only, so reruns agree on everything except
/// "timings".
inline Json make_document(const Json& payload, const Json& timings = Json::object()) {
  Json doc;
  doc["payload"] = payload;
  doc["payload_hash"] = fnv1a_hex(payload.dump());
  doc["timings"] = timings;
  return doc;
}

inline const Json& document_payload(const Json& doc) {
  const auto it = doc.find("payload");
  if (it == doc.end()) throw SchemaError("missing field 'payload'");
  return *it;
}

}  // namespace overlap::io
