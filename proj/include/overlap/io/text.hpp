#pragma once

#include <cctype>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "overlap/multigraph.hpp"
#include "overlap/polynomial.hpp"

namespace overlap::io {

/// Malformed text. `offset()` is the byte position of the problem.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::invalid_argument(what + " at byte " + std::to_string(offset)),
        offset_(offset) {}
  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

namespace detail {

// Grammar (ASCII, whitespace ignored between tokens):
//   polynomial := "0" | term (("+" | "-") term)*     leading sign allowed
//   term       := [int] monomial | int
//   monomial   := "1" | factor+
//   factor     := "{" int "," int "}" ["^" int] | "{" int "}" ["^" int]
class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Multigraph monomial_only() {
    skip();
    if (at_end()) fail("empty input");
    Multigraph g = monomial(/*allow_unit=*/true);
    skip();
    if (!at_end()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return g;
  }

  GraphPolynomial polynomial() {
    GraphPolynomial out;
    skip();
    if (at_end()) fail("empty input");
    bool first = true;
    while (true) {
      skip();
      int sign = 1;
      if (!at_end() && (s_[pos_] == '+' || s_[pos_] == '-')) {
        sign = s_[pos_] == '-' ? -1 : 1;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-' between terms");
      }
      if (at_end()) fail("dangling sign");
      first = false;
      term(out, sign);
      skip();
      if (at_end()) break;
    }
    return out;
  }

 private:
  void term(GraphPolynomial& out, int sign) {
    Coefficient coef = 1;
    bool has_coef = false;
    if (std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      coef = big_integer();
      has_coef = true;
      skip();
    }
    Multigraph g;
    if (!at_end() && s_[pos_] == '{') {
      g = monomial(/*allow_unit=*/false);
    } else if (!has_coef) {
      fail("expected a coefficient or a monomial");
    }
    out.add_term(g, sign < 0 ? Coefficient(-coef) : coef);
  }

  Multigraph monomial(bool allow_unit) {
    Multigraph g;
    skip();
    if (allow_unit && s_[pos_] == '1') {
      const std::size_t at = pos_;
      ++pos_;
      skip();
      if (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        fail("expected '1' for the empty monomial", at);
      return g;
    }
    if (at_end() || s_[pos_] != '{') fail("expected '{'");
    while (!at_end() && s_[pos_] == '{') {
      factor(g);
      skip();
    }
    return g;
  }

  void factor(Multigraph& g) {
    const std::size_t open = pos_;
    ++pos_;  // '{'
    skip();
    const Vertex a = vertex();
    skip();
    if (at_end()) fail("unterminated factor", open);
    if (s_[pos_] == ',') {
      ++pos_;
      skip();
      const std::size_t at_b = pos_;
      const Vertex b = vertex();
      skip();
      expect('}');
      const int m = exponent();
      if (a == b) fail("loop edge {" + std::to_string(a) + "," + std::to_string(b) + "}", at_b);
      add(g, open, [&] { g.add_edge(a, b, m); });
    } else if (s_[pos_] == '}') {
      ++pos_;
      const int m = exponent();
      add(g, open, [&] { g.add_leg(a, m); });
    } else {
      fail("expected ',' or '}'");
    }
  }

  template <class Fn>
  void add(Multigraph&, std::size_t at, Fn&& fn) {
    try {
      fn();
    } catch (const std::overflow_error& e) {
      fail(e.what(), at);
    }
  }

  int exponent() {
    skip();
    if (at_end() || s_[pos_] != '^') return 1;
    ++pos_;
    skip();
    const std::size_t at = pos_;
    if (!at_end() && s_[pos_] == '-') fail("negative exponent");
    const auto e = small_integer();
    if (e == 0) fail("zero exponent", at);
    return static_cast<int>(e);
  }

  Vertex vertex() {
    const std::size_t at = pos_;
    if (!at_end() && s_[pos_] == '-') fail("vertex labels must be positive");
    const auto v = small_integer();
    if (v == 0) fail("vertex labels must be positive", at);
    return static_cast<Vertex>(v);
  }

  unsigned long small_integer() {
    const std::size_t at = pos_;
    if (at_end() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      fail("expected an integer");
    unsigned long v = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + static_cast<unsigned long>(s_[pos_] - '0');
      if (v > static_cast<unsigned long>(std::numeric_limits<int>::max()))
        fail("integer too large", at);
      ++pos_;
    }
    return v;
  }

  Coefficient big_integer() {
    Coefficient v = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      ++pos_;
    }
    return v;
  }

  void expect(char c) {
    if (at_end() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip() {
    while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
                         s_[pos_] == '\r'))
      ++pos_;
  }

  [[nodiscard]] bool at_end() const { return pos_ >= s_.size(); }

  [[noreturn]] void fail(const std::string& what) const { fail(what, pos_); }
  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw ParseError(what, at);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Multigraph parse_monomial(std::string_view text) {
  return detail::Parser(text).monomial_only();
}

/// Parses a top-level sum "c1 m1 +/- c2 m2 ...". "0" is the zero polynomial.
inline GraphPolynomial parse_polynomial(std::string_view text) {
  return detail::Parser(text).polynomial();
}

/// Legs first (ascending vertex), then edges (ascending pair). "1" for the
/// empty monomial.
inline std::string format_monomial(const Multigraph& g) {
  if (g.empty()) return "1";
  std::string out;
  auto power = [&](int m) {
    if (m >= 2) out += "^" + std::to_string(m);
  };
  for (const auto& [v, n] : g.legs()) {
    out += "{" + std::to_string(v) + "}";
    power(n);
  }
  for (const auto& [e, m] : g.edges()) {
    out += "{" + std::to_string(e.first) + "," + std::to_string(e.second) + "}";
    power(m);
  }
  return out;
}

/// Terms in canonical order, e.g. "2{1,2}^2 - 8{1,2}{1,3} + 6{1,2}{3,4}".
inline std::string format_polynomial(const GraphPolynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [g, c] : p.terms()) {
    const bool negative = c < 0;
    const Coefficient magnitude = negative ? Coefficient(-c) : c;
    if (first)
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    first = false;
    if (g.empty())
      out += magnitude.str();
    else {
      if (magnitude != 1) out += magnitude.str();
      out += format_monomial(g.graph());
    }
  }
  return out;
}

}  // namespace overlap::io
