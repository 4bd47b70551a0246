#include <catch_amalgamated.hpp>

#include <random>
#include <string>

#include "overlap/io/json.hpp"
#include "overlap/io/text.hpp"
#include "overlap/operators.hpp"
#include "overlap/theorem.hpp"
#include "support.hpp"

using namespace overlap;
using namespace overlap::io;

TEST_CASE("parse monomials", "[text]") {
  const auto g = parse_monomial("{1,2}^2{1,3}{2}");
  CHECK(g.grading() == Grading{3, 1});
  CHECK(g.edge_multiplicity(1, 2) == 2);
  CHECK(parse_monomial("1").empty());
  CHECK(parse_monomial("{2,1}{1,2}") == parse_monomial("{1,2}^2"));
  CHECK(parse_monomial(" { 1 , 2 } ^ 3 { 4 } ") == make_multigraph({{1, 2, 3}}, {{4}}));
  CHECK(parse_monomial("{3}{3}") == parse_monomial("{3}^2"));
}

TEST_CASE("parse errors carry byte offsets", "[text]") {
  auto offset_of = [](const char* text) -> long {
    try {
      (void)parse_monomial(text);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("") == 0);
  CHECK(offset_of("   ") == 3);
  CHECK(offset_of("{1,1}") == 3);
  CHECK(offset_of("{1,2}^0") == 6);
  CHECK(offset_of("{1,2}^-1") == 6);
  CHECK(offset_of("{1,2") == 4);
  CHECK(offset_of("1,2}") == 1);
  CHECK(offset_of("{0,2}") == 1);
  CHECK(offset_of("{1,2}}") == 5);
  CHECK(offset_of("{1;2}") == 2);
  CHECK(offset_of("{1,2}\xe2\x88\x92{3}") == 5);
  CHECK(offset_of("{1,2}^99999999999") == 6);
  CHECK(offset_of("{1,2}^2147483647{1,2}") > 0);
}

TEST_CASE("parse polynomials", "[text]") {
  const auto p = parse_polynomial("2{1,2}^2 - 8{1,2}{1,3} + 6{1,2}{3,4}");
  CHECK(p == big_delta(make_multigraph({{1, 2}})));
  CHECK(parse_polynomial("0").is_zero());
  CHECK(parse_polynomial("-{1,2} + {3,4}").is_zero());
  CHECK(parse_polynomial("3").coefficient(Multigraph{}) == 3);
  CHECK(parse_polynomial("1 + {1,2}").size() == 2);
  CHECK(parse_polynomial("123456789012345678901234567890{1}").coefficient(make_multigraph({}, {{1}})) ==
        Coefficient("123456789012345678901234567890"));
  CHECK_THROWS_AS(parse_polynomial("{1,2} {3,4} +"), ParseError);
  CHECK_THROWS_AS(parse_polynomial("{1,2} 3{3,4}"), ParseError);
  CHECK_THROWS_AS(parse_polynomial("-"), ParseError);
  CHECK_THROWS_AS(parse_polynomial(""), ParseError);
}

TEST_CASE("format polynomials", "[text]") {
  CHECK(format_polynomial(big_delta(make_multigraph({{1, 2}}))) ==
        "2{1,2}^2 - 8{1,2}{1,3} + 6{1,2}{3,4}");
  CHECK(format_polynomial(GraphPolynomial()) == "0");
  CHECK(format_polynomial(GraphPolynomial::one()) == "1");
  CHECK(format_polynomial(parse_polynomial("-3")) == "-3");
  CHECK(format_polynomial(parse_polynomial("-{1,2}")) == "-{1,2}");
  CHECK(format_monomial(make_multigraph({{1, 2, 2}, {1, 3}}, {{2}})) == "{2}{1,2}^2{1,3}");
}

TEST_CASE("parse(format(p)) == p on random polynomials", "[text][property]") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 300; ++t) {
    const auto p = testing_support::random_polynomial(rng, 5);
    const auto text = format_polynomial(p);
    INFO(text);
    const auto q = parse_polynomial(text);
    CHECK(q == p);
    CHECK(format_polynomial(q) == text);
  }
}

TEST_CASE("formatting is idempotent after one pass", "[text][property]") {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 200; ++t) {
    const auto g = testing_support::random_multigraph(rng, 9, 4, 3);
    const auto once = format_polynomial(parse_polynomial(format_monomial(g)));
    CHECK(format_polynomial(parse_polynomial(once)) == once);
  }
}

TEST_CASE("parser survives arbitrary bytes", "[text][fuzz]") {
  std::mt19937_64 rng(33);
  const std::string alphabet = "{}{},,^^0123456789 -+\t\n1x\x80\xff";
  std::uniform_int_distribution<int> len(0, 24);
  std::uniform_int_distribution<int> any_byte(0, 255);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  int accepted = 0;
  for (int t = 0; t < 20000; ++t) {
    std::string s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i)
      s.push_back(t % 2 ? static_cast<char>(any_byte(rng)) : alphabet[pick(rng)]);
    for (int which = 0; which < 2; ++which) {
      try {
        if (which == 0) {
          const auto g = parse_monomial(s);
          CHECK(parse_monomial(format_monomial(g)) == g);
        } else {
          const auto p = parse_polynomial(s);
          CHECK(parse_polynomial(format_polynomial(p)) == p);
        }
        ++accepted;
      } catch (const ParseError& e) {
        CHECK(e.offset() <= s.size());
      }
    }
  }
  CHECK(accepted > 0);
}

TEST_CASE("theorem report JSON round trip", "[json]") {
  auto r = theorem_verify(parse_monomial("{1,2}"), 2);
  const auto doc = make_document(to_json(r), {{"wall_seconds", r.wall_seconds}});
  const auto text = doc.dump();
  const auto back_doc = Json::parse(text);
  const auto back = theorem_report_from_json(document_payload(back_doc), &back_doc["timings"]);
  CHECK(back.input == r.input);
  CHECK(back.n == r.n);
  CHECK(back.factor == r.factor);
  CHECK(back.lhs == r.lhs);
  CHECK(back.rhs == r.rhs);
  CHECK(back.equal == r.equal);
  CHECK(back.counts == r.counts);
  CHECK(back.wall_seconds == r.wall_seconds);
}

TEST_CASE("exact coefficients survive JSON", "[json]") {
  Multigraph legs;
  for (Vertex v = 1; v <= 12; ++v) legs.add_leg(1);
  const auto p = wick_contract(legs);  // {1}^12 pairs into itself 10395 ways
  REQUIRE(p.coefficient(Multigraph{}) == 10395);
  const auto j = polynomial_to_json(p);
  CHECK(j[0]["coefficient"] == "10395");
  CHECK(polynomial_from_json(Json::parse(j.dump())) == p);
  const Coefficient huge("-98765432109876543210987654321");
  CHECK(coefficient_from_json(coefficient_to_json(huge)) == huge);
}

TEST_CASE("estimate JSON round trip", "[json]") {
  lab::QuenchedEstimate e{0.1234567890123456789, 1e-7, 12345, 0xfedcba9876543210ull,
                          lab::Method::monte_carlo, 0.0};
  const auto back = estimate_from_json(Json::parse(to_json(e).dump()));
  CHECK(back == e);
  const auto j = to_json(e);
  CHECK(j.contains("stderr"));
  lab::QuenchedEstimate q{0.5, 0.0, 64, 0, lab::Method::quadrature, 3e-13};
  CHECK(estimate_from_json(Json::parse(to_json(q).dump())) == q);
}

TEST_CASE("identity report JSON round trip echoes the grid", "[json]") {
  lab::IdentityReport r;
  r.identity = "derivative identity, n=1";
  r.model = "SK(N=2, beta=0.5)";
  r.lambda_grid = {-0.2, -0.1, -0.05, 0.05, 0.1, 0.2};
  r.seed = 42;
  r.samples = 1000;
  r.rows.push_back({"row a", 0.1, 0.2, -0.1, 0.01, 0.03, false});
  r.rows.push_back({"row b", 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, 1e-6, true});
  const auto j = Json::parse(to_json(r).dump());
  CHECK(identity_report_from_json(j) == r);
  CHECK(j["lambda_grid"].dump() == "[-0.2,-0.1,-0.05,0.05,0.1,0.2]");
}

TEST_CASE("schema violations are rejected", "[json]") {
  CHECK_THROWS_AS(estimate_from_json(Json::parse(R"({"kind":"estimate","mean":1})")), SchemaError);
  CHECK_THROWS_AS(estimate_from_json(Json::parse(R"({"kind":"identity"})")), SchemaError);
  CHECK_THROWS_AS(
      estimate_from_json(Json::parse(
          R"({"kind":"estimate","mean":"x","stderr":0,"samples":1,"seed":1,"method":"mc","truncation_bound":0})")),
      SchemaError);
  CHECK_THROWS_AS(
      estimate_from_json(Json::parse(
          R"({"kind":"estimate","mean":1,"stderr":-1,"samples":1,"seed":1,"method":"mc","truncation_bound":0})")),
      SchemaError);
  CHECK_THROWS_AS(polynomial_from_json(Json::parse(R"([{"monomial":"{1,1}","coefficient":"1"}])")),
                  SchemaError);
  CHECK_THROWS_AS(polynomial_from_json(Json::parse(R"([{"monomial":"{1,2}","coefficient":3}])")),
                  SchemaError);
  CHECK_THROWS_AS(polynomial_from_json(Json::parse(R"([{"monomial":"{1,2}","coefficient":"3x"}])")),
                  SchemaError);
  CHECK_THROWS_AS(identity_report_from_json(Json::parse(R"({"kind":"identity","identity":"x"})")),
                  SchemaError);
  CHECK_THROWS_AS(document_payload(Json::parse("{}")), SchemaError);
}

TEST_CASE("payload hash ignores timings", "[json]") {
  const Json payload = {{"a", 1}, {"b", "x"}};
  const auto d1 = make_document(payload, {{"wall_seconds", 0.5}});
  const auto d2 = make_document(payload, {{"wall_seconds", 7.0}});
  CHECK(d1["payload_hash"] == d2["payload_hash"]);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
