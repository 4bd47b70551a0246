#include <catch_amalgamated.hpp>

#include <cmath>

#include "overlap/io/text.hpp"
#include "overlap/lab/identities.hpp"

using namespace overlap;
using namespace overlap::lab;

namespace {

Multigraph M(const char* s) { return io::parse_monomial(s); }

SamplingOptions mc(std::size_t samples, std::uint64_t seed, std::size_t workers = 1) {
  SamplingOptions o;
  o.samples = samples;
  o.seed = seed;
  o.workers = workers;
  return o;
}

void report_rows(const IdentityReport& r) {
  for (const auto& row : r.rows)
    UNSCOPED_INFO(row.label << ": lhs=" << row.lhs << " rhs=" << row.rhs << " diff=" << row.difference
                            << " se=" << row.combined_stderr << " tol=" << row.tolerance);
}

}  // namespace

TEST_CASE("first-order identity holds under quadrature", "[identity][quadrature]") {
  const auto m = ModelInstance::sk(2, 0.5);
  for (const char* g : {"{1,2}", "{1,2}^2", "{1,2}{2,3}"}) {
    const auto r = identity_check(m, M(g), 1, QuadratureOptions{});
    report_rows(r);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.passed());
    for (const auto& row : r.rows) CHECK(std::abs(row.difference) <= 1e-6);
    CHECK(r.method == Method::quadrature);
  }
}

TEST_CASE("second-order identity holds under quadrature", "[identity][quadrature]") {
  const auto r = identity_check(ModelInstance::sk(2, 0.5), M("{1,2}"), 2, QuadratureOptions{});
  report_rows(r);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.passed());
  CHECK(std::abs(r.rows[0].difference) <= 1e-5);
  CHECK(r.lambda_grid == default_deformation(4).lambda_grid);
}

TEST_CASE("identity under Monte Carlo", "[identity][mc]") {
  for (const auto& m : {ModelInstance::sk(3, 0.5), ModelInstance::ea({4}, 0.5)}) {
    const auto r = identity_check(m, M("{1,2}"), 1, mc(20000, 7, 2));
    report_rows(r);
    CHECK(r.passed());
    CHECK(r.samples == 20000);
    CHECK(r.seed == 7);
    for (const auto& row : r.rows) {
      CHECK(row.combined_stderr > 0.0);
      CHECK(row.tolerance == 3.0 * row.combined_stderr);
    }
  }
}

TEST_CASE("identity reports are reproducible", "[identity][determinism]") {
  const auto m = ModelInstance::sk(3, 0.5);
  CHECK(identity_check(m, M("{1,2}"), 1, mc(1000, 3, 1)) == identity_check(m, M("{1,2}"), 1, mc(1000, 3, 4)));
}

TEST_CASE("identity argument checks", "[identity]") {
  const auto m = ModelInstance::sk(3, 0.5);
  CHECK_THROWS_AS(identity_check(m, M("{1,2}"), 3, mc(100, 1)), std::invalid_argument);
  CHECK_THROWS_AS(identity_check(m, M("{1,2}"), 0, mc(100, 1)), std::invalid_argument);
  CHECK_THROWS_AS(identity_check(m, M("{1}{1,2}"), 1, mc(100, 1)), std::invalid_argument);
  IdentityOptions tight;
  tight.budget.max_log2 = 6;
  CHECK_THROWS_AS(identity_check(m, M("{1,2}"), 1, mc(100, 1), tight), BudgetExceededError);
  IdentityOptions bad;
  bad.deformation = DeformationConfig{{-0.1, 0.2}, 2, -1};
  CHECK_THROWS_AS(identity_check(m, M("{1,2}"), 1, mc(100, 1), bad), std::invalid_argument);
}

TEST_CASE("custom tolerance is honoured", "[identity]") {
  IdentityOptions opt;
  opt.custom_tolerance = true;
  opt.tolerance = Tolerance{0.0, 0.0};
  const auto r = identity_check(ModelInstance::sk(2, 0.5), M("{1,2}"), 1, QuadratureOptions{}, opt);
  for (const auto& row : r.rows) {
    CHECK(row.tolerance == 0.0);
    CHECK(row.passed == (row.difference == 0.0));
  }
}

TEST_CASE("Wick baseline under quadrature", "[baseline][quadrature]") {
  const auto r = wick_baseline_check(ModelInstance::sk(2, 0.7), QuadratureOptions{});
  report_rows(r);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.passed());
  for (const auto& row : r.rows) CHECK(std::abs(row.difference) <= 1e-8);
}

TEST_CASE("Wick baseline under Monte Carlo", "[baseline][mc]") {
  for (const auto& m : {ModelInstance::sk(3, 0.5), ModelInstance::ea({2, 2}, 0.8)}) {
    const auto r = wick_baseline_check(m, mc(40000, 11, 2));
    report_rows(r);
    CHECK(r.passed());
  }
}

TEST_CASE("Gaussian integration by parts", "[ibp]") {
  const auto r = gaussian_ibp_check(mc(100000, 5, 2));
  report_rows(r);
  CHECK(r.rows.size() == 7);
  CHECK(r.passed());
  CHECK(gaussian_ibp_check(mc(2000, 5, 1)) == gaussian_ibp_check(mc(2000, 5, 3)));
  CHECK_THROWS_AS(gaussian_ibp_check(mc(100, 1), 1.5), std::invalid_argument);
}
