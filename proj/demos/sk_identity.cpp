// Derivative identity and the lambda curve for a three-spin SK system.

#include <cstdio>

#include "overlap/io/text.hpp"
#include "overlap/lab/identities.hpp"

int main() {
  using namespace overlap;
  using namespace overlap::lab;
  const auto model = ModelInstance::sk(3, 0.5);
  const auto g = io::parse_monomial("{1,2}");

  SamplingOptions how;
  how.samples = 40000;
  how.seed = 2024;
  how.workers = default_workers();

  const auto report = identity_check(model, g, 1, how);
  std::printf("%s on %s, %zu samples\n", report.identity.c_str(), report.model.c_str(), report.samples);
  for (const auto& row : report.rows)
    std::printf("  %s %s\n    lhs %.6f  rhs %.6f  diff %.2e  (3 sigma %.2e)\n", row.passed ? "PASS" : "FAIL",
                row.label.c_str(), row.lhs, row.rhs, row.difference, row.tolerance);

  const double lambdas[] = {-0.4, -0.2, 0.0, 0.2, 0.4};
  std::printf("\nlambda   E_l({1,2})   stderr\n");
  for (const auto& [l, e] : lambda_curve(model, GraphPolynomial(g), lambdas, how))
    std::printf("%6.2f   %.6f   %.1e\n", l, e.mean, e.std_error);

  const auto dev = stability_deviation(model, g, how);
  std::printf("\nE(D {1,2}) = %.3e +- %.1e\n", dev.mean, dev.std_error);
}
