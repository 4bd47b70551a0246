#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "overlap/io/text.hpp"
#include "overlap/lab/expectations.hpp"
#include "overlap/operators.hpp"
#include "overlap/pairing.hpp"
#include "overlap/theorem.hpp"

namespace overlap::lab {

/// One compared pair: lhs and rhs estimated on shared randomness.
/// `combined_stderr` is the standard error of lhs - rhs.
struct IdentityRow {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double difference = 0.0;
  double combined_stderr = 0.0;
  double tolerance = 0.0;
  bool passed = false;

  friend bool operator==(const IdentityRow&, const IdentityRow&) = default;
};

struct IdentityReport {
  std::string identity;
  std::string model;
  std::vector<IdentityRow> rows;
  std::vector<double> lambda_grid;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  Method method = Method::monte_carlo;

  [[nodiscard]] bool passed() const {
    for (const auto& r : rows)
      if (!r.passed) return false;
    return true;
  }

  friend bool operator==(const IdentityReport&, const IdentityReport&) = default;
};

/// Acceptance band |lhs - rhs| <= sigmas * combined_stderr + absolute.
struct Tolerance {
  double sigmas = 3.0;
  double absolute = 0.0;
};

/// Tolerance used when none is given: 3 combined standard errors under
/// Monte Carlo; a fixed absolute bound under quadrature.
inline Tolerance default_tolerance(const Integrator& how, double quadrature_absolute) {
  if (std::holds_alternative<QuadratureOptions>(how)) return {0.0, quadrature_absolute};
  return {3.0, 0.0};
}

namespace detail {

inline IdentityRow make_row(std::string label, const Integral& result,
                            std::span<const double> lhs_weights,
                            std::span<const double> rhs_weights, const Tolerance& tol) {
  std::vector<double> diff(lhs_weights.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = lhs_weights[k] - rhs_weights[k];
  IdentityRow row;
  row.label = std::move(label);
  row.lhs = result.combine(lhs_weights).mean;
  row.rhs = result.combine(rhs_weights).mean;
  const auto d = result.combine(diff);
  row.difference = d.mean;
  row.combined_stderr = d.std_error;
  row.tolerance = tol.sigmas * d.std_error + tol.absolute;
  row.passed = std::abs(d.mean) <= row.tolerance;
  return row;
}

inline void fill_run_info(IdentityReport& report, const Integrator& how) {
  if (const auto* mc = std::get_if<SamplingOptions>(&how)) {
    report.method = Method::monte_carlo;
    report.seed = mc->seed;
    report.samples = mc->samples;
  } else {
    report.method = Method::quadrature;
    report.samples = std::get<QuadratureOptions>(how).nodes;
  }
}

inline std::string format_lambda(double x) {
  std::string s = std::to_string(x);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace detail

struct IdentityOptions {
  /// Grid and stencil; default_deformation(2n) when unset.
  std::optional<DeformationConfig> deformation;
  /// Point away from 0 at which the first-order relation is also checked.
  double lambda0 = 0.3;
  /// Overrides the default tolerance when set.
  bool custom_tolerance = false;
  Tolerance tolerance;
  ReplicaBudget budget;
};

/// Compares d^{2n}/dlambda^{2n} E_{lambda h}(g) at 0 (finite differences)
/// with (2n-1)!! E(Delta^n g). For n = 1 also compares d/dlambda E_{lambda h}(g)
/// with lambda E_{lambda h}(Delta g), at lambda0 and at 0.
inline IdentityReport identity_check(const ModelInstance& model, const Multigraph& g, int n,
                                     const Integrator& how, const IdentityOptions& opt = {}) {
  if (n < 1 || n > 2) throw std::invalid_argument("identity_check supports n = 1 or 2");
  if (!g.leg_free()) throw std::invalid_argument("identity_check needs a leg-free monomial");
  const GraphPolynomial gp(g);
  const auto dn = big_delta_power(gp, n);
  check_replica_budget(model, std::max(gp.max_vertex_count(), dn.max_vertex_count()), opt.budget);

  const Tolerance tol = opt.custom_tolerance
                            ? opt.tolerance
                            : default_tolerance(how, n == 1 ? 1e-6 : 1e-5);
  const DeformationConfig deformation = opt.deformation.value_or(default_deformation(2 * n));
  ProbeSet set(model, opt.budget);
  const auto pid = set.add_polynomial(gp);
  const auto did = set.add_polynomial(dn);
  const auto high = add_derivative(set, pid, 2 * n, deformation, 0.0);
  const auto rhs_col = set.probe(did, 0.0);
  DerivativeProbe first_at_l0, first_at_0;
  std::size_t delta_at_l0 = 0;
  if (n == 1) {
    first_at_l0 = add_derivative(set, pid, 1, deformation, opt.lambda0);
    delta_at_l0 = set.probe(did, opt.lambda0);
    first_at_0 = add_derivative(set, pid, 1, deformation, 0.0);
  }
  const auto result = set.integrate(how);
  const std::size_t W = set.width();

  IdentityReport report;
  report.identity = "derivative identity, n=" + std::to_string(n);
  report.model = model.describe();
  report.lambda_grid = deformation.lambda_grid;
  detail::fill_run_info(report, how);

  const auto factor = double_factorial(2 * n - 1).convert_to<double>();
  const std::string gtxt = io::format_monomial(g);
  std::vector<double> rhs(W, 0.0);
  rhs[rhs_col] = factor;
  report.rows.push_back(detail::make_row(
      "d^" + std::to_string(2 * n) + "/dl^" + std::to_string(2 * n) + " E_l(" + gtxt +
          ")|_0 = " + std::to_string(2 * n - 1) + "!! E(D^" + std::to_string(n) + " " + gtxt + ")",
      result, high.weights(W), rhs, tol));
  if (n == 1) {
    const std::string l0 = detail::format_lambda(opt.lambda0);
    std::vector<double> rhs1(W, 0.0);
    rhs1[delta_at_l0] = opt.lambda0;
    report.rows.push_back(detail::make_row("d/dl E_l(" + gtxt + ") = l E_l(D " + gtxt +
                                               ") at l=" + l0,
                                           result, first_at_l0.weights(W), rhs1, tol));
    const std::vector<double> zero(W, 0.0);
    report.rows.push_back(detail::make_row("d/dl E_l(" + gtxt + ") = 0 at l=0", result,
                                           first_at_0.weights(W), zero, tol));
  }
  return report;
}

/// Av<h>^2 vs E(c12) and Av(<h1><h1 h2><h2>) vs E(c12 c23), with two
/// independent auxiliary fields h1, h2.
inline IdentityReport wick_baseline_check(const ModelInstance& model, const Integrator& how,
                                          const ReplicaBudget& budget = {},
                                          const Tolerance* tolerance = nullptr) {
  const Tolerance tol = tolerance ? *tolerance : default_tolerance(how, 1e-8);
  const MomentProgram c12(model, GraphPolynomial(make_multigraph({{1, 2}})), budget);
  const MomentProgram c12c23(model, GraphPolynomial(make_multigraph({{1, 2}, {2, 3}})), budget);
  FieldNeeds needs;
  needs.deformation = false;
  needs.auxiliary = 2;
  const auto result = integrate(
      model, how, 4, needs, [&](const DisorderSample& s, std::span<double> out) {
        const SampleFields fields(model, s.J, {});
        const std::size_t S = model.configuration_count();
        std::vector<double> w(S);
        gibbs_weights_into(fields, model.beta(), 0.0, w);
        double h1 = 0.0, h2 = 0.0, h12 = 0.0;
        for (Configuration c = 0; c < S; ++c) {
          const double a = model.field(s.fields.at(1), c);
          const double b = model.field(s.fields.at(2), c);
          h1 += w[c] * a;
          h2 += w[c] * b;
          h12 += w[c] * a * b;
        }
        out[0] = h1 * h1;
        out[1] = c12.evaluate(w);
        out[2] = h1 * h12 * h2;
        out[3] = c12c23.evaluate(w);
      });
  IdentityReport report;
  report.identity = "Gaussian baselines";
  report.model = model.describe();
  detail::fill_run_info(report, how);
  report.rows.push_back(detail::make_row("Av(<h1>^2) = E({1,2})", result,
                                         std::vector<double>{1, 0, 0, 0},
                                         std::vector<double>{0, 1, 0, 0}, tol));
  report.rows.push_back(detail::make_row("Av(<h1><h1 h2><h2>) = E({1,2}{2,3})", result,
                                         std::vector<double>{0, 0, 1, 0},
                                         std::vector<double>{0, 0, 0, 1}, tol));
  return report;
}

/// Gaussian integration by parts E(X_l f(X)) = sum_m C_lm E(d f/d X_m) for a
/// centred Gaussian pair with unit variances and correlation `correlation`,
/// over a fixed family of test functions. The tilted weights
/// w_i = exp(lambda X_i) / sum_j exp(lambda X_j) give ratio-type functions
/// on a two-point configuration space.
inline IdentityReport gaussian_ibp_check(const SamplingOptions& opt, double correlation = 0.5,
                                         double lambda = 0.3, double sigmas = 3.0) {
  if (!(std::abs(correlation) < 1.0)) throw std::invalid_argument("correlation must be in (-1,1)");
  const double c = correlation;
  const double C[2][2] = {{1.0, c}, {c, 1.0}};
  struct Family {
    std::string name;
    int l;  // 0 or 1
  };
  const std::vector<Family> families{
      {"f=X1, l=1", 0},       {"f=X1^2, l=1", 0},          {"f=X1 X2, l=1", 0},
      {"f=X1 X2, l=2", 1},    {"f=w1, l=1", 0},            {"f=w1, l=2", 1},
      {"f=<X>_w, l=1", 0},
  };
  const std::size_t F = families.size();
  // Per family: value of X_l f, d f/dX_1, d f/dX_2.
  const std::size_t width = 3 * F;
  const std::size_t units = opt.samples;
  auto values = detail::parallel_units(units, width, opt.workers, [&](std::size_t u,
                                                                        std::span<double> out) {
    auto rng = detail::unit_stream(opt.seed, u);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double z1 = normal(rng);
    const double z2 = normal(rng);
    const double x[2] = {z1, c * z1 + std::sqrt(1.0 - c * c) * z2};
    const double top = std::max(lambda * x[0], lambda * x[1]);
    const double e0 = std::exp(lambda * x[0] - top), e1 = std::exp(lambda * x[1] - top);
    const double w[2] = {e0 / (e0 + e1), e1 / (e0 + e1)};
    const double mean = w[0] * x[0] + w[1] * x[1];
    for (std::size_t f = 0; f < F; ++f) {
      double val = 0.0, d1 = 0.0, d2 = 0.0;
      switch (f) {
        case 0: val = x[0]; d1 = 1.0; break;
        case 1: val = x[0] * x[0]; d1 = 2.0 * x[0]; break;
        case 2:
        case 3: val = x[0] * x[1]; d1 = x[1]; d2 = x[0]; break;
        case 4:
        case 5: val = w[0]; d1 = lambda * w[0] * w[1]; d2 = -lambda * w[0] * w[1]; break;
        case 6:
          val = mean;
          d1 = w[0] + lambda * w[0] * (x[0] - mean);
          d2 = w[1] + lambda * w[1] * (x[1] - mean);
          break;
      }
      out[3 * f] = x[families[f].l] * val;
      out[3 * f + 1] = d1;
      out[3 * f + 2] = d2;
    }
  });
  const auto result = Integral::from_units(std::move(values), units, width, opt.samples, opt.seed);
  IdentityReport report;
  report.identity = "Gaussian integration by parts";
  report.model = "Gaussian pair (correlation=" + detail::format_lambda(c) +
                 ", lambda=" + detail::format_lambda(lambda) + ")";
  report.method = Method::monte_carlo;
  report.seed = opt.seed;
  report.samples = opt.samples;
  for (std::size_t f = 0; f < F; ++f) {
    std::vector<double> lhs(width, 0.0), rhs(width, 0.0);
    lhs[3 * f] = 1.0;
    rhs[3 * f + 1] = C[families[f].l][0];
    rhs[3 * f + 2] = C[families[f].l][1];
    report.rows.push_back(detail::make_row(families[f].name, result, lhs, rhs, {sigmas, 0.0}));
  }
  return report;
}

}  // namespace overlap::lab
