#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "overlap/lab/finite_difference.hpp"
#include "overlap/lab/gibbs.hpp"
#include "overlap/lab/integrate.hpp"
#include "overlap/lab/moments.hpp"
#include "overlap/lab/overlaps.hpp"
#include "overlap/operators.hpp"
#include "overlap/polynomial.hpp"

namespace overlap::lab {

/// A set of (polynomial, lambda) probes evaluated on every disorder sample.
/// All probes of one sample share J and h, and Gibbs weights are computed
/// once per distinct lambda.
class ProbeSet {
 public:
  explicit ProbeSet(const ModelInstance& model, ReplicaBudget budget = {})
      : model_(model), budget_(budget), table_(std::make_shared<const OverlapTable>(model)) {}

  /// Registers a leg-free polynomial; returns its handle.
  std::size_t add_polynomial(const GraphPolynomial& p) {
    programs_.emplace_back(model_, table_, p, budget_);
    return programs_.size() - 1;
  }

  /// Column index of <<p>>_{lambda h}, adding it if new.
  std::size_t probe(std::size_t polynomial, double lambda) {
    if (polynomial >= programs_.size()) throw std::out_of_range("unknown polynomial handle");
    const auto key = std::make_pair(polynomial, lambda);
    if (auto it = columns_.find(key); it != columns_.end()) return it->second;
    std::size_t li = 0;
    while (li < lambdas_.size() && lambdas_[li] != lambda) ++li;
    if (li == lambdas_.size()) lambdas_.push_back(lambda);
    probes_.push_back({polynomial, li});
    columns_.emplace(key, probes_.size() - 1);
    return probes_.size() - 1;
  }

  [[nodiscard]] std::size_t width() const noexcept { return probes_.size(); }

  /// Whether any probe sits at a nonzero lambda.
  [[nodiscard]] bool deformed() const {
    for (double l : lambdas_)
      if (l != 0.0) return true;
    return false;
  }

  [[nodiscard]] Integral integrate(const Integrator& how) const {
    FieldNeeds needs;
    needs.deformation = deformed();
    return lab::integrate(model_, how, width(), needs,
                          [this, &needs](const DisorderSample& s, std::span<double> out) {
                            evaluate(s, needs.deformation, out);
                          });
  }

  void evaluate(const DisorderSample& s, bool use_field, std::span<double> out) const {
    const std::span<const double> h =
        use_field ? std::span<const double>(s.fields.at(0)) : std::span<const double>();
    const SampleFields fields(model_, s.J, h);
    const std::size_t S = model_.configuration_count();
    std::vector<double> weights(lambdas_.size() * S);
    for (std::size_t li = 0; li < lambdas_.size(); ++li)
      gibbs_weights_into(fields, model_.beta(), lambdas_[li],
                         std::span<double>(weights.data() + li * S, S));
    for (std::size_t k = 0; k < probes_.size(); ++k) {
      const auto& pr = probes_[k];
      out[k] = programs_[pr.polynomial].evaluate(
          std::span<const double>(weights.data() + pr.lambda_index * S, S));
    }
  }

 private:
  struct Probe {
    std::size_t polynomial;
    std::size_t lambda_index;
  };

  ModelInstance model_;
  ReplicaBudget budget_;
  std::shared_ptr<const OverlapTable> table_;
  std::vector<MomentProgram> programs_;
  std::vector<double> lambdas_;
  std::vector<Probe> probes_;
  std::map<std::pair<std::size_t, double>, std::size_t> columns_;
};

/// E(p) = Av(<<p>>).
inline QuenchedEstimate quenched_expectation(const ModelInstance& model, const GraphPolynomial& p,
                                             const Integrator& how,
                                             const ReplicaBudget& budget = {}) {
  ProbeSet set(model, budget);
  set.probe(set.add_polynomial(p), 0.0);
  return set.integrate(how).column(0);
}

/// E_{lambda h}(p) = Av(<<p>>_{lambda h}).
inline QuenchedEstimate deformed_expectation(const ModelInstance& model, const GraphPolynomial& p,
                                             double lambda, const Integrator& how,
                                             const ReplicaBudget& budget = {}) {
  ProbeSet set(model, budget);
  const auto id = set.add_polynomial(p);
  set.probe(id, lambda);
  return set.integrate(how).column(0);
}

/// Deterministic oracle for SK with N = 2.
inline QuenchedEstimate quadrature_expectation(const ModelInstance& model,
                                               const GraphPolynomial& p, double lambda = 0.0,
                                               const QuadratureOptions& options = {}) {
  require_quadrature_model(model);
  if (lambda == 0.0) return quenched_expectation(model, p, options);
  return deformed_expectation(model, p, lambda, options);
}

/// Stencil probes for the order-`order` lambda derivative of E_{lambda h}(p)
/// at lambda0: the central column and one column per stencil node.
struct DerivativeProbe {
  Stencil stencil;
  std::size_t center = 0;
  std::vector<std::size_t> nodes;

  /// Weight vector over the columns of `set` reproducing the stencil.
  [[nodiscard]] std::vector<double> weights(std::size_t width) const {
    std::vector<double> w(width, 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      w[nodes[i]] += stencil.weights[i];
      w[center] -= stencil.weights[i];
    }
    return w;
  }
};

inline DerivativeProbe add_derivative(ProbeSet& set, std::size_t polynomial, int order,
                                      const DeformationConfig& config, double lambda0 = 0.0) {
  DerivativeProbe d;
  d.stencil = richardson_stencil(order, config.lambda_grid, config.richardson_levels);
  d.center = set.probe(polynomial, lambda0);
  for (double off : d.stencil.offsets) d.nodes.push_back(set.probe(polynomial, lambda0 + off));
  return d;
}

/// d^order/dlambda^order E_{lambda h}(p) at lambda0, by central differences
/// with Richardson extrapolation; every node uses the same (J, h).
inline QuenchedEstimate fd_derivative(const ModelInstance& model, const GraphPolynomial& p,
                                      int order, const DeformationConfig& config,
                                      const Integrator& how, double lambda0 = 0.0,
                                      const ReplicaBudget& budget = {}) {
  ProbeSet set(model, budget);
  const auto d = add_derivative(set, set.add_polynomial(p), order, config, lambda0);
  return set.integrate(how).combine_stencil(d.center, d.nodes, d.stencil.weights);
}

/// E_{lambda h}(Delta g): the finite-N stability deviation. Reported only.
inline QuenchedEstimate stability_deviation(const ModelInstance& model, const Multigraph& g,
                                            const Integrator& how, double lambda = 0.0,
                                            const ReplicaBudget& budget = {}) {
  const auto dg = big_delta(GraphPolynomial(g));
  if (lambda == 0.0) return quenched_expectation(model, dg, how, budget);
  return deformed_expectation(model, dg, lambda, how, budget);
}

/// E_{lambda h}(p) at each lambda in `lambdas`, all from the same samples.
inline std::vector<std::pair<double, QuenchedEstimate>> lambda_curve(
    const ModelInstance& model, const GraphPolynomial& p, std::span<const double> lambdas,
    const Integrator& how, const ReplicaBudget& budget = {}) {
  ProbeSet set(model, budget);
  const auto id = set.add_polynomial(p);
  std::vector<std::size_t> cols;
  for (double l : lambdas) cols.push_back(set.probe(id, l));
  const auto result = set.integrate(how);
  std::vector<std::pair<double, QuenchedEstimate>> out;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    out.emplace_back(lambdas[i], result.column(cols[i]));
  return out;
}

}  // namespace overlap::lab
