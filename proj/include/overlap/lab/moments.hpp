#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "overlap/canonical.hpp"
#include "overlap/lab/gibbs.hpp"
#include "overlap/lab/model.hpp"
#include "overlap/lab/overlaps.hpp"
#include "overlap/polynomial.hpp"

namespace overlap::lab {

/// Refusal: the replica product space would exceed the configured budget.
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Upper bound on (2^N)^R, expressed as log2 (default 2^24).
struct ReplicaBudget {
  std::size_t max_log2 = 24;
};

inline void check_replica_budget(const ModelInstance& model, std::size_t replicas,
                                 const ReplicaBudget& budget) {
  const std::size_t needed = model.spins() * replicas;
  if (needed > budget.max_log2)
    throw BudgetExceededError("replica space (2^" + std::to_string(model.spins()) + ")^" +
                              std::to_string(replicas) + " = 2^" + std::to_string(needed) +
                              " exceeds the budget 2^" + std::to_string(budget.max_log2));
}

/// Compiled evaluator for the replica moment <<p>> of a leg-free polynomial
/// under a product measure with per-replica weights w.
///
/// Each monomial is a sum over Omega^R of prod_r w(sigma_r) prod_{ij}
/// c(sigma_i, sigma_j)^{m_ij}. The sum is exact; it is carried out by
/// eliminating replicas one at a time (min-degree order), which is the same
/// sum reorganized.
class MomentProgram {
 public:
  MomentProgram(const ModelInstance& model, const GraphPolynomial& p,
                const ReplicaBudget& budget = {})
      : MomentProgram(model, std::make_shared<const OverlapTable>(model), p, budget) {}

  MomentProgram(const ModelInstance& model, std::shared_ptr<const OverlapTable> table,
                const GraphPolynomial& p, const ReplicaBudget& budget = {})
      : table_(std::move(table)), states_(model.configuration_count()) {
    if (!p.leg_free())
      throw std::invalid_argument("replica moments need leg-free polynomials");
    check_replica_budget(model, p.max_vertex_count(), budget);
    for (const auto& [g, c] : p.terms()) plans_.push_back(plan(g, c.convert_to<double>()));
  }

  [[nodiscard]] std::size_t states() const noexcept { return states_; }

  /// <<p>> for one weight vector (length 2^N, summing to 1).
  [[nodiscard]] double evaluate(std::span<const double> weights) const {
    double total = 0.0;
    for (const auto& t : plans_) total += t.coefficient * run(t, weights);
    return total;
  }

 private:
  enum class Kind { weight, edge, intermediate };

  struct FactorRef {
    Kind kind = Kind::weight;
    std::size_t index = 0;  // power table for edges, buffer slot for intermediates
    std::vector<std::size_t> scope;  // ascending local vertex ids
  };

  struct Step {
    std::vector<FactorRef> inputs;
    std::vector<std::size_t> out_scope;  // ascending
    std::size_t eliminated = 0;
    std::size_t out_slot = 0;
  };

  struct TermPlan {
    double coefficient = 0.0;
    std::vector<Step> steps;
    std::vector<std::size_t> scalar_slots;
    std::size_t slot_count = 0;
    bool empty = false;  // the unit monomial
  };

  std::size_t power_index(int m) {
    auto it = power_slots_.find(m);
    if (it != power_slots_.end()) return it->second;
    powers_.push_back(table_->power(m));
    power_slots_.emplace(m, powers_.size() - 1);
    return powers_.size() - 1;
  }

  TermPlan plan(const CanonicalMultigraph& g, double coefficient) {
    TermPlan t;
    t.coefficient = coefficient;
    const std::size_t R = g.vertex_count();
    if (R == 0) {
      t.empty = true;
      return t;
    }
    std::vector<FactorRef> active;
    for (std::size_t v = 0; v < R; ++v) active.push_back({Kind::weight, 0, {v}});
    for (const auto& [e, m] : g.graph().edges())
      active.push_back({Kind::edge, power_index(m), {e.first - 1, e.second - 1}});

    std::vector<bool> done(R, false);
    for (std::size_t round = 0; round < R; ++round) {
      // Min-degree choice: fewest distinct neighbours among live factors.
      std::size_t best = R, best_degree = 0;
      for (std::size_t v = 0; v < R; ++v) {
        if (done[v]) continue;
        std::vector<std::size_t> nb;
        for (const auto& f : active)
          if (std::binary_search(f.scope.begin(), f.scope.end(), v))
            for (auto u : f.scope)
              if (u != v) nb.push_back(u);
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        if (best == R || nb.size() < best_degree) {
          best = v;
          best_degree = nb.size();
        }
      }
      Step s;
      s.eliminated = best;
      std::vector<FactorRef> keep;
      for (auto& f : active) {
        if (std::binary_search(f.scope.begin(), f.scope.end(), best)) {
          for (auto u : f.scope)
            if (u != best) s.out_scope.push_back(u);
          s.inputs.push_back(std::move(f));
        } else {
          keep.push_back(std::move(f));
        }
      }
      std::sort(s.out_scope.begin(), s.out_scope.end());
      s.out_scope.erase(std::unique(s.out_scope.begin(), s.out_scope.end()), s.out_scope.end());
      s.out_slot = t.slot_count++;
      keep.push_back({Kind::intermediate, s.out_slot, s.out_scope});
      active = std::move(keep);
      done[best] = true;
      t.steps.push_back(std::move(s));
    }
    for (const auto& f : active) t.scalar_slots.push_back(f.index);
    return t;
  }

  [[nodiscard]] double run(const TermPlan& t, std::span<const double> w) const {
    if (t.empty) return 1.0;
    const std::size_t S = states_;
    std::vector<std::vector<double>> slots(t.slot_count);
    std::vector<std::size_t> digits;
    std::vector<const double*> tables;
    std::vector<std::vector<std::size_t>> strides;
    for (const auto& s : t.steps) {
      // Joint variables: out_scope, then the eliminated one (innermost).
      std::vector<std::size_t> joint = s.out_scope;
      joint.push_back(s.eliminated);
      const std::size_t n = joint.size();
      tables.clear();
      strides.assign(s.inputs.size(), std::vector<std::size_t>(n, 0));
      for (std::size_t f = 0; f < s.inputs.size(); ++f) {
        const auto& in = s.inputs[f];
        switch (in.kind) {
          case Kind::weight: tables.push_back(w.data()); break;
          case Kind::edge: tables.push_back(powers_[in.index].data()); break;
          case Kind::intermediate: tables.push_back(slots[in.index].data()); break;
        }
        std::size_t stride = 1;
        for (auto var : in.scope) {
          const auto pos = static_cast<std::size_t>(
              std::find(joint.begin(), joint.end(), var) - joint.begin());
          strides[f][pos] = stride;
          stride *= S;
        }
      }
      std::size_t out_size = 1;
      for (std::size_t i = 0; i + 1 < n; ++i) out_size *= S;
      auto& out = slots[s.out_slot];
      out.assign(out_size, 0.0);
      // Output index uses the same ascending-scope layout: out_scope[p] has
      // stride S^p, matching joint positions 0..n-2.
      digits.assign(n, 0);
      std::vector<std::size_t> offset(s.inputs.size(), 0);
      for (std::size_t o = 0; o < out_size; ++o) {
        double acc = 0.0;
        for (std::size_t x = 0; x < S; ++x) {
          double prod = 1.0;
          for (std::size_t f = 0; f < s.inputs.size(); ++f)
            prod *= tables[f][offset[f] + x * strides[f][n - 1]];
          acc += prod;
        }
        out[o] = acc;
        // Advance the odometer over out_scope digits.
        for (std::size_t p = 0; p + 1 < n; ++p) {
          ++digits[p];
          for (std::size_t f = 0; f < s.inputs.size(); ++f) offset[f] += strides[f][p];
          if (digits[p] < S) break;
          for (std::size_t f = 0; f < s.inputs.size(); ++f) offset[f] -= S * strides[f][p];
          digits[p] = 0;
        }
      }
    }
    double result = 1.0;
    for (auto slot : t.scalar_slots) result *= slots[slot][0];
    return result;
  }

  std::shared_ptr<const OverlapTable> table_;
  std::size_t states_;
  std::vector<std::vector<double>> powers_;
  std::map<int, std::size_t> power_slots_;
  std::vector<TermPlan> plans_;
};

/// <<g>>_{lambda h}(J): exact replica moment of a leg-free monomial under the
/// deformed Gibbs measure.
inline double replica_moment(const ModelInstance& model, std::span<const double> J,
                             double lambda, std::span<const double> h_couplings,
                             const Multigraph& g, const ReplicaBudget& budget = {}) {
  const MomentProgram program(model, GraphPolynomial(g), budget);
  const auto w = gibbs_weights(model, J, lambda, h_couplings);
  return program.evaluate(w);
}

}  // namespace overlap::lab
