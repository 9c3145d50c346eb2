#pragma once

// Single-explanation extraction: deletion and QuickXplain-style AXp search,
// deletion-based CXp search, the weak-explanation predicates, the relaxed
// (timeout-tolerant) WAXp mode and adversarial-witness conversion.

#include <vector>

#include "drxp/core.hpp"
#include "drxp/oracles.hpp"

namespace drxp {

enum class ExplanationKind { AXp, WAXp, CXp, WCXp };

struct ExplanationStats {
  int oracle_calls = 0;
  int timeouts = 0;
  std::vector<double> per_call_seconds;
  double total_seconds = 0.0;

  void record(const OracleAnswer& answer);
  void merge(const ExplanationStats& other);
};

struct Explanation {
  FeatureSet features;
  ExplanationKind kind = ExplanationKind::WAXp;
  bool minimal_guaranteed = false;
  ExplanationStats stats;
};

enum class PredicateValue { Holds, Fails, Indeterminate };

// WAXp(S): no adversarial example exists with the features in S fixed.
PredicateValue is_waxp(const FeatureSet& s, const ExplanationProblem& problem,
                       const DistanceBudget& budget, AdvExOracle& oracle,
                       ExplanationStats* stats = nullptr);

// WCXp(Y): an adversarial example exists with F \ Y fixed.
PredicateValue is_wcxp(const FeatureSet& y, const ExplanationProblem& problem,
                       const DistanceBudget& budget, AdvExOracle& oracle,
                       ExplanationStats* stats = nullptr);

// 0-based feature processing order; throws on malformed specs.
// "asc" | "desc" | "random:SEED" | comma list of 1-based indices.
std::vector<int> make_order(int m, const std::string& spec);

// Linear-search AXp extraction: exactly m oracle calls, each tentatively
// freeing one feature and re-fixing it iff an adversarial example appears.
// A Timeout answer raises IndeterminateError (use axp_relaxed instead).
Explanation axp_deletion(const ExplanationProblem& problem,
                         const DistanceBudget& budget, AdvExOracle& oracle,
                         const std::vector<int>& order);

// Divide-and-conquer AXp extraction with halving splits.
Explanation axp_quickxplain(const ExplanationProblem& problem,
                            const DistanceBudget& budget, AdvExOracle& oracle);

// Dual deletion loop for one CXp. Throws NoCXpError when the problem is
// eps-robust with nothing fixed.
Explanation cxp_deletion(const ExplanationProblem& problem,
                         const DistanceBudget& budget, AdvExOracle& oracle,
                         const std::vector<int>& order);

// Deletion loop where a Timeout is treated as "adversarial example found"
// and the feature is re-added. Result kind is WAXp with
// minimal_guaranteed=false when any call timed out, AXp otherwise.
Explanation axp_relaxed(const ExplanationProblem& problem,
                        const DistanceBudget& budget, AdvExOracle& oracle,
                        const std::vector<int>& order);

// diff_set(x, v) packaged as a weak CXp; x must be adversarial.
Explanation wcxp_from_witness(const Point& x,
                              const ExplanationProblem& problem,
                              const DistanceBudget& budget);

}  // namespace drxp
