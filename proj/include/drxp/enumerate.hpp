#pragma once

// Seed-and-block enumeration of all eps-AXp's and eps-CXp's via hitting-set
// duality, plus an explicit duality checker and a brute-force reference.

#include <optional>
#include <vector>

#include "drxp/core.hpp"
#include "drxp/explain.hpp"

namespace drxp {

// Propositional seed space over m variables ("feature i is fixed").
// Negative blocks forbid re-deriving supersets of a found AXp; positive
// blocks force every future seed to fix something from a found CXp.
class SeedManager {
 public:
  SeedManager(int m, bool prefer_max_fixed = true);

  // Any seed (set of fixed features) consistent with all blocks, or nullopt
  // when the space is exhausted.
  std::optional<FeatureSet> next_seed() const;

  void block_axp(const FeatureSet& axp);  // clause: some i in axp un-fixed
  void block_cxp(const FeatureSet& cxp);  // clause: some i in cxp fixed

 private:
  struct Clause {
    bool want_fixed;  // polarity of every literal in the clause
    std::vector<int> vars;
  };
  bool search(std::vector<signed char>& assign, int var) const;

  int m_;
  bool prefer_max_fixed_;
  std::vector<Clause> clauses_;
};

struct EnumerationResult {
  std::vector<FeatureSet> axps;
  std::vector<FeatureSet> cxps;
  bool complete = false;
  ExplanationStats stats;
};

// MARCO-style loop: shrink WAXp seeds to AXp's, grow CXp's out of failed
// seeds, block, repeat until the seed space is exhausted (complete=true) or
// `limit` explanations were produced. Requires a complete oracle.
EnumerationResult enumerate_all(const ExplanationProblem& problem,
                                const DistanceBudget& budget,
                                AdvExOracle& oracle,
                                std::optional<int> limit = {},
                                bool prefer_max_fixed = true);

// Both directions of distance-restricted duality: every axp is a minimal
// hitting set of cxps and vice versa.
bool check_duality(const std::vector<FeatureSet>& axps,
                   const std::vector<FeatureSet>& cxps);

// Definition-level ground truth: evaluates the weak predicates on all 2^m
// subsets and keeps the subset-minimal ones. Refused for m > 12.
EnumerationResult brute_force_sets(const ExplanationProblem& problem,
                                   const DistanceBudget& budget,
                                   AdvExOracle& oracle);

}  // namespace drxp
