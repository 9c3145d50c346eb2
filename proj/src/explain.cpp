#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "drxp/explain.hpp"

namespace drxp {

void ExplanationStats::record(const OracleAnswer& answer) {
  ++oracle_calls;
  if (answer.status == AnswerStatus::Timeout) ++timeouts;
  per_call_seconds.push_back(answer.elapsed_seconds);
  total_seconds += answer.elapsed_seconds;
}

void ExplanationStats::merge(const ExplanationStats& other) {
  oracle_calls += other.oracle_calls;
  timeouts += other.timeouts;
  per_call_seconds.insert(per_call_seconds.end(),
                          other.per_call_seconds.begin(),
                          other.per_call_seconds.end());
  total_seconds += other.total_seconds;
}

namespace {

OracleAnswer ask(const FeatureSet& fixed, const ExplanationProblem& problem,
                 const DistanceBudget& budget, AdvExOracle& oracle,
                 ExplanationStats* stats) {
  OracleQuery q{problem, budget, fixed};
  OracleAnswer ans = find_adv_ex(q, oracle);
  if (stats) stats->record(ans);
  return ans;
}

}  // namespace

PredicateValue is_waxp(const FeatureSet& s, const ExplanationProblem& problem,
                       const DistanceBudget& budget, AdvExOracle& oracle,
                       ExplanationStats* stats) {
  switch (ask(s, problem, budget, oracle, stats).status) {
    case AnswerStatus::Robust:
      return PredicateValue::Holds;
    case AnswerStatus::AdversarialFound:
      return PredicateValue::Fails;
    case AnswerStatus::Timeout:
      return PredicateValue::Indeterminate;
  }
  throw Error("unreachable");
}

PredicateValue is_wcxp(const FeatureSet& y, const ExplanationProblem& problem,
                       const DistanceBudget& budget, AdvExOracle& oracle,
                       ExplanationStats* stats) {
  FeatureSet fixed = FeatureSet::full(problem.num_features()).set_minus(y);
  switch (ask(fixed, problem, budget, oracle, stats).status) {
    case AnswerStatus::AdversarialFound:
      return PredicateValue::Holds;
    case AnswerStatus::Robust:
      return PredicateValue::Fails;
    case AnswerStatus::Timeout:
      return PredicateValue::Indeterminate;
  }
  throw Error("unreachable");
}

std::vector<int> make_order(int m, const std::string& spec) {
  std::vector<int> order(static_cast<size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  if (spec.empty() || spec == "asc") return order;
  if (spec == "desc") {
    std::reverse(order.begin(), order.end());
    return order;
  }
  if (spec.rfind("random:", 0) == 0) {
    unsigned long seed;
    try {
      seed = std::stoul(spec.substr(7));
    } catch (const std::exception&) {
      throw ParseError("bad random order seed: " + spec);
    }
    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
    std::shuffle(order.begin(), order.end(), rng);
    return order;
  }
  // explicit comma list of 1-based indices, must be a permutation
  std::vector<int> out;
  std::vector<bool> seen(static_cast<size_t>(m), false);
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    int idx;
    try {
      idx = std::stoi(tok);
    } catch (const std::exception&) {
      throw ParseError("bad order entry: '" + tok + "'");
    }
    if (idx < 1 || idx > m)
      throw ParseError("order index out of range 1.." + std::to_string(m) +
                       ": " + tok);
    if (seen[static_cast<size_t>(idx - 1)])
      throw ParseError("order repeats index " + tok);
    seen[static_cast<size_t>(idx - 1)] = true;
    out.push_back(idx - 1);
  }
  if (static_cast<int>(out.size()) != m)
    throw ParseError("order must list every feature exactly once");
  return out;
}

namespace {

void check_order(int m, const std::vector<int>& order) {
  std::vector<bool> seen(static_cast<size_t>(m), false);
  for (int i : order) {
    if (i < 0 || i >= m || seen[static_cast<size_t>(i)])
      throw Error("order is not a permutation of the features");
    seen[static_cast<size_t>(i)] = true;
  }
  if (static_cast<int>(order.size()) != m)
    throw Error("order is not a permutation of the features");
}

Explanation deletion_core(const ExplanationProblem& problem,
                          const DistanceBudget& budget, AdvExOracle& oracle,
                          const std::vector<int>& order, bool relaxed) {
  const int m = problem.num_features();
  check_order(m, order);
  Explanation xp;
  FeatureSet s = FeatureSet::full(m);
  bool any_timeout = false;
  for (int i : order) {
    FeatureSet trial = s.without(i);
    OracleAnswer ans = ask(trial, problem, budget, oracle, &xp.stats);
    switch (ans.status) {
      case AnswerStatus::Robust:
        s = std::move(trial);
        break;
      case AnswerStatus::AdversarialFound:
        break;  // i is necessary, keep it fixed
      case AnswerStatus::Timeout:
        if (!relaxed)
          throw IndeterminateError(
              "oracle timed out; rerun with the relaxed mode");
        any_timeout = true;  // conservatively keep i
        break;
    }
  }
  xp.features = std::move(s);
  xp.kind = any_timeout ? ExplanationKind::WAXp : ExplanationKind::AXp;
  xp.minimal_guaranteed = !any_timeout;
  return xp;
}

}  // namespace

Explanation axp_deletion(const ExplanationProblem& problem,
                         const DistanceBudget& budget, AdvExOracle& oracle,
                         const std::vector<int>& order) {
  return deletion_core(problem, budget, oracle, order, /*relaxed=*/false);
}

Explanation axp_relaxed(const ExplanationProblem& problem,
                        const DistanceBudget& budget, AdvExOracle& oracle,
                        const std::vector<int>& order) {
  return deletion_core(problem, budget, oracle, order, /*relaxed=*/true);
}

namespace {

// QuickXplain over the monotone WAXp predicate. Background is committed,
// target is still being minimized; WAXp(background ∪ target) is a loop
// invariant.
FeatureSet qx(const FeatureSet& background, bool background_changed,
              const std::vector<int>& target,
              const ExplanationProblem& problem, const DistanceBudget& budget,
              AdvExOracle& oracle, ExplanationStats& stats) {
  if (background_changed && !target.empty()) {
    auto pv = is_waxp(background, problem, budget, oracle, &stats);
    if (pv == PredicateValue::Indeterminate)
      throw IndeterminateError("oracle timed out during QuickXplain");
    if (pv == PredicateValue::Holds) return FeatureSet{};
  }
  if (target.size() <= 1) return FeatureSet(target);
  size_t half = target.size() / 2;
  std::vector<int> t1(target.begin(), target.begin() + half);
  std::vector<int> t2(target.begin() + half, target.end());
  FeatureSet s2 = qx(background.set_union(FeatureSet(t1)), !t1.empty(), t2,
                     problem, budget, oracle, stats);
  FeatureSet s1 = qx(background.set_union(s2), !s2.empty(), t1, problem,
                     budget, oracle, stats);
  return s1.set_union(s2);
}

}  // namespace

Explanation axp_quickxplain(const ExplanationProblem& problem,
                            const DistanceBudget& budget,
                            AdvExOracle& oracle) {
  const int m = problem.num_features();
  Explanation xp;
  auto pv = is_waxp(FeatureSet{}, problem, budget, oracle, &xp.stats);
  if (pv == PredicateValue::Indeterminate)
    throw IndeterminateError("oracle timed out during QuickXplain");
  if (pv == PredicateValue::Holds) {
    xp.kind = ExplanationKind::AXp;
    xp.minimal_guaranteed = true;
    return xp;
  }
  std::vector<int> all(static_cast<size_t>(m));
  std::iota(all.begin(), all.end(), 0);
  xp.features = qx(FeatureSet{}, false, all, problem, budget, oracle,
                   xp.stats);
  xp.kind = ExplanationKind::AXp;
  xp.minimal_guaranteed = true;
  return xp;
}

Explanation cxp_deletion(const ExplanationProblem& problem,
                         const DistanceBudget& budget, AdvExOracle& oracle,
                         const std::vector<int>& order) {
  const int m = problem.num_features();
  check_order(m, order);
  Explanation xp;
  // WCXp(F) must hold, otherwise the instance is eps-robust
  auto pv = is_wcxp(FeatureSet::full(m), problem, budget, oracle, &xp.stats);
  if (pv == PredicateValue::Indeterminate)
    throw IndeterminateError("oracle timed out during CXp precheck");
  if (pv == PredicateValue::Fails)
    throw NoCXpError("the instance is robust: no eps-CXp exists");
  FeatureSet y = FeatureSet::full(m);
  for (int i : order) {
    FeatureSet trial = y.without(i);
    auto tv = is_wcxp(trial, problem, budget, oracle, &xp.stats);
    if (tv == PredicateValue::Indeterminate)
      throw IndeterminateError("oracle timed out during CXp deletion");
    if (tv == PredicateValue::Holds) y = std::move(trial);
  }
  xp.features = std::move(y);
  xp.kind = ExplanationKind::CXp;
  xp.minimal_guaranteed = true;
  return xp;
}

Explanation wcxp_from_witness(const Point& x,
                              const ExplanationProblem& problem,
                              const DistanceBudget& budget) {
  if (!is_adversarial(x, problem, budget))
    throw Error("wcxp_from_witness: point is not adversarial");
  Explanation xp;
  xp.features = diff_set(x, problem.v());
  xp.kind = ExplanationKind::WCXp;
  xp.minimal_guaranteed = false;
  return xp;
}

}  // namespace drxp
