#include <algorithm>

#include "drxp/enumerate.hpp"

namespace drxp {

SeedManager::SeedManager(int m, bool prefer_max_fixed)
    : m_(m), prefer_max_fixed_(prefer_max_fixed) {
  if (m < 1) throw Error("SeedManager needs m >= 1");
}

void SeedManager::block_axp(const FeatureSet& axp) {
  // forbid fixing all of axp again: some i in axp must be free
  clauses_.push_back({false, axp.indices()});
}

void SeedManager::block_cxp(const FeatureSet& cxp) {
  // future seeds must break this CXp: some i in cxp must be fixed
  clauses_.push_back({true, cxp.indices()});
}

bool SeedManager::search(std::vector<signed char>& assign, int var) const {
  // prune: fail as soon as some clause has every literal falsified
  for (const auto& c : clauses_) {
    bool open = false;
    for (int i : c.vars) {
      signed char a = assign[static_cast<size_t>(i)];
      if (a < 0 || (a == 1) == c.want_fixed) {
        open = true;
        break;
      }
    }
    if (!open && !c.vars.empty()) return false;
    if (c.vars.empty()) return false;  // empty clause: unsatisfiable
  }
  if (var == m_) return true;
  signed char first = prefer_max_fixed_ ? 1 : 0;
  for (signed char val : {first, static_cast<signed char>(1 - first)}) {
    assign[static_cast<size_t>(var)] = val;
    if (search(assign, var + 1)) return true;
  }
  assign[static_cast<size_t>(var)] = -1;
  return false;
}

std::optional<FeatureSet> SeedManager::next_seed() const {
  std::vector<signed char> assign(static_cast<size_t>(m_), -1);
  if (!search(assign, 0)) return std::nullopt;
  std::vector<int> fixed;
  for (int i = 0; i < m_; ++i)
    if (assign[static_cast<size_t>(i)] == 1) fixed.push_back(i);
  return FeatureSet(std::move(fixed));
}

namespace {

PredicateValue must_decide(PredicateValue pv, const char* where) {
  if (pv == PredicateValue::Indeterminate)
    throw IndeterminateError(std::string("oracle timed out during ") + where);
  return pv;
}

// Shrinks a WAXp seed to a subset-minimal AXp; global minimality follows
// from monotonicity since every subset of the result is a subset of seed.
FeatureSet shrink_axp(FeatureSet s, const ExplanationProblem& problem,
                      const DistanceBudget& budget, AdvExOracle& oracle,
                      ExplanationStats& stats) {
  const std::vector<int> candidates = s.indices();
  for (int i : candidates) {
    FeatureSet trial = s.without(i);
    if (must_decide(is_waxp(trial, problem, budget, oracle, &stats),
                    "AXp shrinking") == PredicateValue::Holds)
      s = std::move(trial);
  }
  return s;
}

FeatureSet shrink_cxp(FeatureSet y, const ExplanationProblem& problem,
                      const DistanceBudget& budget, AdvExOracle& oracle,
                      ExplanationStats& stats) {
  const std::vector<int> candidates = y.indices();
  for (int i : candidates) {
    FeatureSet trial = y.without(i);
    if (must_decide(is_wcxp(trial, problem, budget, oracle, &stats),
                    "CXp shrinking") == PredicateValue::Holds)
      y = std::move(trial);
  }
  return y;
}

}  // namespace

EnumerationResult enumerate_all(const ExplanationProblem& problem,
                                const DistanceBudget& budget,
                                AdvExOracle& oracle, std::optional<int> limit,
                                bool prefer_max_fixed) {
  if (!oracle.complete())
    throw Error("enumeration requires a complete oracle");
  const int m = problem.num_features();
  SeedManager seeds(m, prefer_max_fixed);
  EnumerationResult res;
  while (auto seed = seeds.next_seed()) {
    if (limit &&
        static_cast<int>(res.axps.size() + res.cxps.size()) >= *limit)
      return res;  // complete stays false
    auto pv = must_decide(
        is_waxp(*seed, problem, budget, oracle, &res.stats), "enumeration");
    if (pv == PredicateValue::Holds) {
      FeatureSet axp =
          shrink_axp(*seed, problem, budget, oracle, res.stats);
      seeds.block_axp(axp);
      res.axps.push_back(std::move(axp));
    } else {
      // the free features of a failed seed form a WCXp
      FeatureSet y = FeatureSet::full(m).set_minus(*seed);
      FeatureSet cxp = shrink_cxp(std::move(y), problem, budget, oracle,
                                  res.stats);
      seeds.block_cxp(cxp);
      res.cxps.push_back(std::move(cxp));
    }
  }
  res.complete = true;
  return res;
}

namespace {

bool hits_all(const FeatureSet& s, const std::vector<FeatureSet>& sets) {
  for (const auto& t : sets)
    if (!s.intersects(t)) return false;
  return true;
}

bool is_mhs(const FeatureSet& s, const std::vector<FeatureSet>& sets) {
  if (!hits_all(s, sets)) return false;
  for (int i : s.indices())
    if (hits_all(s.without(i), sets)) return false;
  return true;
}

}  // namespace

bool check_duality(const std::vector<FeatureSet>& axps,
                   const std::vector<FeatureSet>& cxps) {
  for (const auto& a : axps)
    if (!is_mhs(a, cxps)) return false;
  for (const auto& c : cxps)
    if (!is_mhs(c, axps)) return false;
  return true;
}

EnumerationResult brute_force_sets(const ExplanationProblem& problem,
                                   const DistanceBudget& budget,
                                   AdvExOracle& oracle) {
  const int m = problem.num_features();
  if (m > 12) throw Error("brute_force_sets is limited to m <= 12");
  const unsigned total = 1u << m;
  EnumerationResult res;

  std::vector<char> waxp(total, 0);
  for (unsigned mask = 0; mask < total; ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    auto pv = must_decide(is_waxp(FeatureSet(std::move(idx)), problem, budget,
                                  oracle, &res.stats),
                          "brute force");
    waxp[mask] = (pv == PredicateValue::Holds) ? 1 : 0;
  }

  const unsigned full = total - 1;
  auto push = [m](std::vector<FeatureSet>& out, unsigned mask) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    out.emplace_back(std::move(idx));
  };
  for (unsigned mask = 0; mask < total; ++mask) {
    // WAXp is monotone, so dropping single bits certifies minimality
    if (waxp[mask]) {
      bool minimal = true;
      for (int i = 0; i < m && minimal; ++i)
        if ((mask & (1u << i)) && waxp[mask & ~(1u << i)]) minimal = false;
      if (minimal) push(res.axps, mask);
    }
    // WCXp(Y) == !WAXp(F \ Y), same one-bit minimality argument
    if (!waxp[full & ~mask] && mask != 0) {
      bool minimal = true;
      for (int i = 0; i < m && minimal; ++i)
        if ((mask & (1u << i)) && !waxp[full & ~(mask & ~(1u << i))])
          minimal = false;
      if (minimal) push(res.cxps, mask);
    }
  }
  res.complete = true;
  return res;
}

}  // namespace drxp
