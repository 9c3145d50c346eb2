#pragma once

// Internal helpers shared by the built-in oracles.

#include <optional>
#include <utility>
#include <vector>

#include "drxp/core.hpp"
#include "drxp/lp.hpp"
#include "drxp/oracles.hpp"

namespace drxp::detail {

// [lo, hi] of an ordinal domain as doubles; throws for categorical.
std::pair<double, double> ordinal_bounds(const FeatureDomain& d);

struct BallMin {
  double value = 0.0;   // achieved d.(x - v)
  Point point;          // attaining point, feasible and finite
  bool target_met = false;  // value <= target_gain (matters when the true
                            // infimum is -inf under p=0)
};

// Minimizes d.(x - v) over the fixed-restricted ball intersected with the
// domain box. Exact for p in {1,2,inf} (real free coordinates required,
// UnsupportedError otherwise) and for p=0 over arbitrary domains, where a
// coordinate with an unbounded improving direction is driven far enough to
// reach target_gain.
BallMin minimize_gain_over_ball(const std::vector<double>& d,
                                const ExplanationProblem& problem,
                                const DistanceBudget& budget,
                                const FeatureSet& fixed, double target_gain);

// Exhaustive scan of the fixed-restricted ball when every free domain is
// finite; exact. UnsupportedError when some free domain is real.
std::optional<OracleAnswer> try_enumerate_finite(const OracleQuery& query);
bool all_free_domains_finite(const OracleQuery& query);

// Pulls a point that overshot the ball boundary by roundoff back inside by
// scaling its ordinal displacement.
void clip_to_ball(Point& x, const ExplanationProblem& problem,
                  const DistanceBudget& budget);

// Per-coordinate bounds of the fixed-restricted ball relaxation used as LP
// variable boxes: fixed coordinates pinned, free ones domain ∩ [v-eps,v+eps]
// (exact for p=inf, a sound relaxation for p=1).
void lp_variable_box(const OracleQuery& query, std::vector<double>& lo,
                     std::vector<double>& hi);

// Appends the l1-ball encoding over auxiliary variables t_i (|x_i - v_i|
// <= t_i, sum t_i <= eps) for free coordinates; returns the index of the
// first auxiliary column. Only needed when p=1.
int append_l1_ball(const OracleQuery& query,
                   std::vector<LinearConstraint>& constraints,
                   std::vector<double>& lo, std::vector<double>& hi);

}  // namespace drxp::detail
