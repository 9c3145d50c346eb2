#include <cmath>

#include "drxp/lp.hpp"
#include "drxp/models.hpp"
#include "drxp/oracles.hpp"
#include "oracle_common.hpp"

namespace drxp {

namespace {

using detail::minimize_gain_over_ball;
using detail::try_enumerate_finite;

bool all_free_real(const OracleQuery& query) {
  const int m = query.problem.num_features();
  for (int i = 0; i < m; ++i)
    if (!query.fixed.contains(i) &&
        !std::holds_alternative<RealInterval>(
            query.problem.space().features[static_cast<size_t>(i)]))
      return false;
  return true;
}

// Discrete free domains fall back to exhaustive scanning of the restricted
// ball; continuous ones use the closed-form margin minimization.
std::optional<OracleAnswer> discrete_fallback(const OracleQuery& query) {
  if (query.budget.norm.p != NormP::L0 && all_free_real(query))
    return std::nullopt;
  if (query.budget.norm.p == NormP::L0) return std::nullopt;  // handled exactly
  auto ans = try_enumerate_finite(query);
  if (!ans)
    throw UnsupportedError(
        "mixed continuous/discrete free features are not decidable for this "
        "model family");
  return ans;
}

}  // namespace

OracleAnswer linear_oracle(const OracleQuery& query, double /*lp_tolerance*/) {
  const auto* model =
      dynamic_cast<const LinearClassifier*>(query.problem.model.get());
  if (!model) throw UnsupportedError("linear_oracle needs a linear model");
  if (auto fallback = discrete_fallback(query)) return *fallback;

  const auto& problem = query.problem;
  const int m = problem.num_features();
  const int c = problem.label();
  const auto& W = model->weights();
  const auto& B = model->biases();

  for (int k = 0; k < model->num_classes(); ++k) {
    if (k == c) continue;
    // margin(x) = (w_c - w_k).x + (b_c - b_k); a flip needs margin < 0
    // (or a tie won by a lower class index).
    std::vector<double> d(static_cast<size_t>(m));
    double margin0 = B[static_cast<size_t>(c)] - B[static_cast<size_t>(k)];
    for (int i = 0; i < m; ++i) {
      d[static_cast<size_t>(i)] = W[static_cast<size_t>(c)][static_cast<size_t>(i)] -
                                  W[static_cast<size_t>(k)][static_cast<size_t>(i)];
      margin0 += d[static_cast<size_t>(i)] * problem.v()[static_cast<size_t>(i)];
    }
    auto res = minimize_gain_over_ball(d, problem, query.budget, query.fixed,
                                       -margin0 - 1.0);
    if (problem.model->predict(res.point) != c) {
      OracleAnswer ans;
      ans.status = AnswerStatus::AdversarialFound;
      ans.witness = std::move(res.point);
      return ans;
    }
  }
  return {AnswerStatus::Robust, std::nullopt, 0.0};
}

OracleAnswer halfspace_oracle(const OracleQuery& query, double lp_tolerance) {
  const auto* model =
      dynamic_cast<const HalfspaceConjunction*>(query.problem.model.get());
  if (!model)
    throw UnsupportedError("halfspace_oracle needs a halfspace conjunction");
  const auto& problem = query.problem;
  const int c = problem.label();

  if (c == model->pos_class()) {
    // Flipping to the negative class means violating any one constraint:
    // each is an independent margin minimization.
    if (auto fallback = discrete_fallback(query)) return *fallback;
    for (const auto& con : model->constraints()) {
      double lhs0 = 0;
      for (size_t i = 0; i < con.a.size(); ++i)
        lhs0 += con.a[i] * problem.v()[i];
      auto res = minimize_gain_over_ball(con.a, problem, query.budget,
                                         query.fixed, con.b - lhs0 - 1.0);
      if (problem.model->predict(res.point) != c) {
        OracleAnswer ans;
        ans.status = AnswerStatus::AdversarialFound;
        ans.witness = std::move(res.point);
        return ans;
      }
    }
    return {AnswerStatus::Robust, std::nullopt, 0.0};
  }

  // Negative instance: all constraints must hold simultaneously somewhere in
  // the restricted ball. Polyhedral balls reduce to LP feasibility.
  const auto p = query.budget.norm.p;
  if (p == NormP::L0 || p == NormP::L2) {
    if (auto ans = try_enumerate_finite(query)) return *ans;
    throw UnsupportedError(
        "halfspace conjunction with a negative instance supports p in "
        "{1, inf} (or fully finite domains)");
  }
  if (!all_free_real(query)) {
    if (auto ans = try_enumerate_finite(query)) return *ans;
    throw UnsupportedError(
        "mixed continuous/discrete free features are not decidable for this "
        "model family");
  }

  const int m = problem.num_features();
  std::vector<double> lo, hi;
  detail::lp_variable_box(query, lo, hi);
  std::vector<LinearConstraint> cs;
  for (const auto& con : model->constraints()) {
    LinearConstraint lc;
    lc.coeffs = con.a;
    lc.rhs = con.strict ? con.b + lp_tolerance : con.b;
    cs.push_back(std::move(lc));
  }
  if (p == NormP::L1) detail::append_l1_ball(query, cs, lo, hi);
  auto lp = lp_feasible(cs, lo, hi, lp_tolerance);
  if (!lp.feasible) return {AnswerStatus::Robust, std::nullopt, 0.0};
  Point x(lp.point.begin(), lp.point.begin() + m);
  detail::clip_to_ball(x, problem, query.budget);
  if (problem.model->predict(x) == c)
    return {AnswerStatus::Robust, std::nullopt, 0.0};
  OracleAnswer ans;
  ans.status = AnswerStatus::AdversarialFound;
  ans.witness = std::move(x);
  return ans;
}

}  // namespace drxp
