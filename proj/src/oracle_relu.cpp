#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "drxp/lp.hpp"
#include "drxp/models.hpp"
#include "drxp/oracles.hpp"
#include "oracle_common.hpp"

namespace drxp {

namespace {

struct TimeoutSignal {};

// Affine map over the input vector: rows of M x + q.
struct Affine {
  std::vector<std::vector<double>> M;
  std::vector<double> q;
};

Affine identity(int m) {
  Affine a;
  a.M.assign(static_cast<size_t>(m),
             std::vector<double>(static_cast<size_t>(m), 0.0));
  a.q.assign(static_cast<size_t>(m), 0.0);
  for (int i = 0; i < m; ++i)
    a.M[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1.0;
  return a;
}

Affine compose(const MlpLayer& layer, const Affine& in) {
  const size_t out = layer.w.size();
  const size_t mid = in.M.size();
  const size_t m = in.M.empty() ? 0 : in.M[0].size();
  Affine r;
  r.M.assign(out, std::vector<double>(m, 0.0));
  r.q.assign(out, 0.0);
  for (size_t o = 0; o < out; ++o) {
    double q = layer.b[o];
    for (size_t j = 0; j < mid; ++j) {
      double w = layer.w[o][j];
      if (w == 0.0) continue;
      q += w * in.q[j];
      for (size_t i = 0; i < m; ++i) r.M[o][i] += w * in.M[j][i];
    }
    r.q[o] = q;
  }
  return r;
}

struct Solver {
  const OracleQuery& query;
  const ReluMlp& model;
  double tol;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  // Interval bounds per layer's pre-activations, from a forward pass over
  // the variable box.
  std::vector<std::vector<double>> pre_lb, pre_ub;
  std::vector<LinearConstraint> constraints;  // width m, over the input
  std::optional<Point> found;

  void check_deadline() const {
    if (deadline && std::chrono::steady_clock::now() > *deadline)
      throw TimeoutSignal{};
  }

  std::optional<Point> solve_lp() {
    check_deadline();
    std::vector<double> lo, hi;
    detail::lp_variable_box(query, lo, hi);
    auto cs = constraints;
    if (query.budget.norm.p == NormP::L1)
      detail::append_l1_ball(query, cs, lo, hi);
    auto lp = lp_feasible(cs, lo, hi, tol);
    if (!lp.feasible) return std::nullopt;
    const int m = query.problem.num_features();
    Point x(lp.point.begin(), lp.point.begin() + m);
    detail::clip_to_ball(x, query.problem, query.budget);
    return x;
  }

  // Tries every rival class against the end-to-end affine scores.
  bool try_flip(const Affine& scores) {
    const int c = query.problem.label();
    for (int k = 0; k < model.num_classes(); ++k) {
      if (k == c) continue;
      LinearConstraint flip;
      flip.coeffs.resize(scores.M[0].size());
      for (size_t i = 0; i < flip.coeffs.size(); ++i)
        flip.coeffs[i] = scores.M[static_cast<size_t>(k)][i] -
                         scores.M[static_cast<size_t>(c)][i];
      double margin = scores.q[static_cast<size_t>(c)] -
                      scores.q[static_cast<size_t>(k)];
      // k < c wins ties, k > c needs a strict lead. The LP only guarantees
      // feasibility up to tol, so when the returned point does not actually
      // misclassify, retry with a widened lead before giving up.
      for (double slack : {0.0, tol, 1e-6}) {
        flip.rhs = margin + (k > c ? tol : 0.0) + slack;
        constraints.push_back(flip);
        auto x = solve_lp();
        constraints.pop_back();
        if (!x) break;  // a larger lead can only be harder to reach
        if (query.problem.model->predict(*x) != c) {
          found = std::move(*x);
          return true;
        }
      }
    }
    return false;
  }

  bool dfs_layer(size_t layer_idx, const Affine& input) {
    const auto& layers = model.layers();
    if (layer_idx + 1 == layers.size()) {
      return try_flip(compose(layers[layer_idx], input));
    }
    Affine pre = compose(layers[layer_idx], input);
    return dfs_unit(layer_idx, pre, input, 0);
  }

  bool dfs_unit(size_t layer_idx, Affine& pre, const Affine& /*input*/,
                size_t unit) {
    const size_t width = pre.M.size();
    if (unit == width) {
      // all signs chosen; inactive rows have been zeroed in place
      return dfs_layer(layer_idx + 1, pre);
    }
    double lb = pre_lb[layer_idx][unit], ub = pre_ub[layer_idx][unit];
    if (lb >= 0.0) return dfs_unit(layer_idx, pre, pre, unit + 1);
    if (ub <= 0.0) {
      auto row = std::move(pre.M[unit]);
      double q = pre.q[unit];
      pre.M[unit] = std::vector<double>(row.size(), 0.0);
      pre.q[unit] = 0.0;
      bool hit = dfs_unit(layer_idx, pre, pre, unit + 1);
      pre.M[unit] = std::move(row);
      pre.q[unit] = q;
      return hit;
    }

    // undecided: branch, with an LP feasibility prune on each side
    LinearConstraint active;  // pre >= 0
    active.coeffs = pre.M[unit];
    active.rhs = -pre.q[unit];
    constraints.push_back(active);
    if (solve_lp()) {
      if (dfs_unit(layer_idx, pre, pre, unit + 1)) {
        constraints.pop_back();
        return true;
      }
    }
    constraints.pop_back();

    LinearConstraint inactive;  // pre <= 0
    inactive.coeffs.resize(pre.M[unit].size());
    for (size_t i = 0; i < inactive.coeffs.size(); ++i)
      inactive.coeffs[i] = -pre.M[unit][i];
    inactive.rhs = pre.q[unit];
    constraints.push_back(inactive);
    bool hit = false;
    if (solve_lp()) {
      auto row = std::move(pre.M[unit]);
      double q = pre.q[unit];
      pre.M[unit] = std::vector<double>(row.size(), 0.0);
      pre.q[unit] = 0.0;
      hit = dfs_unit(layer_idx, pre, pre, unit + 1);
      pre.M[unit] = std::move(row);
      pre.q[unit] = q;
    }
    constraints.pop_back();
    return hit;
  }
};

}  // namespace

OracleAnswer relu_oracle(const OracleQuery& query, double lp_tolerance,
                         int pattern_cap,
                         std::optional<double> deadline_seconds) {
  const auto* model =
      dynamic_cast<const ReluMlp*>(query.problem.model.get());
  if (!model) throw UnsupportedError("relu_oracle needs a ReLU network");

  const auto p = query.budget.norm.p;
  bool real_free = true;
  const int m = query.problem.num_features();
  for (int i = 0; i < m; ++i)
    if (!query.fixed.contains(i) &&
        !std::holds_alternative<RealInterval>(
            query.problem.space().features[static_cast<size_t>(i)]))
      real_free = false;
  if (p == NormP::L0 || p == NormP::L2 || !real_free) {
    if (auto ans = detail::try_enumerate_finite(query)) return *ans;
    throw UnsupportedError(
        "ReLU networks support p in {1, inf} over real features (or fully "
        "finite domains)");
  }

  Solver s{query, *model, std::max(lp_tolerance, 1e-12), std::nullopt,
           {},    {},     {},                            std::nullopt};
  if (deadline_seconds)
    s.deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(*deadline_seconds));

  // Interval bound propagation over the variable box fixes the signed units
  // and bounds the branching work.
  std::vector<double> lo, hi;
  detail::lp_variable_box(query, lo, hi);
  std::vector<double> in_lb = lo, in_ub = hi;
  int undecided = 0;
  const auto& layers = model->layers();
  for (size_t l = 0; l + 1 < layers.size(); ++l) {
    const auto& layer = layers[l];
    std::vector<double> lb(layer.w.size()), ub(layer.w.size());
    for (size_t o = 0; o < layer.w.size(); ++o) {
      double a = layer.b[o], b = layer.b[o];
      for (size_t j = 0; j < layer.w[o].size(); ++j) {
        double w = layer.w[o][j];
        if (w >= 0) {
          a += w * in_lb[j];
          b += w * in_ub[j];
        } else {
          a += w * in_ub[j];
          b += w * in_lb[j];
        }
      }
      lb[o] = a;
      ub[o] = b;
      if (a < 0.0 && b > 0.0) ++undecided;
    }
    s.pre_lb.push_back(lb);
    s.pre_ub.push_back(ub);
    in_lb.resize(lb.size());
    in_ub.resize(ub.size());
    for (size_t o = 0; o < lb.size(); ++o) {
      in_lb[o] = std::max(lb[o], 0.0);
      in_ub[o] = std::max(ub[o], 0.0);
    }
  }
  if (undecided > pattern_cap)
    throw UnsupportedError("ReLU branch-and-bound: undecided unit count " +
                           std::to_string(undecided) + " exceeds the cap of " +
                           std::to_string(pattern_cap));

  try {
    if (s.dfs_layer(0, identity(m))) {
      OracleAnswer ans;
      ans.status = AnswerStatus::AdversarialFound;
      ans.witness = std::move(*s.found);
      return ans;
    }
  } catch (const TimeoutSignal&) {
    return {AnswerStatus::Timeout, std::nullopt, 0.0};
  }
  return {AnswerStatus::Robust, std::nullopt, 0.0};
}

}  // namespace drxp
