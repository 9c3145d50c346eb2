#include <algorithm>
#include <cmath>
#include <limits>

#include "drxp/models.hpp"
#include "drxp/oracles.hpp"
#include "oracle_common.hpp"

namespace drxp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Axis-aligned cell of a root-to-leaf path: ordinal coordinates carry an
// interval (gt, le] (strict below, inclusive above), categorical ones an
// allowed label set.
struct Cell {
  std::vector<double> gt;               // strict lower bounds
  std::vector<double> le;               // inclusive upper bounds
  std::vector<std::vector<int>> cats;   // allowed labels, empty = unrestricted
};

struct LeafHit {
  double dist;
  Point point;
};

// Nearest in-cell value for one free coordinate, together with its
// displacement, or nullopt when the cell slice is empty.
std::optional<std::pair<double, double>> project_coord(
    const FeatureDomain& dom, double v, double gt, double le,
    const std::vector<int>& cats, double tau) {
  if (const auto* cat = std::get_if<Categorical>(&dom)) {
    std::vector<int> allowed;
    if (cats.empty()) {
      for (size_t k = 0; k < cat->labels.size(); ++k)
        allowed.push_back(static_cast<int>(k));
    } else {
      allowed = cats;
    }
    if (allowed.empty()) return std::nullopt;
    int vi = static_cast<int>(v);
    if (std::find(allowed.begin(), allowed.end(), vi) != allowed.end())
      return std::make_pair(v, 0.0);
    return std::make_pair(static_cast<double>(allowed.front()), 1.0);
  }
  auto [dlo, dhi] = detail::ordinal_bounds(dom);
  bool integer = std::holds_alternative<IntegerRange>(dom);
  double lo, hi;
  if (integer) {
    lo = std::max(dlo, std::isfinite(gt) ? std::floor(gt) + 1.0 : -kInf);
    hi = std::min(dhi, std::isfinite(le) ? std::floor(le) : kInf);
  } else {
    lo = std::max(dlo, std::isfinite(gt) ? gt + tau : -kInf);
    hi = std::min(dhi, le);
  }
  if (lo > hi) return std::nullopt;
  double x = std::min(std::max(v, lo), hi);
  if (integer) x = std::round(x);
  return std::make_pair(x, std::abs(x - v));
}

void collect_leaves(const TreeNode& node, const FeatureSpace& space,
                    Cell& cell, int avoid_class, const OracleQuery& query,
                    double tau, std::optional<LeafHit>& best) {
  if (node.is_leaf()) {
    if (node.leaf_class == avoid_class) return;
    const Point& v = query.problem.v();
    Point proj = v;
    std::vector<double> disp(v.size(), 0.0);
    for (size_t i = 0; i < v.size(); ++i) {
      bool is_cat = std::holds_alternative<Categorical>(space.features[i]);
      if (query.fixed.contains(static_cast<int>(i))) {
        // pinned: the cell must already contain v_i
        if (is_cat) {
          const auto& allowed = cell.cats[i];
          if (!allowed.empty() &&
              std::find(allowed.begin(), allowed.end(),
                        static_cast<int>(v[i])) == allowed.end())
            return;
        } else {
          if (!(v[i] > cell.gt[i] && v[i] <= cell.le[i])) return;
        }
        continue;
      }
      auto p = project_coord(space.features[i], v[i], cell.gt[i], cell.le[i],
                             cell.cats[i], tau);
      if (!p) return;
      proj[i] = p->first;
      disp[i] = is_cat ? (p->first != v[i] ? 1.0 : 0.0) : p->second;
    }
    double dist;
    switch (query.budget.norm.p) {
      case NormP::L0: {
        dist = 0;
        for (size_t i = 0; i < disp.size(); ++i)
          if (proj[i] != v[i]) dist += 1;
        break;
      }
      case NormP::L1: {
        dist = 0;
        for (double d : disp) dist += d;
        break;
      }
      case NormP::L2: {
        dist = 0;
        for (double d : disp) dist += d * d;
        dist = std::sqrt(dist);
        break;
      }
      case NormP::LInf: {
        dist = 0;
        for (double d : disp) dist = std::max(dist, d);
        break;
      }
    }
    if (dist <= query.budget.epsilon && (!best || dist < best->dist))
      best = LeafHit{dist, std::move(proj)};
    return;
  }

  const size_t f = static_cast<size_t>(node.feature);
  if (std::holds_alternative<Categorical>(space.features[f])) {
    const auto& all_labels =
        std::get<Categorical>(space.features[f]).labels;
    std::vector<int> current = cell.cats[f];
    if (current.empty())
      for (size_t k = 0; k < all_labels.size(); ++k)
        current.push_back(static_cast<int>(k));
    std::vector<int> left_set, right_set;
    for (int lab : current) {
      bool in_left = std::find(node.left_labels.begin(),
                               node.left_labels.end(),
                               lab) != node.left_labels.end();
      (in_left ? left_set : right_set).push_back(lab);
    }
    auto saved = cell.cats[f];
    if (!left_set.empty()) {
      cell.cats[f] = left_set;
      collect_leaves(*node.left, space, cell, avoid_class, query, tau, best);
    }
    if (!right_set.empty()) {
      cell.cats[f] = right_set;
      collect_leaves(*node.right, space, cell, avoid_class, query, tau, best);
    }
    cell.cats[f] = saved;
  } else {
    double saved_le = cell.le[f], saved_gt = cell.gt[f];
    if (node.threshold > cell.gt[f]) {
      cell.le[f] = std::min(saved_le, node.threshold);
      collect_leaves(*node.left, space, cell, avoid_class, query, tau, best);
      cell.le[f] = saved_le;
    }
    if (node.threshold < cell.le[f]) {
      cell.gt[f] = std::max(saved_gt, node.threshold);
      collect_leaves(*node.right, space, cell, avoid_class, query, tau, best);
      cell.gt[f] = saved_gt;
    }
  }
}

}  // namespace

OracleAnswer tree_oracle(const OracleQuery& query, double lp_tolerance) {
  const auto* model =
      dynamic_cast<const DecisionTree*>(query.problem.model.get());
  if (!model) throw UnsupportedError("tree_oracle needs a decision tree");

  const int m = query.problem.num_features();
  Cell cell;
  cell.gt.assign(static_cast<size_t>(m), -kInf);
  cell.le.assign(static_cast<size_t>(m), kInf);
  cell.cats.assign(static_cast<size_t>(m), {});

  std::optional<LeafHit> best;
  double tau = std::max(lp_tolerance, 1e-12);
  collect_leaves(model->root(), query.problem.space(), cell,
                 query.problem.label(), query, tau, best);
  if (!best) return {AnswerStatus::Robust, std::nullopt, 0.0};
  OracleAnswer ans;
  ans.status = AnswerStatus::AdversarialFound;
  ans.witness = std::move(best->point);
  return ans;
}

}  // namespace drxp
