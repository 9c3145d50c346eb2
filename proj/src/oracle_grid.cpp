#include <algorithm>
#include <cmath>
#include <vector>

#include "drxp/models.hpp"
#include "drxp/oracles.hpp"
#include "oracle_common.hpp"

namespace drxp {

namespace {

std::vector<double> coord_candidates(const OracleQuery& query, int i,
                                     int resolution) {
  const auto& problem = query.problem;
  const double v = problem.v()[static_cast<size_t>(i)];
  if (query.fixed.contains(i)) return {v};

  const auto& dom = problem.space().features[static_cast<size_t>(i)];
  const auto p = query.budget.norm.p;
  const double eps = query.budget.epsilon;
  std::vector<double> out;

  if (const auto* cat = std::get_if<Categorical>(&dom)) {
    for (size_t k = 0; k < cat->labels.size(); ++k)
      out.push_back(static_cast<double>(k));
    return out;
  }
  if (const auto* ir = std::get_if<IntegerRange>(&dom)) {
    double lo = ir->lo, hi = ir->hi;
    if (p != NormP::L0) {
      lo = std::max(lo, std::ceil(v - eps));
      hi = std::min(hi, std::floor(v + eps));
    }
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw UnsupportedError("grid falsifier needs a bounded search window");
    for (double x = lo; x <= hi; x += 1.0) out.push_back(x);
    return out;
  }
  const auto& ri = std::get<RealInterval>(dom);
  double lo = ri.lo, hi = ri.hi;
  if (p != NormP::L0) {
    lo = std::max(lo, v - eps);
    hi = std::min(hi, v + eps);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw UnsupportedError("grid falsifier needs a bounded search window");
  if (hi <= lo) return {lo};
  for (int k = 0; k < resolution; ++k)
    out.push_back(lo + (hi - lo) * k / (resolution - 1));
  out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

OracleAnswer grid_falsifier(const OracleQuery& query, int resolution) {
  if (resolution < 2) throw Error("grid resolution must be >= 2");
  const auto& problem = query.problem;
  const int m = problem.num_features();

  std::vector<std::vector<double>> grid;
  grid.reserve(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i)
    grid.push_back(coord_candidates(query, i, resolution));

  Point x = problem.v();
  std::optional<Point> hit;
  // odometer scan of the lattice
  std::vector<size_t> idx(static_cast<size_t>(m), 0);
  for (;;) {
    for (int i = 0; i < m; ++i)
      x[static_cast<size_t>(i)] =
          grid[static_cast<size_t>(i)][idx[static_cast<size_t>(i)]];
    if (is_adversarial(x, problem, query.budget)) {
      hit = x;
      break;
    }
    int i = m - 1;
    while (i >= 0) {
      if (++idx[static_cast<size_t>(i)] <
          grid[static_cast<size_t>(i)].size())
        break;
      idx[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  if (!hit) return {AnswerStatus::Robust, std::nullopt, 0.0};
  OracleAnswer ans;
  ans.status = AnswerStatus::AdversarialFound;
  ans.witness = std::move(*hit);
  return ans;
}

GridFalsifier::GridFalsifier(int resolution) : resolution_(resolution) {
  if (resolution < 2) throw Error("grid resolution must be >= 2");
}

OracleAnswer GridFalsifier::find(const OracleQuery& query) {
  return grid_falsifier(query, resolution_);
}

}  // namespace drxp
