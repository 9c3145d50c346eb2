#include "oracle_common.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "drxp/lp.hpp"
#include "drxp/models.hpp"

namespace drxp::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::pair<double, double> ordinal_bounds(const FeatureDomain& d) {
  if (const auto* r = std::get_if<RealInterval>(&d)) return {r->lo, r->hi};
  if (const auto* z = std::get_if<IntegerRange>(&d))
    return {static_cast<double>(z->lo), static_cast<double>(z->hi)};
  throw UnsupportedError("categorical coordinate has no ordinal bounds");
}

namespace {

// Candidate values of a finite domain.
std::vector<double> domain_values(const FeatureDomain& d) {
  std::vector<double> out;
  if (const auto* z = std::get_if<IntegerRange>(&d)) {
    for (long long x = z->lo; x <= z->hi; ++x)
      out.push_back(static_cast<double>(x));
  } else if (const auto* c = std::get_if<Categorical>(&d)) {
    for (size_t k = 0; k < c->labels.size(); ++k)
      out.push_back(static_cast<double>(k));
  } else {
    throw UnsupportedError("real domain is not enumerable");
  }
  return out;
}

BallMin minimize_p0(const std::vector<double>& d,
                    const ExplanationProblem& problem,
                    const DistanceBudget& budget, const FeatureSet& fixed,
                    double target_gain) {
  const int m = problem.num_features();
  const Point& v = problem.v();
  int changes = static_cast<int>(std::floor(budget.epsilon + 1e-9));

  struct Move {
    int feature;
    double gain;      // d_i * (x - v_i), < 0
    double value;     // target coordinate value; meaningless when unbounded
    bool unbounded;   // gain can be made arbitrarily negative
  };
  std::vector<Move> moves;
  for (int i = 0; i < m; ++i) {
    if (fixed.contains(i) || d[static_cast<size_t>(i)] == 0.0) continue;
    double di = d[static_cast<size_t>(i)];
    const auto& dom = problem.space().features[static_cast<size_t>(i)];
    if (const auto* r = std::get_if<RealInterval>(&dom)) {
      double best_val = di > 0 ? r->lo : r->hi;
      if (!std::isfinite(best_val)) {
        moves.push_back({i, -kInf, 0.0, true});
      } else {
        double gain = di * (best_val - v[static_cast<size_t>(i)]);
        if (gain < 0) moves.push_back({i, gain, best_val, false});
      }
    } else {
      double best_gain = 0, best_val = v[static_cast<size_t>(i)];
      for (double cand : domain_values(dom)) {
        double gain = di * (cand - v[static_cast<size_t>(i)]);
        if (gain < best_gain) {
          best_gain = gain;
          best_val = cand;
        }
      }
      if (best_gain < 0) moves.push_back({i, best_gain, best_val, false});
    }
  }
  std::sort(moves.begin(), moves.end(),
            [](const Move& a, const Move& b) { return a.gain < b.gain; });

  BallMin res;
  res.point = v;
  double total = 0;
  int used = 0;
  for (const auto& mv : moves) {
    if (used >= changes) break;
    if (mv.unbounded) {
      // drive the coordinate far enough to reach the target on its own
      double need = std::min(target_gain - total, -1.0) - 1.0;
      double value = v[static_cast<size_t>(mv.feature)] +
                     need / d[static_cast<size_t>(mv.feature)];
      res.point[static_cast<size_t>(mv.feature)] = value;
      total += need;
    } else {
      res.point[static_cast<size_t>(mv.feature)] = mv.value;
      total += mv.gain;
    }
    ++used;
  }
  res.value = total;
  res.target_met = total <= target_gain;
  return res;
}

}  // namespace

BallMin minimize_gain_over_ball(const std::vector<double>& d,
                                const ExplanationProblem& problem,
                                const DistanceBudget& budget,
                                const FeatureSet& fixed, double target_gain) {
  const int m = problem.num_features();
  if (static_cast<int>(d.size()) != m)
    throw DimensionError("gradient length != m");
  if (budget.norm.p == NormP::L0)
    return minimize_p0(d, problem, budget, fixed, target_gain);

  const Point& v = problem.v();
  std::vector<int> free;
  for (int i = 0; i < m; ++i) {
    if (fixed.contains(i)) continue;
    if (std::holds_alternative<Categorical>(
            problem.space().features[static_cast<size_t>(i)]))
      throw UnsupportedError(
          "closed-form ball minimization needs ordinal free features");
    free.push_back(i);
  }

  BallMin res;
  res.point = v;
  double eps = budget.epsilon;

  if (budget.norm.p == NormP::LInf) {
    for (int i : free) {
      double di = d[static_cast<size_t>(i)];
      if (di == 0) continue;
      auto [lo, hi] = ordinal_bounds(problem.space().features[static_cast<size_t>(i)]);
      double x = di > 0 ? std::max(v[static_cast<size_t>(i)] - eps, lo)
                        : std::min(v[static_cast<size_t>(i)] + eps, hi);
      res.point[static_cast<size_t>(i)] = x;
      res.value += di * (x - v[static_cast<size_t>(i)]);
    }
  } else if (budget.norm.p == NormP::L1) {
    std::vector<int> order = free;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(d[static_cast<size_t>(a)]) >
             std::abs(d[static_cast<size_t>(b)]);
    });
    double remaining = eps;
    for (int i : order) {
      if (remaining <= 0) break;
      double di = d[static_cast<size_t>(i)];
      if (di == 0) continue;
      auto [lo, hi] = ordinal_bounds(problem.space().features[static_cast<size_t>(i)]);
      double room = di > 0 ? v[static_cast<size_t>(i)] - lo
                           : hi - v[static_cast<size_t>(i)];
      double move = std::min(remaining, room);
      if (move <= 0) continue;
      double x = v[static_cast<size_t>(i)] + (di > 0 ? -move : move);
      res.point[static_cast<size_t>(i)] = x;
      res.value += di * (x - v[static_cast<size_t>(i)]);
      remaining -= move;
    }
  } else {  // L2: scaled-gradient step with projection/re-optimization
    std::vector<double> delta(static_cast<size_t>(m), 0.0);
    std::vector<bool> saturated(static_cast<size_t>(m), false);
    for (int iter = 0; iter < 20; ++iter) {
      double norm2 = 0;
      for (int i : free)
        if (!saturated[static_cast<size_t>(i)])
          norm2 += d[static_cast<size_t>(i)] * d[static_cast<size_t>(i)];
      if (norm2 <= 0) break;
      double spent2 = 0;
      for (int i : free)
        if (saturated[static_cast<size_t>(i)])
          spent2 += delta[static_cast<size_t>(i)] * delta[static_cast<size_t>(i)];
      double rem = std::sqrt(std::max(0.0, eps * eps - spent2));
      double norm = std::sqrt(norm2);
      bool clipped = false;
      for (int i : free) {
        if (saturated[static_cast<size_t>(i)]) continue;
        double step = -rem * d[static_cast<size_t>(i)] / norm;
        auto [lo, hi] =
            ordinal_bounds(problem.space().features[static_cast<size_t>(i)]);
        double x = v[static_cast<size_t>(i)] + step;
        if (x < lo) {
          delta[static_cast<size_t>(i)] = lo - v[static_cast<size_t>(i)];
          saturated[static_cast<size_t>(i)] = true;
          clipped = true;
        } else if (x > hi) {
          delta[static_cast<size_t>(i)] = hi - v[static_cast<size_t>(i)];
          saturated[static_cast<size_t>(i)] = true;
          clipped = true;
        } else {
          delta[static_cast<size_t>(i)] = step;
        }
      }
      if (!clipped) break;
    }
    for (int i : free) {
      res.point[static_cast<size_t>(i)] =
          v[static_cast<size_t>(i)] + delta[static_cast<size_t>(i)];
      res.value += d[static_cast<size_t>(i)] * delta[static_cast<size_t>(i)];
    }
  }

  clip_to_ball(res.point, problem, budget);
  res.target_met = res.value <= target_gain;
  return res;
}

bool all_free_domains_finite(const OracleQuery& query) {
  const int m = query.problem.num_features();
  for (int i = 0; i < m; ++i)
    if (!query.fixed.contains(i) &&
        !domain_is_finite(query.problem.space().features[static_cast<size_t>(i)]))
      return false;
  return true;
}

std::optional<OracleAnswer> try_enumerate_finite(const OracleQuery& query) {
  if (!all_free_domains_finite(query)) return std::nullopt;
  const auto& problem = query.problem;
  const int m = problem.num_features();
  std::vector<int> free;
  std::vector<std::vector<double>> values;
  for (int i = 0; i < m; ++i) {
    if (query.fixed.contains(i)) continue;
    free.push_back(i);
    values.push_back(
        domain_values(problem.space().features[static_cast<size_t>(i)]));
  }
  Point x = problem.v();
  std::optional<Point> witness;
  std::function<bool(size_t)> scan = [&](size_t depth) -> bool {
    if (depth == free.size()) {
      if (is_adversarial(x, problem, query.budget)) {
        witness = x;
        return true;
      }
      return false;
    }
    int i = free[depth];
    for (double val : values[depth]) {
      x[static_cast<size_t>(i)] = val;
      // cheap prefix prune for additive norms
      if (scan(depth + 1)) return true;
    }
    x[static_cast<size_t>(i)] = problem.v()[static_cast<size_t>(i)];
    return false;
  };
  scan(0);
  OracleAnswer ans;
  if (witness) {
    ans.status = AnswerStatus::AdversarialFound;
    ans.witness = std::move(*witness);
  } else {
    ans.status = AnswerStatus::Robust;
  }
  return ans;
}

void clip_to_ball(Point& x, const ExplanationProblem& problem,
                  const DistanceBudget& budget) {
  if (budget.norm.p == NormP::L0) return;
  double dist = distance(x, problem.v(), budget.norm, &problem.space());
  if (dist <= budget.epsilon || dist == 0) return;
  double s = (budget.epsilon / dist) * (1.0 - 1e-12);
  for (size_t i = 0; i < x.size(); ++i) {
    if (std::holds_alternative<Categorical>(problem.space().features[i]))
      continue;
    x[i] = problem.v()[i] + s * (x[i] - problem.v()[i]);
  }
}

void lp_variable_box(const OracleQuery& query, std::vector<double>& lo,
                     std::vector<double>& hi) {
  const int m = query.problem.num_features();
  const Point& v = query.problem.v();
  lo.assign(static_cast<size_t>(m), 0);
  hi.assign(static_cast<size_t>(m), 0);
  for (int i = 0; i < m; ++i) {
    if (query.fixed.contains(i)) {
      lo[static_cast<size_t>(i)] = hi[static_cast<size_t>(i)] =
          v[static_cast<size_t>(i)];
      continue;
    }
    auto [dlo, dhi] =
        ordinal_bounds(query.problem.space().features[static_cast<size_t>(i)]);
    lo[static_cast<size_t>(i)] =
        std::max(dlo, v[static_cast<size_t>(i)] - query.budget.epsilon);
    hi[static_cast<size_t>(i)] =
        std::min(dhi, v[static_cast<size_t>(i)] + query.budget.epsilon);
  }
}

int append_l1_ball(const OracleQuery& query,
                   std::vector<LinearConstraint>& constraints,
                   std::vector<double>& lo, std::vector<double>& hi) {
  const int m = query.problem.num_features();
  const Point& v = query.problem.v();
  const int aux0 = static_cast<int>(lo.size());
  std::vector<int> aux_of(static_cast<size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    if (query.fixed.contains(i)) continue;
    aux_of[static_cast<size_t>(i)] = static_cast<int>(lo.size());
    lo.push_back(0.0);
    hi.push_back(query.budget.epsilon);
  }
  const int width = static_cast<int>(lo.size());
  auto widen = [&](std::vector<double> c) {
    c.resize(static_cast<size_t>(width), 0.0);
    return c;
  };
  // widen pre-existing constraints to the new width
  for (auto& c : constraints) c.coeffs = widen(std::move(c.coeffs));
  LinearConstraint budget_row;
  budget_row.coeffs.assign(static_cast<size_t>(width), 0.0);
  budget_row.rhs = -query.budget.epsilon * (1.0 - 1e-12);
  for (int i = 0; i < m; ++i) {
    int a = aux_of[static_cast<size_t>(i)];
    if (a < 0) continue;
    // t_i - x_i >= -v_i  and  t_i + x_i >= v_i
    LinearConstraint c1, c2;
    c1.coeffs.assign(static_cast<size_t>(width), 0.0);
    c2.coeffs.assign(static_cast<size_t>(width), 0.0);
    c1.coeffs[static_cast<size_t>(a)] = 1.0;
    c1.coeffs[static_cast<size_t>(i)] = -1.0;
    c1.rhs = -v[static_cast<size_t>(i)];
    c2.coeffs[static_cast<size_t>(a)] = 1.0;
    c2.coeffs[static_cast<size_t>(i)] = 1.0;
    c2.rhs = v[static_cast<size_t>(i)];
    constraints.push_back(std::move(c1));
    constraints.push_back(std::move(c2));
    budget_row.coeffs[static_cast<size_t>(a)] = -1.0;
  }
  constraints.push_back(std::move(budget_row));
  return aux0;
}

}  // namespace drxp::detail
