#include "drxp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drxp/core.hpp"

namespace drxp {

namespace {

constexpr double kPivotFloor = 1e-12;

// Column layout of the working problem: one or two nonnegative variables per
// original variable (shifted, mirrored or split), then one slack/surplus per
// row, then one artificial per row.
struct VarMap {
  // x_j = sign * u_k + offset (+ second split column when split_col >= 0)
  int col = -1;
  int split_col = -1;  // free variable: x = u[col] - u[split_col]
  double sign = 1.0;
  double offset = 0.0;
};

}  // namespace

LpResult lp_feasible(const std::vector<LinearConstraint>& constraints,
                     const std::vector<double>& lo,
                     const std::vector<double>& hi, double tolerance) {
  const int n = static_cast<int>(lo.size());
  if (hi.size() != lo.size()) throw DimensionError("lp_feasible: lo/hi sizes");
  for (const auto& c : constraints) {
    if (static_cast<int>(c.coeffs.size()) != n)
      throw DimensionError("lp_feasible: constraint width != n");
    for (double a : c.coeffs)
      if (!std::isfinite(a)) throw Error("lp_feasible: non-finite coefficient");
  }
  for (int j = 0; j < n; ++j)
    if (lo[static_cast<size_t>(j)] > hi[static_cast<size_t>(j)])
      return {false, {}};

  std::vector<VarMap> vars(static_cast<size_t>(n));
  int ncols = 0;
  // Rows in (coeffs over u-columns) >= rhs form; upper bounds become rows.
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> rhs;

  for (int j = 0; j < n; ++j) {
    auto& vm = vars[static_cast<size_t>(j)];
    double l = lo[static_cast<size_t>(j)], h = hi[static_cast<size_t>(j)];
    if (std::isfinite(l)) {
      vm.col = ncols++;
      vm.sign = 1.0;
      vm.offset = l;
      if (std::isfinite(h)) {
        rows.push_back({{vm.col, -1.0}});
        rhs.push_back(-(h - l));  // u <= h-l
      }
    } else if (std::isfinite(h)) {
      vm.col = ncols++;
      vm.sign = -1.0;
      vm.offset = h;  // x = h - u
    } else {
      vm.col = ncols++;
      vm.split_col = ncols++;
    }
  }

  for (const auto& c : constraints) {
    std::vector<std::pair<int, double>> row;
    double b = c.rhs;
    for (int j = 0; j < n; ++j) {
      double a = c.coeffs[static_cast<size_t>(j)];
      if (a == 0.0) continue;
      const auto& vm = vars[static_cast<size_t>(j)];
      row.emplace_back(vm.col, a * vm.sign);
      if (vm.split_col >= 0) row.emplace_back(vm.split_col, -a);
      b -= a * vm.offset;
    }
    rows.push_back(std::move(row));
    rhs.push_back(b);
  }

  const int nrows = static_cast<int>(rows.size());
  // Tableau columns: u-columns, surplus per row, artificial per row, rhs.
  const int surplus0 = ncols;
  const int art0 = ncols + nrows;
  const int width = ncols + 2 * nrows + 1;
  std::vector<std::vector<double>> t(
      static_cast<size_t>(nrows), std::vector<double>(static_cast<size_t>(width), 0.0));
  std::vector<int> basis(static_cast<size_t>(nrows));

  double scale = 1.0;
  for (int i = 0; i < nrows; ++i) {
    double b = rhs[static_cast<size_t>(i)];
    double s = (b < 0) ? -1.0 : 1.0;
    for (auto [col, a] : rows[static_cast<size_t>(i)])
      t[static_cast<size_t>(i)][static_cast<size_t>(col)] += s * a;
    t[static_cast<size_t>(i)][static_cast<size_t>(surplus0 + i)] = -s;
    t[static_cast<size_t>(i)][static_cast<size_t>(art0 + i)] = 1.0;
    t[static_cast<size_t>(i)][static_cast<size_t>(width - 1)] = s * b;
    basis[static_cast<size_t>(i)] = art0 + i;
    scale = std::max(scale, std::abs(b));
  }

  // Phase-one objective: minimize the sum of artificials. Reduced cost of
  // column j is -sum of column entries over rows with an artificial basis.
  auto reduced_cost = [&](int col) {
    double d = 0;
    for (int i = 0; i < nrows; ++i)
      if (basis[static_cast<size_t>(i)] >= art0)
        d -= t[static_cast<size_t>(i)][static_cast<size_t>(col)];
    return d;
  };

  const int max_iters = 2000 + 200 * (ncols + nrows);
  for (int iter = 0;; ++iter) {
    if (iter > max_iters)
      throw Error("lp_feasible: iteration limit (numerical instability?)");
    // Bland's rule: smallest improving column.
    int enter = -1;
    for (int col = 0; col < art0; ++col) {
      if (reduced_cost(col) < -1e-10) {
        enter = col;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nrows; ++i) {
      double a = t[static_cast<size_t>(i)][static_cast<size_t>(enter)];
      if (a <= kPivotFloor) continue;
      double ratio = t[static_cast<size_t>(i)][static_cast<size_t>(width - 1)] / a;
      if (ratio < best_ratio - 1e-12 ||
          (std::abs(ratio - best_ratio) <= 1e-12 && leave >= 0 &&
           basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) break;  // unbounded improving direction: w can reach 0
    double piv = t[static_cast<size_t>(leave)][static_cast<size_t>(enter)];
    if (std::abs(piv) < kPivotFloor)
      throw Error("lp_feasible: pivot magnitude below 1e-12");
    auto& prow = t[static_cast<size_t>(leave)];
    for (double& x : prow) x /= piv;
    for (int i = 0; i < nrows; ++i) {
      if (i == leave) continue;
      double f = t[static_cast<size_t>(i)][static_cast<size_t>(enter)];
      if (f == 0.0) continue;
      auto& row = t[static_cast<size_t>(i)];
      for (int cidx = 0; cidx < width; ++cidx)
        row[static_cast<size_t>(cidx)] -= f * prow[static_cast<size_t>(cidx)];
    }
    basis[static_cast<size_t>(leave)] = enter;
  }

  double infeasibility = 0;
  for (int i = 0; i < nrows; ++i)
    if (basis[static_cast<size_t>(i)] >= art0)
      infeasibility += t[static_cast<size_t>(i)][static_cast<size_t>(width - 1)];
  double feas_tol = std::max(tolerance, 1e-9) * (1.0 + scale);
  if (infeasibility > feas_tol) return {false, {}};

  std::vector<double> u(static_cast<size_t>(ncols), 0.0);
  for (int i = 0; i < nrows; ++i)
    if (basis[static_cast<size_t>(i)] < ncols)
      u[static_cast<size_t>(basis[static_cast<size_t>(i)])] =
          t[static_cast<size_t>(i)][static_cast<size_t>(width - 1)];

  LpResult res;
  res.feasible = true;
  res.point.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto& vm = vars[static_cast<size_t>(j)];
    double x = vm.offset + vm.sign * u[static_cast<size_t>(vm.col)];
    if (vm.split_col >= 0) x -= u[static_cast<size_t>(vm.split_col)];
    // snap into the box against roundoff
    x = std::min(std::max(x, lo[static_cast<size_t>(j)]),
                 hi[static_cast<size_t>(j)]);
    res.point[static_cast<size_t>(j)] = x;
  }
  return res;
}

}  // namespace drxp
