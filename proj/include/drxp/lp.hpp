#pragma once

// Dense phase-one simplex feasibility for the small systems produced by the
// built-in oracles.

#include <vector>

namespace drxp {

// coeffs . x >= rhs
struct LinearConstraint {
  std::vector<double> coeffs;
  double rhs = 0.0;
};

struct LpResult {
  bool feasible = false;
  std::vector<double> point;
};

// Decides feasibility of { coeffs.x >= rhs } with box bounds lo <= x <= hi
// (entries may be +/-inf). Strict inequalities must be pre-encoded by the
// caller as a.x >= b + tau. Returns a feasible point when one exists.
LpResult lp_feasible(const std::vector<LinearConstraint>& constraints,
                     const std::vector<double>& lo,
                     const std::vector<double>& hi, double tolerance);

}  // namespace drxp
