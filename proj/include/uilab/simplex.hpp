#pragma once

#include <vector>

#include "uilab/types.hpp"

namespace uilab {

// Dense linear program:
//   minimize    c'x
//   subject to  a_ub x <= b_ub
//               a_eq x == b_eq
//               x[j] >= 0 where nonneg[j], otherwise free
//
// Empty a_ub / a_eq blocks are allowed.
struct LpProblem {
  Vector c;
  Matrix a_ub;
  Vector b_ub;
  Matrix a_eq;
  Vector b_eq;
  std::vector<bool> nonneg;  // size c.size(); defaults to all-free if empty
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpSolution {
  Vector x;
  double objective = 0.0;
  LpStatus status = LpStatus::kOptimal;
  int iterations = 0;
};

// Two-phase tableau simplex: Dantzig pricing with a Bland fallback for
// anti-cycling. On iteration-limit the best feasible point reached is
// returned.
LpSolution solve_lp(const LpProblem& prob, int max_iterations = 50000);

}  // namespace uilab
