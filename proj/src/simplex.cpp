#include "uilab/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uilab {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

struct Tableau {
  Matrix t;                  // rows x (ncols + 1); last column is the rhs
  Eigen::RowVectorXd obj;    // reduced-cost row, size ncols + 1
  std::vector<Index> basis;  // basic column per row
  std::vector<bool> banned;  // columns excluded from entering (artificials in phase 2)
  int iterations = 0;

  Index rows() const { return t.rows(); }
  Index ncols() const { return t.cols() - 1; }

  void pivot(Index r, Index c) {
    t.row(r) /= t(r, c);
    for (Index i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = t(i, c);
      if (f != 0.0) t.row(i) -= f * t.row(r);
    }
    const double fo = obj[c];
    if (fo != 0.0) obj -= fo * t.row(r);
    basis[static_cast<std::size_t>(r)] = c;
  }

  // One simplex phase on the current objective row. Returns kOptimal or
  // kUnbounded / kIterationLimit.
  LpStatus run(int max_iterations) {
    const Index n = ncols();
    // Dantzig until the budget's half is spent, then Bland (terminates).
    const int dantzig_budget = max_iterations / 2;
    while (iterations < max_iterations) {
      Index enter = -1;
      if (iterations < dantzig_budget) {
        double best = -kCostTol;
        for (Index j = 0; j < n; ++j) {
          if (banned[static_cast<std::size_t>(j)]) continue;
          if (obj[j] < best) {
            best = obj[j];
            enter = j;
          }
        }
      } else {
        for (Index j = 0; j < n; ++j) {
          if (banned[static_cast<std::size_t>(j)]) continue;
          if (obj[j] < -kCostTol) {
            enter = j;
            break;
          }
        }
      }
      if (enter < 0) return LpStatus::kOptimal;

      Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < rows(); ++i) {
        const double a = t(i, enter);
        if (a > kPivotTol) {
          const double ratio = t(i, ncols()) / a;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 &&
               (leave < 0 || basis[static_cast<std::size_t>(i)] <
                                 basis[static_cast<std::size_t>(leave)]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      pivot(leave, enter);
      ++iterations;
    }
    return LpStatus::kIterationLimit;
  }
};

}  // namespace

LpSolution solve_lp(const LpProblem& prob, int max_iterations) {
  const Index nv = prob.c.size();
  if (nv == 0) throw std::invalid_argument("solve_lp: no variables");
  const Index p = prob.a_ub.rows();
  const Index q = prob.a_eq.rows();
  if ((p > 0 && prob.a_ub.cols() != nv) || (q > 0 && prob.a_eq.cols() != nv) ||
      prob.b_ub.size() != p || prob.b_eq.size() != q)
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  std::vector<bool> nonneg = prob.nonneg;
  if (nonneg.empty()) nonneg.assign(static_cast<std::size_t>(nv), false);
  if (nonneg.size() != static_cast<std::size_t>(nv))
    throw std::invalid_argument("solve_lp: nonneg flag size mismatch");

  // Column layout: structural (free vars split into +/- parts), slacks,
  // then artificials.
  std::vector<Index> pos_col(static_cast<std::size_t>(nv)), neg_col(static_cast<std::size_t>(nv), -1);
  Index nstruct = 0;
  for (Index j = 0; j < nv; ++j) {
    pos_col[static_cast<std::size_t>(j)] = nstruct++;
    if (!nonneg[static_cast<std::size_t>(j)]) neg_col[static_cast<std::size_t>(j)] = nstruct++;
  }
  const Index rows = p + q;
  const Index slack0 = nstruct;
  const Index art0 = nstruct + p;
  const Index max_cols = art0 + rows;

  Tableau tab;
  tab.t = Matrix::Zero(rows, max_cols + 1);
  tab.basis.assign(static_cast<std::size_t>(rows), -1);
  tab.banned.assign(static_cast<std::size_t>(max_cols), false);

  auto fill_structural = [&](Index r, const auto& coeffs, double rhs) {
    const double sgn = rhs < 0.0 ? -1.0 : 1.0;
    for (Index j = 0; j < nv; ++j) {
      const double a = sgn * coeffs(j);
      if (a == 0.0) continue;
      tab.t(r, pos_col[static_cast<std::size_t>(j)]) = a;
      if (neg_col[static_cast<std::size_t>(j)] >= 0)
        tab.t(r, neg_col[static_cast<std::size_t>(j)]) = -a;
    }
    tab.t(r, max_cols) = sgn * rhs;
    return sgn;
  };

  Index n_art = 0;
  for (Index i = 0; i < p; ++i) {
    const double sgn = fill_structural(i, prob.a_ub.row(i), prob.b_ub[i]);
    tab.t(i, slack0 + i) = sgn;  // slack coefficient after the row flip
    if (sgn > 0.0) {
      tab.basis[static_cast<std::size_t>(i)] = slack0 + i;
    } else {
      const Index a = art0 + n_art++;
      tab.t(i, a) = 1.0;
      tab.basis[static_cast<std::size_t>(i)] = a;
    }
  }
  for (Index i = 0; i < q; ++i) {
    const Index r = p + i;
    fill_structural(r, prob.a_eq.row(i), prob.b_eq[i]);
    const Index a = art0 + n_art++;
    tab.t(r, a) = 1.0;
    tab.basis[static_cast<std::size_t>(r)] = a;
  }
  const Index ncols = art0 + n_art;
  // shrink to the columns actually used, keeping the rhs as the last one
  if (ncols < max_cols) {
    tab.t.col(ncols) = tab.t.col(max_cols);
    tab.t.conservativeResize(rows, ncols + 1);
  }
  tab.banned.resize(static_cast<std::size_t>(ncols), false);

  LpSolution sol;

  // Phase 1: minimize the sum of artificials.
  if (n_art > 0) {
    tab.obj = Eigen::RowVectorXd::Zero(ncols + 1);
    for (Index a = art0; a < art0 + n_art; ++a) tab.obj[a] = 1.0;
    for (Index i = 0; i < rows; ++i)
      if (tab.basis[static_cast<std::size_t>(i)] >= art0) tab.obj -= tab.t.row(i);
    const LpStatus st = tab.run(max_iterations);
    const double infeas = -tab.obj[ncols];  // objective value = -rhs of obj row
    if (st == LpStatus::kIterationLimit) {
      sol.status = LpStatus::kIterationLimit;
    } else if (infeas > 1e-7) {
      sol.status = LpStatus::kInfeasible;
      sol.iterations = tab.iterations;
      sol.x = Vector::Zero(nv);
      return sol;
    }
    // Drive out any artificial still basic (at zero); ban them all from
    // phase 2.
    for (Index i = 0; i < rows; ++i) {
      if (tab.basis[static_cast<std::size_t>(i)] < art0) continue;
      Index c = -1;
      for (Index j = 0; j < art0; ++j) {
        if (std::abs(tab.t(i, j)) > kPivotTol) {
          c = j;
          break;
        }
      }
      if (c >= 0) tab.pivot(i, c);
      // else: redundant row; artificial stays basic at ~0, harmless
    }
    for (Index a = art0; a < art0 + n_art; ++a) tab.banned[static_cast<std::size_t>(a)] = true;
  }

  // Phase 2: original objective.
  tab.obj = Eigen::RowVectorXd::Zero(ncols + 1);
  for (Index j = 0; j < nv; ++j) {
    tab.obj[pos_col[static_cast<std::size_t>(j)]] = prob.c[j];
    if (neg_col[static_cast<std::size_t>(j)] >= 0)
      tab.obj[neg_col[static_cast<std::size_t>(j)]] = -prob.c[j];
  }
  for (Index i = 0; i < rows; ++i) {
    const Index b = tab.basis[static_cast<std::size_t>(i)];
    if (b >= 0 && tab.obj[b] != 0.0) tab.obj -= tab.obj[b] * tab.t.row(i);
  }
  const LpStatus st2 = tab.run(max_iterations);
  if (sol.status != LpStatus::kIterationLimit) sol.status = st2;

  sol.iterations = tab.iterations;
  Vector xs = Vector::Zero(ncols);
  for (Index i = 0; i < rows; ++i) {
    const Index b = tab.basis[static_cast<std::size_t>(i)];
    if (b >= 0) xs[b] = tab.t(i, ncols);
  }
  sol.x = Vector::Zero(nv);
  for (Index j = 0; j < nv; ++j) {
    double v = xs[pos_col[static_cast<std::size_t>(j)]];
    if (neg_col[static_cast<std::size_t>(j)] >= 0) v -= xs[neg_col[static_cast<std::size_t>(j)]];
    sol.x[j] = v;
  }
  sol.objective = prob.c.dot(sol.x);
  return sol;
}

}  // namespace uilab
