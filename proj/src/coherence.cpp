#include "uilab/coherence.hpp"

#include <cmath>
#include <stdexcept>

#include "uilab/parallel.hpp"
#include "uilab/rng.hpp"
#include "uilab/simplex.hpp"

namespace uilab {

namespace {

void require_unit_columns(const Matrix& A) {
  for (Index j = 0; j < A.cols(); ++j)
    if (std::abs(A.col(j).norm() - 1.0) > 1e-8)
      throw std::invalid_argument("coherence: columns must be unit-norm within 1e-8");
}

}  // namespace

double mutual_coherence(const Matrix& A) {
  require_unit_columns(A);
  const Matrix gram = A.transpose() * A;
  double mu = 0.0;
  for (Index i = 0; i < gram.rows(); ++i)
    for (Index j = 0; j < gram.cols(); ++j)
      if (i != j) mu = std::max(mu, std::abs(gram(i, j)));
  return mu;
}

ColumnMinimax column_minimax_lp(const Matrix& A, Index i) {
  require_unit_columns(A);
  const Index m = A.rows(), n = A.cols();
  if (i < 0 || i >= n) throw std::invalid_argument("column_minimax_lp: bad index");

  // Variables (w_1..w_m, t): minimize t with w'A_j - t <= 0 and
  // -w'A_j - t <= 0 for j != i, plus w'A_i = 1.
  LpProblem lp;
  lp.c = Vector::Zero(m + 1);
  lp.c[m] = 1.0;
  lp.nonneg.assign(static_cast<std::size_t>(m + 1), false);
  lp.nonneg[static_cast<std::size_t>(m)] = true;

  lp.a_ub = Matrix::Zero(2 * (n - 1), m + 1);
  lp.b_ub = Vector::Zero(2 * (n - 1));
  Index r = 0;
  for (Index j = 0; j < n; ++j) {
    if (j == i) continue;
    lp.a_ub.block(r, 0, 1, m) = A.col(j).transpose();
    lp.a_ub(r, m) = -1.0;
    lp.a_ub.block(r + 1, 0, 1, m) = -A.col(j).transpose();
    lp.a_ub(r + 1, m) = -1.0;
    r += 2;
  }
  lp.a_eq = Matrix::Zero(1, m + 1);
  lp.a_eq.block(0, 0, 1, m) = A.col(i).transpose();
  lp.b_eq = Vector::Constant(1, 1.0);

  const LpSolution sol = solve_lp(lp);
  ColumnMinimax out;
  out.w = sol.x.head(m);
  if (sol.status != LpStatus::kOptimal) {
    out.t = sol.x[m];
    throw std::runtime_error("column_minimax_lp: LP did not reach optimality for column " +
                             std::to_string(i));
  }
  // Polish: enforce the unit inner product exactly, then report the realized
  // objective of the polished point.
  const double d = out.w.dot(A.col(i));
  if (d != 0.0) out.w /= d;
  double t = 0.0;
  const Vector corr = A.transpose() * out.w;
  for (Index j = 0; j < n; ++j)
    if (j != i) t = std::max(t, std::abs(corr[j]));
  out.t = t;
  return out;
}

Index admissible_sparsity(double mu_tilde, Index n) {
  if (mu_tilde <= 0.0) return n;
  // largest integer s with s < (1 + 1/mu_tilde)/2
  const double bound = 0.5 * (1.0 + 1.0 / mu_tilde);
  Index s = static_cast<Index>(std::ceil(bound - 1e-12)) - 1;
  return std::clamp<Index>(s, 0, n);
}

CoherenceReport generalized_coherence(const Matrix& A) {
  require_unit_columns(A);
  const Index m = A.rows(), n = A.cols();

  CoherenceReport rep;
  rep.mu = mutual_coherence(A);
  rep.column_optima.resize(n);

  std::vector<Vector> phase1_w(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    ColumnMinimax cm = column_minimax_lp(A, static_cast<Index>(j));
    phase1_w[j] = cm.w;
    rep.column_optima[static_cast<Index>(j)] = cm.t;
  });
  rep.mu_tilde = rep.column_optima.maxCoeff();

  // Phase two: among the mu_tilde-attaining weights, minimize the largest
  // entry magnitude. Columns are independent, so per-column l_inf
  // minimization under the global cap assembles a minimizer of the joint
  // max-entry objective.
  const double cap = rep.mu_tilde + 1e-9;
  rep.W_good.resize(m, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jz) {
    const Index i = static_cast<Index>(jz);
    LpProblem lp;  // variables (w_1..w_m, u): minimize u
    lp.c = Vector::Zero(m + 1);
    lp.c[m] = 1.0;
    lp.nonneg.assign(static_cast<std::size_t>(m + 1), false);
    lp.nonneg[static_cast<std::size_t>(m)] = true;

    const Index rows = 2 * (n - 1) + 2 * m;
    lp.a_ub = Matrix::Zero(rows, m + 1);
    lp.b_ub = Vector::Zero(rows);
    Index r = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      lp.a_ub.block(r, 0, 1, m) = A.col(j).transpose();
      lp.b_ub[r] = cap;
      lp.a_ub.block(r + 1, 0, 1, m) = -A.col(j).transpose();
      lp.b_ub[r + 1] = cap;
      r += 2;
    }
    for (Index l = 0; l < m; ++l) {
      lp.a_ub(r, l) = 1.0;
      lp.a_ub(r, m) = -1.0;
      lp.a_ub(r + 1, l) = -1.0;
      lp.a_ub(r + 1, m) = -1.0;
      r += 2;
    }
    lp.a_eq = Matrix::Zero(1, m + 1);
    lp.a_eq.block(0, 0, 1, m) = A.col(i).transpose();
    lp.b_eq = Vector::Constant(1, 1.0);

    const LpSolution sol = solve_lp(lp);
    Vector w = sol.x.head(m);
    if (sol.status != LpStatus::kOptimal)
      w = phase1_w[jz];  // fall back to the phase-1 optimum, still feasible
    const double d = w.dot(A.col(i));
    if (d != 0.0) w /= d;
    rep.W_good.col(i) = w;
  });

  rep.C_W = rep.W_good.cwiseAbs().maxCoeff();
  rep.s_max_admissible = admissible_sparsity(rep.mu_tilde, n);
  return rep;
}

bool verify_optimality(const Matrix& A, Index i, const Vector& w, double t,
                       int starts, int steps, std::uint64_t seed) {
  const Index m = A.rows(), n = A.cols();
  if (w.size() != m) throw std::invalid_argument("verify_optimality: bad w size");
  if (std::abs(w.dot(A.col(i)) - 1.0) > 1e-9)
    throw std::invalid_argument("verify_optimality: w is not feasible");

  // All starts march in lockstep as columns of a matrix; each column is an
  // independent projected subgradient run.
  Rng rng = Rng::derive_stream(seed, static_cast<std::uint64_t>(i));
  Matrix W(m, starts);
  for (Index c = 0; c < starts; ++c)
    for (Index r = 0; r < m; ++r) W(r, c) = rng.normal();

  const Vector ai = A.col(i);
  const double ai_sq = ai.squaredNorm();
  // project each column onto {w : w'a_i = 1}
  auto project = [&](Matrix& M) {
    const Eigen::RowVectorXd viol = (ai.transpose() * M).array() - 1.0;
    M.noalias() -= ai * (viol / ai_sq);
  };
  project(W);

  double best = std::numeric_limits<double>::infinity();
  Matrix corr(n, starts);
  for (int step = 0; step < steps; ++step) {
    corr.noalias() = A.transpose() * W;
    const double alpha = 0.5 / std::sqrt(static_cast<double>(step + 1));
    for (Index c = 0; c < starts; ++c) {
      double f = 0.0;
      Index jmax = -1;
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double a = std::abs(corr(j, c));
        if (a > f) {
          f = a;
          jmax = j;
        }
      }
      best = std::min(best, f);
      if (jmax >= 0) {
        const double sgn = corr(jmax, c) > 0.0 ? 1.0 : -1.0;
        W.col(c) -= alpha * sgn * A.col(jmax);
      }
    }
    project(W);
    if (best < t - 1e-6) return false;
  }
  return best >= t - 1e-6;
}

}  // namespace uilab
