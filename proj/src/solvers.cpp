#include "uilab/solvers.hpp"

#include <cmath>
#include <stdexcept>

#include "uilab/linalg.hpp"
#include "uilab/operators.hpp"

namespace uilab {

void SolverConfig::validate() const {
  if (lambda <= 0.0) throw std::invalid_argument("solver: lambda must be > 0");
  if (max_iters < 1) throw std::invalid_argument("solver: need at least one iteration");
}

double lipschitz_L(const Matrix& A) {
  const double s = spectral_norm(A);
  return s * s;
}

namespace {

double lasso_objective(const Matrix& A, const Vector& b, const Vector& x, double lambda) {
  return 0.5 * (b - A * x).squaredNorm() + lambda * x.lpNorm<1>();
}

struct IstaOperator {
  Matrix gain;   // A' / L, n x m
  Matrix update; // I - A'A / L, n x n
  double L;
  bool warned;

  IstaOperator(const Matrix& A, double L_request) {
    const double L_min = lipschitz_L(A);
    L = L_request > 0.0 ? L_request : L_min;
    warned = L < L_min * (1.0 - 1e-12);
    gain = A.transpose() / L;
    update = Matrix::Identity(A.cols(), A.cols()) - gain * A;
  }

  // x + (1/L) A'(b - Ax) evaluated as gain*b + update*x
  Vector step(const Vector& x, const Vector& b) const {
    Vector v = gain * b;
    v.noalias() += update * x;
    return v;
  }
};

}  // namespace

IterateTrace ista(const Matrix& A, const Vector& b, const SolverConfig& cfg) {
  cfg.validate();
  const IstaOperator op(A, cfg.L);
  const double theta = cfg.lambda / op.L;

  IterateTrace trace;
  trace.step_size_warning = op.warned;
  Vector x = Vector::Zero(A.cols());
  trace.iterates.push_back(x);
  trace.objectives.push_back(lasso_objective(A, b, x, cfg.lambda));
  for (Index k = 0; k < cfg.max_iters; ++k) {
    x = soft_threshold(op.step(x, b), theta);
    trace.iterates.push_back(x);
    trace.objectives.push_back(lasso_objective(A, b, x, cfg.lambda));
  }
  return trace;
}

IterateTrace fista(const Matrix& A, const Vector& b, const SolverConfig& cfg) {
  cfg.validate();
  const IstaOperator op(A, cfg.L);
  const double theta = cfg.lambda / op.L;

  IterateTrace trace;
  trace.step_size_warning = op.warned;
  Vector x = Vector::Zero(A.cols());
  Vector y = x;
  double t = 1.0;
  trace.iterates.push_back(x);
  trace.objectives.push_back(lasso_objective(A, b, x, cfg.lambda));
  for (Index k = 0; k < cfg.max_iters; ++k) {
    const Vector x_prev = x;
    x = soft_threshold(op.step(y, b), theta);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
    trace.iterates.push_back(x);
    trace.objectives.push_back(lasso_objective(A, b, x, cfg.lambda));
  }
  return trace;
}

std::vector<Matrix> ista_batch(const Matrix& A, const Matrix& B, const SolverConfig& cfg) {
  cfg.validate();
  const IstaOperator op(A, cfg.L);
  const double theta = cfg.lambda / op.L;
  std::vector<Matrix> iterates;
  Matrix X = Matrix::Zero(A.cols(), B.cols());
  iterates.push_back(X);
  Matrix V(A.cols(), B.cols());
  for (Index k = 0; k < cfg.max_iters; ++k) {
    V.noalias() = op.gain * B;
    V.noalias() += op.update * X;
    for (Index j = 0; j < X.cols(); ++j) X.col(j) = soft_threshold(V.col(j), theta);
    iterates.push_back(X);
  }
  return iterates;
}

std::vector<Matrix> fista_batch(const Matrix& A, const Matrix& B, const SolverConfig& cfg) {
  cfg.validate();
  const IstaOperator op(A, cfg.L);
  const double theta = cfg.lambda / op.L;
  std::vector<Matrix> iterates;
  Matrix X = Matrix::Zero(A.cols(), B.cols());
  Matrix Y = X;
  double t = 1.0;
  iterates.push_back(X);
  Matrix V(A.cols(), B.cols());
  for (Index k = 0; k < cfg.max_iters; ++k) {
    const Matrix X_prev = X;
    V.noalias() = op.gain * B;
    V.noalias() += op.update * Y;
    for (Index j = 0; j < X.cols(); ++j) X.col(j) = soft_threshold(V.col(j), theta);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Y = X + ((t - 1.0) / t_next) * (X - X_prev);
    t = t_next;
    iterates.push_back(X);
  }
  return iterates;
}

std::vector<Matrix> adaptive_ista_batch(const Matrix& A, const Matrix& B, double lambda0,
                                        double eps0, Index max_iters, double L) {
  if (lambda0 <= 0.0 || eps0 <= 0.0)
    throw std::invalid_argument("adaptive_ista: lambda0 and eps0 must be > 0");
  const IstaOperator op(A, L);
  std::vector<Matrix> iterates;
  const Index N = B.cols();
  Matrix X = Matrix::Zero(A.cols(), N);
  Vector lambda = Vector::Constant(N, lambda0);
  Vector eps = Vector::Constant(N, eps0);
  iterates.push_back(X);
  Matrix V(A.cols(), N);
  for (Index k = 0; k < max_iters; ++k) {
    V.noalias() = op.gain * B;
    V.noalias() += op.update * X;
    for (Index j = 0; j < N; ++j) {
      const Vector x_new = soft_threshold(V.col(j), lambda[j] / op.L);
      const double displacement = (x_new - X.col(j)).cwiseAbs().maxCoeff();
      X.col(j) = x_new;
      if (displacement < eps[j]) {
        lambda[j] *= 0.5;
        eps[j] *= 0.5;
      }
    }
    iterates.push_back(X);
  }
  return iterates;
}

IterateTrace adaptive_ista(const Matrix& A, const Vector& b, double lambda0,
                           double eps0, Index max_iters, double L) {
  if (lambda0 <= 0.0 || eps0 <= 0.0)
    throw std::invalid_argument("adaptive_ista: lambda0 and eps0 must be > 0");
  if (max_iters < 1) throw std::invalid_argument("adaptive_ista: need at least one iteration");
  const IstaOperator op(A, L);

  IterateTrace trace;
  trace.step_size_warning = op.warned;
  Vector x = Vector::Zero(A.cols());
  double lambda = lambda0, eps = eps0;
  trace.iterates.push_back(x);
  trace.objectives.push_back(lasso_objective(A, b, x, lambda));
  for (Index k = 0; k < max_iters; ++k) {
    trace.lambdas.push_back(lambda);
    const Vector x_prev = x;
    x = soft_threshold(op.step(x, b), lambda / op.L);
    trace.iterates.push_back(x);
    trace.objectives.push_back(lasso_objective(A, b, x, lambda));
    if ((x - x_prev).cwiseAbs().maxCoeff() < eps) {
      lambda *= 0.5;
      eps *= 0.5;
    }
  }
  return trace;
}

}  // namespace uilab
