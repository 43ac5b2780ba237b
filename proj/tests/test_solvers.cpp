#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>

#include "uilab/linalg.hpp"
#include "uilab/problem.hpp"
#include "uilab/solvers.hpp"

using namespace uilab;

namespace {

struct SmallInstance {
  Matrix A;
  Vector b;
};

SmallInstance small_instance(std::uint64_t seed = 12) {
  ProblemConfig cfg;
  cfg.m = 5;
  cfg.n = 8;
  cfg.seed = seed;
  SmallInstance inst;
  inst.A = gen_dictionary(cfg);
  const SignalSample smp = sample_signal(inst.A, cfg, 0);
  inst.b = smp.b;
  return inst;
}

// LASSO optimality: on the support A'(Ax-b) = -lambda sign(x), off the
// support |A'(Ax-b)| <= lambda.
void check_lasso_optimality(const Matrix& A, const Vector& b, const Vector& x,
                            double lambda, double tol) {
  const Vector g = A.transpose() * (A * x - b);
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0)
      CHECK(std::abs(g[i] + lambda * (x[i] > 0 ? 1.0 : -1.0)) <= tol);
    else
      CHECK(std::abs(g[i]) <= lambda + tol);
  }
}

}  // namespace

TEST_CASE("lipschitz_L") {
  CHECK(lipschitz_L(Matrix::Identity(4, 4)) == doctest::Approx(1.0).epsilon(1e-10));

  const SmallInstance inst = small_instance();
  const double L = lipschitz_L(inst.A);
  CHECK(lipschitz_L(2.0 * inst.A) == doctest::Approx(4.0 * L).epsilon(1e-9));

  Eigen::JacobiSVD<Matrix> svd(inst.A);
  const double oracle = svd.singularValues()(0);
  CHECK(L == doctest::Approx(oracle * oracle).epsilon(1e-8));
}

TEST_CASE("ista one-step hand computation") {
  Matrix A(1, 1);
  A << 1.0;
  Vector b(1);
  b << 1.0;
  SolverConfig cfg;
  cfg.lambda = 0.5;
  cfg.L = 1.0;
  cfg.max_iters = 1;
  const IterateTrace trace = ista(A, b, cfg);
  REQUIRE(trace.iterates.size() == 2);
  CHECK(trace.iterates[0][0] == 0.0);
  CHECK(trace.iterates[1][0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("solvers stay at zero for b = 0") {
  const SmallInstance inst = small_instance();
  const Vector zero_b = Vector::Zero(5);
  SolverConfig cfg;
  cfg.lambda = 0.1;
  cfg.max_iters = 10;
  for (const auto& trace : {ista(inst.A, zero_b, cfg), fista(inst.A, zero_b, cfg),
                            adaptive_ista(inst.A, zero_b, 0.2, 0.05, 10)}) {
    for (const auto& x : trace.iterates) CHECK(x.norm() == 0.0);
  }
}

TEST_CASE("ista satisfies LASSO optimality after long runs") {
  const SmallInstance inst = small_instance();
  SolverConfig cfg;
  cfg.lambda = 0.05;
  cfg.max_iters = 2000;
  const IterateTrace trace = ista(inst.A, inst.b, cfg);
  check_lasso_optimality(inst.A, inst.b, trace.iterates.back(), cfg.lambda, 1e-6);
}

TEST_CASE("ista objective is monotone when L is valid") {
  const SmallInstance inst = small_instance(44);
  SolverConfig cfg;
  cfg.lambda = 0.1;
  cfg.max_iters = 100;
  const IterateTrace trace = ista(inst.A, inst.b, cfg);
  CHECK_FALSE(trace.step_size_warning);
  for (std::size_t k = 1; k < trace.objectives.size(); ++k)
    CHECK(trace.objectives[k] <= trace.objectives[k - 1] + 1e-12);
}

TEST_CASE("ista flags an undersized step constant") {
  const SmallInstance inst = small_instance();
  SolverConfig cfg;
  cfg.lambda = 0.1;
  cfg.max_iters = 3;
  cfg.L = 0.5 * lipschitz_L(inst.A);
  CHECK(ista(inst.A, inst.b, cfg).step_size_warning);
}

TEST_CASE("fista first iterate equals ista's") {
  const SmallInstance inst = small_instance(19);
  SolverConfig cfg;
  cfg.lambda = 0.1;
  cfg.max_iters = 1;
  const IterateTrace ti = ista(inst.A, inst.b, cfg);
  const IterateTrace tf = fista(inst.A, inst.b, cfg);
  CHECK(ti.iterates[1] == tf.iterates[1]);
}

TEST_CASE("fista at K=200 reaches the long-run ista objective") {
  const SmallInstance inst = small_instance(12);
  SolverConfig fast;
  fast.lambda = 0.05;
  fast.max_iters = 200;
  SolverConfig slow = fast;
  slow.max_iters = 2000;
  const double f_fista = fista(inst.A, inst.b, fast).objectives.back();
  const double f_ista = ista(inst.A, inst.b, slow).objectives.back();
  CHECK(f_fista <= f_ista + 1e-8);
  CHECK(std::abs(f_fista - f_ista) <= 1e-8);
}

TEST_CASE("fixed points satisfy optimality") {
  const SmallInstance inst = small_instance(33);
  SolverConfig cfg;
  cfg.lambda = 0.2;
  cfg.max_iters = 5000;
  const IterateTrace trace = ista(inst.A, inst.b, cfg);
  const auto& last = trace.iterates.back();
  const auto& prev = trace.iterates[trace.iterates.size() - 2];
  if ((last - prev).norm() == 0.0)
    check_lasso_optimality(inst.A, inst.b, last, cfg.lambda, 1e-8);
}

TEST_CASE("adaptive_ista halving rule") {
  const SmallInstance inst = small_instance(21);

  SUBCASE("b = 0 halves lambda every iteration") {
    const IterateTrace trace = adaptive_ista(inst.A, Vector::Zero(5), 0.2, 0.05, 4);
    REQUIRE(trace.lambdas.size() == 4);
    CHECK(trace.lambdas[0] == 0.2);
    CHECK(trace.lambdas[1] == 0.1);
    CHECK(trace.lambdas[2] == 0.05);
    CHECK(trace.lambdas[3] == 0.025);
  }

  SUBCASE("lambda sequence is non-increasing and halves exactly on fires") {
    const IterateTrace trace = adaptive_ista(inst.A, inst.b, 0.2, 0.05, 30);
    double eps = 0.05;
    for (std::size_t k = 0; k + 1 < trace.lambdas.size(); ++k) {
      const double next = trace.lambdas[k + 1];
      CHECK(next <= trace.lambdas[k]);
      const double displacement =
          (trace.iterates[k + 1] - trace.iterates[k]).cwiseAbs().maxCoeff();
      if (displacement < eps) {
        CHECK(next == 0.5 * trace.lambdas[k]);
        eps *= 0.5;
      } else {
        CHECK(next == trace.lambdas[k]);
      }
    }
  }

  SUBCASE("defaults halve to 0.1 at the first displacement fire") {
    const IterateTrace trace = adaptive_ista(inst.A, inst.b, 0.2, 0.05, 50);
    for (std::size_t k = 0; k + 1 < trace.lambdas.size(); ++k) {
      if (trace.lambdas[k + 1] != trace.lambdas[k]) {
        CHECK(trace.lambdas[k] == 0.2);
        CHECK(trace.lambdas[k + 1] == 0.1);
        break;
      }
    }
  }
}

TEST_CASE("adaptive beats fixed lambda at matched iteration budget") {
  // noiseless 250x500 instance, K = 16 (trimmed to 100 samples here; the
  // acceptance suite runs the full comparison)
  ProblemConfig cfg;
  cfg.m = 250;
  cfg.n = 500;
  cfg.seed = 2;
  const Matrix A = gen_dictionary(cfg);
  Matrix B(250, 100), X(500, 100);
  for (Index j = 0; j < 100; ++j) {
    const SignalSample s = sample_signal(A, cfg, static_cast<std::uint64_t>(j));
    B.col(j) = s.b;
    X.col(j) = s.x_star;
  }
  SolverConfig sc;
  sc.lambda = 0.2;
  sc.max_iters = 16;
  sc.L = lipschitz_L(A);
  const auto fixed_iters = ista_batch(A, B, sc);
  const auto adaptive_iters = adaptive_ista_batch(A, B, 0.2, 0.05, 16, sc.L);
  const double nmse_fixed = nmse_db(fixed_iters.back(), X);
  const double nmse_adaptive = nmse_db(adaptive_iters.back(), X);
  CHECK(nmse_adaptive < nmse_fixed);
}

TEST_CASE("batched solvers agree with the per-sample path") {
  const SmallInstance inst = small_instance(55);
  Matrix B(5, 3);
  ProblemConfig cfg;
  cfg.m = 5;
  cfg.n = 8;
  cfg.seed = 55;
  for (Index j = 0; j < 3; ++j) B.col(j) = sample_signal(inst.A, cfg, j).b;

  SolverConfig sc;
  sc.lambda = 0.1;
  sc.max_iters = 12;
  const auto batch = ista_batch(inst.A, B, sc);
  for (Index j = 0; j < 3; ++j) {
    const IterateTrace one = ista(inst.A, B.col(j), sc);
    for (std::size_t k = 0; k < batch.size(); ++k)
      CHECK((batch[k].col(j) - one.iterates[k]).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
