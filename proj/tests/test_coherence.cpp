#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "uilab/coherence.hpp"
#include "uilab/problem.hpp"

using namespace uilab;

namespace {

// e1, e2, (e1+e2)/sqrt(2) in R^2: the per-column minimax optima are
// 1/(1+sqrt(2)), 1/(1+sqrt(2)), 1/sqrt(2) by direct 2-variable calculation.
Matrix hand_dictionary() {
  Matrix A(2, 3);
  const double s = 1.0 / std::sqrt(2.0);
  A << 1, 0, s, 0, 1, s;
  return A;
}

Matrix random_dictionary(Index m, Index n, std::uint64_t seed) {
  ProblemConfig cfg;
  cfg.m = m;
  cfg.n = n;
  cfg.seed = seed;
  return gen_dictionary(cfg);
}

}  // namespace

TEST_CASE("mutual coherence basics") {
  CHECK(mutual_coherence(Matrix::Identity(4, 4)) == 0.0);

  Matrix dup(3, 3);
  dup << 1, 0, 1, 0, 1, 0, 0, 0, 0;
  CHECK(mutual_coherence(dup) == doctest::Approx(1.0));

  CHECK(mutual_coherence(hand_dictionary()) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  Matrix bad = Matrix::Identity(3, 3) * 2.0;
  CHECK_THROWS_AS(mutual_coherence(bad), std::invalid_argument);
}

TEST_CASE("column minimax LP on the orthonormal dictionary") {
  const Matrix I = Matrix::Identity(4, 4);
  for (Index i = 0; i < 4; ++i) {
    const ColumnMinimax cm = column_minimax_lp(I, i);
    CHECK(cm.t == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK((cm.w - I.col(i)).norm() <= 1e-9);
  }
}

TEST_CASE("column minimax LP matches the hand-solved 2x3 dictionary") {
  const Matrix A = hand_dictionary();
  const double t01 = 1.0 / (1.0 + std::sqrt(2.0));  // 0.41421...
  const double t2 = 1.0 / std::sqrt(2.0);           // 0.70711...

  const ColumnMinimax c0 = column_minimax_lp(A, 0);
  const ColumnMinimax c1 = column_minimax_lp(A, 1);
  const ColumnMinimax c2 = column_minimax_lp(A, 2);
  CHECK(c0.t == doctest::Approx(t01).epsilon(1e-9));
  CHECK(c1.t == doctest::Approx(t01).epsilon(1e-9));
  CHECK(c2.t == doctest::Approx(t2).epsilon(1e-9));
  // column 3's optimum is w = (sqrt(2)/2, sqrt(2)/2)
  CHECK(c2.w[0] == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-8));
  CHECK(c2.w[1] == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-8));

  // feasibility residuals
  for (Index i = 0; i < 3; ++i) {
    const ColumnMinimax cm = column_minimax_lp(A, i);
    CHECK(std::abs(cm.w.dot(A.col(i)) - 1.0) <= 1e-9);
  }
}

TEST_CASE("generalized coherence on the orthonormal dictionary") {
  const Matrix I = Matrix::Identity(5, 5);
  const CoherenceReport rep = generalized_coherence(I);
  CHECK(rep.mu == 0.0);
  CHECK(rep.mu_tilde <= 1e-10);
  CHECK((rep.W_good - I).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(rep.C_W == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.s_max_admissible == 5);  // mu_tilde ~ 0 admits everything
}

TEST_CASE("generalized coherence on the hand dictionary") {
  const CoherenceReport rep = generalized_coherence(hand_dictionary());
  CHECK(rep.mu_tilde == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(rep.column_optima[0] == doctest::Approx(1.0 / (1.0 + std::sqrt(2.0))).epsilon(1e-6));
  CHECK(rep.column_optima[1] == doctest::Approx(1.0 / (1.0 + std::sqrt(2.0))).epsilon(1e-6));
  CHECK(rep.column_optima[2] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("coherence report invariants on a random dictionary") {
  const Matrix A = random_dictionary(20, 40, 42);
  const CoherenceReport rep = generalized_coherence(A);

  CHECK(rep.mu_tilde <= rep.mu + 1e-8);  // A itself is feasible
  const Matrix corr = rep.W_good.transpose() * A;
  for (Index i = 0; i < corr.rows(); ++i) {
    CHECK(std::abs(corr(i, i) - 1.0) <= 1e-8);
    for (Index j = 0; j < corr.cols(); ++j)
      if (i != j) CHECK(std::abs(corr(i, j)) <= rep.mu_tilde + 2e-9);
  }
  CHECK(rep.C_W == rep.W_good.cwiseAbs().maxCoeff());
  // admissibility bound: s_max < (1 + 1/mu)/2 <= s_max + 1
  const double bound = 0.5 * (1.0 + 1.0 / rep.mu_tilde);
  CHECK(static_cast<double>(rep.s_max_admissible) < bound);
  CHECK(static_cast<double>(rep.s_max_admissible + 1) >= bound - 1e-9);
}

TEST_CASE("coherence is invariant under column sign flips") {
  const Matrix A = random_dictionary(10, 20, 7);
  Matrix flipped = A;
  Rng rng(8);
  for (Index j = 0; j < A.cols(); ++j)
    if (rng.coin()) flipped.col(j) *= -1.0;
  CHECK(mutual_coherence(flipped) == doctest::Approx(mutual_coherence(A)).epsilon(1e-12));
  const CoherenceReport ra = generalized_coherence(A);
  const CoherenceReport rf = generalized_coherence(flipped);
  CHECK(rf.mu_tilde == doctest::Approx(ra.mu_tilde).epsilon(1e-9));
}

TEST_CASE("subgradient oracle certifies the LP and refutes inflated claims") {
  const Matrix A = hand_dictionary();

  SUBCASE("orthonormal optimum is certified") {
    const Matrix I = Matrix::Identity(3, 3);
    CHECK(verify_optimality(I, 0, I.col(0), 0.0));
  }

  SUBCASE("hand-solved columns are certified") {
    for (Index i = 0; i < 3; ++i) {
      const ColumnMinimax cm = column_minimax_lp(A, i);
      CHECK(verify_optimality(A, i, cm.w, cm.t));
    }
  }

  SUBCASE("a feasible but suboptimal claim is refuted") {
    // w = A_0 is feasible for column 0 with objective mu = 0.70711; claiming
    // t = LP optimum + 0.1 must be refuted because better points exist
    const ColumnMinimax cm = column_minimax_lp(A, 0);
    CHECK_FALSE(verify_optimality(A, 0, A.col(0), cm.t + 0.1));
  }

  SUBCASE("infeasible w is a precondition error") {
    CHECK_THROWS_AS(verify_optimality(A, 0, 2.0 * A.col(0), 0.5), std::invalid_argument);
  }
}

TEST_CASE("parallel column solves match the sequential run bit for bit") {
  const Matrix A = random_dictionary(12, 24, 55);
  const CoherenceReport seq = generalized_coherence(A);
  setenv("UILAB_THREADS", "4", 1);
  const CoherenceReport par = generalized_coherence(A);
  unsetenv("UILAB_THREADS");
  CHECK(seq.mu_tilde == par.mu_tilde);
  CHECK(seq.C_W == par.C_W);
  CHECK(seq.W_good == par.W_good);
  CHECK(seq.column_optima == par.column_optima);
}

TEST_CASE("oracle agreement on random dictionaries") {
  // lighter than the acceptance run: 2 dictionaries, trimmed oracle budget
  for (std::uint64_t seed : {101ull, 102ull}) {
    const Matrix A = random_dictionary(15, 30, seed);
    for (Index i = 0; i < A.cols(); i += 7) {
      const ColumnMinimax cm = column_minimax_lp(A, i);
      CHECK(verify_optimality(A, i, cm.w, cm.t, 10, 4000));
    }
  }
}
