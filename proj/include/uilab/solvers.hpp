#pragma once

#include <vector>

#include "uilab/types.hpp"

namespace uilab {

struct SolverConfig {
  double lambda = 0.2;
  Index max_iters = 16;
  double L = 0.0;  // <= 0 means auto: ||A||_2^2

  void validate() const;
};

struct IterateTrace {
  std::vector<Vector> iterates;    // x^0 .. x^K, x^0 = 0
  std::vector<double> objectives;  // 0.5||b - Ax||^2 + lambda||x||_1 per iterate
  std::vector<double> lambdas;     // per-step lambda (adaptive rule); empty otherwise
  bool step_size_warning = false;  // set when the supplied L < ||A||_2^2
};

double lipschitz_L(const Matrix& A);

// x^{k+1} = soft(x^k + (1/L) A'(b - A x^k), lambda/L). The affine update is
// precomputed once, so a full-variant unrolled net loaded with the matching
// parameters reproduces these iterates bit for bit.
IterateTrace ista(const Matrix& A, const Vector& b, const SolverConfig& cfg);

// Beck-Teboulle momentum on top of the same proximal step; no restart.
IterateTrace fista(const Matrix& A, const Vector& b, const SolverConfig& cfg);

// Halve lambda and the displacement tolerance whenever the max-entry
// displacement of one ISTA step falls below the tolerance. (An l2 test at
// the stated defaults never fires within 16 iterations at the 250x500
// scale, which would make the rule a no-op in the regime it targets.)
IterateTrace adaptive_ista(const Matrix& A, const Vector& b, double lambda0,
                           double eps0, Index max_iters, double L = 0.0);

// Batched flavors for whole-test-set evaluation: columns of B are samples,
// the returned list holds the per-iteration estimate matrices X^0..X^K.
// The adaptive rule tracks lambda^k and eps^k per column.
std::vector<Matrix> ista_batch(const Matrix& A, const Matrix& B, const SolverConfig& cfg);
std::vector<Matrix> fista_batch(const Matrix& A, const Matrix& B, const SolverConfig& cfg);
std::vector<Matrix> adaptive_ista_batch(const Matrix& A, const Matrix& B, double lambda0,
                                        double eps0, Index max_iters, double L = 0.0);

}  // namespace uilab
