#pragma once

#include "uilab/types.hpp"

namespace uilab {

// Coherence analysis of a unit-column dictionary: mutual coherence mu, the
// generalized coherence mu_tilde = min over W with diag(W'A) = 1 of the
// largest cross inner product, a minimizing weight matrix with smallest max
// entry magnitude, and the sparsity level those constants admit.
struct CoherenceReport {
  double mu = 0.0;
  double mu_tilde = 0.0;
  Matrix W_good;              // m x n
  double C_W = 0.0;           // max |W_good(i,j)|
  Index s_max_admissible = 0; // largest s with s < (1 + 1/mu_tilde)/2
  Vector column_optima;       // per-column minimax values t_i
};

// max_{i != j} |A_i' A_j|. Columns must be unit-norm within 1e-8.
double mutual_coherence(const Matrix& A);

struct ColumnMinimax {
  Vector w;  // length m, w'A_i = 1
  double t;  // max_{j != i} |w'A_j|
};

// Per-column LP: minimize the largest |w'A_j| over j != i subject to
// w'A_i = 1. The constraints of the joint problem over W only touch one
// column at a time, so the joint optimum decomposes into these n programs.
ColumnMinimax column_minimax_lp(const Matrix& A, Index i);

// Full analysis: phase one computes mu_tilde = max_i t_i; phase two
// re-solves each column minimizing ||w||_inf under the cross-product cap
// mu_tilde + 1e-9, which realizes the minimal max entry magnitude C_W.
CoherenceReport generalized_coherence(const Matrix& A);

// Independent optimality check: projected subgradient descent on the
// column-i minimax objective from `starts` random feasible points. Returns
// false iff some run finds an objective below t - 1e-6.
bool verify_optimality(const Matrix& A, Index i, const Vector& w, double t,
                       int starts = 50, int steps = 20000,
                       std::uint64_t seed = 0x51BCADu);

Index admissible_sparsity(double mu_tilde, Index n);

}  // namespace uilab
