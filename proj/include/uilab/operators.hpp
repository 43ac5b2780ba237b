#pragma once

#include "uilab/types.hpp"

namespace uilab {

// Componentwise sign(v) * max(0, |v| - theta). theta must be >= 0.
Vector soft_threshold(const Vector& v, double theta);

// Indices of the `count` largest-magnitude entries, ties broken by lower
// index. Returned ascending by magnitude rank; the set for count c is a
// subset of the set for count c+1.
IndexSet select_support(const Vector& v, Index count);

// Thresholding with support selection: entries in the selected set that
// clear the threshold pass through unshrunk, other above-threshold entries
// are shrunk by theta, and everything with |v_i| <= theta is zeroed
// (selected or not).
Vector ss_threshold(const Vector& v, double theta, Index count);

// Same rule with a caller-supplied selected set (batch-wide selection).
Vector ss_threshold(const Vector& v, double theta,
                    const Eigen::Array<bool, Eigen::Dynamic, 1>& selected);

// Boolean mask form of select_support, used by the batched forward passes.
void select_support_mask(const Vector& v, Index count,
                         Eigen::Array<bool, Eigen::Dynamic, 1>& mask);

// Batch-wide selection: the count_per_sample * ncols largest magnitudes of
// the whole batch are trusted, so columns may receive unequal shares. Ties
// break by (column, row) order. Returns one index set per column.
std::vector<IndexSet> select_support_batch(const Matrix& v, Index count_per_sample);

struct SupportSchedule {
  double p = 0.0;      // percent added per layer
  double p_max = 0.0;  // percent cap
  Index n = 0;

  SupportSchedule() = default;
  SupportSchedule(double p_, double p_max_, Index n_);
};

// p^k = min(p*k, p_max) percent of n, floored to a count. Layer 0 trusts
// nothing.
Index pk_count(const SupportSchedule& schedule, Index k);

}  // namespace uilab
