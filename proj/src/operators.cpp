#include "uilab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uilab {

Vector soft_threshold(const Vector& v, double theta) {
  if (theta < 0.0) throw std::invalid_argument("soft_threshold: theta must be >= 0");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - theta;
    out[i] = a > 0.0 ? (v[i] > 0.0 ? a : -a) : 0.0;
  }
  return out;
}

IndexSet select_support(const Vector& v, Index count) {
  const Index n = v.size();
  count = std::clamp<Index>(count, 0, n);
  if (count == 0) return {};
  IndexSet idx(n);
  std::iota(idx.begin(), idx.end(), Index{0});
  std::partial_sort(idx.begin(), idx.begin() + count, idx.end(),
                    [&v](Index a, Index b) {
                      const double ma = std::abs(v[a]), mb = std::abs(v[b]);
                      if (ma != mb) return ma > mb;
                      return a < b;
                    });
  idx.resize(count);
  return idx;
}

void select_support_mask(const Vector& v, Index count,
                         Eigen::Array<bool, Eigen::Dynamic, 1>& mask) {
  mask.setConstant(v.size(), false);
  for (Index i : select_support(v, count)) mask[i] = true;
}

std::vector<IndexSet> select_support_batch(const Matrix& v, Index count_per_sample) {
  const Index n = v.rows(), ncols = v.cols();
  std::vector<IndexSet> sets(static_cast<std::size_t>(ncols));
  const Index total = std::clamp<Index>(count_per_sample, 0, n) * ncols;
  if (total == 0) return sets;
  std::vector<Index> flat(static_cast<std::size_t>(n * ncols));
  std::iota(flat.begin(), flat.end(), Index{0});
  std::partial_sort(flat.begin(), flat.begin() + total, flat.end(),
                    [&v](Index a, Index b) {
                      const double ma = std::abs(v.data()[a]), mb = std::abs(v.data()[b]);
                      if (ma != mb) return ma > mb;
                      return a < b;  // column-major: ties fall to lower (col, row)
                    });
  for (Index t = 0; t < total; ++t) {
    const Index flat_idx = flat[static_cast<std::size_t>(t)];
    sets[static_cast<std::size_t>(flat_idx / n)].push_back(flat_idx % n);
  }
  for (auto& s : sets) std::sort(s.begin(), s.end());
  return sets;
}

Vector ss_threshold(const Vector& v, double theta,
                    const Eigen::Array<bool, Eigen::Dynamic, 1>& selected) {
  if (theta < 0.0) throw std::invalid_argument("ss_threshold: theta must be >= 0");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] > theta)
      out[i] = selected[i] ? v[i] : v[i] - theta;
    else if (v[i] < -theta)
      out[i] = selected[i] ? v[i] : v[i] + theta;
    else
      out[i] = 0.0;  // |v_i| <= theta zeroes the entry even when selected
  }
  return out;
}

Vector ss_threshold(const Vector& v, double theta, Index count) {
  Eigen::Array<bool, Eigen::Dynamic, 1> selected;
  select_support_mask(v, count, selected);
  return ss_threshold(v, theta, selected);
}

SupportSchedule::SupportSchedule(double p_, double p_max_, Index n_)
    : p(p_), p_max(p_max_), n(n_) {
  if (p < 0.0 || p_max < 0.0 || p_max > 100.0 || n <= 0)
    throw std::invalid_argument("SupportSchedule: need p >= 0, 0 <= p_max <= 100, n > 0");
}

Index pk_count(const SupportSchedule& schedule, Index k) {
  if (k < 0) throw std::invalid_argument("pk_count: layer index must be >= 0");
  const double pk = std::min(schedule.p * static_cast<double>(k), schedule.p_max);
  // the +1e-9 keeps exact percent boundaries (e.g. 6% of 500) from rounding
  // down through floating-point dust
  const Index count = static_cast<Index>(
      std::floor(pk * static_cast<double>(schedule.n) / 100.0 + 1e-9));
  return std::clamp<Index>(count, 0, schedule.n);
}

}  // namespace uilab
