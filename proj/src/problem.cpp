#include "uilab/problem.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uilab {

void ProblemConfig::validate(bool require_underdetermined) const {
  if (m <= 0 || n <= 0) throw std::invalid_argument("problem: dimensions must be positive");
  if (require_underdetermined && m >= n)
    throw std::invalid_argument("problem: requires m < n");
  if (sparsity_mode == SparsityMode::kBernoulli) {
    if (!(p_b > 0.0 && p_b < 1.0))
      throw std::invalid_argument("problem: bernoulli needs 0 < p_b < 1");
  } else {
    if (s < 2 || s > n) throw std::invalid_argument("problem: fixed_s needs 2 <= s <= n");
  }
  if (magnitude_mode == MagnitudeMode::kBounded) {
    if (!(B_lower >= 0.0 && B_lower < B))
      throw std::invalid_argument("problem: bounded needs 0 <= B_lower < B");
  }
  if (condition_number != 0.0 && condition_number < 1.0)
    throw std::invalid_argument("problem: condition number must be >= 1");
}

Matrix gen_dictionary(const ProblemConfig& cfg) {
  cfg.validate(false);
  if (cfg.has_condition_number())
    throw std::invalid_argument("gen_dictionary: config requests a condition number; use gen_ill_conditioned");
  Rng rng = Rng::derive_stream(cfg.seed, kDictionaryStream);
  Matrix A(cfg.m, cfg.n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.m));
  for (Index j = 0; j < cfg.n; ++j)
    for (Index i = 0; i < cfg.m; ++i) A(i, j) = scale * rng.normal();
  for (Index j = 0; j < cfg.n; ++j) A.col(j) /= A.col(j).norm();
  return A;
}

Matrix gen_ill_conditioned(const ProblemConfig& cfg, double* realized_kappa) {
  cfg.validate(false);
  if (!cfg.has_condition_number())
    throw std::invalid_argument("gen_ill_conditioned: condition number must be >= 1");
  const double kappa = cfg.condition_number;

  Rng rng = Rng::derive_stream(cfg.seed, kDictionaryStream);
  Matrix G(cfg.m, cfg.n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.m));
  for (Index j = 0; j < cfg.n; ++j)
    for (Index i = 0; i < cfg.m; ++i) G(i, j) = scale * rng.normal();

  Eigen::BDCSVD<Matrix> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double sigma_max = svd.singularValues()(0);
  const Index r = svd.singularValues().size();
  Vector shaped(r);
  for (Index i = 0; i < r; ++i) {
    const double t = (r > 1) ? static_cast<double>(i) / static_cast<double>(r - 1) : 0.0;
    shaped[i] = sigma_max * std::pow(1.0 / kappa, t);
  }
  Matrix A = svd.matrixU() * shaped.asDiagonal() * svd.matrixV().transpose();
  for (Index j = 0; j < cfg.n; ++j) {
    const double nrm = A.col(j).norm();
    if (nrm > 0) A.col(j) /= nrm;
  }
  if (realized_kappa) {
    Eigen::BDCSVD<Matrix> svd2(A);
    const auto& sv = svd2.singularValues();
    *realized_kappa = sv(0) / sv(sv.size() - 1);
  }
  return A;
}

Vector apply_noise(const Vector& clean, double snr_db, Rng& rng) {
  if (std::isinf(snr_db)) return Vector::Zero(clean.size());
  const double clean_norm = clean.norm();
  if (clean_norm == 0.0) return Vector::Zero(clean.size());
  Vector z(clean.size());
  for (Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  const double z_norm = z.norm();
  const double target = clean_norm * std::pow(10.0, -snr_db / 20.0);
  return z * (target / z_norm);
}

SignalSample sample_signal(const Matrix& A, const ProblemConfig& cfg,
                           std::uint64_t stream_index) {
  cfg.validate();
  if (A.rows() != cfg.m || A.cols() != cfg.n)
    throw std::invalid_argument("sample_signal: dictionary does not match config");

  Rng rng = Rng::derive_stream(cfg.seed, kSampleStreamBase + stream_index);
  SignalSample smp;
  smp.x_star = Vector::Zero(cfg.n);

  if (cfg.sparsity_mode == SparsityMode::kBernoulli) {
    for (Index i = 0; i < cfg.n; ++i) {
      if (rng.uniform01() < cfg.p_b) {
        smp.x_star[i] = (cfg.magnitude_mode == MagnitudeMode::kGaussian)
                            ? rng.normal()
                            : (rng.coin() ? -1.0 : 1.0) * rng.uniform(cfg.B_lower, cfg.B);
        smp.support.push_back(i);
      }
    }
  } else {
    // exact support of size s: partial Fisher-Yates over [0, n)
    std::vector<Index> perm(cfg.n);
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index i = 0; i < cfg.s; ++i) {
      const Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(cfg.n - i)));
      std::swap(perm[i], perm[j]);
    }
    smp.support.assign(perm.begin(), perm.begin() + cfg.s);
    std::sort(smp.support.begin(), smp.support.end());
    for (Index i : smp.support) {
      smp.x_star[i] = (cfg.magnitude_mode == MagnitudeMode::kGaussian)
                          ? rng.normal()
                          : (rng.coin() ? -1.0 : 1.0) * rng.uniform(cfg.B_lower, cfg.B);
    }
  }

  const Vector clean = A * smp.x_star;
  smp.eps = apply_noise(clean, cfg.snr_db, rng);
  smp.b = A * smp.x_star + smp.eps;
  return smp;
}

SampleSet sample_set(const Matrix& A, const ProblemConfig& cfg,
                     std::uint64_t first_stream, std::size_t count) {
  SampleSet set;
  set.generator_seed = cfg.seed;
  set.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    set.samples[i] = sample_signal(A, cfg, first_stream + i);
  return set;
}

namespace {

double nmse_from_sums(double err_sq, double truth_sq) {
  if (truth_sq == 0.0)
    throw std::invalid_argument("nmse_db: all ground-truth signals are zero");
  if (err_sq == 0.0) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(err_sq / truth_sq));
}

}  // namespace

double nmse_db(const std::vector<Vector>& estimates, const std::vector<Vector>& truths) {
  if (estimates.empty() || estimates.size() != truths.size())
    throw std::invalid_argument("nmse_db: lists must be nonempty and equal length");
  double err_sq = 0.0, truth_sq = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i].size() != truths[i].size())
      throw std::invalid_argument("nmse_db: estimate/truth size mismatch");
    err_sq += (estimates[i] - truths[i]).squaredNorm();
    truth_sq += truths[i].squaredNorm();
  }
  return nmse_from_sums(err_sq, truth_sq);
}

double nmse_db(const Matrix& estimates, const Matrix& truths) {
  if (estimates.rows() != truths.rows() || estimates.cols() != truths.cols() ||
      estimates.size() == 0)
    throw std::invalid_argument("nmse_db: shape mismatch");
  return nmse_from_sums((estimates - truths).squaredNorm(), truths.squaredNorm());
}

}  // namespace uilab
