#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "uilab/rng.hpp"
#include "uilab/types.hpp"

namespace uilab {

enum class SparsityMode { kBernoulli, kFixedS };
enum class MagnitudeMode { kGaussian, kBounded };

// Describes the measurement setup b = A x* + eps. One config plus one seed
// determines the dictionary and every sample bit-exactly.
struct ProblemConfig {
  Index m = 250;
  Index n = 500;

  SparsityMode sparsity_mode = SparsityMode::kBernoulli;
  double p_b = 0.1;   // bernoulli nonzero probability
  Index s = 4;        // exact support size in fixed_s mode

  MagnitudeMode magnitude_mode = MagnitudeMode::kGaussian;
  double B = 2.0;        // magnitude upper bound in bounded mode
  double B_lower = 0.5;  // magnitude lower bound in bounded mode

  double snr_db = std::numeric_limits<double>::infinity();
  double condition_number = 0.0;  // <= 0 means "none"
  std::uint64_t seed = 1;

  bool has_condition_number() const { return condition_number > 0.0; }
  // Throws std::invalid_argument on violations. Plain generation allows any
  // positive shape; sampling and experiments require m < n.
  void validate(bool require_underdetermined = true) const;
};

struct SignalSample {
  Vector x_star;
  Vector eps;
  Vector b;
  IndexSet support;  // {i : x_star[i] != 0}, ascending
};

struct SampleSet {
  std::vector<SignalSample> samples;
  std::uint64_t generator_seed = 0;
};

// Reserved stream indices; sample streams start at kSampleStreamBase + index.
inline constexpr std::uint64_t kDictionaryStream = 0;
inline constexpr std::uint64_t kSampleStreamBase = 1u << 20;

// Gaussian dictionary, entries N(0, 1/m), columns scaled to unit l2 norm.
Matrix gen_dictionary(const ProblemConfig& cfg);

// Gaussian dictionary with its spectrum replaced by a geometric sequence
// sigma_max..sigma_max/kappa, columns re-normalized afterwards. The column
// scaling perturbs the spectrum, so the realized condition number is
// reported instead of asserted.
Matrix gen_ill_conditioned(const ProblemConfig& cfg, double* realized_kappa = nullptr);

// Exact-SNR noise: eps = z * (||clean|| * 10^(-snr/20) / ||z||) with z
// standard gaussian. Infinite SNR or a zero clean vector give zero noise.
Vector apply_noise(const Vector& clean, double snr_db, Rng& rng);

// One signal/observation pair from the stream (cfg.seed, stream_index).
SignalSample sample_signal(const Matrix& A, const ProblemConfig& cfg,
                           std::uint64_t stream_index);

// Samples with stream indices [first_stream, first_stream + count).
SampleSet sample_set(const Matrix& A, const ProblemConfig& cfg,
                     std::uint64_t first_stream, std::size_t count);

// 10*log10(sum ||xhat - x*||^2 / sum ||x*||^2), clamped below at -320 dB.
// Throws if the lists are empty, differ in length, or all truths are zero.
double nmse_db(const std::vector<Vector>& estimates,
               const std::vector<Vector>& truths);

// Same metric with per-sample columns.
double nmse_db(const Matrix& estimates, const Matrix& truths);

}  // namespace uilab
