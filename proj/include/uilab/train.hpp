#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "uilab/nets.hpp"
#include "uilab/problem.hpp"
#include "uilab/types.hpp"

namespace uilab {

struct TrainConfig {
  double alpha0 = 1e-3;        // stage-1 rate; stages 2/3 use 0.2x and 0.02x
  Index batch_size = 64;
  Index steps_per_stage = 4000;
  double decay_gamma = 0.3;    // per-completed-layer multiplier decay
  Index validation_size = 1000;
  std::uint64_t seed = 7;
  double lambda0 = 0.2;        // threshold scale for the ISTA-equivalent init
  double momentum = 0.0;       // plain SGD when 0
  bool early_stop = false;     // validation-plateau stop, patience 5 evals
  Index eval_every = 500;      // validation cadence in steps

  double alpha1() const { return 0.2 * alpha0; }
  double alpha2() const { return 0.02 * alpha0; }
  void validate() const;
};

// Per-layer gradients, shapes mirroring the network exactly.
struct ParamGrads {
  struct LayerGrads {
    Matrix dW1, dW2, dW;
    double dtheta = 0.0;
  };
  std::vector<LayerGrads> layers;
};

// Per-layer learning multipliers c(.), initialized to 1 and multiplied by
// gamma each time the layer's block (or a later one) completes.
struct LearningMultipliers {
  std::vector<double> values;
};

double loss_mse(const Vector& xK, const Vector& x_star);

// Reverse-mode gradients of ||x^{loss_layer} - x*||^2 through the unrolled
// recurrence. Threshold subgradient convention: d/dv eta(v) = 1 where
// |v| > theta else 0, d/dtheta = -sign(v) there; entries the support
// selection exempts contribute d/dv = 1 and no theta gradient; the selected
// set itself is treated as constant.
ParamGrads backward(const LayerTrace& trace, const NetworkParams& params,
                    const Matrix& A, const SignalSample& sample, Index loss_layer);

// Batched flavor used by the training loop: columns of B / X_star are
// samples, gradients are averaged over the batch. Also returns the batch
// loss mean and the final iterate of the partial forward (depth layers).
struct BatchBackwardResult {
  ParamGrads grads;
  double mean_loss = 0.0;
};
BatchBackwardResult backward_batch(const NetworkParams& params, const Matrix& A,
                                   const Matrix& B, const Matrix& X_star,
                                   Index loss_layer, Index first_trained_layer);

// ISTA-equivalent initialization: W1 = A'/L, W2 = I - W1 A, theta = lambda0/L
// (coupled: W = A/L).
NetworkParams init_params(const Matrix& A, Variant variant, Index K, double L,
                          double lambda0 = 0.2);

struct TrainLogRow {
  Index step = 0;   // global step counter
  int stage = 0;    // 1..3
  Index layer = 0;  // block index tau
  double minibatch_loss = 0.0;
  double validation_nmse_db = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  NetworkParams params;
  std::vector<TrainLogRow> log;
  std::vector<double> final_multipliers;  // per layer, after the last block
  bool diverged = false;
};

// Stream indices reserved for training and validation data.
inline constexpr std::uint64_t kValidationStreamBase = 3u << 20;
inline constexpr std::uint64_t kTrainStreamBase = 4u << 20;

// Stage-wise schedule: for each layer tau, train its own
// parameters at alpha0 with the loss on x^{tau+1}, then all parameters
// through layer tau at alpha1 and alpha2; after the block, multiply the
// multipliers of layers <= tau by gamma. Minibatches come from the seeded
// sample stream; the validation set is fixed up front.
TrainResult stagewise_train(const NetworkParams& init, const Matrix& A,
                            const TrainConfig& cfg, const ProblemConfig& problem);

void save_train_log_csv(const std::string& path, const std::vector<TrainLogRow>& log);

}  // namespace uilab
