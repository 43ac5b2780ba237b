#include "uilab/train.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "uilab/matrix_io.hpp"

namespace uilab {

void TrainConfig::validate() const {
  if (alpha0 <= 0.0) throw std::invalid_argument("train: alpha0 must be > 0");
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (steps_per_stage < 0) throw std::invalid_argument("train: steps_per_stage must be >= 0");
  if (!(decay_gamma > 0.0 && decay_gamma <= 1.0))
    throw std::invalid_argument("train: decay_gamma must be in (0, 1]");
  if (validation_size < 1) throw std::invalid_argument("train: validation_size must be >= 1");
  if (eval_every < 1) throw std::invalid_argument("train: eval_every must be >= 1");
}

double loss_mse(const Vector& xK, const Vector& x_star) {
  if (xK.size() != x_star.size()) throw std::invalid_argument("loss_mse: length mismatch");
  return (xK - x_star).squaredNorm();
}

namespace {

// Threshold masks for one pre-activation column: pass = entries that clear
// the threshold (identity slope), shrunk = passing entries that are not
// exempted by support selection (these carry the theta gradient).
struct ThresholdMasks {
  Eigen::ArrayXd pass;    // 1 where |v| > theta
  Eigen::ArrayXd shrunk;  // 1 where |v| > theta and not selected
};

ThresholdMasks threshold_masks(const Vector& v, double theta, Index ss_count) {
  ThresholdMasks m;
  const Index n = v.size();
  m.pass = Eigen::ArrayXd::Zero(n);
  m.shrunk = Eigen::ArrayXd::Zero(n);
  Eigen::Array<bool, Eigen::Dynamic, 1> selected;
  select_support_mask(v, ss_count, selected);
  for (Index i = 0; i < n; ++i) {
    if (std::abs(v[i]) > theta) {
      m.pass[i] = 1.0;
      if (!selected[i]) m.shrunk[i] = 1.0;
    }
  }
  return m;
}

Vector preactivation(const NetworkParams& params, const Matrix& A, const Vector& b,
                     const Vector& x, Index k) {
  const auto& layer = params.layers[static_cast<std::size_t>(k)];
  if (params.variant == Variant::kFull) {
    Vector v = layer.W1 * b;
    v.noalias() += layer.W2 * x;
    return v;
  }
  Vector residual = b;
  residual.noalias() -= A * x;
  Vector v = x;
  v.noalias() += layer.W.transpose() * residual;
  return v;
}

ParamGrads zero_grads(const NetworkParams& params) {
  ParamGrads g;
  g.layers.resize(params.layers.size());
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    const auto& l = params.layers[k];
    auto& gl = g.layers[k];
    if (params.variant == Variant::kFull) {
      gl.dW1 = Matrix::Zero(l.W1.rows(), l.W1.cols());
      gl.dW2 = Matrix::Zero(l.W2.rows(), l.W2.cols());
    } else {
      gl.dW = Matrix::Zero(l.W.rows(), l.W.cols());
    }
  }
  return g;
}

}  // namespace

ParamGrads backward(const LayerTrace& trace, const NetworkParams& params,
                    const Matrix& A, const SignalSample& sample, Index loss_layer) {
  params.validate();
  if (loss_layer < 1 || loss_layer > params.depth() ||
      static_cast<Index>(trace.iterates.size()) <= loss_layer)
    throw std::invalid_argument("backward: loss_layer out of range");
  if (trace.iterates.front().size() != params.n())
    throw std::invalid_argument("backward: trace does not match params");

  ParamGrads grads = zero_grads(params);
  Vector g = 2.0 * (trace.iterates[static_cast<std::size_t>(loss_layer)] - sample.x_star);
  for (Index k = loss_layer - 1; k >= 0; --k) {
    const auto& layer = params.layers[static_cast<std::size_t>(k)];
    const Vector& x = trace.iterates[static_cast<std::size_t>(k)];
    const Vector v = preactivation(params, A, sample.b, x, k);
    const ThresholdMasks masks = threshold_masks(v, layer.theta, layer.ss_count);

    const Vector gv = (g.array() * masks.pass).matrix();
    double dtheta = 0.0;
    for (Index i = 0; i < v.size(); ++i)
      if (masks.shrunk[i] != 0.0) dtheta -= (v[i] > 0.0 ? 1.0 : -1.0) * g[i];

    auto& gl = grads.layers[static_cast<std::size_t>(k)];
    gl.dtheta = dtheta;
    if (params.variant == Variant::kFull) {
      gl.dW1.noalias() += gv * sample.b.transpose();
      gl.dW2.noalias() += gv * x.transpose();
      g.noalias() = layer.W2.transpose() * gv;
    } else {
      Vector residual = sample.b;
      residual.noalias() -= A * x;
      gl.dW.noalias() += residual * gv.transpose();
      // d/dx of x + W'(b - Ax) is I - W'A, so pull g back through its transpose
      g = gv;
      g.noalias() -= A.transpose() * (layer.W * gv);
    }
  }
  return grads;
}

BatchBackwardResult backward_batch(const NetworkParams& params, const Matrix& A,
                                   const Matrix& B, const Matrix& X_star,
                                   Index loss_layer, Index first_trained_layer) {
  params.validate();
  const Index N = B.cols();
  if (N == 0 || X_star.cols() != N) throw std::invalid_argument("backward_batch: bad batch");
  if (loss_layer < 1 || loss_layer > params.depth())
    throw std::invalid_argument("backward_batch: loss_layer out of range");

  // forward, keeping iterates and pre-activations
  std::vector<Matrix> xs, vs;
  xs.push_back(Matrix::Zero(params.n(), N));
  for (Index k = 0; k < loss_layer; ++k) {
    const auto& layer = params.layers[static_cast<std::size_t>(k)];
    Matrix V;
    if (params.variant == Variant::kFull) {
      V.noalias() = layer.W1 * B;
      V.noalias() += layer.W2 * xs.back();
    } else {
      Matrix residual = B;
      residual.noalias() -= A * xs.back();
      V = xs.back();
      V.noalias() += layer.W.transpose() * residual;
    }
    Matrix X(params.n(), N);
    for (Index j = 0; j < N; ++j)
      X.col(j) = ss_threshold(V.col(j), layer.theta, layer.ss_count);
    vs.push_back(std::move(V));
    xs.push_back(std::move(X));
  }

  BatchBackwardResult out;
  out.grads = zero_grads(params);
  const Matrix diff = xs.back() - X_star;
  out.mean_loss = diff.squaredNorm() / static_cast<double>(N);

  Matrix G = 2.0 * diff;
  for (Index k = loss_layer - 1; k >= first_trained_layer; --k) {
    const auto& layer = params.layers[static_cast<std::size_t>(k)];
    const Matrix& V = vs[static_cast<std::size_t>(k)];
    const Matrix& X = xs[static_cast<std::size_t>(k)];

    Matrix GV(G.rows(), N);
    double dtheta = 0.0;
    for (Index j = 0; j < N; ++j) {
      const ThresholdMasks masks = threshold_masks(V.col(j), layer.theta, layer.ss_count);
      GV.col(j) = (G.col(j).array() * masks.pass).matrix();
      for (Index i = 0; i < V.rows(); ++i)
        if (masks.shrunk[i] != 0.0) dtheta -= (V(i, j) > 0.0 ? 1.0 : -1.0) * G(i, j);
    }

    auto& gl = out.grads.layers[static_cast<std::size_t>(k)];
    const double inv_n = 1.0 / static_cast<double>(N);
    gl.dtheta = dtheta * inv_n;
    if (params.variant == Variant::kFull) {
      gl.dW1.noalias() = GV * B.transpose() * inv_n;
      gl.dW2.noalias() = GV * X.transpose() * inv_n;
      if (k > first_trained_layer) G.noalias() = layer.W2.transpose() * GV;
    } else {
      Matrix residual = B;
      residual.noalias() -= A * X;
      gl.dW.noalias() = residual * GV.transpose() * inv_n;
      if (k > first_trained_layer) {
        G = GV;
        G.noalias() -= A.transpose() * (layer.W * GV);
      }
    }
  }
  return out;
}

NetworkParams init_params(const Matrix& A, Variant variant, Index K, double L,
                          double lambda0) {
  if (K < 1) throw std::invalid_argument("init_params: K must be >= 1");
  if (L <= 0.0) throw std::invalid_argument("init_params: L must be > 0");
  NetworkParams params;
  params.variant = variant;
  LayerParams proto;
  proto.theta = lambda0 / L;
  if (variant == Variant::kFull) {
    proto.W1 = A.transpose() / L;
    proto.W2 = Matrix::Identity(A.cols(), A.cols()) - proto.W1 * A;
  } else {
    proto.W = A / L;
  }
  params.layers.assign(static_cast<std::size_t>(K), proto);
  return params;
}

namespace {

struct SgdState {
  std::vector<ParamGrads::LayerGrads> velocity;  // allocated lazily when momentum > 0
};

void sgd_update(NetworkParams& params, const ParamGrads& grads, Index first, Index last,
                double base_rate, const std::vector<double>& multipliers,
                double momentum, SgdState& state) {
  if (momentum > 0.0 && state.velocity.empty()) {
    ParamGrads z;
    z.layers.resize(params.layers.size());
    state.velocity = z.layers;
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
      const auto& l = params.layers[k];
      auto& v = state.velocity[k];
      if (params.variant == Variant::kFull) {
        v.dW1 = Matrix::Zero(l.W1.rows(), l.W1.cols());
        v.dW2 = Matrix::Zero(l.W2.rows(), l.W2.cols());
      } else {
        v.dW = Matrix::Zero(l.W.rows(), l.W.cols());
      }
    }
  }
  for (Index k = first; k <= last; ++k) {
    auto& l = params.layers[static_cast<std::size_t>(k)];
    const auto& g = grads.layers[static_cast<std::size_t>(k)];
    const double rate = base_rate * multipliers[static_cast<std::size_t>(k)];
    if (momentum > 0.0) {
      auto& v = state.velocity[static_cast<std::size_t>(k)];
      v.dtheta = momentum * v.dtheta + g.dtheta;
      if (params.variant == Variant::kFull) {
        v.dW1 = momentum * v.dW1 + g.dW1;
        v.dW2 = momentum * v.dW2 + g.dW2;
        l.W1 -= rate * v.dW1;
        l.W2 -= rate * v.dW2;
      } else {
        v.dW = momentum * v.dW + g.dW;
        l.W -= rate * v.dW;
      }
      l.theta = std::max(0.0, l.theta - rate * v.dtheta);
    } else {
      if (params.variant == Variant::kFull) {
        l.W1 -= rate * g.dW1;
        l.W2 -= rate * g.dW2;
      } else {
        l.W -= rate * g.dW;
      }
      l.theta = std::max(0.0, l.theta - rate * g.dtheta);
    }
  }
}

}  // namespace

TrainResult stagewise_train(const NetworkParams& init, const Matrix& A,
                            const TrainConfig& cfg, const ProblemConfig& problem) {
  cfg.validate();
  init.validate();
  if (init.m() != A.rows() || init.n() != A.cols())
    throw std::invalid_argument("stagewise_train: init does not match A");

  TrainResult result;
  result.params = init;
  const Index K = init.depth();

  ProblemConfig data_cfg = problem;
  data_cfg.seed = cfg.seed;

  // fixed validation set, batched once
  Matrix val_b(A.rows(), cfg.validation_size);
  Matrix val_x(A.cols(), cfg.validation_size);
  for (Index j = 0; j < cfg.validation_size; ++j) {
    const SignalSample s = sample_signal(A, data_cfg, kValidationStreamBase + j);
    val_b.col(j) = s.b;
    val_x.col(j) = s.x_star;
  }

  std::vector<double> multipliers(static_cast<std::size_t>(K), 1.0);
  std::uint64_t next_stream = kTrainStreamBase;
  Index global_step = 0;
  SgdState sgd_state;

  Matrix batch_b(A.rows(), cfg.batch_size);
  Matrix batch_x(A.cols(), cfg.batch_size);

  for (Index tau = 0; tau < K; ++tau) {
    const Index loss_layer = tau + 1;
    const struct {
      int id;
      double rate;
      Index first;
    } stages[3] = {{1, cfg.alpha0, tau}, {2, cfg.alpha1(), Index{0}}, {3, cfg.alpha2(), Index{0}}};

    for (const auto& stage : stages) {
      double best_val = std::numeric_limits<double>::infinity();
      int evals_since_best = 0;
      for (Index step = 0; step < cfg.steps_per_stage; ++step) {
        for (Index j = 0; j < cfg.batch_size; ++j) {
          const SignalSample s = sample_signal(A, data_cfg, next_stream++);
          batch_b.col(j) = s.b;
          batch_x.col(j) = s.x_star;
        }
        const BatchBackwardResult bb =
            backward_batch(result.params, A, batch_b, batch_x, loss_layer, stage.first);
        if (!std::isfinite(bb.mean_loss)) {
          result.diverged = true;
          result.final_multipliers = multipliers;
          return result;
        }
        sgd_update(result.params, bb.grads, stage.first, tau, stage.rate, multipliers,
                   cfg.momentum, sgd_state);

        TrainLogRow row;
        row.step = global_step++;
        row.stage = stage.id;
        row.layer = tau;
        row.minibatch_loss = bb.mean_loss;
        const bool eval_now = (step + 1) % cfg.eval_every == 0 || step + 1 == cfg.steps_per_stage;
        if (eval_now) {
          NetworkParams head = result.params;
          head.layers.resize(static_cast<std::size_t>(loss_layer));
          const BatchTrace vt = forward_batch(head, A, val_b);
          row.validation_nmse_db = nmse_db(vt.iterates.back(), val_x);
          if (cfg.early_stop) {
            if (row.validation_nmse_db < best_val - 1e-3) {
              best_val = row.validation_nmse_db;
              evals_since_best = 0;
            } else if (++evals_since_best >= 5) {
              result.log.push_back(row);
              break;
            }
          }
        }
        result.log.push_back(row);
      }
    }
    for (Index k = 0; k <= tau; ++k) multipliers[static_cast<std::size_t>(k)] *= cfg.decay_gamma;
  }
  result.final_multipliers = multipliers;
  return result;
}

void save_train_log_csv(const std::string& path, const std::vector<TrainLogRow>& log) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "step,stage,layer,minibatch_loss,validation_nmse_db\n";
  for (const auto& r : log) {
    os << r.step << ',' << r.stage << ',' << r.layer << ',' << format_double(r.minibatch_loss)
       << ',';
    if (std::isfinite(r.validation_nmse_db)) os << format_double(r.validation_nmse_db);
    os << '\n';
  }
}

}  // namespace uilab
