#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "uilab/linalg.hpp"
#include "uilab/problem.hpp"
#include "uilab/solvers.hpp"
#include "uilab/train.hpp"

using namespace uilab;

namespace {

Matrix dict(Index m, Index n, std::uint64_t seed) {
  ProblemConfig cfg;
  cfg.m = m;
  cfg.n = n;
  cfg.seed = seed;
  return gen_dictionary(cfg);
}

NetworkParams random_net(Variant variant, Index m, Index n, Index K, std::uint64_t seed) {
  Rng rng(seed);
  NetworkParams p;
  p.variant = variant;
  for (Index k = 0; k < K; ++k) {
    LayerParams l;
    if (variant == Variant::kFull) {
      l.W1 = Matrix(n, m);
      l.W2 = Matrix(n, n);
      for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < n; ++i) l.W1(i, j) = 0.4 * rng.normal();
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) l.W2(i, j) = 0.3 * rng.normal() / std::sqrt(double(n));
    } else {
      l.W = Matrix(m, n);
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i) l.W(i, j) = 0.4 * rng.normal();
    }
    l.theta = 0.1 + 0.05 * rng.uniform01();
    p.layers.push_back(std::move(l));
  }
  return p;
}

double forward_loss(const NetworkParams& p, const Matrix& A, const SignalSample& smp,
                    Index loss_layer) {
  const LayerTrace t = forward(p, A, smp.b);
  return loss_mse(t.iterates[static_cast<std::size_t>(loss_layer)], smp.x_star);
}

// Pre-activation margin to the nearest threshold kink across all layers.
double kink_margin(const NetworkParams& p, const Matrix& A, const Vector& b) {
  double margin = std::numeric_limits<double>::infinity();
  Vector x = Vector::Zero(p.n());
  for (const auto& layer : p.layers) {
    Vector v;
    if (p.variant == Variant::kFull) {
      v = layer.W1 * b;
      v.noalias() += layer.W2 * x;
    } else {
      Vector r = b;
      r.noalias() -= A * x;
      v = x;
      v.noalias() += layer.W.transpose() * r;
    }
    for (Index i = 0; i < v.size(); ++i)
      margin = std::min(margin, std::abs(std::abs(v[i]) - layer.theta));
    x = ss_threshold(v, layer.theta, layer.ss_count);
  }
  return margin;
}

struct FlatGrads {
  std::vector<double> values;
  std::vector<std::string> names;
};

FlatGrads flatten(const ParamGrads& g, Variant variant) {
  FlatGrads f;
  for (std::size_t k = 0; k < g.layers.size(); ++k) {
    const auto& l = g.layers[k];
    if (variant == Variant::kFull) {
      for (Index c = 0; c < l.dW1.cols(); ++c)
        for (Index r = 0; r < l.dW1.rows(); ++r) f.values.push_back(l.dW1(r, c));
      for (Index c = 0; c < l.dW2.cols(); ++c)
        for (Index r = 0; r < l.dW2.rows(); ++r) f.values.push_back(l.dW2(r, c));
    } else {
      for (Index c = 0; c < l.dW.cols(); ++c)
        for (Index r = 0; r < l.dW.rows(); ++r) f.values.push_back(l.dW(r, c));
    }
    f.values.push_back(l.dtheta);
  }
  return f;
}

// Central finite differences over every parameter.
std::vector<double> fd_gradient(NetworkParams p, const Matrix& A, const SignalSample& smp,
                                Index loss_layer, double h = 1e-6) {
  std::vector<double> out;
  auto probe = [&](double* slot) {
    const double saved = *slot;
    *slot = saved + h;
    const double fp = forward_loss(p, A, smp, loss_layer);
    *slot = saved - h;
    const double fm = forward_loss(p, A, smp, loss_layer);
    *slot = saved;
    out.push_back((fp - fm) / (2.0 * h));
  };
  for (auto& l : p.layers) {
    if (p.variant == Variant::kFull) {
      for (Index c = 0; c < l.W1.cols(); ++c)
        for (Index r = 0; r < l.W1.rows(); ++r) probe(&l.W1(r, c));
      for (Index c = 0; c < l.W2.cols(); ++c)
        for (Index r = 0; r < l.W2.rows(); ++r) probe(&l.W2(r, c));
    } else {
      for (Index c = 0; c < l.W.cols(); ++c)
        for (Index r = 0; r < l.W.rows(); ++r) probe(&l.W(r, c));
    }
    probe(&l.theta);
  }
  return out;
}

}  // namespace

TEST_CASE("loss_mse") {
  Vector a(3), b(3);
  a << 1, 2, 3;
  b << 1, 2, 3;
  CHECK(loss_mse(a, b) == 0.0);
  CHECK(loss_mse(Vector::Zero(3), b) == doctest::Approx(14.0));
  Rng rng(3);
  Vector x(20), y(20);
  for (Index i = 0; i < 20; ++i) {
    x[i] = rng.normal();
    y[i] = rng.normal();
  }
  double oracle = 0.0;
  for (Index i = 0; i < 20; ++i) oracle += (x[i] - y[i]) * (x[i] - y[i]);
  CHECK(loss_mse(x, y) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("backward: dead network has zero gradients") {
  const Matrix A = dict(4, 8, 50);
  NetworkParams p = random_net(Variant::kCoupled, 4, 8, 2, 51);
  for (auto& l : p.layers) l.theta = 1e6;
  ProblemConfig cfg;
  cfg.m = 4;
  cfg.n = 8;
  cfg.seed = 50;
  const SignalSample smp = sample_signal(A, cfg, 0);
  LayerTrace t = forward(p, A, smp.b);
  const ParamGrads g = backward(t, p, A, smp, 2);
  for (const auto& l : g.layers) {
    CHECK(l.dW.cwiseAbs().maxCoeff() == 0.0);
    CHECK(l.dtheta == 0.0);
  }
}

TEST_CASE("backward matches the hand-derived scalar chain rule") {
  // m = n = 1, one coupled layer: v = x0 + w(b - a x0) = w b  (x0 = 0),
  // x1 = v - theta sign(v) when |v| > theta,
  // loss = (x1 - x*)^2.
  // d loss/dw = 2 (x1 - x*) b, d loss/dtheta = -2 (x1 - x*) sign(v).
  Matrix A(1, 1);
  A << 0.9;
  NetworkParams p;
  p.variant = Variant::kCoupled;
  LayerParams l;
  l.W = Matrix(1, 1);
  l.W << 1.1;
  l.theta = 0.2;
  p.layers.push_back(l);

  SignalSample smp;
  smp.x_star = Vector::Constant(1, 1.5);
  smp.eps = Vector::Zero(1);
  smp.b = Vector::Constant(1, 2.0);

  LayerTrace t = forward(p, A, smp.b);
  const double v = 1.1 * 2.0;
  const double x1 = v - 0.2;
  REQUIRE(t.iterates[1][0] == doctest::Approx(x1).epsilon(1e-15));
  const ParamGrads g = backward(t, p, A, smp, 1);
  CHECK(g.layers[0].dW(0, 0) == doctest::Approx(2.0 * (x1 - 1.5) * 2.0).epsilon(1e-12));
  CHECK(g.layers[0].dtheta == doctest::Approx(-2.0 * (x1 - 1.5)).epsilon(1e-12));
}

TEST_CASE("backward matches central finite differences away from kinks") {
  int tested = 0;
  for (std::uint64_t seed = 60; tested < 6 && seed < 200; ++seed) {
    const Index m = 4, n = 7, K = 2;
    const Matrix A = dict(m, n, seed);
    const Variant variant = (seed % 2 == 0) ? Variant::kCoupled : Variant::kFull;
    NetworkParams p = random_net(variant, m, n, K, seed + 1);
    if (seed % 3 == 0) {  // exercise the support-selection path too
      p.layers[0].ss_count = 2;
      p.layers[1].ss_count = 3;
    }
    ProblemConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.seed = seed;
    const SignalSample smp = sample_signal(A, cfg, 0);
    if (kink_margin(p, A, smp.b) < 1e-3) continue;  // resample: too close to a kink
    ++tested;

    LayerTrace t = forward(p, A, smp.b);
    const FlatGrads an = flatten(backward(t, p, A, smp, K), variant);
    const std::vector<double> fd = fd_gradient(p, A, smp, K);
    REQUIRE(an.values.size() == fd.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
      const double denom = std::max({std::abs(an.values[i]), std::abs(fd[i]), 1e-3});
      worst = std::max(worst, std::abs(an.values[i] - fd[i]) / denom);
    }
    CHECK(worst < 1e-5);
  }
  CHECK(tested == 6);
}

TEST_CASE("backward_batch equals averaged per-sample gradients") {
  const Index m = 5, n = 9, K = 3;
  const Matrix A = dict(m, n, 70);
  const NetworkParams p = random_net(Variant::kCoupled, m, n, K, 71);
  ProblemConfig cfg;
  cfg.m = m;
  cfg.n = n;
  cfg.seed = 70;
  const Index N = 4;
  Matrix B(m, N), X(n, N);
  std::vector<SignalSample> samples;
  for (Index j = 0; j < N; ++j) {
    samples.push_back(sample_signal(A, cfg, static_cast<std::uint64_t>(j)));
    B.col(j) = samples.back().b;
    X.col(j) = samples.back().x_star;
  }
  const BatchBackwardResult bb = backward_batch(p, A, B, X, K, 0);

  ParamGrads sum;
  double loss_sum = 0.0;
  for (Index j = 0; j < N; ++j) {
    LayerTrace t = forward(p, A, samples[static_cast<std::size_t>(j)].b);
    loss_sum += loss_mse(t.iterates.back(), samples[static_cast<std::size_t>(j)].x_star);
    const ParamGrads g = backward(t, p, A, samples[static_cast<std::size_t>(j)], K);
    if (sum.layers.empty()) {
      sum = g;
    } else {
      for (std::size_t k = 0; k < g.layers.size(); ++k) {
        sum.layers[k].dW += g.layers[k].dW;
        sum.layers[k].dtheta += g.layers[k].dtheta;
      }
    }
  }
  CHECK(bb.mean_loss == doctest::Approx(loss_sum / N).epsilon(1e-12));
  for (std::size_t k = 0; k < sum.layers.size(); ++k) {
    CHECK((bb.grads.layers[k].dW - sum.layers[k].dW / N).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(bb.grads.layers[k].dtheta == doctest::Approx(sum.layers[k].dtheta / N).epsilon(1e-10));
  }
}

TEST_CASE("init_params reproduces ISTA and zero coupling residual") {
  const Matrix A = dict(6, 12, 80);
  const double L = lipschitz_L(A);
  const NetworkParams full = init_params(A, Variant::kFull, 4, L, 0.2);
  for (Index k = 0; k < 4; ++k) CHECK(coupling_residual(full, A, k) <= 1e-12);

  ProblemConfig cfg;
  cfg.m = 6;
  cfg.n = 12;
  cfg.seed = 80;
  const Vector b = sample_signal(A, cfg, 0).b;
  SolverConfig sc;
  sc.lambda = 0.2;
  sc.max_iters = 4;
  sc.L = L;
  const IterateTrace it = ista(A, b, sc);
  const LayerTrace lt = forward_lista(full, b);
  for (std::size_t k = 0; k < lt.iterates.size(); ++k)
    CHECK(lt.iterates[k] == it.iterates[k]);

  // initialized CPSS with zero counts matches initialized CP
  const NetworkParams cp = init_params(A, Variant::kCoupled, 4, L, 0.2);
  const LayerTrace a1 = forward_lista_cp(cp, A, b);
  const LayerTrace a2 = forward_lista_cpss(cp, A, b);
  for (std::size_t k = 0; k < a1.iterates.size(); ++k)
    CHECK(a1.iterates[k] == a2.iterates[k]);
}

TEST_CASE("stagewise_train bookkeeping") {
  const Matrix A = dict(6, 12, 90);
  const NetworkParams init = init_params(A, Variant::kCoupled, 2, lipschitz_L(A), 0.2);
  ProblemConfig problem;
  problem.m = 6;
  problem.n = 12;
  problem.seed = 90;

  SUBCASE("zero steps returns init unchanged") {
    TrainConfig cfg;
    cfg.steps_per_stage = 0;
    cfg.validation_size = 4;
    const TrainResult r = stagewise_train(init, A, cfg, problem);
    for (Index k = 0; k < 2; ++k) {
      CHECK(r.params.layers[k].W == init.layers[k].W);
      CHECK(r.params.layers[k].theta == init.layers[k].theta);
    }
  }

  SUBCASE("training is deterministic bit for bit") {
    TrainConfig cfg;
    cfg.steps_per_stage = 20;
    cfg.batch_size = 8;
    cfg.validation_size = 8;
    cfg.alpha0 = 1e-3;
    const TrainResult r1 = stagewise_train(init, A, cfg, problem);
    const TrainResult r2 = stagewise_train(init, A, cfg, problem);
    for (Index k = 0; k < 2; ++k) {
      CHECK(r1.params.layers[k].W == r2.params.layers[k].W);
      CHECK(r1.params.layers[k].theta == r2.params.layers[k].theta);
    }
    REQUIRE(r1.log.size() == r2.log.size());
    for (std::size_t i = 0; i < r1.log.size(); ++i)
      CHECK(r1.log[i].minibatch_loss == r2.log[i].minibatch_loss);
  }

  SUBCASE("log covers every stage of every layer") {
    TrainConfig cfg;
    cfg.steps_per_stage = 5;
    cfg.batch_size = 4;
    cfg.validation_size = 4;
    const TrainResult r = stagewise_train(init, A, cfg, problem);
    CHECK(r.log.size() == 2 * 3 * 5);
    int stage1_rows = 0;
    for (const auto& row : r.log)
      if (row.stage == 1) ++stage1_rows;
    CHECK(stage1_rows == 2 * 5);
  }
}

TEST_CASE("divergence aborts with the log intact") {
  const Matrix A = dict(6, 12, 95);
  const NetworkParams init = init_params(A, Variant::kCoupled, 2, lipschitz_L(A), 0.2);
  ProblemConfig problem;
  problem.m = 6;
  problem.n = 12;
  problem.seed = 95;
  TrainConfig cfg;
  cfg.alpha0 = 1e8;  // guaranteed blow-up
  cfg.steps_per_stage = 50;
  cfg.batch_size = 4;
  cfg.validation_size = 4;
  const TrainResult r = stagewise_train(init, A, cfg, problem);
  CHECK(r.diverged);
  CHECK(!r.log.empty());
}

TEST_CASE("stage-1 loss trends down on the easiest stage") {
  ProblemConfig problem;
  problem.m = 40;
  problem.n = 80;
  problem.seed = 91;
  const Matrix A = gen_dictionary(problem);
  const NetworkParams init = init_params(A, Variant::kCoupled, 1, lipschitz_L(A), 0.2);
  TrainConfig cfg;
  cfg.steps_per_stage = 300;
  cfg.batch_size = 16;
  cfg.validation_size = 16;
  cfg.alpha0 = 5e-3;
  const TrainResult r = stagewise_train(init, A, cfg, problem);
  REQUIRE_FALSE(r.diverged);
  double first = 0.0, last = 0.0;
  const std::size_t tenth = 30;
  for (std::size_t i = 0; i < tenth; ++i) first += r.log[i].minibatch_loss;
  for (std::size_t i = 0; i < tenth; ++i) last += r.log[300 - tenth + i].minibatch_loss;
  CHECK(last <= first);
}

TEST_CASE("multiplier ledger: effective rates decay as gamma powers") {
  const double gamma = 0.3;
  std::vector<double> multipliers(3, 1.0);
  std::vector<std::vector<double>> seen_at_block;
  for (Index tau = 0; tau < 3; ++tau) {
    seen_at_block.push_back(multipliers);
    for (Index k = 0; k <= tau; ++k) multipliers[static_cast<std::size_t>(k)] *= gamma;
  }
  // when block tau trains, layer i < tau has multiplier gamma^(tau - i)
  for (Index tau = 0; tau < 3; ++tau)
    for (Index i = 0; i <= tau; ++i)
      CHECK(seen_at_block[static_cast<std::size_t>(tau)][static_cast<std::size_t>(i)] ==
            doctest::Approx(std::pow(gamma, double(tau - i))).epsilon(1e-12));
  // after the final block, layer i has decayed (K - i) times
  for (Index i = 0; i < 3; ++i)
    CHECK(multipliers[static_cast<std::size_t>(i)] ==
          doctest::Approx(std::pow(gamma, double(3 - i))).epsilon(1e-12));

  // and the trainer reports exactly that ledger
  const Matrix A = dict(6, 12, 92);
  const NetworkParams init = init_params(A, Variant::kCoupled, 3, lipschitz_L(A), 0.2);
  ProblemConfig problem;
  problem.m = 6;
  problem.n = 12;
  problem.seed = 92;
  TrainConfig cfg;
  cfg.steps_per_stage = 2;
  cfg.batch_size = 2;
  cfg.validation_size = 2;
  cfg.decay_gamma = gamma;
  const TrainResult r = stagewise_train(init, A, cfg, problem);
  REQUIRE(r.final_multipliers.size() == 3);
  for (Index i = 0; i < 3; ++i)
    CHECK(r.final_multipliers[static_cast<std::size_t>(i)] ==
          doctest::Approx(std::pow(gamma, double(3 - i))).epsilon(1e-12));
}
