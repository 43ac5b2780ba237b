#include "uilab/nets.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "uilab/linalg.hpp"

namespace uilab {

Index NetworkParams::m() const {
  if (layers.empty()) return 0;
  return variant == Variant::kFull ? layers.front().W1.cols() : layers.front().W.rows();
}

Index NetworkParams::n() const {
  if (layers.empty()) return 0;
  return variant == Variant::kFull ? layers.front().W1.rows() : layers.front().W.cols();
}

void NetworkParams::validate() const {
  if (layers.empty()) throw std::invalid_argument("net: needs at least one layer");
  const Index mm = m(), nn = n();
  for (const auto& l : layers) {
    if (variant == Variant::kFull) {
      if (l.W1.rows() != nn || l.W1.cols() != mm || l.W2.rows() != nn || l.W2.cols() != nn)
        throw std::invalid_argument("net: inconsistent full-variant layer shapes");
    } else {
      if (l.W.rows() != mm || l.W.cols() != nn)
        throw std::invalid_argument("net: inconsistent coupled-variant layer shapes");
    }
    if (!(l.theta >= 0.0) || !std::isfinite(l.theta))
      throw std::invalid_argument("net: theta must be finite and >= 0");
    if (l.ss_count < 0 || l.ss_count > nn)
      throw std::invalid_argument("net: ss_count out of range");
  }
}

bool NetworkParams::has_support_selection() const {
  for (const auto& l : layers)
    if (l.ss_count > 0) return true;
  return false;
}

namespace {

// Shared forward engine. ss_threshold(count=0) and soft_threshold agree bit
// for bit, so the plain variants run through the same path.
LayerTrace run_forward(const NetworkParams& params, const Matrix* A, const Vector& b) {
  params.validate();
  const Index n = params.n();
  if (b.size() != params.m()) throw std::invalid_argument("forward: bad b length");

  LayerTrace trace;
  Vector x = Vector::Zero(n);
  trace.iterates.push_back(x);
  Vector v(n);
  for (const auto& layer : params.layers) {
    if (params.variant == Variant::kFull) {
      v = layer.W1 * b;
      v.noalias() += layer.W2 * x;
    } else {
      Vector residual = b;
      residual.noalias() -= (*A) * x;
      v = x;
      v.noalias() += layer.W.transpose() * residual;
    }
    trace.selected.push_back(select_support(v, layer.ss_count));
    x = ss_threshold(v, layer.theta, layer.ss_count);
    trace.iterates.push_back(x);
  }
  return trace;
}

}  // namespace

LayerTrace forward_lista(const NetworkParams& params, const Vector& b) {
  if (params.variant != Variant::kFull)
    throw std::invalid_argument("forward_lista: expects the full variant");
  if (params.has_support_selection())
    throw std::invalid_argument("forward_lista: ss_count must be 0 (use forward_lista_ss)");
  return run_forward(params, nullptr, b);
}

LayerTrace forward_lista_ss(const NetworkParams& params, const Vector& b) {
  if (params.variant != Variant::kFull)
    throw std::invalid_argument("forward_lista_ss: expects the full variant");
  return run_forward(params, nullptr, b);
}

LayerTrace forward_lista_cp(const NetworkParams& params, const Matrix& A, const Vector& b) {
  if (params.variant != Variant::kCoupled)
    throw std::invalid_argument("forward_lista_cp: expects the coupled variant");
  if (params.has_support_selection())
    throw std::invalid_argument("forward_lista_cp: ss_count must be 0 (use forward_lista_cpss)");
  return run_forward(params, &A, b);
}

LayerTrace forward_lista_cpss(const NetworkParams& params, const Matrix& A, const Vector& b) {
  if (params.variant != Variant::kCoupled)
    throw std::invalid_argument("forward_lista_cpss: expects the coupled variant");
  return run_forward(params, &A, b);
}

LayerTrace forward(const NetworkParams& params, const Matrix& A, const Vector& b) {
  return run_forward(params, &A, b);
}

BatchTrace forward_batch(const NetworkParams& params, const Matrix& A, const Matrix& B,
                         bool batch_support) {
  params.validate();
  const Index n = params.n();
  const Index N = B.cols();
  if (B.rows() != params.m()) throw std::invalid_argument("forward_batch: bad B rows");

  BatchTrace trace;
  Matrix X = Matrix::Zero(n, N);
  trace.iterates.push_back(X);
  Matrix V(n, N);
  Eigen::Array<bool, Eigen::Dynamic, 1> mask;
  for (const auto& layer : params.layers) {
    if (params.variant == Variant::kFull) {
      V.noalias() = layer.W1 * B;
      V.noalias() += layer.W2 * X;
    } else {
      Matrix residual = B;
      residual.noalias() -= A * X;
      V = X;
      V.noalias() += layer.W.transpose() * residual;
    }
    std::vector<IndexSet> sel(static_cast<std::size_t>(N));
    if (batch_support && layer.ss_count > 0) {
      sel = select_support_batch(V, layer.ss_count);
      for (Index j = 0; j < N; ++j) {
        mask.setConstant(n, false);
        for (Index i : sel[static_cast<std::size_t>(j)]) mask[i] = true;
        X.col(j) = ss_threshold(V.col(j), layer.theta, mask);
      }
    } else {
      for (Index j = 0; j < N; ++j) {
        sel[static_cast<std::size_t>(j)] = select_support(V.col(j), layer.ss_count);
        X.col(j) = ss_threshold(V.col(j), layer.theta, layer.ss_count);
      }
    }
    trace.selected.push_back(std::move(sel));
    trace.iterates.push_back(X);
  }
  return trace;
}

void annotate(LayerTrace& trace, const Vector& x_star) {
  trace.l1_err.clear();
  trace.l2_err.clear();
  trace.supports.clear();
  for (const auto& x : trace.iterates) {
    trace.l1_err.push_back((x - x_star).lpNorm<1>());
    trace.l2_err.push_back((x - x_star).norm());
    IndexSet sup;
    for (Index i = 0; i < x.size(); ++i)
      if (x[i] != 0.0) sup.push_back(i);
    trace.supports.push_back(std::move(sup));
  }
}

NetworkParams to_full(const NetworkParams& params, const Matrix& A) {
  params.validate();
  if (params.variant == Variant::kFull) return params;
  NetworkParams full;
  full.variant = Variant::kFull;
  full.layers.reserve(params.layers.size());
  const Matrix eye = Matrix::Identity(params.n(), params.n());
  for (const auto& l : params.layers) {
    LayerParams fl;
    fl.W1 = l.W.transpose();
    fl.W2 = eye - fl.W1 * A;
    fl.theta = l.theta;
    fl.ss_count = l.ss_count;
    full.layers.push_back(std::move(fl));
  }
  return full;
}

double coupling_residual(const NetworkParams& params, const Matrix& A, Index k) {
  if (k < 0 || k >= params.depth()) throw std::invalid_argument("coupling_residual: bad layer");
  // coupled nets go through to_full; their residual is the zero matrix
  const NetworkParams full =
      params.variant == Variant::kFull ? params : to_full(params, A);
  const LayerParams& l = full.layers[static_cast<std::size_t>(k)];
  const Matrix gap = l.W2 - (Matrix::Identity(l.W2.rows(), l.W2.cols()) - l.W1 * A);
  return spectral_norm(gap);
}

TheoryParams make_theory_params(const Matrix& A, const CoherenceReport& report,
                                Index s, double B, double sigma, Index K) {
  if (s < 1) throw std::invalid_argument("make_theory_params: s must be >= 1");
  if (s > report.s_max_admissible)
    throw std::invalid_argument(
        "make_theory_params: s=" + std::to_string(s) + " exceeds s_max_admissible=" +
        std::to_string(report.s_max_admissible) + " for this dictionary");
  if (B <= 0.0 || sigma < 0.0 || K < 1)
    throw std::invalid_argument("make_theory_params: need B > 0, sigma >= 0, K >= 1");
  if (report.W_good.rows() != A.rows() || report.W_good.cols() != A.cols())
    throw std::invalid_argument("make_theory_params: report does not match dictionary");

  const double mu = report.mu_tilde;
  const double r = mu * (2.0 * static_cast<double>(s) - 1.0);  // 2*mu*s - mu
  TheoryParams out;
  auto& cert = out.certificate;
  cert.mu_tilde = mu;
  cert.C_W = report.C_W;
  cert.s = s;
  cert.B = B;
  cert.sigma = sigma;
  cert.c = r > 0.0 ? -std::log(r) : std::numeric_limits<double>::infinity();
  cert.C = 2.0 * static_cast<double>(s) * report.C_W / (1.0 + mu - 2.0 * mu * static_cast<double>(s));

  double e = static_cast<double>(s) * B;
  cert.e_bounds.push_back(e);
  out.params.variant = Variant::kCoupled;
  for (Index k = 0; k < K; ++k) {
    LayerParams layer;
    layer.W = report.W_good;
    layer.theta = mu * e + report.C_W * sigma;
    layer.ss_count = 0;
    cert.thetas.push_back(layer.theta);
    out.params.layers.push_back(std::move(layer));
    e = r * e + 2.0 * static_cast<double>(s) * report.C_W * sigma;
    cert.e_bounds.push_back(e);
  }
  return out;
}

TheoryParams make_theory_params_calibrated(const Matrix& A, const CoherenceReport& report,
                                           Index s, double B, double sigma, Index K,
                                           const Matrix& calib_b,
                                           const Matrix& calib_x_star) {
  TheoryParams out = make_theory_params(A, report, s, B, sigma, K);
  if (calib_b.cols() != calib_x_star.cols() || calib_b.cols() == 0)
    throw std::invalid_argument("make_theory_params_calibrated: empty or mismatched batch");

  // Grow the net one layer at a time: theta^k depends on the realized layer-k
  // errors under theta^0..theta^{k-1}.
  const Index N = calib_b.cols();
  Matrix X = Matrix::Zero(A.cols(), N);
  for (Index k = 0; k < K; ++k) {
    double sup_l1 = 0.0;
    for (Index j = 0; j < N; ++j)
      sup_l1 = std::max(sup_l1, (X.col(j) - calib_x_star.col(j)).lpNorm<1>());
    auto& layer = out.params.layers[static_cast<std::size_t>(k)];
    layer.theta = report.mu_tilde * (1.05 * sup_l1) + report.C_W * sigma;
    out.certificate.thetas[static_cast<std::size_t>(k)] = layer.theta;
    // advance the batch through the layer just fixed
    Matrix residual = calib_b;
    residual.noalias() -= A * X;
    Matrix V = X;
    V.noalias() += layer.W.transpose() * residual;
    for (Index j = 0; j < N; ++j) X.col(j) = soft_threshold(V.col(j), layer.theta);
  }
  return out;
}

void apply_support_schedule(NetworkParams& params, const SupportSchedule& schedule) {
  if (schedule.n != params.n())
    throw std::invalid_argument("apply_support_schedule: schedule n mismatch");
  for (Index k = 0; k < params.depth(); ++k)
    params.layers[static_cast<std::size_t>(k)].ss_count = pk_count(schedule, k);
}

double empirical_rate(const std::vector<double>& errors, double floor) {
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (errors[k] > floor) {
      xs.push_back(static_cast<double>(k));
      ys.push_back(std::log(errors[k]));
    }
  }
  if (xs.size() < 3)
    throw std::invalid_argument("empirical_rate: fewer than 3 layers above the floor");
  const double npts = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
  return -slope;
}

}  // namespace uilab
