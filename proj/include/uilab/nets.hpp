#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uilab/coherence.hpp"
#include "uilab/operators.hpp"
#include "uilab/types.hpp"

namespace uilab {

enum class Variant { kFull, kCoupled };

// One unrolled layer. Full variant: x+ = eta(W1 b + W2 x) with W1 (n x m)
// and W2 (n x n). Coupled variant: x+ = eta(x + W'(b - A x)) with W (m x n).
// ss_count > 0 switches eta to the support-selecting threshold.
struct LayerParams {
  Matrix W1;
  Matrix W2;
  Matrix W;
  double theta = 0.0;
  Index ss_count = 0;
};

struct NetworkParams {
  Variant variant = Variant::kCoupled;
  std::vector<LayerParams> layers;

  Index depth() const { return static_cast<Index>(layers.size()); }
  Index m() const;
  Index n() const;
  void validate() const;
  bool has_support_selection() const;
};

struct LayerTrace {
  std::vector<Vector> iterates;        // x^0 .. x^K
  std::vector<IndexSet> selected;      // selected set per transition (empty when none)
  // filled by annotate():
  std::vector<double> l1_err, l2_err;  // per iterate, vs x*
  std::vector<IndexSet> supports;      // support(x^k)
};

// Per-sample batch evaluated in lockstep; column j of every entry is sample j.
struct BatchTrace {
  std::vector<Matrix> iterates;                  // each n x N
  std::vector<std::vector<IndexSet>> selected;   // [transition][sample]
};

LayerTrace forward_lista(const NetworkParams& params, const Vector& b);
LayerTrace forward_lista_ss(const NetworkParams& params, const Vector& b);
LayerTrace forward_lista_cp(const NetworkParams& params, const Matrix& A, const Vector& b);
LayerTrace forward_lista_cpss(const NetworkParams& params, const Matrix& A, const Vector& b);

// Variant-dispatching entry point (support selection honored when present).
LayerTrace forward(const NetworkParams& params, const Matrix& A, const Vector& b);

// batch_support = true selects the trusted set over the whole batch's
// magnitudes instead of per sample (off by default; the per-sample rule is
// what the certificates and simulations use).
BatchTrace forward_batch(const NetworkParams& params, const Matrix& A, const Matrix& B,
                         bool batch_support = false);

void annotate(LayerTrace& trace, const Vector& x_star);

// Coupled -> full: W1 = W', W2 = I - W'A per layer.
NetworkParams to_full(const NetworkParams& params, const Matrix& A);

// ||W2^k - (I - W1^k A)||_2 for a full-variant layer.
double coupling_residual(const NetworkParams& params, const Matrix& A, Index k);

// The constants behind the certified linear rate: with r = mu_tilde(2s - 1),
//   e^{k+1} = r e^k + 2 s C_W sigma,   e^0 = s B,
//   theta^k = mu_tilde e^k + C_W sigma,
//   c = -log r,  C = 2 s C_W / (1 + mu_tilde - 2 mu_tilde s).
// e^k upper-bounds the worst-case l1 error of layer k over the admissible
// signal set, and the theta schedule guarantees no false positives.
struct TheoryCertificate {
  double mu_tilde = 0.0;
  double C_W = 0.0;
  Index s = 0;
  double B = 0.0;
  double sigma = 0.0;
  double c = 0.0;
  double C = 0.0;
  std::vector<double> e_bounds;  // e^0 .. e^K
  std::vector<double> thetas;    // theta^0 .. theta^{K-1}
};

struct TheoryParams {
  NetworkParams params;  // coupled, every layer W = W_good
  TheoryCertificate certificate;
};

// Analytic parameter choice certifying the linear rate. Requires
// s <= report.s_max_admissible.
TheoryParams make_theory_params(const Matrix& A, const CoherenceReport& report,
                                Index s, double B, double sigma, Index K);

// Data-driven thresholds: theta^k = mu_tilde * (1.05 * max_batch l1 error at
// layer k) + C_W sigma, computed layer by layer on a calibration batch.
TheoryParams make_theory_params_calibrated(const Matrix& A, const CoherenceReport& report,
                                           Index s, double B, double sigma, Index K,
                                           const Matrix& calib_b,
                                           const Matrix& calib_x_star);

// Replace each layer's ss_count with the schedule's pk_count.
void apply_support_schedule(NetworkParams& params, const SupportSchedule& schedule);

// Least-squares slope of log(err) vs layer over entries above the floor,
// negated. Throws when fewer than 3 usable layers remain.
double empirical_rate(const std::vector<double>& errors, double floor = 1e-12);

// Serialization: directory with manifest.json plus one UILAB1 matrix file
// per layer weight.
void save_params(const std::string& dir, const NetworkParams& params,
                 std::uint64_t seed, const std::string& provenance);
struct LoadedParams {
  NetworkParams params;
  std::uint64_t seed = 0;
  std::string provenance;
};
LoadedParams load_params(const std::string& dir);

}  // namespace uilab
