#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uilab/nets.hpp"
#include "uilab/problem.hpp"
#include "uilab/solvers.hpp"
#include "uilab/train.hpp"
#include "uilab/types.hpp"

namespace uilab {

enum class Algo {
  kIsta,
  kFista,
  kAdaptive,
  kLista,
  kListaCp,
  kListaSs,
  kListaCpss,
  kTheoryCp,
  kTheoryCpss,
};

std::string algo_name(Algo a);
Algo algo_from_name(const std::string& name);

enum class ThetaMode { kCertificate, kCalibrated };

struct ExperimentConfig {
  ProblemConfig problem;
  Algo algo = Algo::kIsta;
  Index K = 16;

  double p = 1.2;
  double p_max = 12.0;  // 13 is the usual choice for lista_cpss

  SolverConfig solver;                 // ista / fista
  double adaptive_lambda0 = 0.2;
  double adaptive_eps0 = 0.05;

  TrainConfig train;                   // lista family
  std::string checkpoint;              // load instead of training when set

  Index theory_s = 4;                  // theory_cp / theory_cpss
  double theory_B = 2.0;
  ThetaMode theta_mode = ThetaMode::kCertificate;
  Index calibration_size = 200;

  Index test_size = 1000;
  std::string out;

  void validate() const;
};

ExperimentConfig load_experiment_config(const std::string& path);
void save_experiment_config(const std::string& path, const ExperimentConfig& cfg);

struct ResultRow {
  Index layer = 0;
  double nmse_db = 0.0;
  double sup_l1_err = 0.0;
  // NaN marks a column that does not apply to the run / layer
  double bound_l1 = std::numeric_limits<double>::quiet_NaN();
  double theta = std::numeric_limits<double>::quiet_NaN();
  double coupling_residual = std::numeric_limits<double>::quiet_NaN();
  double mean_ss_in_support = std::numeric_limits<double>::quiet_NaN();
};

struct ResultTable {
  std::vector<ResultRow> rows;  // K+1 rows, layer = 0..K
  std::string algo;
  std::string a_hash;
  std::uint64_t seed = 0;
  Index test_size = 0;
};

void save_result_csv(const std::string& path, const ResultTable& table);
ResultTable load_result_csv(const std::string& path);

struct ExperimentOutput {
  ResultTable table;
  std::optional<TheoryCertificate> certificate;
  NetworkParams params;       // nets only
  bool has_params = false;
  double realized_kappa = 0.0;  // ill-conditioned runs
};

// Build (or load) everything the config describes, evaluate on the fixed
// test set, and return the per-layer table.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Evaluation cores, exposed so callers can bring their own sample sets.
ResultTable evaluate_net(const NetworkParams& params, const Matrix& A,
                         const Matrix& b_test, const Matrix& x_test,
                         const TheoryCertificate* cert = nullptr);
ResultTable evaluate_iterates(const std::vector<Matrix>& iterates, const Matrix& x_test,
                              double theta_constant = std::numeric_limits<double>::quiet_NaN());

struct NecessityReport {
  std::vector<double> residuals;  // ||W2^k - (I - W1^k A)||_2
  std::vector<double> thetas;
  std::vector<double> w2_norms;   // reported, never asserted
  bool applicable = false;        // trend asserted only for trained checkpoints
  bool residual_trend_pass = false;
  bool theta_trend_pass = false;
  bool pass() const { return !applicable || (residual_trend_pass && theta_trend_pass); }
};

// Per-layer coupling diagnostics; the decay trends (mean of last 4 layers
// < 0.5x mean of first 4) are asserted only when provenance == "trained".
NecessityReport validate_necessity(const NetworkParams& params, const Matrix& A,
                                 const std::string& provenance);

struct RateVerdict {
  bool bounds_pass = false;
  Index first_violation = -1;  // layer index, -1 if none
  double c_emp = 0.0;
  double c_cert = 0.0;
  bool rate_pass = false;
  bool pass() const { return bounds_pass && rate_pass; }
};

// Checks sup_l1_err <= bound_l1 on every layer and c_emp >= c - 0.05.
RateVerdict certify_linear_rate(const ResultTable& table, const TheoryCertificate& cert);

struct SsVerdict {
  bool no_worse_pass = false;
  Index first_violation = -1;
  std::vector<Index> strict_improvement_layers;  // >= 1% lower sup_l1
  bool any_selection = false;                    // some layer had |S^k| > 0
};

// Paired-run comparison; throws when the tables come from different A or
// test sets.
SsVerdict compare_ss(const ResultTable& cp, const ResultTable& cpss);

std::string necessity_report_json(const NecessityReport& rep);
std::string rate_verdict_json(const RateVerdict& v);
std::string ss_verdict_json(const SsVerdict& v);
std::string certificate_json(const TheoryCertificate& cert);
void save_certificate_json(const std::string& path, const TheoryCertificate& cert);
TheoryCertificate load_certificate_json(const std::string& path);

}  // namespace uilab
