// uilab: sparse recovery experiment harness.
//
// Subcommands map onto the library: dictionary generation, coherence
// analysis, classical LASSO baselines, certified theory runs, stage-wise
// training, checkpoint evaluation, and the certification verdicts.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "uilab/coherence.hpp"
#include "uilab/harness.hpp"
#include "uilab/linalg.hpp"
#include "uilab/matrix_io.hpp"
#include "uilab/nets.hpp"
#include "uilab/problem.hpp"
#include "uilab/solvers.hpp"
#include "uilab/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uilab;

namespace {

struct ConfigOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<Index> m, n, k;
  std::optional<Index> test_size;
  std::optional<double> snr_db, kappa;
  std::optional<std::string> out;
  std::optional<std::string> algo;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config JSON");
    cmd->add_option("--seed", seed, "override problem seed");
    cmd->add_option("--m", m, "override measurement count");
    cmd->add_option("--n", n, "override signal length");
    cmd->add_option("--k", k, "override layer / iteration count");
    cmd->add_option("--kappa", kappa, "override condition number");
    cmd->add_option("--test-size", test_size, "override test set size");
    cmd->add_option("--snr", snr_db, "override SNR in dB");
    cmd->add_option("--out", out, "override output CSV path");
    cmd->add_option("--algo", algo, "override algorithm");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_experiment_config(config_path);
    if (seed) cfg.problem.seed = *seed;
    if (m) cfg.problem.m = *m;
    if (n) cfg.problem.n = *n;
    if (k) cfg.K = *k;
    if (kappa) cfg.problem.condition_number = *kappa;
    if (test_size) cfg.test_size = *test_size;
    if (snr_db) cfg.problem.snr_db = *snr_db;
    if (out) cfg.out = *out;
    if (algo) cfg.algo = algo_from_name(*algo);
    return cfg;
  }
};

void print_table_summary(const ResultTable& table) {
  std::cout << "algo=" << table.algo << " a_hash=" << table.a_hash
            << " samples=" << table.test_size << '\n';
  std::cout << "final layer " << table.rows.back().layer
            << ": nmse_db=" << table.rows.back().nmse_db
            << " sup_l1=" << table.rows.back().sup_l1_err << '\n';
}

int cmd_gen(const ConfigOverrides& ov, const std::string& matrix_out,
            const std::string& info_out) {
  ExperimentConfig cfg = ov.resolve();
  double kappa = 0.0;
  Matrix A;
  if (cfg.problem.has_condition_number())
    A = gen_ill_conditioned(cfg.problem, &kappa);
  else
    A = gen_dictionary(cfg.problem);
  save_matrix(matrix_out, A);
  json info;
  info["m"] = A.rows();
  info["n"] = A.cols();
  info["seed"] = cfg.problem.seed;
  info["a_hash"] = matrix_hash_hex(A);
  info["spectral_norm"] = spectral_norm(A);
  if (cfg.problem.has_condition_number()) {
    info["nominal_condition_number"] = cfg.problem.condition_number;
    info["realized_condition_number"] = kappa;
  }
  if (!info_out.empty()) {
    std::ofstream os(info_out);
    os << info.dump(2) << '\n';
  }
  std::cout << info.dump(2) << '\n';
  return 0;
}

int cmd_coherence(const std::string& matrix_path, const std::string& out_path,
                  const std::string& w_out, bool certify) {
  const Matrix A = load_matrix(matrix_path);
  const CoherenceReport rep = generalized_coherence(A);
  std::string w_path = w_out;
  if (w_path.empty()) {
    fs::path p(out_path.empty() ? matrix_path : out_path);
    w_path = (p.parent_path() / "W_good.bin").string();
  }
  save_matrix(w_path, rep.W_good);

  bool oracle_ok = true;
  if (certify) {
    for (Index i = 0; i < A.cols(); ++i) {
      const ColumnMinimax cm = column_minimax_lp(A, i);
      if (!verify_optimality(A, i, cm.w, cm.t)) {
        oracle_ok = false;
        std::cerr << "oracle refuted optimality of column " << i << '\n';
      }
    }
  }

  json j;
  j["mu"] = rep.mu;
  j["mu_tilde"] = rep.mu_tilde;
  j["c_w"] = rep.C_W;
  j["s_max_admissible"] = rep.s_max_admissible;
  j["w_good_path"] = w_path;
  if (certify) j["oracle_certified"] = oracle_ok;
  if (!out_path.empty()) {
    std::ofstream os(out_path);
    os << j.dump(2) << '\n';
  }
  std::cout << j.dump(2) << '\n';
  return oracle_ok ? 0 : 1;
}

int cmd_train(const ConfigOverrides& ov, const std::string& checkpoint_dir,
              const std::string& log_out) {
  ExperimentConfig cfg = ov.resolve();
  Matrix A = cfg.problem.has_condition_number() ? gen_ill_conditioned(cfg.problem, nullptr)
                                                : gen_dictionary(cfg.problem);
  const Variant variant = (cfg.algo == Algo::kLista || cfg.algo == Algo::kListaSs)
                              ? Variant::kFull
                              : Variant::kCoupled;
  NetworkParams init = init_params(A, variant, cfg.K, lipschitz_L(A), cfg.train.lambda0);
  if (cfg.algo == Algo::kListaSs || cfg.algo == Algo::kListaCpss)
    apply_support_schedule(init, SupportSchedule(cfg.p, cfg.p_max, cfg.problem.n));
  const TrainResult tr = stagewise_train(init, A, cfg.train, cfg.problem);
  if (!log_out.empty()) save_train_log_csv(log_out, tr.log);
  if (tr.diverged) {
    std::cerr << "training diverged (NaN loss); aborted, log written\n";
    return 1;
  }
  save_params(checkpoint_dir, tr.params, cfg.train.seed, "trained");
  save_experiment_config((fs::path(checkpoint_dir) / "experiment.json").string(), cfg);
  std::cout << "checkpoint written to " << checkpoint_dir << '\n';
  return 0;
}

int cmd_eval(const ConfigOverrides& ov, const std::string& checkpoint_dir) {
  ExperimentConfig cfg = ov.resolve();
  cfg.checkpoint = checkpoint_dir;
  ExperimentOutput out = run_experiment(cfg);
  print_table_summary(out.table);
  return 0;
}

int cmd_validate_necessity(const ConfigOverrides& ov, const std::string& checkpoint_dir,
                           const std::string& matrix_path, const std::string& out_path) {
  const LoadedParams loaded = load_params(checkpoint_dir);
  Matrix A;
  if (!matrix_path.empty()) {
    A = load_matrix(matrix_path);
  } else {
    ExperimentConfig cfg = ov.resolve();
    A = cfg.problem.has_condition_number() ? gen_ill_conditioned(cfg.problem, nullptr)
                                           : gen_dictionary(cfg.problem);
  }
  const NecessityReport rep = validate_necessity(loaded.params, A, loaded.provenance);
  const std::string text = necessity_report_json(rep);
  if (!out_path.empty()) {
    std::ofstream os(out_path);
    os << text << '\n';
  }
  std::cout << text << '\n';
  return rep.pass() ? 0 : 1;
}

int cmd_certify_rate(const std::string& table_path, const std::string& cert_path,
                     const std::string& out_path) {
  const ResultTable table = load_result_csv(table_path);
  const TheoryCertificate cert = load_certificate_json(cert_path);
  const RateVerdict v = certify_linear_rate(table, cert);
  const std::string text = rate_verdict_json(v);
  if (!out_path.empty()) {
    std::ofstream os(out_path);
    os << text << '\n';
  }
  std::cout << text << '\n';
  return v.pass() ? 0 : 1;
}

int cmd_compare_ss(const std::string& cp_path, const std::string& cpss_path,
                   const std::string& out_path) {
  const ResultTable cp = load_result_csv(cp_path);
  const ResultTable cpss = load_result_csv(cpss_path);
  const SsVerdict v = compare_ss(cp, cpss);
  const std::string text = ss_verdict_json(v);
  if (!out_path.empty()) {
    std::ofstream os(out_path);
    os << text << '\n';
  }
  std::cout << text << '\n';
  return v.no_worse_pass ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& dir,
               const std::string& out_path) {
  std::vector<std::string> files = inputs;
  if (!dir.empty()) {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".csv") files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
  }
  if (files.empty()) {
    std::cerr << "report: no input tables\n";
    return 1;
  }
  std::ofstream os(out_path);
  if (!os) {
    std::cerr << "report: cannot write " << out_path << '\n';
    return 1;
  }
  os << "source,algo,a_hash,layer,nmse_db,sup_l1_err,bound_l1,theta,coupling_residual,"
        "mean_ss_in_support\n";
  auto cell = [&os](double v) {
    if (std::isfinite(v)) os << format_double(v);
  };
  int merged = 0;
  for (const auto& f : files) {
    ResultTable t;
    try {
      t = load_result_csv(f);
    } catch (const std::exception& e) {
      std::cerr << "skipping " << f << ": " << e.what() << '\n';
      continue;
    }
    ++merged;
    for (const auto& r : t.rows) {
      os << fs::path(f).filename().string() << ',' << t.algo << ',' << t.a_hash << ','
         << r.layer << ',' << format_double(r.nmse_db) << ',' << format_double(r.sup_l1_err)
         << ',';
      cell(r.bound_l1);
      os << ',';
      cell(r.theta);
      os << ',';
      cell(r.coupling_residual);
      os << ',';
      cell(r.mean_ss_in_support);
      os << '\n';
    }
  }
  std::cout << "merged " << merged << " tables into " << out_path << '\n';
  return merged > 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uilab: unfolded-ISTA sparse recovery lab"};
  app.require_subcommand(1);

  ConfigOverrides ov_gen, ov_run, ov_classical, ov_train, ov_eval, ov_vn;

  auto* gen = app.add_subcommand("gen", "generate a dictionary matrix");
  std::string gen_out = "A.bin", gen_info;
  ov_gen.attach(gen);
  gen->add_option("--matrix-out", gen_out, "matrix output path (.bin or .csv)");
  gen->add_option("--info", gen_info, "write generation info JSON here");

  auto* coh = app.add_subcommand("coherence", "coherence analysis of a dictionary");
  std::string coh_matrix, coh_out, coh_w;
  bool coh_certify = false;
  coh->add_option("--matrix", coh_matrix, "matrix file")->required();
  coh->add_option("--out", coh_out, "report JSON path");
  coh->add_option("--w-out", coh_w, "where to store the good weight matrix");
  coh->add_flag("--certify", coh_certify, "run the subgradient optimality oracle");

  auto* classical = app.add_subcommand("classical", "run ista / fista / adaptive");
  std::string cl_algo = "ista";
  double cl_lambda = 0.2;
  Index cl_iters = 16;
  ov_classical.attach(classical);
  classical->add_option("--classical-algo", cl_algo, "ista | fista | adaptive");
  classical->add_option("--lambda", cl_lambda, "LASSO weight");
  classical->add_option("--iters", cl_iters, "iteration count");

  auto* theory = app.add_subcommand("theory-run", "run certified theory parameters");
  std::string th_cert;
  ov_run.attach(theory);
  theory->add_option("--cert", th_cert, "write the certificate JSON here");

  auto* train = app.add_subcommand("train", "stage-wise training");
  std::string tr_checkpoint = "checkpoint", tr_log;
  ov_train.attach(train);
  train->add_option("--checkpoint", tr_checkpoint, "checkpoint directory");
  train->add_option("--log", tr_log, "training log CSV");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test set");
  std::string ev_checkpoint;
  ov_eval.attach(eval);
  eval->add_option("--checkpoint", ev_checkpoint, "checkpoint directory")->required();

  auto* vn = app.add_subcommand("validate-necessity", "coupling and threshold decay diagnostics");
  std::string vn_checkpoint, vn_matrix, vn_out;
  ov_vn.attach(vn);
  vn->add_option("--checkpoint", vn_checkpoint, "checkpoint directory")->required();
  vn->add_option("--matrix", vn_matrix, "dictionary file (else regenerated from config)");
  vn->add_option("--report-out", vn_out, "report JSON path");

  auto* cr = app.add_subcommand("certify-rate", "check a table against a certificate");
  std::string cr_table, cr_cert, cr_out;
  cr->add_option("--table", cr_table, "result CSV")->required();
  cr->add_option("--cert", cr_cert, "certificate JSON")->required();
  cr->add_option("--verdict-out", cr_out, "verdict JSON path");

  auto* cs = app.add_subcommand("compare-ss", "paired no-worse comparison");
  std::string cs_cp, cs_cpss, cs_out;
  cs->add_option("--cp", cs_cp, "LISTA-CP result CSV")->required();
  cs->add_option("--cpss", cs_cpss, "LISTA-CPSS result CSV")->required();
  cs->add_option("--verdict-out", cs_out, "verdict JSON path");

  auto* rp = app.add_subcommand("report", "merge result tables into one CSV");
  std::vector<std::string> rp_inputs;
  std::string rp_dir, rp_out = "summary.csv";
  rp->add_option("--inputs", rp_inputs, "result CSV files");
  rp->add_option("--dir", rp_dir, "directory to scan for result CSVs");
  rp->add_option("--merged-out", rp_out, "merged CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(ov_gen, gen_out, gen_info);
    if (coh->parsed()) return cmd_coherence(coh_matrix, coh_out, coh_w, coh_certify);
    if (classical->parsed()) {
      ConfigOverrides ov = ov_classical;
      if (!ov.algo) ov.algo = cl_algo;
      ExperimentConfig cfg = ov.resolve();
      cfg.solver.lambda = cl_lambda;
      if (!ov.k) cfg.K = cl_iters;
      ExperimentOutput out = run_experiment(cfg);
      print_table_summary(out.table);
      return 0;
    }
    if (theory->parsed()) {
      ConfigOverrides ov = ov_run;
      if (!ov.algo) ov.algo = "theory_cp";
      ExperimentConfig cfg = ov.resolve();
      ExperimentOutput out = run_experiment(cfg);
      if (!th_cert.empty() && out.certificate) save_certificate_json(th_cert, *out.certificate);
      print_table_summary(out.table);
      return 0;
    }
    if (train->parsed()) return cmd_train(ov_train, tr_checkpoint, tr_log);
    if (eval->parsed()) return cmd_eval(ov_eval, ev_checkpoint);
    if (vn->parsed()) return cmd_validate_necessity(ov_vn, vn_checkpoint, vn_matrix, vn_out);
    if (cr->parsed()) return cmd_certify_rate(cr_table, cr_cert, cr_out);
    if (cs->parsed()) return cmd_compare_ss(cs_cp, cs_cpss, cs_out);
    if (rp->parsed()) return cmd_report(rp_inputs, rp_dir, rp_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
