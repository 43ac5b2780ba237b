#include "uilab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "uilab/coherence.hpp"
#include "uilab/linalg.hpp"
#include "uilab/matrix_io.hpp"

namespace uilab {

using nlohmann::json;

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::kIsta: return "ista";
    case Algo::kFista: return "fista";
    case Algo::kAdaptive: return "adaptive";
    case Algo::kLista: return "lista";
    case Algo::kListaCp: return "lista_cp";
    case Algo::kListaSs: return "lista_ss";
    case Algo::kListaCpss: return "lista_cpss";
    case Algo::kTheoryCp: return "theory_cp";
    case Algo::kTheoryCpss: return "theory_cpss";
  }
  return "unknown";
}

Algo algo_from_name(const std::string& name) {
  for (Algo a : {Algo::kIsta, Algo::kFista, Algo::kAdaptive, Algo::kLista, Algo::kListaCp,
                 Algo::kListaSs, Algo::kListaCpss, Algo::kTheoryCp, Algo::kTheoryCpss})
    if (algo_name(a) == name) return a;
  throw std::invalid_argument("unknown algo: " + name);
}

void ExperimentConfig::validate() const {
  problem.validate();
  if (K < 1) throw std::invalid_argument("experiment: K must be >= 1");
  if (test_size < 1) throw std::invalid_argument("experiment: test_size must be >= 1");
  if (p < 0.0 || p_max < 0.0 || p_max > 100.0)
    throw std::invalid_argument("experiment: bad support schedule");
}

namespace {

bool uses_support_selection(Algo a) {
  return a == Algo::kListaSs || a == Algo::kListaCpss || a == Algo::kTheoryCpss;
}

bool is_net(Algo a) { return a != Algo::kIsta && a != Algo::kFista && a != Algo::kAdaptive; }

bool is_theory(Algo a) { return a == Algo::kTheoryCp || a == Algo::kTheoryCpss; }

Variant algo_variant(Algo a) {
  return (a == Algo::kLista || a == Algo::kListaSs) ? Variant::kFull : Variant::kCoupled;
}

}  // namespace

// ---------------------------------------------------------------- config io

namespace {

void problem_from_json(const json& j, ProblemConfig& p) {
  p.m = j.value("m", p.m);
  p.n = j.value("n", p.n);
  const std::string mode = j.value("sparsity_mode", std::string("bernoulli"));
  if (mode == "bernoulli")
    p.sparsity_mode = SparsityMode::kBernoulli;
  else if (mode == "fixed_s")
    p.sparsity_mode = SparsityMode::kFixedS;
  else
    throw std::invalid_argument("config: sparsity_mode must be bernoulli or fixed_s");
  p.p_b = j.value("p_b", p.p_b);
  p.s = j.value("s", p.s);
  const std::string mag = j.value("magnitude_mode", std::string("gaussian"));
  if (mag == "gaussian")
    p.magnitude_mode = MagnitudeMode::kGaussian;
  else if (mag == "bounded")
    p.magnitude_mode = MagnitudeMode::kBounded;
  else
    throw std::invalid_argument("config: magnitude_mode must be gaussian or bounded");
  p.B = j.value("B", p.B);
  p.B_lower = j.value("B_lower", p.B_lower);
  if (j.contains("snr_db")) {
    if (j["snr_db"].is_string())
      p.snr_db = std::numeric_limits<double>::infinity();
    else
      p.snr_db = j["snr_db"].get<double>();
  }
  p.condition_number = j.value("condition_number", p.condition_number);
  p.seed = j.value("seed", p.seed);
}

json problem_to_json(const ProblemConfig& p) {
  json j;
  j["m"] = p.m;
  j["n"] = p.n;
  j["sparsity_mode"] = p.sparsity_mode == SparsityMode::kBernoulli ? "bernoulli" : "fixed_s";
  j["p_b"] = p.p_b;
  j["s"] = p.s;
  j["magnitude_mode"] = p.magnitude_mode == MagnitudeMode::kGaussian ? "gaussian" : "bounded";
  j["B"] = p.B;
  j["B_lower"] = p.B_lower;
  if (std::isinf(p.snr_db))
    j["snr_db"] = "inf";
  else
    j["snr_db"] = p.snr_db;
  j["condition_number"] = p.condition_number;
  j["seed"] = p.seed;
  return j;
}

void train_from_json(const json& j, TrainConfig& t) {
  t.alpha0 = j.value("alpha0", t.alpha0);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.steps_per_stage = j.value("steps_per_stage", t.steps_per_stage);
  t.decay_gamma = j.value("decay_gamma", t.decay_gamma);
  t.validation_size = j.value("validation_size", t.validation_size);
  t.seed = j.value("seed", t.seed);
  t.lambda0 = j.value("lambda0", t.lambda0);
  t.momentum = j.value("momentum", t.momentum);
  t.early_stop = j.value("early_stop", t.early_stop);
  t.eval_every = j.value("eval_every", t.eval_every);
}

json train_to_json(const TrainConfig& t) {
  json j;
  j["alpha0"] = t.alpha0;
  j["batch_size"] = t.batch_size;
  j["steps_per_stage"] = t.steps_per_stage;
  j["decay_gamma"] = t.decay_gamma;
  j["validation_size"] = t.validation_size;
  j["seed"] = t.seed;
  j["lambda0"] = t.lambda0;
  j["momentum"] = t.momentum;
  j["early_stop"] = t.early_stop;
  j["eval_every"] = t.eval_every;
  return j;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  json j = json::parse(is);
  ExperimentConfig cfg;
  if (j.contains("problem")) problem_from_json(j["problem"], cfg.problem);
  if (j.contains("algo")) cfg.algo = algo_from_name(j["algo"].get<std::string>());
  cfg.K = j.value("k", cfg.K);
  cfg.p = j.value("p", cfg.p);
  cfg.p_max = j.value("p_max", cfg.p_max);
  if (j.contains("solver")) {
    cfg.solver.lambda = j["solver"].value("lambda", cfg.solver.lambda);
    cfg.solver.L = j["solver"].value("L", cfg.solver.L);
  }
  cfg.adaptive_lambda0 = j.value("adaptive_lambda0", cfg.adaptive_lambda0);
  cfg.adaptive_eps0 = j.value("adaptive_eps0", cfg.adaptive_eps0);
  if (j.contains("train")) train_from_json(j["train"], cfg.train);
  cfg.checkpoint = j.value("checkpoint", cfg.checkpoint);
  cfg.theory_s = j.value("theory_s", cfg.theory_s);
  cfg.theory_B = j.value("theory_B", cfg.theory_B);
  if (j.contains("theta_mode"))
    cfg.theta_mode = j["theta_mode"] == "calibrated" ? ThetaMode::kCalibrated
                                                     : ThetaMode::kCertificate;
  cfg.calibration_size = j.value("calibration_size", cfg.calibration_size);
  cfg.test_size = j.value("test_size", cfg.test_size);
  cfg.out = j.value("out", cfg.out);
  return cfg;
}

void save_experiment_config(const std::string& path, const ExperimentConfig& cfg) {
  json j;
  j["problem"] = problem_to_json(cfg.problem);
  j["algo"] = algo_name(cfg.algo);
  j["k"] = cfg.K;
  j["p"] = cfg.p;
  j["p_max"] = cfg.p_max;
  j["solver"] = {{"lambda", cfg.solver.lambda}, {"L", cfg.solver.L}};
  j["adaptive_lambda0"] = cfg.adaptive_lambda0;
  j["adaptive_eps0"] = cfg.adaptive_eps0;
  j["train"] = train_to_json(cfg.train);
  j["checkpoint"] = cfg.checkpoint;
  j["theory_s"] = cfg.theory_s;
  j["theory_B"] = cfg.theory_B;
  j["theta_mode"] = cfg.theta_mode == ThetaMode::kCalibrated ? "calibrated" : "certificate";
  j["calibration_size"] = cfg.calibration_size;
  j["test_size"] = cfg.test_size;
  j["out"] = cfg.out;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write config: " + path);
  os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- table io

namespace {

void write_cell(std::ostream& os, double v) {
  if (std::isfinite(v)) os << format_double(v);
}

double read_cell(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

void save_result_csv(const std::string& path, const ResultTable& table) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "# uilab-result,algo=" << table.algo << ",a_hash=" << table.a_hash
     << ",seed=" << table.seed << ",samples=" << table.test_size << '\n';
  os << "layer,nmse_db,sup_l1_err,bound_l1,theta,coupling_residual,mean_ss_in_support\n";
  for (const auto& r : table.rows) {
    os << r.layer << ',';
    os << format_double(r.nmse_db) << ',';
    os << format_double(r.sup_l1_err) << ',';
    write_cell(os, r.bound_l1);
    os << ',';
    write_cell(os, r.theta);
    os << ',';
    write_cell(os, r.coupling_residual);
    os << ',';
    write_cell(os, r.mean_ss_in_support);
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

ResultTable load_result_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  ResultTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::stringstream ss(line.substr(1));
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (key == "algo") table.algo = val;
        if (key == "a_hash") table.a_hash = val;
        if (key == "seed") table.seed = std::strtoull(val.c_str(), nullptr, 10);
        if (key == "samples") table.test_size = std::strtol(val.c_str(), nullptr, 10);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "layer,nmse_db,sup_l1_err,bound_l1,theta,coupling_residual,mean_ss_in_support")
        throw std::runtime_error("not a result table (bad header): " + path);
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    cells.resize(7);
    ResultRow r;
    r.layer = std::strtol(cells[0].c_str(), nullptr, 10);
    r.nmse_db = read_cell(cells[1]);
    r.sup_l1_err = read_cell(cells[2]);
    r.bound_l1 = read_cell(cells[3]);
    r.theta = read_cell(cells[4]);
    r.coupling_residual = read_cell(cells[5]);
    r.mean_ss_in_support = read_cell(cells[6]);
    table.rows.push_back(r);
  }
  if (table.rows.empty()) throw std::runtime_error("no rows in result table: " + path);
  return table;
}

// ---------------------------------------------------------------- evaluation

ResultTable evaluate_net(const NetworkParams& params, const Matrix& A,
                         const Matrix& b_test, const Matrix& x_test,
                         const TheoryCertificate* cert) {
  params.validate();
  const Index K = params.depth();
  const Index N = b_test.cols();
  if (x_test.cols() != N) throw std::invalid_argument("evaluate_net: sample count mismatch");

  const BatchTrace trace = forward_batch(params, A, b_test);

  // true supports per sample
  std::vector<std::vector<bool>> in_support(static_cast<std::size_t>(N),
                                            std::vector<bool>(static_cast<std::size_t>(x_test.rows()), false));
  for (Index j = 0; j < N; ++j)
    for (Index i = 0; i < x_test.rows(); ++i)
      if (x_test(i, j) != 0.0) in_support[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = true;

  ResultTable table;
  table.a_hash = matrix_hash_hex(A);
  table.test_size = N;
  for (Index k = 0; k <= K; ++k) {
    const Matrix& Xk = trace.iterates[static_cast<std::size_t>(k)];
    ResultRow row;
    row.layer = k;
    row.nmse_db = nmse_db(Xk, x_test);
    double sup = 0.0;
    for (Index j = 0; j < N; ++j)
      sup = std::max(sup, (Xk.col(j) - x_test.col(j)).lpNorm<1>());
    row.sup_l1_err = sup;
    if (cert) row.bound_l1 = cert->e_bounds[static_cast<std::size_t>(k)];
    if (k < K) {
      const auto& layer = params.layers[static_cast<std::size_t>(k)];
      row.theta = layer.theta;
      if (params.variant == Variant::kFull) row.coupling_residual = coupling_residual(params, A, k);
      if (layer.ss_count > 0) {
        // |S^k|: selected, on the true support, and surviving the threshold
        const Matrix& Xnext = trace.iterates[static_cast<std::size_t>(k + 1)];
        double total = 0.0;
        for (Index j = 0; j < N; ++j) {
          Index cnt = 0;
          for (Index i : trace.selected[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])
            if (in_support[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] && Xnext(i, j) != 0.0)
              ++cnt;
          total += static_cast<double>(cnt);
        }
        row.mean_ss_in_support = total / static_cast<double>(N);
      } else if (params.has_support_selection()) {
        row.mean_ss_in_support = 0.0;
      }
    }
    table.rows.push_back(row);
  }
  return table;
}

ResultTable evaluate_iterates(const std::vector<Matrix>& iterates, const Matrix& x_test,
                              double theta_constant) {
  if (iterates.empty()) throw std::invalid_argument("evaluate_iterates: no iterates");
  ResultTable table;
  table.test_size = x_test.cols();
  const Index K = static_cast<Index>(iterates.size()) - 1;
  for (Index k = 0; k <= K; ++k) {
    const Matrix& Xk = iterates[static_cast<std::size_t>(k)];
    ResultRow row;
    row.layer = k;
    row.nmse_db = nmse_db(Xk, x_test);
    double sup = 0.0;
    for (Index j = 0; j < Xk.cols(); ++j)
      sup = std::max(sup, (Xk.col(j) - x_test.col(j)).lpNorm<1>());
    row.sup_l1_err = sup;
    if (k < K) row.theta = theta_constant;
    table.rows.push_back(row);
  }
  return table;
}

// ---------------------------------------------------------------- experiments

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentOutput out;

  Matrix A;
  if (cfg.problem.has_condition_number())
    A = gen_ill_conditioned(cfg.problem, &out.realized_kappa);
  else
    A = gen_dictionary(cfg.problem);

  Matrix b_test(cfg.problem.m, cfg.test_size);
  Matrix x_test(cfg.problem.n, cfg.test_size);
  double max_eps_l1 = 0.0;
  for (Index j = 0; j < cfg.test_size; ++j) {
    const SignalSample s = sample_signal(A, cfg.problem, static_cast<std::uint64_t>(j));
    b_test.col(j) = s.b;
    x_test.col(j) = s.x_star;
    max_eps_l1 = std::max(max_eps_l1, s.eps.lpNorm<1>());
  }

  switch (cfg.algo) {
    case Algo::kIsta:
    case Algo::kFista: {
      SolverConfig sc = cfg.solver;
      sc.max_iters = cfg.K;
      if (sc.L <= 0.0) sc.L = lipschitz_L(A);
      const auto iterates = cfg.algo == Algo::kIsta ? ista_batch(A, b_test, sc)
                                                    : fista_batch(A, b_test, sc);
      out.table = evaluate_iterates(iterates, x_test, sc.lambda / sc.L);
      break;
    }
    case Algo::kAdaptive: {
      const auto iterates =
          adaptive_ista_batch(A, b_test, cfg.adaptive_lambda0, cfg.adaptive_eps0, cfg.K);
      out.table = evaluate_iterates(iterates, x_test);
      break;
    }
    case Algo::kTheoryCp:
    case Algo::kTheoryCpss: {
      const CoherenceReport report = generalized_coherence(A);
      const double sigma = std::isinf(cfg.problem.snr_db) ? 0.0 : max_eps_l1;
      TheoryParams tp;
      if (cfg.theta_mode == ThetaMode::kCertificate) {
        tp = make_theory_params(A, report, cfg.theory_s, cfg.theory_B, sigma, cfg.K);
      } else {
        Matrix cal_b(cfg.problem.m, cfg.calibration_size);
        Matrix cal_x(cfg.problem.n, cfg.calibration_size);
        for (Index j = 0; j < cfg.calibration_size; ++j) {
          const SignalSample s =
              sample_signal(A, cfg.problem, (5ull << 20) + static_cast<std::uint64_t>(j));
          cal_b.col(j) = s.b;
          cal_x.col(j) = s.x_star;
        }
        tp = make_theory_params_calibrated(A, report, cfg.theory_s, cfg.theory_B, sigma,
                                           cfg.K, cal_b, cal_x);
      }
      if (cfg.algo == Algo::kTheoryCpss)
        apply_support_schedule(tp.params, SupportSchedule(cfg.p, cfg.p_max, cfg.problem.n));
      out.table = evaluate_net(tp.params, A, b_test, x_test, &tp.certificate);
      out.certificate = tp.certificate;
      out.params = tp.params;
      out.has_params = true;
      break;
    }
    default: {  // trained (or loaded) nets
      NetworkParams params;
      if (!cfg.checkpoint.empty()) {
        params = load_params(cfg.checkpoint).params;
      } else {
        NetworkParams init =
            init_params(A, algo_variant(cfg.algo), cfg.K, lipschitz_L(A), cfg.train.lambda0);
        if (uses_support_selection(cfg.algo))
          apply_support_schedule(init, SupportSchedule(cfg.p, cfg.p_max, cfg.problem.n));
        const TrainResult tr = stagewise_train(init, A, cfg.train, cfg.problem);
        if (tr.diverged) throw std::runtime_error("run_experiment: training diverged");
        params = tr.params;
      }
      out.table = evaluate_net(params, A, b_test, x_test);
      out.params = params;
      out.has_params = true;
      break;
    }
  }

  out.table.algo = algo_name(cfg.algo);
  out.table.a_hash = matrix_hash_hex(A);
  out.table.seed = cfg.problem.seed;
  out.table.test_size = cfg.test_size;
  if (!cfg.out.empty()) save_result_csv(cfg.out, out.table);
  return out;
}

// ---------------------------------------------------------------- verdicts

NecessityReport validate_necessity(const NetworkParams& params, const Matrix& A,
                                 const std::string& provenance) {
  const NetworkParams full = params.variant == Variant::kFull ? params : to_full(params, A);
  NecessityReport rep;
  for (Index k = 0; k < full.depth(); ++k) {
    rep.residuals.push_back(coupling_residual(full, A, k));
    rep.thetas.push_back(full.layers[static_cast<std::size_t>(k)].theta);
    rep.w2_norms.push_back(spectral_norm(full.layers[static_cast<std::size_t>(k)].W2));
  }
  rep.applicable = provenance == "trained" && full.depth() >= 8;
  auto mean4 = [](const std::vector<double>& v, bool tail) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
      s += tail ? v[v.size() - 1 - static_cast<std::size_t>(i)] : v[static_cast<std::size_t>(i)];
    return s / 4.0;
  };
  if (rep.applicable) {
    rep.residual_trend_pass = mean4(rep.residuals, true) < 0.5 * mean4(rep.residuals, false);
    rep.theta_trend_pass = mean4(rep.thetas, true) < 0.5 * mean4(rep.thetas, false);
  }
  return rep;
}

RateVerdict certify_linear_rate(const ResultTable& table, const TheoryCertificate& cert) {
  RateVerdict v;
  v.c_cert = cert.c;
  v.bounds_pass = true;
  std::vector<double> sup_errors;
  for (const auto& row : table.rows) {
    if (static_cast<std::size_t>(row.layer) >= cert.e_bounds.size())
      throw std::invalid_argument("certify_linear_rate: table deeper than certificate");
    const double bound = cert.e_bounds[static_cast<std::size_t>(row.layer)];
    // tolerance covers the equality case in exact-geometry tables
    if (!(row.sup_l1_err <= bound * (1.0 + 1e-12) + 1e-300)) {
      if (v.bounds_pass) v.first_violation = row.layer;
      v.bounds_pass = false;
    }
    sup_errors.push_back(row.sup_l1_err);
  }
  v.c_emp = empirical_rate(sup_errors);
  v.rate_pass = v.c_emp >= cert.c - 0.05;
  return v;
}

SsVerdict compare_ss(const ResultTable& cp, const ResultTable& cpss) {
  if (cp.a_hash != cpss.a_hash || cp.test_size != cpss.test_size ||
      cp.rows.size() != cpss.rows.size())
    throw std::invalid_argument("compare_ss: tables come from different runs");
  SsVerdict v;
  v.no_worse_pass = true;
  for (std::size_t k = 0; k < cp.rows.size(); ++k) {
    const double a = cp.rows[k].sup_l1_err;
    const double b = cpss.rows[k].sup_l1_err;
    if (b > a + 1e-12) {
      if (v.no_worse_pass) v.first_violation = cp.rows[k].layer;
      v.no_worse_pass = false;
    }
    if (a > 0.0 && (a - b) / a >= 0.01) v.strict_improvement_layers.push_back(cp.rows[k].layer);
    const double sel = cpss.rows[k].mean_ss_in_support;
    if (std::isfinite(sel) && sel > 0.0) v.any_selection = true;
  }
  return v;
}

// ---------------------------------------------------------------- json dumps

std::string necessity_report_json(const NecessityReport& rep) {
  json j;
  j["residuals"] = rep.residuals;
  j["thetas"] = rep.thetas;
  j["w2_norms"] = rep.w2_norms;
  j["applicable"] = rep.applicable;
  j["residual_trend_pass"] = rep.residual_trend_pass;
  j["theta_trend_pass"] = rep.theta_trend_pass;
  j["pass"] = rep.pass();
  return j.dump(2);
}

std::string rate_verdict_json(const RateVerdict& v) {
  json j;
  j["bounds_pass"] = v.bounds_pass;
  j["first_violation"] = v.first_violation;
  j["c_emp"] = v.c_emp;
  j["c_cert"] = v.c_cert;
  j["rate_pass"] = v.rate_pass;
  j["pass"] = v.pass();
  return j.dump(2);
}

std::string ss_verdict_json(const SsVerdict& v) {
  json j;
  j["no_worse_pass"] = v.no_worse_pass;
  j["first_violation"] = v.first_violation;
  j["strict_improvement_layers"] = v.strict_improvement_layers;
  j["any_selection"] = v.any_selection;
  return j.dump(2);
}

std::string certificate_json(const TheoryCertificate& cert) {
  json j;
  j["mu_tilde"] = cert.mu_tilde;
  j["c_w"] = cert.C_W;
  j["s"] = cert.s;
  j["b"] = cert.B;
  j["sigma"] = cert.sigma;
  j["c"] = cert.c;
  j["cap_c"] = cert.C;
  j["e_bounds"] = cert.e_bounds;
  j["thetas"] = cert.thetas;
  return j.dump(2);
}

void save_certificate_json(const std::string& path, const TheoryCertificate& cert) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write certificate: " + path);
  os << certificate_json(cert) << '\n';
}

TheoryCertificate load_certificate_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open certificate: " + path);
  json j = json::parse(is);
  TheoryCertificate cert;
  cert.mu_tilde = j.at("mu_tilde").get<double>();
  cert.C_W = j.at("c_w").get<double>();
  cert.s = j.at("s").get<Index>();
  cert.B = j.at("b").get<double>();
  cert.sigma = j.at("sigma").get<double>();
  cert.c = j.at("c").get<double>();
  cert.C = j.at("cap_c").get<double>();
  cert.e_bounds = j.at("e_bounds").get<std::vector<double>>();
  cert.thetas = j.at("thetas").get<std::vector<double>>();
  return cert;
}

}  // namespace uilab
