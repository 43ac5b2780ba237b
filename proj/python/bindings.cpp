// Python bindings for the core operations: matrices cross the boundary as
// numpy arrays via Eigen.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uilab/coherence.hpp"
#include "uilab/harness.hpp"
#include "uilab/linalg.hpp"
#include "uilab/matrix_io.hpp"
#include "uilab/nets.hpp"
#include "uilab/operators.hpp"
#include "uilab/problem.hpp"
#include "uilab/solvers.hpp"
#include "uilab/train.hpp"

namespace py = pybind11;
using namespace uilab;

namespace {

ProblemConfig make_problem_config(Index m, Index n, const std::string& sparsity_mode,
                                  double p_b, Index s, const std::string& magnitude_mode,
                                  double B, double B_lower, double snr_db,
                                  double condition_number, std::uint64_t seed) {
  ProblemConfig cfg;
  cfg.m = m;
  cfg.n = n;
  if (sparsity_mode == "bernoulli")
    cfg.sparsity_mode = SparsityMode::kBernoulli;
  else if (sparsity_mode == "fixed_s")
    cfg.sparsity_mode = SparsityMode::kFixedS;
  else
    throw std::invalid_argument("sparsity_mode must be 'bernoulli' or 'fixed_s'");
  cfg.p_b = p_b;
  cfg.s = s;
  if (magnitude_mode == "gaussian")
    cfg.magnitude_mode = MagnitudeMode::kGaussian;
  else if (magnitude_mode == "bounded")
    cfg.magnitude_mode = MagnitudeMode::kBounded;
  else
    throw std::invalid_argument("magnitude_mode must be 'gaussian' or 'bounded'");
  cfg.B = B;
  cfg.B_lower = B_lower;
  cfg.snr_db = snr_db;
  cfg.condition_number = condition_number;
  cfg.seed = seed;
  return cfg;
}

Variant variant_from_string(const std::string& v) {
  if (v == "full") return Variant::kFull;
  if (v == "coupled") return Variant::kCoupled;
  throw std::invalid_argument("variant must be 'full' or 'coupled'");
}

}  // namespace

PYBIND11_MODULE(_uilab, m) {
  m.doc() = "Sparse recovery with classical ISTA solvers and unfolded LISTA networks";

  py::class_<ProblemConfig>(m, "ProblemConfig")
      .def(py::init(&make_problem_config), py::arg("m") = 250, py::arg("n") = 500,
           py::arg("sparsity_mode") = "bernoulli", py::arg("p_b") = 0.1, py::arg("s") = 4,
           py::arg("magnitude_mode") = "gaussian", py::arg("B") = 2.0,
           py::arg("B_lower") = 0.5,
           py::arg("snr_db") = std::numeric_limits<double>::infinity(),
           py::arg("condition_number") = 0.0, py::arg("seed") = 1)
      .def_readwrite("m", &ProblemConfig::m)
      .def_readwrite("n", &ProblemConfig::n)
      .def_readwrite("p_b", &ProblemConfig::p_b)
      .def_readwrite("s", &ProblemConfig::s)
      .def_readwrite("B", &ProblemConfig::B)
      .def_readwrite("B_lower", &ProblemConfig::B_lower)
      .def_readwrite("snr_db", &ProblemConfig::snr_db)
      .def_readwrite("condition_number", &ProblemConfig::condition_number)
      .def_readwrite("seed", &ProblemConfig::seed);

  py::class_<SignalSample>(m, "SignalSample")
      .def_readonly("x_star", &SignalSample::x_star)
      .def_readonly("eps", &SignalSample::eps)
      .def_readonly("b", &SignalSample::b)
      .def_readonly("support", &SignalSample::support);

  m.def("gen_dictionary", &gen_dictionary, py::arg("cfg"));
  m.def(
      "gen_ill_conditioned",
      [](const ProblemConfig& cfg) {
        double realized = 0.0;
        Matrix A = gen_ill_conditioned(cfg, &realized);
        return py::make_tuple(A, realized);
      },
      py::arg("cfg"), "Returns (A, realized_condition_number)");
  m.def("sample_signal", &sample_signal, py::arg("A"), py::arg("cfg"), py::arg("stream_index"));
  m.def(
      "apply_noise",
      [](const Vector& clean, double snr_db, std::uint64_t seed) {
        Rng rng(seed);
        return apply_noise(clean, snr_db, rng);
      },
      py::arg("clean"), py::arg("snr_db"), py::arg("seed") = 0);
  m.def("spectral_norm", &spectral_norm, py::arg("matrix"));
  m.def(
      "nmse_db",
      [](const Matrix& estimates, const Matrix& truths) { return nmse_db(estimates, truths); },
      py::arg("estimates"), py::arg("truths"),
      "10*log10(sum ||xhat - x*||^2 / sum ||x*||^2) with per-sample columns");

  m.def("soft_threshold", &soft_threshold, py::arg("v"), py::arg("theta"));
  m.def("select_support", &select_support, py::arg("v"), py::arg("count"));
  m.def("ss_threshold",
        py::overload_cast<const Vector&, double, Index>(&ss_threshold), py::arg("v"),
        py::arg("theta"), py::arg("count"));
  m.def(
      "pk_count",
      [](double p, double p_max, Index n, Index k) {
        return pk_count(SupportSchedule(p, p_max, n), k);
      },
      py::arg("p"), py::arg("p_max"), py::arg("n"), py::arg("k"));

  py::class_<IterateTrace>(m, "IterateTrace")
      .def_readonly("iterates", &IterateTrace::iterates)
      .def_readonly("objectives", &IterateTrace::objectives)
      .def_readonly("lambdas", &IterateTrace::lambdas)
      .def_readonly("step_size_warning", &IterateTrace::step_size_warning);

  m.def("lipschitz_L", &lipschitz_L, py::arg("A"));
  m.def(
      "ista",
      [](const Matrix& A, const Vector& b, double lam, Index iters, double L) {
        SolverConfig cfg;
        cfg.lambda = lam;
        cfg.max_iters = iters;
        cfg.L = L;
        return ista(A, b, cfg);
      },
      py::arg("A"), py::arg("b"), py::arg("lam") = 0.2, py::arg("iters") = 16,
      py::arg("L") = 0.0);
  m.def(
      "fista",
      [](const Matrix& A, const Vector& b, double lam, Index iters, double L) {
        SolverConfig cfg;
        cfg.lambda = lam;
        cfg.max_iters = iters;
        cfg.L = L;
        return fista(A, b, cfg);
      },
      py::arg("A"), py::arg("b"), py::arg("lam") = 0.2, py::arg("iters") = 16,
      py::arg("L") = 0.0);
  m.def("adaptive_ista", &adaptive_ista, py::arg("A"), py::arg("b"), py::arg("lambda0") = 0.2,
        py::arg("eps0") = 0.05, py::arg("max_iters") = 16, py::arg("L") = 0.0);

  py::class_<CoherenceReport>(m, "CoherenceReport")
      .def_readonly("mu", &CoherenceReport::mu)
      .def_readonly("mu_tilde", &CoherenceReport::mu_tilde)
      .def_readonly("W_good", &CoherenceReport::W_good)
      .def_readonly("C_W", &CoherenceReport::C_W)
      .def_readonly("s_max_admissible", &CoherenceReport::s_max_admissible)
      .def_readonly("column_optima", &CoherenceReport::column_optima);

  m.def("mutual_coherence", &mutual_coherence, py::arg("A"));
  m.def(
      "column_minimax_lp",
      [](const Matrix& A, Index i) {
        const ColumnMinimax cm = column_minimax_lp(A, i);
        return py::make_tuple(cm.w, cm.t);
      },
      py::arg("A"), py::arg("i"), "Returns (w, t) for column i");
  m.def("generalized_coherence", &generalized_coherence, py::arg("A"));
  m.def("verify_optimality", &verify_optimality, py::arg("A"), py::arg("i"), py::arg("w"),
        py::arg("t"), py::arg("starts") = 50, py::arg("steps") = 20000,
        py::arg("seed") = 0x51BCADu);

  py::class_<LayerParams>(m, "LayerParams")
      .def_readwrite("W1", &LayerParams::W1)
      .def_readwrite("W2", &LayerParams::W2)
      .def_readwrite("W", &LayerParams::W)
      .def_readwrite("theta", &LayerParams::theta)
      .def_readwrite("ss_count", &LayerParams::ss_count);

  py::class_<NetworkParams>(m, "NetworkParams")
      .def_property_readonly("variant",
                             [](const NetworkParams& p) {
                               return p.variant == Variant::kFull ? "full" : "coupled";
                             })
      .def_readwrite("layers", &NetworkParams::layers)
      .def("depth", &NetworkParams::depth);

  py::class_<LayerTrace>(m, "LayerTrace")
      .def_readonly("iterates", &LayerTrace::iterates)
      .def_readonly("selected", &LayerTrace::selected)
      .def_readonly("l1_err", &LayerTrace::l1_err)
      .def_readonly("l2_err", &LayerTrace::l2_err)
      .def_readonly("supports", &LayerTrace::supports);

  py::class_<TheoryCertificate>(m, "TheoryCertificate")
      .def_readonly("mu_tilde", &TheoryCertificate::mu_tilde)
      .def_readonly("C_W", &TheoryCertificate::C_W)
      .def_readonly("s", &TheoryCertificate::s)
      .def_readonly("B", &TheoryCertificate::B)
      .def_readonly("sigma", &TheoryCertificate::sigma)
      .def_readonly("c", &TheoryCertificate::c)
      .def_readonly("C", &TheoryCertificate::C)
      .def_readonly("e_bounds", &TheoryCertificate::e_bounds)
      .def_readonly("thetas", &TheoryCertificate::thetas);

  m.def("forward_lista", &forward_lista, py::arg("params"), py::arg("b"));
  m.def("forward_lista_ss", &forward_lista_ss, py::arg("params"), py::arg("b"));
  m.def("forward_lista_cp", &forward_lista_cp, py::arg("params"), py::arg("A"), py::arg("b"));
  m.def("forward_lista_cpss", &forward_lista_cpss, py::arg("params"), py::arg("A"),
        py::arg("b"));
  m.def("annotate", &annotate, py::arg("trace"), py::arg("x_star"));
  m.def("to_full", &to_full, py::arg("params"), py::arg("A"));
  m.def("coupling_residual", &coupling_residual, py::arg("params"), py::arg("A"), py::arg("k"));
  m.def(
      "make_theory_params",
      [](const Matrix& A, const CoherenceReport& report, Index s, double B, double sigma,
         Index K) {
        TheoryParams tp = make_theory_params(A, report, s, B, sigma, K);
        return py::make_tuple(tp.params, tp.certificate);
      },
      py::arg("A"), py::arg("report"), py::arg("s"), py::arg("B"), py::arg("sigma"),
      py::arg("K"), "Returns (params, certificate)");
  m.def(
      "apply_support_schedule",
      [](NetworkParams& params, double p, double p_max) {
        apply_support_schedule(params, SupportSchedule(p, p_max, params.n()));
        return params;
      },
      py::arg("params"), py::arg("p"), py::arg("p_max"));
  m.def("empirical_rate", &empirical_rate, py::arg("errors"), py::arg("floor") = 1e-12);
  m.def("init_params", [](const Matrix& A, const std::string& variant, Index K, double L,
                          double lambda0) {
    return init_params(A, variant_from_string(variant), K, L, lambda0);
  },
        py::arg("A"), py::arg("variant"), py::arg("K"), py::arg("L"),
        py::arg("lambda0") = 0.2);
  m.def("save_params", &save_params, py::arg("directory"), py::arg("params"), py::arg("seed"),
        py::arg("provenance"));
  m.def(
      "load_params",
      [](const std::string& dir) {
        LoadedParams lp = load_params(dir);
        return py::make_tuple(lp.params, lp.seed, lp.provenance);
      },
      py::arg("directory"), "Returns (params, seed, provenance)");

  m.def("loss_mse", &loss_mse, py::arg("x"), py::arg("x_star"));
  m.def(
      "backward",
      [](const LayerTrace& trace, const NetworkParams& params, const Matrix& A,
         const SignalSample& sample, Index loss_layer) {
        const ParamGrads g = backward(trace, params, A, sample, loss_layer);
        py::list out;
        for (const auto& l : g.layers) {
          py::dict d;
          if (params.variant == Variant::kFull) {
            d["dW1"] = l.dW1;
            d["dW2"] = l.dW2;
          } else {
            d["dW"] = l.dW;
          }
          d["dtheta"] = l.dtheta;
          out.append(d);
        }
        return out;
      },
      py::arg("trace"), py::arg("params"), py::arg("A"), py::arg("sample"),
      py::arg("loss_layer"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("alpha0", &TrainConfig::alpha0)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("steps_per_stage", &TrainConfig::steps_per_stage)
      .def_readwrite("decay_gamma", &TrainConfig::decay_gamma)
      .def_readwrite("validation_size", &TrainConfig::validation_size)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("lambda0", &TrainConfig::lambda0)
      .def_readwrite("momentum", &TrainConfig::momentum)
      .def_readwrite("early_stop", &TrainConfig::early_stop)
      .def_readwrite("eval_every", &TrainConfig::eval_every);

  m.def(
      "stagewise_train",
      [](const NetworkParams& init, const Matrix& A, const TrainConfig& cfg,
         const ProblemConfig& problem) {
        const TrainResult r = stagewise_train(init, A, cfg, problem);
        py::list log;
        for (const auto& row : r.log) {
          py::dict d;
          d["step"] = row.step;
          d["stage"] = row.stage;
          d["layer"] = row.layer;
          d["minibatch_loss"] = row.minibatch_loss;
          d["validation_nmse_db"] = row.validation_nmse_db;
          log.append(d);
        }
        return py::make_tuple(r.params, log, r.diverged);
      },
      py::arg("init"), py::arg("A"), py::arg("cfg"), py::arg("problem"),
      "Returns (params, log, diverged)");

  m.def("save_matrix", &save_matrix, py::arg("path"), py::arg("matrix"));
  m.def("load_matrix", &load_matrix, py::arg("path"));
  m.def("matrix_hash_hex", &matrix_hash_hex, py::arg("matrix"));
}
