#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shapekit/assembly.hpp"
#include "shapekit/estimator.hpp"
#include "shapekit/inference.hpp"
#include "shapekit/simulation.hpp"
#include "shapekit/validate.hpp"

namespace py = pybind11;

namespace {

using namespace shapekit;

struct Assembled {
  Dataset data;
  KernelModel kernel;
  MultiIndexSet set;
  GramSystem sys;
};

Eigen::VectorXd broadcast_lengthscale(const std::vector<double>& ell, int d) {
  Eigen::VectorXd out(d);
  if (ell.size() == 1) {
    out.setConstant(ell[0]);
  } else if (static_cast<int>(ell.size()) == d) {
    for (int t = 0; t < d; ++t) out[t] = ell[t];
  } else {
    throw input_error("lengthscale must have 1 or d entries");
  }
  return out;
}

Assembled assemble(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                   const std::vector<double>& lengthscale, int s) {
  Assembled a;
  const int d = static_cast<int>(X.cols());
  a.set = enumerate(d, s);
  if (W.rows() != X.rows())
    throw input_error("X and W must have the same number of rows");
  if (W.cols() != a.set.m())
    throw input_error("W must have one column per multi-index; see multi_indices(d, s) for the order");
  a.data.X = X;
  a.data.W = W;
  a.kernel = gaussian_kernel(broadcast_lengthscale(lengthscale, d));
  ActiveSet act;
  for (int p = 0; p < a.set.m(); ++p)
    if (W.col(p).cwiseAbs().maxCoeff() > 0.0) act.positions.push_back(p);
  if (act.positions.empty())
    throw input_error("all weight columns are identically zero");
  a.sys = build_gram(a.data, a.kernel, a.set, act);
  return a;
}

FitResult dispatch_fit(const Assembled& a, double lam,
                       const std::string& solver) {
  if (lam <= 0.0) throw input_error("lambda must be positive");
  std::string path = solver;
  if (path == "auto") path = (a.sys.K.rows() <= 500) ? "dense" : "lowrank";
  if (path == "dense") return fit_dense(a.sys, lam);
  if (path != "lowrank")
    throw input_error("solver must be dense, lowrank, or auto");
  PivotedCholesky pc = pivoted_cholesky(a.sys.K);
  return fit_lowrank(a.sys, pc, lam);
}

py::dict fit_dict(const FitResult& fit) {
  py::dict d;
  d["c_hat"] = fit.c_hat;
  d["lambda"] = fit.lambda;
  d["path"] = fit.path == SolvePath::dense ? "dense" : "lowrank";
  d["rank_used"] = fit.rank_used;
  d["objective"] = fit.objective;
  d["fo_residual"] = fit.fo_residual;
  d["truncated"] = fit.truncated;
  return d;
}

py::dict py_fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                const std::vector<double>& lengthscale, double lam, int s,
                const std::string& solver) {
  Assembled a = assemble(X, W, lengthscale, s);
  return fit_dict(dispatch_fit(a, lam, solver));
}

py::dict py_shape_test(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                       const std::vector<double>& lengthscale, double lam,
                       const Eigen::MatrixXd& grid,
                       const std::vector<int>& alpha,
                       const std::string& direction, int s, long mc_reps,
                       std::uint64_t seed, const std::vector<double>& levels,
                       int threads, const std::string& solver) {
  Assembled a = assemble(X, W, lengthscale, s);
  if (grid.cols() != X.cols())
    throw input_error("grid and X must have the same number of columns");
  if (static_cast<int>(alpha.size()) != X.cols())
    throw input_error("alpha must have d entries");
  Direction dir;
  if (direction == "nonneg") dir = Direction::nonneg;
  else if (direction == "nonpos") dir = Direction::nonpos;
  else throw input_error("direction must be nonneg or nonpos");

  FitResult fit = dispatch_fit(a, lam, solver);
  GridSystem gs = build_grid(a.data, a.kernel, a.set, a.sys, fit, grid, alpha);
  TestReport rep =
      run_shape_test(a.sys, gs, fit, dir, mc_reps, seed, levels, threads);

  py::dict d;
  d["theta_hat"] = rep.theta_hat;
  d["omega_hat"] = rep.omega_hat;
  d["W_N"] = rep.W_N;
  d["c_star"] = rep.c_star;
  d["p_value"] = rep.p_value;
  d["mc_reps"] = rep.mc_reps;
  d["seed"] = rep.seed;
  d["alpha_test"] = rep.alpha_test;
  d["direction"] = direction;
  py::dict dec;
  for (const auto& [level, reject] : rep.decision_at)
    dec[py::float_(level)] = reject;
  d["decision_at"] = dec;
  d["fit"] = fit_dict(fit);
  return d;
}

py::list py_simulate(const std::vector<long>& n_list,
                     const std::vector<long>& N_list,
                     const std::vector<std::string>& designs,
                     const std::vector<std::string>& violations, long reps,
                     double level, long mc_reps, std::uint64_t seed,
                     const std::string& plugin, int threads, double c_mild,
                     double c_mod, double c_strong, double decay_gamma,
                     long spike_count, double spike_magnitude, double bulk_min,
                     double bulk_max) {
  SimulationConfig cfg;
  cfg.n_list = n_list;
  cfg.N_list = N_list;
  cfg.designs.clear();
  for (const std::string& s : designs) cfg.designs.push_back(parse_design(s));
  cfg.violations.clear();
  for (const std::string& s : violations)
    cfg.violations.push_back(parse_violation(s));
  cfg.reps = reps;
  cfg.level = level;
  cfg.mc_reps = mc_reps;
  cfg.seed = seed;
  if (plugin == "exact") cfg.plugin = Plugin::exact;
  else if (plugin == "sample") cfg.plugin = Plugin::sample;
  else throw input_error("plugin must be exact or sample");
  cfg.threads = threads;
  cfg.constants = {c_mild, c_mod, c_strong};
  cfg.cov.decay_gamma = decay_gamma;
  cfg.cov.spike_count = spike_count;
  cfg.cov.spike_magnitude = spike_magnitude;
  cfg.cov.bulk_min = bulk_min;
  cfg.cov.bulk_max = bulk_max;

  SimulationResult res = run_experiment(cfg);
  py::list rows;
  for (const SimulationRow& row : res.rows) {
    py::dict r;
    r["design"] = to_string(row.design);
    r["n"] = row.n;
    r["N"] = row.N;
    r["violation"] = to_string(row.violation);
    r["reps"] = row.reps;
    r["rejection_rate"] = row.rejection_rate;
    r["mc_stderr"] = row.mc_stderr;
    r["failures"] = row.failures;
    rows.append(r);
  }
  return rows;
}

py::list py_validate(std::uint64_t seed) {
  py::list out;
  for (const OracleResult& r : validate_all(seed)) {
    py::dict d;
    d["name"] = r.name;
    d["pass"] = r.pass;
    d["detail"] = r.detail;
    out.append(d);
  }
  return out;
}

std::vector<MultiIndex> py_multi_indices(int d, int s) {
  return enumerate(d, s).indices;
}

}  // namespace

PYBIND11_MODULE(_shapekit, m) {
  m.doc() =
      "Derivative-weighted RKHS functional estimation and shape-constraint "
      "testing";

  py::register_exception<input_error>(m, "InputError", PyExc_ValueError);

  m.def("multi_indices", &py_multi_indices, py::arg("d"), py::arg("s"),
        "Multi-index enumeration defining the weight-column order");

  m.def("fit", &py_fit, py::arg("X"), py::arg("W"), py::arg("lengthscale"),
        py::arg("lam"), py::arg("s") = 2, py::arg("solver") = "auto",
        "Fit the regularized functional estimator; W columns follow "
        "multi_indices(d, s)");

  m.def("shape_test", &py_shape_test, py::arg("X"), py::arg("W"),
        py::arg("lengthscale"), py::arg("lam"), py::arg("grid"),
        py::arg("alpha"), py::arg("direction") = "nonneg", py::arg("s") = 2,
        py::arg("mc_reps") = 10000, py::arg("seed") = 12345,
        py::arg("levels") = std::vector<double>{0.01, 0.05, 0.10},
        py::arg("threads") = 1, py::arg("solver") = "auto",
        "Fit, then test D^alpha h >= 0 (or <= 0) on the grid rows");

  m.def("simulate", &py_simulate, py::arg("n_list") = std::vector<long>{10},
        py::arg("N_list") = std::vector<long>{500, 1000, 1500, 2000},
        py::arg("designs") =
            std::vector<std::string>{"identity", "decay", "spike"},
        py::arg("violations") =
            std::vector<std::string>{"null", "mild", "moderate", "strong"},
        py::arg("reps") = 500, py::arg("level") = 0.05,
        py::arg("mc_reps") = 2000, py::arg("seed") = 20240814,
        py::arg("plugin") = "sample", py::arg("threads") = 1,
        py::arg("c_mild") = 1.0, py::arg("c_mod") = 1.0,
        py::arg("c_strong") = 1.0, py::arg("decay_gamma") = 1.0,
        py::arg("spike_count") = 0, py::arg("spike_magnitude") = 10.0,
        py::arg("bulk_min") = 0.5, py::arg("bulk_max") = 1.5,
        "Size/power experiment; returns one row per (design, n, N, violation) "
        "cell");

  m.def("validate", &py_validate, py::arg("seed") = 42,
        "Run every numerical oracle suite");
}
