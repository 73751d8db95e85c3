// Command-line front end: solve one instance, run a benchmark suite, or run
// the verification suite. All artifacts (trace CSV, result JSON, binary
// vectors, PGM images) are written under --out-dir.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "proxnewton/bench.hpp"
#include "proxnewton/io.hpp"
#include "proxnewton/rng.hpp"

namespace pn = proxnewton;
using json = nlohmann::json;

namespace {

struct SolveArgs {
  std::string family;
  pn::BenchSpec spec;
  std::string solver = "irpnm-reg";
  std::string out_dir = ".";
  std::string plot_path;
  std::string matrix_path, rhs_path;  // file-loaded problem
  std::string model = "least-squares";
  double model_nu = 0.25;
  std::string reg_kind = "l1";
  double reg_lambda = 1.0;
  bool trace_timing = false;
  bool check_invariants = false;
  bool keep_nu_min = false;  // user pinned --nu-min: skip family override
};

pn::RunResult dispatch_solver(const std::string& solver,
                              const pn::CompositeProblem& p,
                              const pn::AlgoParams& params,
                              const pn::Vector& x0) {
  if (solver == "irpnm-reg") return pn::run_irpnm_reg(p, params, x0);
  if (solver == "irpnm-ls") return pn::run_irpnm_ls(p, params, x0);
  if (solver == "irpnm-reg-ls") return pn::run_irpnm_reg_ls(p, params, x0);
  if (solver == "fista") return pn::run_fista(p, params, x0);
  throw CLI::ValidationError("--solver",
                             "unknown solver '" + solver + "'");
}

double fista_default_tol(const std::string& family) {
  if (family == "student-l1") return 1e-4;
  if (family == "student-group") return 1e-3;
  if (family == "image-restore") return 1e-4;
  return 1e-5;
}

void add_param_flags(CLI::App* cmd, pn::AlgoParams& p) {
  cmd->add_option("--c1", p.c1, "sufficient-decrease ratio threshold");
  cmd->add_option("--c2", p.c2, "high-success ratio threshold");
  cmd->add_option("--sigma1", p.sigma1, "nu shrink factor");
  cmd->add_option("--sigma2", p.sigma2, "nu inflation factor");
  cmd->add_option("--eta", p.eta, "rbar acceptance factor");
  cmd->add_option("--theta", p.theta, "inexactness factor");
  cmd->add_option("--alpha", p.alpha, "model-decrease factor");
  cmd->add_option("--a", p.a, "convexification multiplier");
  cmd->add_option("--nu-min", p.nu_min, "lower bound for nu");
  cmd->add_option("--nu0", p.nu0, "initial nu (default: automatic rule)");
  cmd->add_option("--nu-bar", p.nu_bar, "upper cap for nu on accepted steps");
  cmd->add_option("--delta", p.delta, "regularization exponent");
  cmd->add_option("--tau", p.tau, "inexactness exponent");
  cmd->add_option("--p-min", p.p_min, "pred floor factor");
  cmd->add_option("--kappa", p.kappa, "pred floor residual exponent");
  cmd->add_option("--max-outer", p.max_outer, "outer iteration cap");
  cmd->add_option("--max-inner", p.max_inner, "inner iteration cap");
  cmd->add_option("--max-fista", p.max_fista, "baseline iteration cap");
}

pn::GeneratedProblem load_file_problem(const SolveArgs& args) {
  pn::GeneratedProblem gp;
  pn::Matrix a = pn::read_dense_matrix(args.matrix_path);
  pn::Vector b = args.rhs_path.empty()
                     ? pn::Vector(pn::Vector::Zero(a.rows()))
                     : pn::read_vector(args.rhs_path);
  const auto n = a.cols();
  if (args.model == "least-squares") {
    gp.problem.smooth = pn::SmoothModel::least_squares();
  } else if (args.model == "logistic") {
    gp.problem.smooth =
        pn::SmoothModel::logistic(static_cast<int>(a.rows()));
  } else if (args.model == "student-t") {
    gp.problem.smooth = pn::SmoothModel::student_t(args.model_nu);
  } else {
    throw CLI::ValidationError("--model", "unknown model " + args.model);
  }
  gp.problem.op = std::make_shared<pn::DenseOperator>(std::move(a));
  gp.problem.shift = std::move(b);
  if (args.reg_kind == "zero") {
    gp.problem.reg = pn::Regularizer::zero();
  } else if (args.reg_kind == "l1") {
    gp.problem.reg = pn::Regularizer::l1(args.reg_lambda);
  } else {
    throw CLI::ValidationError("--reg", "unknown regularizer " +
                                            args.reg_kind);
  }
  gp.lambda = args.reg_lambda;
  gp.problem.meta.family = "file";
  gp.x0 = pn::Vector::Zero(n);
  return gp;
}

json result_json(const pn::GeneratedProblem& gp, const std::string& solver,
                 const pn::RunResult& run, const std::string& x_file) {
  json j;
  j["solver"] = solver;
  j["family"] = gp.problem.meta.family;
  j["seed"] = gp.problem.meta.seed;
  j["lambda"] = gp.lambda;
  j["termination"] = pn::to_string(run.reason);
  j["outer_iters"] = run.outer_iters;
  j["total_inner"] = run.total_inner;
  j["F"] = run.final_F;
  j["r_norm"] = run.final_r_norm;
  j["wall_ms"] = run.wall_ms;
  j["x_file"] = x_file;
  j["invariant_violations"] = run.invariant_violations;
  if (!run.diagnostic.empty()) j["diagnostic"] = run.diagnostic;
  return j;
}

int run_solve(const SolveArgs& args, pn::AlgoParams params) {
  params.validate();  // reject conflicting overrides before any generation
  pn::GeneratedProblem gp;
  if (!args.matrix_path.empty()) {
    gp = load_file_problem(args);
    if (!std::isnan(args.spec.tol)) params.tol = args.spec.tol;
  } else if (!args.family.empty()) {
    pn::BenchSpec spec = args.spec;
    spec.family = args.family;
    spec.apply_defaults();
    gp = pn::generate(spec);
    params.tol = spec.tol;
    if (gp.nu_min_override && !args.keep_nu_min)
      params.nu_min = *gp.nu_min_override;
  } else {
    std::cerr << "solve: need --family or --matrix\n";
    return 1;
  }
  params.trace_timing = args.trace_timing;
  params.check_invariants = args.check_invariants;

  pn::RunResult run = dispatch_solver(args.solver, gp.problem, params, gp.x0);

  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  const std::string trace_path = args.out_dir + "/trace.csv";
  const std::string x_path = args.out_dir + "/x.bin";
  pn::write_text_file(trace_path, pn::trace_csv(run.trace, args.trace_timing));
  pn::write_vector(x_path, run.x);

  json j = result_json(gp, args.solver, run, x_path);
  if (gp.problem.meta.family == "image-restore") {
    const pn::Vector restored = pn::restore_image(gp, run.x);
    const std::string img_path = args.out_dir + "/restored.pgm";
    pn::write_pgm(img_path, restored, gp.image_side);
    j["restored_pgm"] = img_path;
    j["psnr_restored"] = pn::psnr(restored, gp.truth);
    j["psnr_observed"] = pn::psnr(pn::observed_image(gp), gp.truth);
  }
  pn::write_text_file(args.out_dir + "/result.json", j.dump(2) + "\n");

  if (!args.plot_path.empty()) {
    std::string plot;
    char buf[64];
    for (const auto& rec : run.trace) {
      std::snprintf(buf, sizeof(buf), "%d %.17g\n", rec.k, rec.r_norm);
      plot += buf;
    }
    pn::write_text_file(args.plot_path, plot);
  }

  if (!run.invariant_violations.empty()) {
    std::cerr << "invariant violations:\n";
    for (const auto& v : run.invariant_violations) std::cerr << "  " << v << "\n";
    return 2;
  }
  std::cout << "solver=" << args.solver << " iters=" << run.outer_iters
            << " F=" << run.final_F << " r_norm=" << run.final_r_norm
            << " reason=" << pn::to_string(run.reason) << "\n";
  return run.reason == pn::TermReason::ResidualTol ? 0 : 2;
}

struct BenchArgs {
  std::vector<std::string> families;
  std::vector<std::string> solvers = {"irpnm-reg"};
  int seeds = 3;
  std::uint64_t seed0 = 1;
  std::string out_dir = "bench-out";
  int workers = 1;
  bool check_invariants = false;
};

struct BenchRow {
  pn::BenchSpec spec;
  std::string solver;
  pn::BenchMetrics metrics;
  std::string termination;
  std::size_t violations = 0;
};

int run_bench(const BenchArgs& args, const pn::AlgoParams& base_params) {
  const std::vector<std::string> all_families = {
      "logistic-l1", "logistic-group", "student-l1", "student-group",
      "image-restore"};
  std::vector<std::string> families = args.families;
  if (families.empty() ||
      (families.size() == 1 && families[0] == "all"))
    families = all_families;

  struct Task {
    pn::BenchSpec spec;
    std::string solver;
  };
  std::vector<Task> tasks;
  for (const auto& fam : families)
    for (int t = 0; t < args.seeds; ++t)
      for (const auto& solver : args.solvers) {
        pn::BenchSpec spec;
        spec.family = fam;
        spec.seed = args.seed0 + static_cast<std::uint64_t>(t);
        spec.apply_defaults();
        tasks.push_back({spec, solver});
      }

  std::vector<BenchRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      pn::GeneratedProblem gp = pn::generate(task.spec);
      pn::AlgoParams params = base_params;
      params.tol = task.solver == "fista" ? fista_default_tol(task.spec.family)
                                          : task.spec.tol;
      params.check_invariants = args.check_invariants;
      if (gp.nu_min_override) params.nu_min = *gp.nu_min_override;
      pn::RunResult run =
          dispatch_solver(task.solver, gp.problem, params, gp.x0);
      BenchRow row;
      row.spec = task.spec;
      row.solver = task.solver;
      row.metrics = pn::compute_metrics(gp.problem, run);
      row.termination = pn::to_string(run.reason);
      row.violations = run.invariant_violations.size();
      if (task.spec.family == "image-restore")
        row.metrics.psnr = pn::psnr(pn::restore_image(gp, run.x), gp.truth);
      rows[i] = std::move(row);
      std::lock_guard<std::mutex> lock(io_mutex);
      std::cout << task.spec.family << " seed=" << task.spec.seed << " "
                << task.solver << ": iters=" << rows[i].metrics.iters
                << " F=" << rows[i].metrics.F
                << " r=" << rows[i].metrics.r_norm << "\n";
    }
  };
  const int nw = std::max(1, args.workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < nw - 1; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  std::string csv =
      "family,seed,solver,n,m,lambda_scale,tol,iters,F,r_norm,wall_ms,psnr,"
      "termination,violations\n";
  char buf[512];
  json manifest = json::array();
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%llu,%s,%lld,%lld,%.17g,%.3g,%d,%.17g,%.17g,%.3f,%s,%s,"
                  "%zu\n",
                  row.spec.family.c_str(),
                  static_cast<unsigned long long>(row.spec.seed),
                  row.solver.c_str(), static_cast<long long>(row.spec.n),
                  static_cast<long long>(row.spec.m), row.spec.c_lambda,
                  row.spec.tol, row.metrics.iters, row.metrics.F,
                  row.metrics.r_norm, row.metrics.wall_ms,
                  row.metrics.psnr ? std::to_string(*row.metrics.psnr).c_str()
                                   : "",
                  row.termination.c_str(), row.violations);
    csv += buf;
    json spec_json;
    spec_json["family"] = row.spec.family;
    spec_json["seed"] = row.spec.seed;
    spec_json["n"] = row.spec.n;
    spec_json["m"] = row.spec.m;
    spec_json["s"] = row.spec.s;
    spec_json["l"] = row.spec.l;
    spec_json["dyn_range_db"] = row.spec.dyn_range_db;
    spec_json["c_lambda"] = row.spec.c_lambda;
    spec_json["tol"] = row.spec.tol;
    spec_json["haar_level"] = row.spec.haar_level;
    spec_json["solver"] = row.solver;
    manifest.push_back(spec_json);
  }
  pn::write_text_file(args.out_dir + "/results.csv", csv);
  pn::write_text_file(args.out_dir + "/manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << args.out_dir << "/results.csv and manifest.json\n";

  for (const auto& row : rows)
    if (row.violations > 0) return 2;
  return 0;
}

int run_verify(int seeds) {
  const std::vector<std::string> families = {
      "logistic-l1", "logistic-group", "student-l1", "student-group",
      "image-restore"};
  int failures = 0;

  // Operator adjoint identities on freshly generated instances.
  for (const auto& fam : families) {
    pn::BenchSpec spec;
    spec.family = fam;
    spec.apply_defaults();
    pn::GeneratedProblem gp = pn::generate(spec);
    pn::Rng rng(7);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      pn::Vector x(gp.problem.op->cols()), y(gp.problem.op->rows());
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = rng.normal();
      const double lhs = gp.problem.op->apply(x).dot(y);
      const double rhs = x.dot(gp.problem.op->apply_adjoint(y));
      worst = std::max(worst,
                       std::abs(lhs - rhs) /
                           std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
    }
    const bool ok = worst <= 1e-10;
    failures += ok ? 0 : 1;
    std::cout << (ok ? "[pass] " : "[FAIL] ") << fam
              << " adjoint identity (worst rel err " << worst << ")\n";
  }

  // Invariant-monitored solves.
  for (const auto& fam : families) {
    for (int t = 0; t < seeds; ++t) {
      pn::BenchSpec spec;
      spec.family = fam;
      spec.seed = 1 + static_cast<std::uint64_t>(t);
      spec.apply_defaults();
      pn::GeneratedProblem gp = pn::generate(spec);
      pn::AlgoParams params;
      params.tol = spec.tol;
      params.check_invariants = true;
      if (gp.nu_min_override) params.nu_min = *gp.nu_min_override;
      pn::RunResult run = pn::run_irpnm_reg(gp.problem, params, gp.x0);
      const bool ok = run.invariant_violations.empty();
      failures += ok ? 0 : 1;
      std::cout << (ok ? "[pass] " : "[FAIL] ") << fam << " seed "
                << spec.seed << ": " << run.outer_iters << " iters, "
                << run.invariant_violations.size()
                << " invariant violations, reason "
                << pn::to_string(run.reason) << "\n";
      for (const auto& v : run.invariant_violations)
        std::cout << "       " << v << "\n";
    }
  }
  std::cout << (failures == 0 ? "verify: all checks passed\n"
                              : "verify: FAILURES\n");
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized inexact proximal Newton solver and benchmarks"};
  app.require_subcommand(1);

  SolveArgs sargs;
  pn::AlgoParams params;
  auto* solve = app.add_subcommand("solve", "run one solver on one problem");
  solve->add_option("--family", sargs.family,
                    "logistic-l1|logistic-group|student-l1|student-group|"
                    "image-restore");
  solve->add_option("--seed", sargs.spec.seed, "generator seed");
  solve->add_option("--n", sargs.spec.n, "problem dimension");
  solve->add_option("--m", sargs.spec.m, "samples / measurements");
  solve->add_option("--s", sargs.spec.s, "sparsity");
  solve->add_option("--l", sargs.spec.l, "group count");
  solve->add_option("--d", sargs.spec.dyn_range_db, "dynamic range (dB)");
  solve->add_option("--c-lambda", sargs.spec.c_lambda,
                    "regularization scale (absolute for image-restore)");
  solve->add_option("--tol", sargs.spec.tol, "stationarity tolerance");
  solve->add_option("--haar-level", sargs.spec.haar_level, "wavelet levels");
  solve->add_option("--image", sargs.spec.image_path, "input PGM image");
  solve->add_option("--solver", sargs.solver,
                    "irpnm-reg|irpnm-ls|irpnm-reg-ls|fista");
  solve->add_option("--out-dir", sargs.out_dir, "artifact directory");
  solve->add_option("--emit-plot-data", sargs.plot_path,
                    "write (k, r_norm) pairs to this file");
  solve->add_option("--matrix", sargs.matrix_path, "dense matrix file");
  solve->add_option("--rhs", sargs.rhs_path, "shift vector file");
  solve->add_option("--model", sargs.model,
                    "least-squares|logistic|student-t (file problems)");
  solve->add_option("--model-nu", sargs.model_nu, "student-t nu");
  solve->add_option("--reg", sargs.reg_kind, "zero|l1 (file problems)");
  solve->add_option("--lambda", sargs.reg_lambda, "lambda (file problems)");
  solve->add_flag("--trace-timing", sargs.trace_timing,
                  "measured wall_ms in the trace (not reproducible)");
  solve->add_flag("--check-invariants", sargs.check_invariants,
                  "per-iteration assertion monitor");
  add_param_flags(solve, params);

  BenchArgs bargs;
  pn::AlgoParams bench_params;
  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  bench->add_option("--families", bargs.families,
                    "families to run (default: all)");
  bench->add_option("--solvers", bargs.solvers, "solvers to run");
  bench->add_option("--seeds", bargs.seeds, "trials per family");
  bench->add_option("--seed0", bargs.seed0, "first seed");
  bench->add_option("--out-dir", bargs.out_dir, "output directory");
  bench->add_option("--workers", bargs.workers,
                    "worker threads (default 1: reproducible order)");
  bench->add_flag("--check-invariants", bargs.check_invariants,
                  "per-iteration assertion monitor");
  add_param_flags(bench, bench_params);

  int verify_seeds = 2;
  auto* verify = app.add_subcommand("verify", "run the property suite");
  verify->add_option("--seeds", verify_seeds, "seeds per family");

  try {
    app.parse(argc, argv);
    if (solve->parsed()) {
      sargs.keep_nu_min = solve->count("--nu-min") > 0;
      return run_solve(sargs, params);
    }
    if (bench->parsed()) return run_bench(bargs, bench_params);
    if (verify->parsed()) return run_verify(verify_seeds);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
