// Command-line front end: generate synthetic data, solve fused-lasso
// problems, run cross-validation, and run benchmark sweeps. Records are
// emitted as JSON lines on stdout, matrices and tables as CSV files.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fblasso/fblasso.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fblasso;

namespace {

constexpr const char* kRunSchema = "fblasso.run.v1";
constexpr const char* kMetaSchema = "fblasso.meta.v1";
constexpr const char* kCvSchema = "fblasso.cv.v1";
constexpr const char* kBenchSchema = "fblasso.bench.v1";

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FB_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw std::runtime_error("FB_SEED is not a valid unsigned integer");
    }
  }
  return 1;
}

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += argv[i];
  }
  return out;
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct MuChoice {
  bool auto_select = true;
  double value = 0.0;
};

MuChoice parse_mu(const std::string& text) {
  if (text == "auto") return {};
  MuChoice choice;
  choice.auto_select = false;
  std::size_t used = 0;
  try {
    choice.value = std::stod(text, &used);
  } catch (...) {
    used = 0;
  }
  if (used != text.size() || !(choice.value > 0.0))
    throw std::runtime_error("--mu expects 'auto' or a positive number");
  return choice;
}

// Loads a CSV as a design matrix even when it has a single column.
Matrix load_design(const std::string& path) {
  const Dataset ds = load_csv(path);
  if (ds.has_design) return ds.X;
  Matrix X(ds.y.size(), 1);
  for (std::size_t i = 0; i < ds.y.size(); ++i) X(i, 0) = ds.y[i];
  return X;
}

Vec load_column(const std::string& path) {
  const Dataset ds = load_csv(path);
  if (ds.has_design) throw std::runtime_error(path + ": expected a single-column file");
  return ds.y;
}

// Simple index-pulling worker pool; result slots are preallocated by the
// caller so the counter is the only shared state.
void run_tasks(int jobs, std::size_t count, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

struct GenerateArgs {
  std::string kind;
  std::size_t n = 100;
  std::size_t p = 500;
  double rho = 0.0;
  double sigma = -1.0;  // default depends on kind
  double separation = 10.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = ".";
};

int cmd_generate(const GenerateArgs& args, const std::string& command) {
  const std::uint64_t seed = args.seed_given ? args.seed : default_seed();
  const fs::path out(args.out);
  fs::create_directories(out);

  json meta;
  meta["schema"] = kMetaSchema;
  meta["command"] = command;
  meta["kind"] = args.kind;
  meta["seed"] = seed;
  meta["n"] = nullptr;
  meta["p"] = args.p;
  meta["rho"] = nullptr;
  meta["sigma"] = nullptr;
  meta["separation"] = nullptr;
  json files = json::array();

  if (args.kind == "regression") {
    const double sigma = args.sigma < 0.0 ? 1.0 : args.sigma;
    const Dataset ds = gen_equicorrelated(args.n, args.p, args.rho, seed);
    const Vec beta = default_beta(args.p);
    const Vec y = gen_regression(ds.X, beta, sigma, seed + 1);
    save_matrix_csv((out / "X.csv").string(), ds.X);
    save_vector_csv((out / "y.csv").string(), y);
    save_vector_csv((out / "beta_true.csv").string(), beta);
    meta["n"] = args.n;
    meta["rho"] = args.rho;
    meta["sigma"] = sigma;
    files = {"X.csv", "y.csv", "beta_true.csv"};
  } else if (args.kind == "flsa") {
    const double sigma = args.sigma < 0.0 ? 0.5 : args.sigma;
    const Vec signal = gen_flsa_signal(args.p, sigma, seed);
    const Vec truth = gen_flsa_signal(args.p, 0.0, seed);
    save_vector_csv((out / "signal.csv").string(), signal);
    save_vector_csv((out / "beta_true.csv").string(), truth);
    meta["n"] = args.p;
    meta["sigma"] = sigma;
    files = {"signal.csv", "beta_true.csv"};
  } else {  // svm
    const Dataset ds = gen_two_class(args.n, args.p, args.separation, seed);
    save_matrix_csv((out / "X.csv").string(), ds.X);
    save_vector_csv((out / "y.csv").string(), ds.y);
    meta["n"] = args.n;
    meta["separation"] = args.separation;
    files = {"X.csv", "y.csv"};
  }
  meta["files"] = files;

  std::ofstream mf(out / "metadata.json");
  if (!mf) throw std::runtime_error("cannot write metadata.json");
  mf << meta.dump() << '\n';
  std::cout << meta.dump() << '\n';
  return 0;
}

struct SolveArgs {
  std::string kind;
  std::string x_path, y_path, signal_path;
  double lam1 = 0.0, lam2 = 0.0;
  std::string mu = "auto";
  double mu3 = 1.0;
  double tol = 1e-5;
  int max_iter = 50000;
  double pcg_tol = 1e-8;
  std::string out = ".";
};

FusedProblem build_problem(const SolveArgs& args) {
  if (args.kind == "flsa") {
    if (args.signal_path.empty()) throw std::runtime_error("flsa requires --signal");
    return FusedProblem::flsa(load_column(args.signal_path), args.lam1, args.lam2);
  }
  if (args.x_path.empty() || args.y_path.empty())
    throw std::runtime_error(args.kind + " requires --x and --y");
  Matrix X = load_design(args.x_path);
  Vec y = load_column(args.y_path);
  if (args.kind == "regression")
    return FusedProblem::regression(std::move(X), std::move(y), args.lam1, args.lam2);
  return FusedProblem::svm(std::move(X), std::move(y), args.lam1, args.lam2);
}

json run_record(const std::string& command, const FusedProblem& pr, const Solution& sol,
                bool mu_auto, double wall_time, double kkt_residual) {
  json rec;
  rec["schema"] = kRunSchema;
  rec["command"] = command;
  rec["kind"] = kind_name(pr.kind());
  rec["n"] = pr.n();
  rec["p"] = pr.p();
  rec["rho"] = nullptr;  // unknown for loaded data
  rec["lam1"] = pr.lam1();
  rec["lam2"] = pr.lam2();
  rec["mu"] = {{"mu1", sol.mu1},
               {"mu2", sol.mu2},
               {"mu3", pr.kind() == ProblemKind::svm ? json(sol.mu3) : json(nullptr)},
               {"auto", mu_auto}};
  rec["iterations"] = sol.iterations;
  rec["wall_time_sec"] = wall_time;
  rec["objective"] = sol.objective;
  rec["rel_e"] = sol.rel_e;
  rec["kkt_residual"] = kkt_residual;
  rec["constraint_gap"] = {{"coef", sol.gap_coef}, {"diff", sol.gap_diff}};
  rec["nonzeros"] = sol.nonzeros();
  rec["intercept"] = pr.kind() == ProblemKind::svm ? json(sol.intercept) : json(nullptr);
  rec["converged"] = sol.converged;
  return rec;
}

int cmd_solve(const SolveArgs& args, const std::string& command) {
  const MuChoice mu = parse_mu(args.mu);
  const FusedProblem pr = build_problem(args);

  SolverConfig cfg;
  cfg.rel_tol = args.tol;
  cfg.max_iter = args.max_iter;
  cfg.pcg_tol = args.pcg_tol;
  cfg.mu3 = args.mu3;
  if (mu.auto_select)
    cfg.mu_auto = true;
  else
    cfg.mu1 = cfg.mu2 = mu.value;

  const auto t0 = std::chrono::steady_clock::now();
  const Solution sol = solve(pr, cfg);
  const double wall = elapsed_seconds(t0);

  const double kkt = pr.kind() == ProblemKind::svm
                         ? kkt_residual_flsvm(pr, sol.coef, sol.intercept).residual_inf
                         : kkt_residual_fused(pr, sol.coef).residual_inf;

  const fs::path out(args.out);
  fs::create_directories(out);
  save_vector_csv((out / "coef.csv").string(), sol.coef);

  std::cout << run_record(command, pr, sol, mu.auto_select, wall, kkt).dump() << '\n';
  return sol.converged ? 0 : 2;
}

struct CvArgs {
  std::string kind;
  std::string x_path, y_path;
  std::vector<double> lam1, lam2;
  int folds = 10;
  std::string mu = "auto";
  double mu3 = 1.0;
  double tol = 1e-5;
  int max_iter = 50000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;
};

int cmd_cv(const CvArgs& args, const std::string& command) {
  const MuChoice mu = parse_mu(args.mu);
  const std::uint64_t seed = args.seed_given ? args.seed : default_seed();
  const bool is_svm = args.kind == "svm";

  Matrix X = load_design(args.x_path);
  const Vec y = load_column(args.y_path);
  if (X.rows() != y.size()) throw std::runtime_error("cv: X rows != y length");
  const std::size_t n = X.rows(), p = X.cols();

  const FoldPlan plan = kfold(n, args.folds, seed);

  struct GridPoint {
    double lam1, lam2;
  };
  std::vector<GridPoint> grid;
  for (double a : args.lam1)
    for (double b : args.lam2) grid.push_back({a, b});

  struct FoldResult {
    double error = 0.0;  // mse for regression, misclassified count for svm
    int misclassified = 0;
    std::size_t train_n = 0, test_n = 0;
    bool converged = false;
  };
  std::vector<FoldResult> results(grid.size() * static_cast<std::size_t>(args.folds));

  const auto task = [&](std::size_t ti) {
    const std::size_t gi = ti / static_cast<std::size_t>(args.folds);
    const int fold = static_cast<int>(ti % static_cast<std::size_t>(args.folds));
    const GridPoint gp = grid[gi];

    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < n; ++i)
      (plan.assignments[i] == fold ? test_rows : train_rows).push_back(i);

    Dataset train;
    train.X = Matrix(train_rows.size(), p);
    train.has_design = true;
    train.y.resize(train_rows.size());
    train.classification = is_svm;
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      for (std::size_t j = 0; j < p; ++j) train.X(r, j) = X(train_rows[r], j);
      train.y[r] = y[train_rows[r]];
    }
    Matrix test_X(test_rows.size(), p);
    for (std::size_t r = 0; r < test_rows.size(); ++r)
      for (std::size_t j = 0; j < p; ++j) test_X(r, j) = X(test_rows[r], j);

    const StandardizeResult std_train = standardize(train);
    SolverConfig cfg;
    cfg.rel_tol = args.tol;
    cfg.max_iter = args.max_iter;
    cfg.mu3 = args.mu3;
    if (mu.auto_select)
      cfg.mu_auto = true;
    else
      cfg.mu1 = cfg.mu2 = mu.value;

    FoldResult res;
    res.train_n = train_rows.size();
    res.test_n = test_rows.size();
    const Matrix test_std = apply_transform(std_train.transform, test_X);
    if (is_svm) {
      const auto pr = FusedProblem::svm(std_train.data.X, std_train.data.y, gp.lam1, gp.lam2);
      const Solution sol = solve_flsvm(pr, cfg);
      res.converged = sol.converged;
      for (std::size_t r = 0; r < test_rows.size(); ++r) {
        const double score = dot(test_std.row(r), sol.coef) + sol.intercept;
        const double pred = score >= 0.0 ? 1.0 : -1.0;
        if (pred != y[test_rows[r]]) ++res.misclassified;
      }
      res.error = res.misclassified;
    } else {
      const auto pr =
          FusedProblem::regression(std_train.data.X, std_train.data.y, gp.lam1, gp.lam2);
      const Solution sol = solve_fused_lasso(pr, cfg);
      res.converged = sol.converged;
      const auto& t = std_train.transform;
      double sq = 0.0;
      for (std::size_t r = 0; r < test_rows.size(); ++r) {
        double pred = dot(test_std.row(r), sol.coef);
        if (t.y_transformed) pred = pred * t.y_scale + t.y_mean;
        const double d = y[test_rows[r]] - pred;
        sq += d * d;
      }
      res.error = sq / static_cast<double>(std::max<std::size_t>(1, test_rows.size()));
    }
    results[ti] = res;
  };
  run_tasks(args.jobs, results.size(), task);

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    double err_sum = 0.0;
    int mis_total = 0;
    std::size_t test_total = 0;
    for (int f = 0; f < args.folds; ++f) {
      const FoldResult& res =
          results[gi * static_cast<std::size_t>(args.folds) + static_cast<std::size_t>(f)];
      json rec;
      rec["schema"] = kCvSchema;
      rec["command"] = command;
      rec["kind"] = args.kind;
      rec["lam1"] = grid[gi].lam1;
      rec["lam2"] = grid[gi].lam2;
      rec["fold"] = f;
      rec["aggregate"] = false;
      rec["train_n"] = res.train_n;
      rec["test_n"] = res.test_n;
      rec["error"] = res.error;
      rec["misclassified"] = is_svm ? json(res.misclassified) : json(nullptr);
      rec["converged"] = res.converged;
      rec["mean_error"] = nullptr;
      rec["errors"] = nullptr;
      std::cout << rec.dump() << '\n';
      err_sum += res.error;
      mis_total += res.misclassified;
      test_total += res.test_n;
    }
    json agg;
    agg["schema"] = kCvSchema;
    agg["command"] = command;
    agg["kind"] = args.kind;
    agg["lam1"] = grid[gi].lam1;
    agg["lam2"] = grid[gi].lam2;
    agg["fold"] = nullptr;
    agg["aggregate"] = true;
    agg["train_n"] = nullptr;
    agg["test_n"] = test_total;
    agg["error"] = nullptr;
    agg["misclassified"] = is_svm ? json(mis_total) : json(nullptr);
    agg["converged"] = nullptr;
    agg["mean_error"] = err_sum / static_cast<double>(args.folds);
    agg["errors"] =
        is_svm ? json(std::to_string(mis_total) + "/" + std::to_string(test_total)) : json(nullptr);
    std::cout << agg.dump() << '\n';
  }
  return 0;
}

struct BenchArgs {
  std::string kind;
  std::vector<std::size_t> n_list, p_list;
  std::vector<double> rho_list;
  std::vector<double> lam1, lam2;
  int repeats = 1;
  std::string mu = "auto";
  double sigma = -1.0;
  double tol = 1e-5;
  int max_iter = 50000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;
  std::string out = ".";
};

int cmd_bench(const BenchArgs& args, const std::string& command) {
  const MuChoice mu = parse_mu(args.mu);
  const std::uint64_t seed = args.seed_given ? args.seed : default_seed();
  const bool is_flsa = args.kind == "flsa";

  struct Cell {
    std::size_t n = 0, p = 0;
    double rho = 0.0;
  };
  std::vector<Cell> cells;
  if (is_flsa) {
    for (std::size_t p : args.p_list) cells.push_back({p, p, 0.0});
  } else {
    if (args.n_list.empty()) throw std::runtime_error("bench: regression needs --n");
    for (std::size_t n : args.n_list)
      for (std::size_t p : args.p_list)
        for (double rho : args.rho_list) cells.push_back({n, p, rho});
  }
  if (cells.empty()) throw std::runtime_error("bench: empty size grid");

  struct RunStats {
    double time_sum = 0.0;
    long iter_sum = 0;
    int runs = 0;
  };
  std::vector<RunStats> stats(cells.size() * static_cast<std::size_t>(args.repeats));

  const auto task = [&](std::size_t ti) {
    const std::size_t ci = ti / static_cast<std::size_t>(args.repeats);
    const std::size_t rep = ti % static_cast<std::size_t>(args.repeats);
    const Cell cell = cells[ci];
    const std::uint64_t run_seed = seed + 7919 * ci + rep;

    SolverConfig cfg;
    cfg.rel_tol = args.tol;
    cfg.max_iter = args.max_iter;
    if (mu.auto_select)
      cfg.mu_auto = true;
    else
      cfg.mu1 = cfg.mu2 = mu.value;

    RunStats rs;
    if (is_flsa) {
      const double sigma = args.sigma < 0.0 ? 0.5 : args.sigma;
      const Vec signal = gen_flsa_signal(cell.p, sigma, run_seed);
      for (double a : args.lam1) {
        for (double b : args.lam2) {
          const auto pr = FusedProblem::flsa(signal, a, b);
          const auto t0 = std::chrono::steady_clock::now();
          const Solution sol = solve_flsa(pr, cfg);
          rs.time_sum += elapsed_seconds(t0);
          rs.iter_sum += sol.iterations;
          ++rs.runs;
        }
      }
    } else {
      const double sigma = args.sigma < 0.0 ? 1.0 : args.sigma;
      const Dataset ds = gen_equicorrelated(cell.n, cell.p, cell.rho, run_seed);
      const Vec beta = default_beta(cell.p);
      const Vec y = gen_regression(ds.X, beta, sigma, run_seed + 1);
      for (double a : args.lam1) {
        for (double b : args.lam2) {
          const auto pr = FusedProblem::regression(ds.X, y, a, b);
          const auto t0 = std::chrono::steady_clock::now();
          const Solution sol = solve_fused_lasso(pr, cfg);
          rs.time_sum += elapsed_seconds(t0);
          rs.iter_sum += sol.iterations;
          ++rs.runs;
        }
      }
    }
    stats[ti] = rs;
  };
  run_tasks(args.jobs, stats.size(), task);

  const fs::path out(args.out);
  fs::create_directories(out);
  std::ofstream table(out / "bench.csv");
  std::ofstream scaling(out / "scaling.csv");
  if (!table || !scaling) throw std::runtime_error("bench: cannot write output tables");
  table << "method,n,p,rho,mean_time_sec,mean_iters\n";
  scaling << "method,n,p,rho,mean_time_sec,mean_iters,sec_per_iter\n";
  const std::string method = is_flsa ? "sbflsa" : "sbflasso";

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    double time_sum = 0.0;
    long iter_sum = 0;
    int runs = 0;
    for (int rep = 0; rep < args.repeats; ++rep) {
      const RunStats& rs =
          stats[ci * static_cast<std::size_t>(args.repeats) + static_cast<std::size_t>(rep)];
      time_sum += rs.time_sum;
      iter_sum += rs.iter_sum;
      runs += rs.runs;
    }
    const double mean_time = time_sum / std::max(1, runs);
    const double mean_iters = static_cast<double>(iter_sum) / std::max(1, runs);
    const std::string rho_field = is_flsa ? "" : format_double(cells[ci].rho);
    table << method << ',' << cells[ci].n << ',' << cells[ci].p << ',' << rho_field << ','
          << format_double(mean_time) << ',' << format_double(mean_iters) << '\n';
    scaling << method << ',' << cells[ci].n << ',' << cells[ci].p << ',' << rho_field << ','
            << format_double(mean_time) << ',' << format_double(mean_iters) << ','
            << format_double(mean_iters > 0 ? mean_time / mean_iters : 0.0) << '\n';

    json rec;
    rec["schema"] = kBenchSchema;
    rec["command"] = command;
    rec["method"] = method;
    rec["n"] = cells[ci].n;
    rec["p"] = cells[ci].p;
    rec["rho"] = is_flsa ? json(nullptr) : json(cells[ci].rho);
    rec["mean_time_sec"] = mean_time;
    rec["mean_iters"] = mean_iters;
    rec["repeats"] = args.repeats;
    rec["grid_size"] = args.lam1.size() * args.lam2.size();
    std::cout << rec.dump() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string command = join_args(argc, argv);
  CLI::App app{"Split Bregman solvers for the fused-lasso family"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cgen = app.add_subcommand("generate", "Write synthetic problem data as CSV");
  cgen->add_option("--kind", gen.kind, "Problem kind")
      ->required()
      ->check(CLI::IsMember({"regression", "flsa", "svm"}));
  cgen->add_option("--n", gen.n, "Number of observations");
  cgen->add_option("--p", gen.p, "Number of coefficients");
  cgen->add_option("--rho", gen.rho, "Pairwise predictor correlation");
  cgen->add_option("--sigma", gen.sigma, "Noise level (default 1 regression, 0.5 flsa)");
  cgen->add_option("--separation", gen.separation, "Class mean separation (svm)");
  cgen->add_option("--seed", gen.seed, "Random seed (default: FB_SEED or 1)")
      ->each([&gen](const std::string&) { gen.seed_given = true; });
  cgen->add_option("--out", gen.out, "Output directory");

  SolveArgs sv;
  auto* csolve = app.add_subcommand("solve", "Solve one problem and write coefficients");
  csolve->add_option("--kind", sv.kind, "Problem kind")
      ->required()
      ->check(CLI::IsMember({"regression", "flsa", "svm"}));
  csolve->add_option("--x", sv.x_path, "Design matrix CSV");
  csolve->add_option("--y", sv.y_path, "Response/label CSV");
  csolve->add_option("--signal", sv.signal_path, "Signal CSV (flsa)");
  csolve->add_option("--lam1", sv.lam1, "Sparsity penalty")->required();
  csolve->add_option("--lam2", sv.lam2, "Fusion penalty")->required();
  csolve->add_option("--mu", sv.mu, "Penalty weight: 'auto' or a positive value");
  csolve->add_option("--mu3", sv.mu3, "Hinge penalty weight (svm)");
  csolve->add_option("--tol", sv.tol, "Relative-energy stopping tolerance");
  csolve->add_option("--max-iter", sv.max_iter, "Outer iteration cap");
  csolve->add_option("--pcg-tol", sv.pcg_tol, "Inner linear-solve tolerance");
  csolve->add_option("--out", sv.out, "Output directory");

  CvArgs cv;
  auto* ccv = app.add_subcommand("cv", "Cross-validate over a penalty grid");
  ccv->add_option("--kind", cv.kind, "Problem kind")
      ->required()
      ->check(CLI::IsMember({"regression", "svm"}));
  ccv->add_option("--x", cv.x_path, "Design matrix CSV")->required();
  ccv->add_option("--y", cv.y_path, "Response/label CSV")->required();
  ccv->add_option("--lam1", cv.lam1, "Sparsity penalty (repeatable)")->required();
  ccv->add_option("--lam2", cv.lam2, "Fusion penalty (repeatable)")->required();
  ccv->add_option("--folds", cv.folds, "Fold count");
  ccv->add_option("--mu", cv.mu, "Penalty weight: 'auto' or a positive value");
  ccv->add_option("--mu3", cv.mu3, "Hinge penalty weight (svm)");
  ccv->add_option("--tol", cv.tol, "Stopping tolerance");
  ccv->add_option("--max-iter", cv.max_iter, "Outer iteration cap");
  ccv->add_option("--seed", cv.seed, "Random seed (default: FB_SEED or 1)")
      ->each([&cv](const std::string&) { cv.seed_given = true; });
  ccv->add_option("--jobs", cv.jobs, "Worker count");

  BenchArgs bench;
  auto* cbench = app.add_subcommand("bench", "Benchmark sweep over problem sizes");
  cbench->add_option("--kind", bench.kind, "Problem kind")
      ->required()
      ->check(CLI::IsMember({"regression", "flsa"}));
  cbench->add_option("--n", bench.n_list, "Observation counts (repeatable)");
  cbench->add_option("--p", bench.p_list, "Coefficient counts (repeatable)")->required();
  cbench->add_option("--rho", bench.rho_list, "Correlations (repeatable)");
  cbench->add_option("--lam1", bench.lam1, "Sparsity penalties (repeatable)")->required();
  cbench->add_option("--lam2", bench.lam2, "Fusion penalties (repeatable)")->required();
  cbench->add_option("--repeats", bench.repeats, "Repeats per cell");
  cbench->add_option("--mu", bench.mu, "Penalty weight: 'auto' or a positive value");
  cbench->add_option("--sigma", bench.sigma, "Noise level");
  cbench->add_option("--tol", bench.tol, "Stopping tolerance");
  cbench->add_option("--max-iter", bench.max_iter, "Outer iteration cap");
  cbench->add_option("--seed", bench.seed, "Random seed (default: FB_SEED or 1)")
      ->each([&bench](const std::string&) { bench.seed_given = true; });
  cbench->add_option("--jobs", bench.jobs, "Worker count");
  cbench->add_option("--out", bench.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cgen->parsed()) return cmd_generate(gen, command);
    if (csolve->parsed()) return cmd_solve(sv, command);
    if (ccv->parsed()) return cmd_cv(cv, command);
    if (cbench->parsed()) {
      if (bench.rho_list.empty()) bench.rho_list = {0.0};
      return cmd_bench(bench, command);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
