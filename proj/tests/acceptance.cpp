// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Run it from the build tree: ./tests/acceptance [--only N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "fblasso/fblasso.hpp"

using namespace fblasso;

namespace {

double secs(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
    den += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
  }
  return num / den;
}

Matrix random_matrix(std::size_t n, std::size_t p, Rng& rng) {
  Matrix X(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) X(i, j) = rng.gaussian();
  return X;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return std::string(buf);
}

SolverConfig deep_config(double rel_tol, int max_iter = 300000) {
  SolverConfig cfg;
  cfg.mu_auto = true;
  cfg.rel_tol = rel_tol;
  cfg.max_iter = max_iter;
  return cfg;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence_regression() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_obj = 0.0, worst_coef = 0.0;
  int unique_count = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(9000 + seed);
    const std::size_t n = 5 + rng.below(4);  // 5..8
    const std::size_t p = 2 + rng.below(3);  // 2..4
    const Matrix X = random_matrix(n, p, rng);
    Vec planted(p, 0.0);
    for (auto& v : planted) v = rng.uniform() < 0.5 ? 0.0 : 2.0 * rng.gaussian();
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = dot(X.row(i), planted) + 0.5 * rng.gaussian();
    const double lam1 = rng.uniform(0.1, 2.0), lam2 = rng.uniform(0.1, 2.0);
    const auto pr = FusedProblem::regression(X, y, lam1, lam2);

    const auto oracle = brute_force_fused(pr);
    const Solution sol = solve_fused_lasso(pr, deep_config(1e-12));
    if (!sol.converged) return {false, fmt("seed %llu did not converge", (unsigned long long)seed)};

    const double obj_gap = std::abs(sol.objective - oracle.objective) / (1.0 + oracle.objective);
    worst_obj = std::max(worst_obj, obj_gap);
    if (obj_gap > 1e-6)
      return {false, fmt("seed %llu objective gap %.3e > 1e-6", (unsigned long long)seed, obj_gap)};
    if (oracle.unique_pattern) {
      ++unique_count;
      double coef_gap = 0.0;
      for (std::size_t j = 0; j < p; ++j)
        coef_gap = std::max(coef_gap, std::abs(sol.coef[j] - oracle.beta[j]));
      worst_coef = std::max(worst_coef, coef_gap);
      if (coef_gap > 1e-3)
        return {false, fmt("seed %llu coef gap %.3e > 1e-3", (unsigned long long)seed, coef_gap)};
    }
  }
  const double elapsed = secs(t0);
  if (elapsed >= 60.0) return {false, fmt("runtime %.1fs >= 60s", elapsed)};
  return {true, fmt("50 instances, max obj gap %.2e, max coef gap %.2e (%d unique), %.1fs",
                    worst_obj, worst_coef, unique_count, elapsed)};
}

Outcome oracle_equivalence_flsa() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_obj = 0.0, worst_coef = 0.0;
  int unique_count = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(11000 + seed);
    const std::size_t p = 2 + rng.below(4);  // 2..5
    Vec y(p);
    for (std::size_t i = 0; i < p; ++i) y[i] = (i < p / 2 ? 0.0 : 2.0) + 0.4 * rng.gaussian();
    const double lam1 = rng.uniform(0.1, 2.0), lam2 = rng.uniform(0.1, 2.0);
    const auto pr = FusedProblem::flsa(y, lam1, lam2);

    const auto oracle = brute_force_fused(pr);
    const Solution sol = solve_flsa(pr, deep_config(1e-12));
    if (!sol.converged) return {false, fmt("seed %llu did not converge", (unsigned long long)seed)};

    const double obj_gap = std::abs(sol.objective - oracle.objective) / (1.0 + oracle.objective);
    worst_obj = std::max(worst_obj, obj_gap);
    if (obj_gap > 1e-6)
      return {false, fmt("seed %llu objective gap %.3e > 1e-6", (unsigned long long)seed, obj_gap)};
    if (oracle.unique_pattern) {
      ++unique_count;
      double coef_gap = 0.0;
      for (std::size_t j = 0; j < p; ++j)
        coef_gap = std::max(coef_gap, std::abs(sol.coef[j] - oracle.beta[j]));
      worst_coef = std::max(worst_coef, coef_gap);
      if (coef_gap > 1e-3)
        return {false, fmt("seed %llu coef gap %.3e > 1e-3", (unsigned long long)seed, coef_gap)};
    }
  }
  const double elapsed = secs(t0);
  if (elapsed >= 60.0) return {false, fmt("runtime %.1fs >= 60s", elapsed)};
  return {true, fmt("50 instances, max obj gap %.2e, max coef gap %.2e (%d unique), %.1fs",
                    worst_obj, worst_coef, unique_count, elapsed)};
}

Outcome kkt_at_scale() {
  std::string detail;
  for (double rho : {0.0, 0.4, 0.8}) {
    const auto ds = gen_equicorrelated(200, 2000, rho, 42);
    const Vec beta = default_beta(2000);
    const Vec y = gen_regression(ds.X, beta, 1.0, 43);
    const auto pr = FusedProblem::regression(ds.X, y, 16.0, 20.0);
    const auto t0 = std::chrono::steady_clock::now();
    const Solution sol = solve_fused_lasso(pr, deep_config(1e-8, 100000));
    const double elapsed = secs(t0);
    if (!sol.converged) return {false, fmt("rho=%.1f did not converge", rho)};

    Vec pull;
    pr.design_apply_t(y, pull);
    const double bound = 1e-4 * (1.0 + norm_inf(pull));
    const auto kkt = kkt_residual_fused(pr, sol.coef, 1e-4);
    if (kkt.residual_inf > bound)
      return {false, fmt("rho=%.1f residual %.3e > bound %.3e", rho, kkt.residual_inf, bound)};
    detail += fmt("rho=%.1f: %.2e <= %.2e (%.1fs)  ", rho, kkt.residual_inf, bound, elapsed);
  }
  return {true, detail};
}

Outcome mu_independence() {
  Rng rng(6700);
  const std::size_t n = 12, p = 8;
  const Matrix X = random_matrix(n, p, rng);
  Vec y(n);
  for (auto& v : y) v = rng.gaussian();
  const auto pr = FusedProblem::regression(X, y, 0.7, 0.9);
  const double scale = norm2(y);
  std::vector<double> objectives;
  for (double c : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    SolverConfig cfg;
    cfg.mu1 = cfg.mu2 = c * scale;
    cfg.rel_tol = 1e-11;
    cfg.max_iter = 300000;
    const Solution sol = solve_fused_lasso(pr, cfg);
    if (!sol.converged) return {false, fmt("mu=%.2f did not converge", c * scale)};
    objectives.push_back(sol.objective);
  }
  double spread = 0.0;
  for (double a : objectives)
    for (double b : objectives) spread = std::max(spread, std::abs(a - b) / std::abs(b));
  if (spread > 1e-5) return {false, fmt("objective spread %.3e > 1e-5", spread)};
  return {true, fmt("5 penalty weights, relative objective spread %.2e", spread)};
}

Outcome pcg_iteration_bound() {
  int global_max = 0;
  std::vector<int> all_counts;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ds = gen_equicorrelated(50, 2000, 0.0, 500 + seed);
    const Vec beta = default_beta(2000);
    const Vec y = gen_regression(ds.X, beta, 1.0, 600 + seed);
    const auto pr = FusedProblem::regression(ds.X, y, 8.0, 10.0);
    const Solution sol = solve_fused_lasso(pr, deep_config(1e-5, 100000));
    if (!sol.converged) return {false, fmt("seed %llu did not converge", (unsigned long long)seed)};
    for (int c : sol.pcg_iters) {
      global_max = std::max(global_max, c);
      all_counts.push_back(c);
      if (c > 51)
        return {false, fmt("seed %llu pcg count %d > n+1 = 51", (unsigned long long)seed, c)};
    }
  }
  std::sort(all_counts.begin(), all_counts.end());
  const int median = all_counts[all_counts.size() / 2];
  if (median > 15) return {false, fmt("median pcg count %d > 15", median)};
  return {true, fmt("20 instances, max count %d <= 51, median %d <= 15", global_max, median)};
}

Outcome exact_sparsity_blocks() {
  const auto ds = gen_equicorrelated(100, 500, 0.0, 7);
  const Vec beta = default_beta(500);
  const Vec y = gen_regression(ds.X, beta, 0.5, 8);
  const auto pr = FusedProblem::regression(ds.X, y, 16.0, 20.0);
  const Solution sol = solve_fused_lasso(pr, deep_config(1e-8, 100000));
  if (!sol.converged) return {false, "did not converge"};

  std::size_t exact_zeros = 0;
  double max_abs = 0.0;
  for (double v : sol.coef) {
    if (v == 0.0) ++exact_zeros;
    max_abs = std::max(max_abs, std::abs(v));
  }
  if (exact_zeros == 0) return {false, "no bit-exact zeros in the coefficients"};

  struct Block {
    long lo, hi;
  };
  const Block blocks[] = {{0, 19}, {40, 40}, {70, 84}, {120, 124}};
  const double support_level = 1e-3 * max_abs;
  std::size_t support = 0, outside = 0;
  bool covered[4] = {false, false, false, false};
  for (long i = 0; i < 500; ++i) {
    if (std::abs(sol.coef[static_cast<std::size_t>(i)]) <= support_level) continue;
    ++support;
    bool ok = false;
    for (int b = 0; b < 4; ++b) {
      if (i >= blocks[b].lo - 3 && i <= blocks[b].hi + 3) {
        ok = true;
        covered[b] = true;
      }
    }
    if (!ok) ++outside;
  }
  if (outside > 0) return {false, fmt("%zu support coordinates stray outside blocks +-3", outside)};
  for (int b = 0; b < 4; ++b)
    if (!covered[b]) return {false, fmt("block %d not covered by the support", b)};
  return {true,
          fmt("%zu exact zeros, %zu support coords confined to blocks +-3", exact_zeros, support)};
}

Outcome flsa_scale() {
  const Vec y = gen_flsa_signal(1000000, 0.5, 1);
  const auto pr = FusedProblem::flsa(y, 0.1, 0.8);
  const auto t0 = std::chrono::steady_clock::now();
  const Solution sol = solve_flsa(pr, deep_config(1e-5, 100000));
  const double elapsed = secs(t0);
  if (!sol.converged) return {false, "p=1e6 did not converge"};
  if (elapsed >= 60.0) return {false, fmt("p=1e6 solve took %.1fs >= 60s", elapsed)};

  std::vector<double> ps = {1e4, 1e5, 1e6}, per_iter;
  for (double pd : ps) {
    const auto p = static_cast<std::size_t>(pd);
    const Vec sig = gen_flsa_signal(p, 0.5, 2);
    const auto spr = FusedProblem::flsa(sig, 0.1, 0.8);
    SolverConfig cfg;
    cfg.mu1 = cfg.mu2 = 0.4 * norm2(sig);
    cfg.rel_tol = 0.0;  // fixed iteration budget
    cfg.max_iter = 40;
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 3; ++rep) {
      const auto s0 = std::chrono::steady_clock::now();
      const Solution probe = solve_flsa(spr, cfg);
      best = std::min(best, secs(s0) / std::max(1, probe.iterations));
    }
    per_iter.push_back(best);
  }
  const double slope = loglog_slope(ps, per_iter);
  if (slope > 1.2) return {false, fmt("per-iteration log-log slope %.3f > 1.2", slope)};
  return {true, fmt("p=1e6 in %.1fs (%d iters), per-iteration slope %.3f <= 1.2", elapsed,
                    sol.iterations, slope)};
}

Outcome regression_scaling() {
  std::vector<double> ps = {1000, 2000, 4000, 8000}, tp;
  for (double pd : ps) {
    const auto p = static_cast<std::size_t>(pd);
    const auto ds = gen_equicorrelated(200, p, 0.0, 5);
    const Vec y = gen_regression(ds.X, default_beta(p), 1.0, 6);
    const auto pr = FusedProblem::regression(ds.X, y, 16.0, 20.0);
    const auto t0 = std::chrono::steady_clock::now();
    const Solution sol = solve_fused_lasso(pr, deep_config(1e-5, 100000));
    if (!sol.converged) return {false, fmt("p=%zu did not converge", p)};
    tp.push_back(secs(t0));
  }
  const double slope_p = loglog_slope(ps, tp);
  if (slope_p > 1.3) return {false, fmt("slope over p is %.3f > 1.3", slope_p)};

  std::vector<double> ns = {50, 100, 200}, tn;
  for (double nd : ns) {
    const auto n = static_cast<std::size_t>(nd);
    const auto ds = gen_equicorrelated(n, 5000, 0.0, 7);
    const Vec y = gen_regression(ds.X, default_beta(5000), 1.0, 8);
    const auto pr = FusedProblem::regression(ds.X, y, 16.0, 20.0);
    const auto t0 = std::chrono::steady_clock::now();
    const Solution sol = solve_fused_lasso(pr, deep_config(1e-5, 100000));
    if (!sol.converged) return {false, fmt("n=%zu did not converge", n)};
    tn.push_back(secs(t0));
  }
  const double slope_n = loglog_slope(ns, tn);
  if (slope_n > 1.3) return {false, fmt("slope over n is %.3f > 1.3", slope_n)};
  return {true, fmt("slope over p %.3f <= 1.3, slope over n %.3f <= 1.3", slope_p, slope_n)};
}

Outcome flsvm_correctness() {
  const auto ds = gen_two_class(100, 50, 10.0, 13);
  const auto pr = FusedProblem::svm(ds.X, ds.y, 1e-3, 1e-3);
  SolverConfig cfg;
  cfg.rel_tol = 1e-9;
  cfg.max_iter = 400000;
  const Solution sol = solve_flsvm(pr, cfg);
  if (!sol.converged) return {false, "separated instance did not converge"};
  int mis = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const double score = dot(ds.X.row(i), sol.coef) + sol.intercept;
    if ((score >= 0.0 ? 1.0 : -1.0) != ds.y[i]) ++mis;
  }
  if (mis != 0) return {false, fmt("%d training misclassifications", mis)};
  const auto kkt = kkt_residual_flsvm(pr, sol.coef, sol.intercept, 1e-4);
  if (kkt.residual_inf > 1e-3)
    return {false, fmt("stationarity residual %.3e > 1e-3", kkt.residual_inf)};

  // Probe dominance on tiny instances.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(7000 + seed);
    const std::size_t n = 2 * (2 + rng.below(2));  // 4 or 6
    const std::size_t p = 2 + rng.below(2);        // 2 or 3
    const Matrix X = random_matrix(n, p, rng);
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = i < n / 2 ? 1.0 : -1.0;
    const double lam1 = rng.uniform(0.05, 0.8), lam2 = rng.uniform(0.05, 0.8);
    const auto tiny = FusedProblem::svm(X, y, lam1, lam2);
    SolverConfig tc;
    tc.rel_tol = 1e-10;
    tc.max_iter = 400000;
    const Solution ts = solve_flsvm(tiny, tc);
    double best_probe = std::numeric_limits<double>::infinity();
    for (int probe = 0; probe < 200; ++probe) {
      Vec pb(p);
      for (auto& v : pb) v = rng.uniform(-2.0, 2.0);
      best_probe = std::min(best_probe, svm_objective(tiny, pb, rng.uniform(-2.0, 2.0)));
    }
    if (ts.objective > best_probe + 1e-8)
      return {false, fmt("seed %llu objective %.6f above best probe %.6f",
                         (unsigned long long)seed, ts.objective, best_probe)};
  }
  return {true, fmt("0 misclassified, residual %.2e <= 1e-3, 20 probe-dominance instances",
                    kkt.residual_inf)};
}

Outcome stopping_rule_contract() {
  Rng rng(8100);
  const Matrix X = random_matrix(40, 60, rng);
  Vec y(40);
  for (auto& v : y) v = rng.gaussian();
  std::vector<Solution> runs;
  runs.push_back(
      solve_fused_lasso(FusedProblem::regression(X, y, 0.4, 0.4), deep_config(1e-5, 100000)));
  runs.push_back(solve_flsa(FusedProblem::flsa(gen_flsa_signal(2000, 0.5, 3), 0.2, 1.0),
                            deep_config(1e-5, 100000)));
  const auto two = gen_two_class(30, 10, 4.0, 9);
  SolverConfig svm_cfg;
  svm_cfg.rel_tol = 1e-5;
  svm_cfg.max_iter = 200000;
  runs.push_back(solve_flsvm(FusedProblem::svm(two.X, two.y, 0.05, 0.05), svm_cfg));

  for (std::size_t r = 0; r < runs.size(); ++r) {
    const Solution& sol = runs[r];
    if (!sol.converged) return {false, fmt("run %zu did not converge", r)};
    if (!all_finite(sol.objective_history))
      return {false, fmt("run %zu history contains NaN/Inf", r)};
    const std::size_t k = sol.objective_history.size();
    if (k < 2) return {false, fmt("run %zu history too short", r)};
    const double prev = sol.objective_history[k - 2];
    const double curr = sol.objective_history[k - 1];
    const double rel = std::abs(curr - prev) / prev;
    if (!(rel <= 1e-5)) return {false, fmt("run %zu final RelE %.3e > 1e-5", r, rel)};
  }
  return {true, "3 solver kinds: final RelE <= 1e-5, histories finite"};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence, fused lasso", oracle_equivalence_regression},
      {2, "oracle equivalence, signal approximator", oracle_equivalence_flsa},
      {3, "stationarity certificate at scale", kkt_at_scale},
      {4, "limit independent of penalty weight", mu_independence},
      {5, "pcg iteration bound", pcg_iteration_bound},
      {6, "exact sparsity confined to true blocks", exact_sparsity_blocks},
      {7, "signal approximator at a million unknowns", flsa_scale},
      {8, "regression runtime scaling", regression_scaling},
      {9, "classifier correctness", flsvm_correctness},
      {10, "stopping-rule contract", stopping_rule_contract},
  };

  int failures = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2d. %s: %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  std::printf("acceptance finished in %.1fs, %d failure%s\n", secs(t0), failures,
              failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}
