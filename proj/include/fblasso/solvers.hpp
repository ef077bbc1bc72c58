#ifndef FBLASSO_SOLVERS_HPP
#define FBLASSO_SOLVERS_HPP

#include <utility>

#include "fblasso/problem.hpp"
#include "fblasso/prox.hpp"

// Augmented-Lagrangian solvers for the fused-lasso family. Each constraint
// of the split reformulation (coefficients = thresholded copy, coupled
// differences = thresholded copy, and for the classifier the hinge slacks)
// gets a quadratic penalty weight mu and a dual ascent step delta. One
// primal alternation per outer iteration: a single linear solve for the
// coefficients followed by closed-form shrinkage of the split variables.

namespace fblasso {

/// 0.5 |X b - y|^2 + lam1 |b|_1 + lam2 |L b|_1 (identity design for flsa).
inline double fused_objective(const FusedProblem& pr, Span beta) {
  if (pr.kind() == ProblemKind::svm)
    throw std::invalid_argument("fused_objective: problem kind is svm");
  if (beta.size() != pr.p()) throw std::invalid_argument("fused_objective: length mismatch");
  Vec fit;
  pr.design_apply(beta, fit);
  const Vec& y = pr.response();
  double loss = 0.0;
  for (std::size_t i = 0; i < fit.size(); ++i) {
    const double r = fit[i] - y[i];
    loss += r * r;
  }
  const Vec diff = pr.coupling().apply(beta);
  return 0.5 * loss + pr.lam1() * norm1(beta) + pr.lam2() * norm1(diff);
}

/// Averaged hinge loss plus the two penalties.
inline double svm_objective(const FusedProblem& pr, Span beta, double intercept) {
  if (pr.kind() != ProblemKind::svm)
    throw std::invalid_argument("svm_objective: problem kind is not svm");
  if (beta.size() != pr.p()) throw std::invalid_argument("svm_objective: length mismatch");
  const Matrix& X = pr.design();
  const Vec& y = pr.response();
  double hinge = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double slack = 1.0 - y[i] * (dot(X.row(i), beta) + intercept);
    if (slack > 0.0) hinge += slack;
  }
  hinge /= static_cast<double>(X.rows());
  const Vec diff = pr.coupling().apply(beta);
  return hinge + pr.lam1() * norm1(beta) + pr.lam2() * norm1(diff);
}

/// Relative change of the objective between consecutive iterations.
inline double relative_energy(double obj_prev, double obj_curr) {
  const double denom =
      obj_prev != 0.0 ? std::abs(obj_prev) : std::numeric_limits<double>::epsilon();
  return std::abs(obj_curr - obj_prev) / denom;
}

/// Stopping rule: true iff |curr - prev| / prev <= rel_tol, with a machine
/// epsilon guard when the previous objective is exactly zero.
inline bool converged_rel_energy(double obj_prev, double obj_curr, double rel_tol) {
  return relative_energy(obj_prev, obj_curr) <= rel_tol;
}

inline std::pair<double, double> pretrial_select_mu(const FusedProblem& problem, int probe_iters);

namespace detail {

// Shared outer loop for the two quadratic-loss solvers; beta_step solves
// the coefficient subproblem in place and may append a PCG count.
template <typename BetaStep>
Solution quadratic_split_bregman(const FusedProblem& pr, const SolverConfig& cfg,
                                 BetaStep&& beta_step) {
  const std::size_t p = pr.p();
  const std::size_t m = pr.coupling().rows();
  const std::size_t n = pr.n();
  const Vec& y = pr.response();
  const double lam1 = pr.lam1(), lam2 = pr.lam2();
  const double mu1 = cfg.mu1, mu2 = cfg.mu2;

  SolverState st;
  st.beta.assign(p, 0.0);
  st.split_coef.assign(p, 0.0);
  st.split_diff.assign(m, 0.0);
  st.dual_coef.assign(p, 0.0);
  st.dual_diff.assign(m, 0.0);

  Vec lin;
  pr.design_apply_t(y, lin);  // constant part of the rhs

  Solution sol;
  sol.mu1 = mu1;
  sol.mu2 = mu2;

  double obj = 0.5 * dot(y, y);  // objective at beta = 0
  st.objective_history.push_back(obj);

  Vec rhs(p), coupled(m, 0.0), fit(n), tmp_m(m);
  double rel = std::numeric_limits<double>::infinity();
  bool converged = false;

  for (int k = 1; k <= cfg.max_iter; ++k) {
    for (std::size_t j = 0; j < m; ++j) tmp_m[j] = mu2 * st.split_diff[j] - st.dual_diff[j];
    pr.coupling().apply_t_into(tmp_m, rhs);
    for (std::size_t i = 0; i < p; ++i) rhs[i] += lin[i] + mu1 * st.split_coef[i] - st.dual_coef[i];

    beta_step(rhs, st.beta, sol.pcg_iters);
    pr.coupling().apply_into(st.beta, coupled);

    for (std::size_t i = 0; i < p; ++i)
      st.split_coef[i] = soft_threshold_scalar(st.beta[i] + st.dual_coef[i] / mu1, lam1 / mu1);
    for (std::size_t j = 0; j < m; ++j)
      st.split_diff[j] = soft_threshold_scalar(coupled[j] + st.dual_diff[j] / mu2, lam2 / mu2);
    for (std::size_t i = 0; i < p; ++i)
      st.dual_coef[i] += cfg.delta1 * (st.beta[i] - st.split_coef[i]);
    for (std::size_t j = 0; j < m; ++j)
      st.dual_diff[j] += cfg.delta2 * (coupled[j] - st.split_diff[j]);

    pr.design_apply(st.beta, fit);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = fit[i] - y[i];
      loss += r * r;
    }
    const double next = 0.5 * loss + lam1 * norm1(st.beta) + lam2 * norm1(coupled);

    st.objective_history.push_back(next);
    st.iterations = k;
    rel = relative_energy(obj, next);
    // The statistic needs two post-initialization objectives to be
    // meaningful, so the stop can fire from the second iteration on.
    const bool stop = k >= 2 && rel <= cfg.rel_tol;
    obj = next;
    if (stop) {
      converged = true;
      break;
    }
  }

  double gap_coef = 0.0, gap_diff = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    gap_coef = std::max(gap_coef, std::abs(st.beta[i] - st.split_coef[i]));
  for (std::size_t j = 0; j < m; ++j)
    gap_diff = std::max(gap_diff, std::abs(coupled[j] - st.split_diff[j]));

  sol.coef = std::move(st.split_coef);
  sol.iterations = st.iterations;
  sol.rel_e = rel;
  sol.converged = converged;
  sol.gap_coef = gap_coef;
  sol.gap_diff = gap_diff;
  sol.objective = fused_objective(pr, sol.coef);
  sol.objective_history = std::move(st.objective_history);
  return sol;
}

inline void apply_pretrial(const FusedProblem& pr, SolverConfig& config) {
  if (!config.mu_auto) return;
  const auto [m1, m2] = pretrial_select_mu(pr, config.pretrial_iters);
  config.mu1 = m1;
  config.mu2 = m2;
  config.delta1 = 0.0;  // re-match the dual steps to the chosen weights
  config.delta2 = 0.0;
  config.mu_auto = false;
}

}  // namespace detail

/// Split Bregman iteration for standard fused-lasso regression. The
/// coefficient subproblem (X^T X + mu1 I + mu2 L^T L) beta = rhs is solved
/// by PCG, preconditioned with mu1 I + mu2 L^T L (factored once) for the
/// chain operator and with the Jacobi diagonal otherwise; PCG is warm
/// started from the previous iterate.
inline Solution solve_fused_lasso(const FusedProblem& pr, SolverConfig config = {}) {
  if (pr.kind() != ProblemKind::regression)
    throw std::invalid_argument("solve_fused_lasso: problem kind is not regression");
  detail::apply_pretrial(pr, config);
  const SolverConfig cfg = config.resolved(pr.kind());

  const std::size_t p = pr.p();
  const DiffOperator& L = pr.coupling();

  Vec xfit, xtfit, gram;
  LinOp A;
  A.dim = p;
  A.apply = [&](Span in, Vec& out) {
    pr.design_apply(in, xfit);
    pr.design_apply_t(xfit, xtfit);
    L.gram_into(in, gram);
    out.resize(p);
    for (std::size_t i = 0; i < p; ++i) out[i] = xtfit[i] + cfg.mu1 * in[i] + cfg.mu2 * gram[i];
  };

  TridiagFactor factor;
  Vec jacobi;
  if (L.mode() == DiffOperator::Mode::chain) {
    factor = tridiag_cholesky(build_preconditioner(L, cfg.mu1, cfg.mu2));
    A.precond = [&factor](Span in, Vec& out) { factor.solve_into(in, out); };
  } else {
    jacobi = L.gram_diagonal();
    for (double& d : jacobi) d = cfg.mu1 + cfg.mu2 * d;
    A.precond = [&jacobi](Span in, Vec& out) {
      out.resize(in.size());
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] / jacobi[i];
    };
  }

  const int pcg_cap = cfg.pcg_max > 0 ? cfg.pcg_max : static_cast<int>(p);
  return detail::quadratic_split_bregman(
      pr, cfg, [&](const Vec& rhs, Vec& beta, std::vector<int>& counts) {
        PcgResult r = pcg(A, rhs, beta, cfg.pcg_tol, pcg_cap);
        beta = std::move(r.x);
        counts.push_back(r.iterations);
      });
}

/// Split Bregman iteration for the signal approximator (identity design).
/// The coefficient subproblem ((mu1 + 1) I + mu2 L^T L) beta = rhs is
/// tridiagonal; its Cholesky factor is computed once and reused, so each
/// iteration costs O(p).
inline Solution solve_flsa(const FusedProblem& pr, SolverConfig config = {}) {
  if (pr.kind() != ProblemKind::flsa)
    throw std::invalid_argument("solve_flsa: problem kind is not flsa");
  detail::apply_pretrial(pr, config);
  const SolverConfig cfg = config.resolved(pr.kind());

  const Vec ones(pr.p(), 1.0);
  const TridiagFactor factor =
      tridiag_cholesky(build_preconditioner(pr.coupling(), cfg.mu1, cfg.mu2, ones));
  return detail::quadratic_split_bregman(
      pr, cfg,
      [&](const Vec& rhs, Vec& beta, std::vector<int>&) { factor.solve_into(rhs, beta); });
}

/// Split Bregman iteration for the fused-lasso support vector classifier.
/// The (p+1)-dimensional coefficient/intercept block system is the
/// tridiagonal-plus-final-diagonal block plus a low-rank term, solved by
/// PCG with the block-diagonal part as preconditioner. Hinge slacks are
/// updated with the one-sided shrinkage map.
inline Solution solve_flsvm(const FusedProblem& pr, SolverConfig config = {}) {
  if (pr.kind() != ProblemKind::svm)
    throw std::invalid_argument("solve_flsvm: problem kind is not svm");
  detail::apply_pretrial(pr, config);
  const SolverConfig cfg = config.resolved(pr.kind());

  const std::size_t n = pr.n();
  const std::size_t p = pr.p();
  const std::size_t m = pr.coupling().rows();
  const Matrix& X = pr.design();
  const Vec& y = pr.response();
  const DiffOperator& L = pr.coupling();
  const double lam1 = pr.lam1(), lam2 = pr.lam2();
  const double mu1 = cfg.mu1, mu2 = cfg.mu2, mu3 = cfg.mu3;
  const double nd = static_cast<double>(n);

  // Extended operator on (beta, intercept):
  //   [mu1 I + mu2 L^T L, 0; 0, 0] + mu3 Z^T Z with Z = [YX, y].
  Vec zprod(n), gram;
  LinOp A;
  A.dim = p + 1;
  A.apply = [&](Span in, Vec& out) {
    const Span xb = in.first(p);
    const double x0 = in[p];
    out.assign(p + 1, 0.0);
    L.gram_into(xb, gram);
    for (std::size_t j = 0; j < p; ++j) out[j] = mu1 * xb[j] + mu2 * gram[j];
    for (std::size_t i = 0; i < n; ++i) zprod[i] = y[i] * (dot(X.row(i), xb) + x0);
    for (std::size_t i = 0; i < n; ++i) {
      const double wgt = mu3 * y[i] * zprod[i];
      out[p] += wgt;
      if (wgt == 0.0) continue;
      const Span row = X.row(i);
      for (std::size_t j = 0; j < p; ++j) out[j] += wgt * row[j];
    }
  };

  TridiagFactor factor;
  Vec jacobi;
  if (L.mode() == DiffOperator::Mode::chain) {
    TridiagMatrix P = build_preconditioner(L, mu1, mu2);
    P.diag.push_back(mu3 * dot(y, y));
    P.offdiag.push_back(0.0);
    factor = tridiag_cholesky(P);
    A.precond = [&factor](Span in, Vec& out) { factor.solve_into(in, out); };
  } else {
    jacobi = L.gram_diagonal();
    for (double& d : jacobi) d = mu1 + mu2 * d;
    jacobi.push_back(mu3 * dot(y, y));
    A.precond = [&jacobi](Span in, Vec& out) {
      out.resize(in.size());
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] / jacobi[i];
    };
  }

  SolverState st;
  st.beta.assign(p, 0.0);
  st.intercept = 0.0;
  st.split_coef.assign(p, 0.0);
  st.split_diff.assign(m, 0.0);
  st.split_hinge.assign(n, 1.0);  // matches the slack at the zero start
  st.dual_coef.assign(p, 0.0);
  st.dual_diff.assign(m, 0.0);
  st.dual_hinge.assign(n, 0.0);

  Solution sol;
  sol.mu1 = mu1;
  sol.mu2 = mu2;
  sol.mu3 = mu3;

  double obj = 1.0;  // averaged hinge loss of the zero classifier
  st.objective_history.push_back(obj);

  Vec ext(p + 1, 0.0), rhs(p + 1), coupled(m, 0.0), margin(n, 0.0), tmp_m(m), scaled(n);
  const int pcg_cap = cfg.pcg_max > 0 ? cfg.pcg_max : static_cast<int>(p + 1);
  double rel = std::numeric_limits<double>::infinity();
  bool converged = false;

  for (int k = 1; k <= cfg.max_iter; ++k) {
    // rhs = [mu1 a - u + L^T(mu2 b - v); 0] + mu3 Z^T (1 - c + w/mu3)
    for (std::size_t j = 0; j < m; ++j) tmp_m[j] = mu2 * st.split_diff[j] - st.dual_diff[j];
    Vec head;
    pr.coupling().apply_t_into(tmp_m, head);
    for (std::size_t i = 0; i < p; ++i)
      rhs[i] = head[i] + mu1 * st.split_coef[i] - st.dual_coef[i];
    rhs[p] = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      scaled[i] = y[i] * (1.0 - st.split_hinge[i] + st.dual_hinge[i] / mu3);
    for (std::size_t i = 0; i < n; ++i) {
      const double wgt = mu3 * scaled[i];
      const Span row = X.row(i);
      for (std::size_t j = 0; j < p; ++j) rhs[j] += wgt * row[j];
      rhs[p] += wgt;
    }

    PcgResult r = pcg(A, rhs, ext, cfg.pcg_tol, pcg_cap);
    ext = std::move(r.x);
    sol.pcg_iters.push_back(r.iterations);
    for (std::size_t i = 0; i < p; ++i) st.beta[i] = ext[i];
    st.intercept = ext[p];

    for (std::size_t i = 0; i < n; ++i)
      margin[i] = y[i] * (dot(X.row(i), st.beta) + st.intercept);
    pr.coupling().apply_into(st.beta, coupled);

    for (std::size_t i = 0; i < p; ++i)
      st.split_coef[i] = soft_threshold_scalar(st.beta[i] + st.dual_coef[i] / mu1, lam1 / mu1);
    for (std::size_t j = 0; j < m; ++j)
      st.split_diff[j] = soft_threshold_scalar(coupled[j] + st.dual_diff[j] / mu2, lam2 / mu2);
    for (std::size_t i = 0; i < n; ++i)
      st.split_hinge[i] =
          hinge_shrink_scalar(1.0 - margin[i] + st.dual_hinge[i] / mu3, 1.0 / (nd * mu3));

    for (std::size_t i = 0; i < p; ++i)
      st.dual_coef[i] += cfg.delta1 * (st.beta[i] - st.split_coef[i]);
    for (std::size_t j = 0; j < m; ++j)
      st.dual_diff[j] += cfg.delta2 * (coupled[j] - st.split_diff[j]);
    for (std::size_t i = 0; i < n; ++i)
      st.dual_hinge[i] += cfg.delta3 * (1.0 - margin[i] - st.split_hinge[i]);

    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double slack = 1.0 - margin[i];
      if (slack > 0.0) hinge += slack;
    }
    const double next = hinge / nd + lam1 * norm1(st.beta) + lam2 * norm1(coupled);

    st.objective_history.push_back(next);
    st.iterations = k;
    rel = relative_energy(obj, next);
    // The zero start keeps the objective flat for one iteration while the
    // dual state warms up, so the stop may fire from iteration two on.
    const bool stop = k >= 2 && rel <= cfg.rel_tol;
    obj = next;
    if (stop) {
      converged = true;
      break;
    }
  }

  double gap_coef = 0.0, gap_diff = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    gap_coef = std::max(gap_coef, std::abs(st.beta[i] - st.split_coef[i]));
  for (std::size_t j = 0; j < m; ++j)
    gap_diff = std::max(gap_diff, std::abs(coupled[j] - st.split_diff[j]));

  sol.coef = std::move(st.split_coef);
  sol.intercept = st.intercept;
  sol.iterations = st.iterations;
  sol.rel_e = rel;
  sol.converged = converged;
  sol.gap_coef = gap_coef;
  sol.gap_diff = gap_diff;
  sol.objective = svm_objective(pr, sol.coef, sol.intercept);
  sol.objective_history = std::move(st.objective_history);
  return sol;
}

/// Dispatch on the problem kind.
inline Solution solve(const FusedProblem& pr, SolverConfig config = {}) {
  switch (pr.kind()) {
    case ProblemKind::regression: return solve_fused_lasso(pr, config);
    case ProblemKind::flsa: return solve_flsa(pr, config);
    case ProblemKind::svm: return solve_flsvm(pr, config);
  }
  throw std::logic_error("solve: unknown problem kind");
}

/// Short probe runs over the candidate grid {0.2, 0.4, 0.6, 0.8, 1.0} * |y|_2
/// with mu1 = mu2; picks the candidate with the largest objective decrease
/// per iteration. A zero response collapses the grid, in which case the
/// fallback weight is 1.0. For the classifier |y|_2 = sqrt(n), which scales
/// the same grid by the norm of the all-ones slack target.
inline std::pair<double, double> pretrial_select_mu(const FusedProblem& problem,
                                                    int probe_iters = 30) {
  const double scale = norm2(problem.response());
  if (scale == 0.0) return {1.0, 1.0};
  if (probe_iters < 1) probe_iters = 1;

  constexpr double grid[] = {0.2, 0.4, 0.6, 0.8, 1.0};
  double best_mu = grid[0] * scale;
  double best_rate = -std::numeric_limits<double>::infinity();
  for (double c : grid) {
    const double mu = c * scale;
    SolverConfig probe;
    probe.mu1 = mu;
    probe.mu2 = mu;
    probe.rel_tol = 0.0;  // fixed-budget probe, no early stop
    probe.max_iter = probe_iters;
    const Solution s = solve(problem, probe);
    const double drop = s.objective_history.front() - s.objective_history.back();
    const double rate = drop / static_cast<double>(std::max(1, s.iterations));
    if (rate > best_rate) {
      best_rate = rate;
      best_mu = mu;
    }
  }
  return {best_mu, best_mu};
}

}  // namespace fblasso

#endif  // FBLASSO_SOLVERS_HPP
