#ifndef FBLASSO_VERIFY_HPP
#define FBLASSO_VERIFY_HPP

#include <utility>
#include <vector>

#include "fblasso/problem.hpp"
#include "fblasso/solvers.hpp"

// Solver-independent correctness machinery: stationarity-residual
// certificates obtained by minimizing over admissible subgradients, and an
// exhaustive sign-pattern oracle for tiny instances.

namespace fblasso {

struct KktReport {
  double residual_inf = std::numeric_limits<double>::infinity();
  bool feasible_subgradient = false;
  double smooth_inf = 0.0;   // magnitude of the loss-gradient block
  double l1_inf = 0.0;       // magnitude of the l1 subgradient block
  double tv_inf = 0.0;       // magnitude of the coupled-difference block
  double dual_balance = 0.0; // |y^T s|, classifier only
  int sweeps = 0;
};

namespace detail {

struct BoxVar {
  double lo = -1.0;
  double hi = 1.0;
  double value = 0.0;
  bool free() const { return lo != hi; }
};

inline double clip(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

// Gaussian elimination with partial pivoting; returns false on a
// numerically singular system. Sized for the tiny oracle subproblems.
inline bool solve_dense_inplace(Matrix& A, Vec& b) {
  const std::size_t nn = A.rows();
  if (A.cols() != nn || b.size() != nn) throw std::invalid_argument("solve_dense: shape mismatch");
  double scale = 0.0;
  for (double v : A.data()) scale = std::max(scale, std::abs(v));
  const double tol = 1e-13 * std::max(scale, 1.0);

  for (std::size_t col = 0; col < nn; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < nn; ++r)
      if (std::abs(A(r, col)) > std::abs(A(piv, col))) piv = r;
    if (std::abs(A(piv, col)) <= tol) return false;
    if (piv != col) {
      for (std::size_t j = 0; j < nn; ++j) std::swap(A(piv, j), A(col, j));
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < nn; ++r) {
      const double f = A(r, col) / A(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < nn; ++j) A(r, j) -= f * A(col, j);
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = nn; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < nn; ++j) acc -= A(i, j) * b[j];
    b[i] = acc / A(i, i);
  }
  return true;
}

}  // namespace detail

/// Dense linear solve for small systems; throws on singular input.
inline Vec solve_dense(Matrix A, Vec b) {
  if (!detail::solve_dense_inplace(A, b)) throw std::runtime_error("solve_dense: singular system");
  return b;
}

/// Certifies a candidate regression/flsa solution. Coordinates of beta and
/// of the coupled differences with magnitude above tol_active pin their
/// subgradient at the sign; the rest stay free in [-1, 1]. The residual
/// |g + lam1 s + lam2 L^T q|_inf is minimized over the free box variables
/// by projected coordinate descent (at most 500 sweeps, change tol 1e-10).
inline KktReport kkt_residual_fused(const FusedProblem& pr, Span beta, double tol_active = 1e-6,
                                    double tol_feasible = 1e-6) {
  if (pr.kind() == ProblemKind::svm)
    throw std::invalid_argument("kkt_residual_fused: problem kind is svm");
  if (beta.size() != pr.p()) throw std::invalid_argument("kkt_residual_fused: length mismatch");
  const std::size_t p = pr.p();
  const DiffOperator& L = pr.coupling();
  const std::size_t m = L.rows();
  const double lam1 = pr.lam1(), lam2 = pr.lam2();

  // Loss gradient g = X^T (X beta - y).
  Vec fit;
  pr.design_apply(beta, fit);
  const Vec& y = pr.response();
  for (std::size_t i = 0; i < fit.size(); ++i) fit[i] -= y[i];
  Vec g;
  pr.design_apply_t(fit, g);

  const Vec coupled = L.apply(beta);

  std::vector<detail::BoxVar> s(p), q(m);
  for (std::size_t i = 0; i < p; ++i) {
    if (std::abs(beta[i]) > tol_active) {
      const double sg = beta[i] > 0.0 ? 1.0 : -1.0;
      s[i] = {sg, sg, sg};
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (std::abs(coupled[j]) > tol_active) {
      const double sg = coupled[j] > 0.0 ? 1.0 : -1.0;
      q[j] = {sg, sg, sg};
    }
  }

  // Rows of L as (col, value) lists for the general mode.
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::vector<double> row_sq(m, 2.0);
  if (L.mode() == DiffOperator::Mode::general) {
    rows.resize(m);
    for (const auto& e : L.entries()) rows[e.row].emplace_back(e.col, e.value);
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (const auto& [col, val] : rows[j]) acc += val * val;
      row_sq[j] = acc;
    }
  }

  // Residual r = g + lam1 s + lam2 L^T q, kept up to date incrementally.
  Vec r = g;
  for (std::size_t i = 0; i < p; ++i) r[i] += lam1 * s[i].value;
  {
    Vec qv(m);
    for (std::size_t j = 0; j < m; ++j) qv[j] = q[j].value;
    Vec lt;
    L.apply_t_into(qv, lt);
    for (std::size_t i = 0; i < p; ++i) r[i] += lam2 * lt[i];
  }

  KktReport report;
  const int max_sweeps = 500;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      if (!s[i].free()) continue;
      const double target = detail::clip(s[i].value - r[i] / lam1, s[i].lo, s[i].hi);
      const double delta = target - s[i].value;
      if (delta != 0.0) {
        r[i] += lam1 * delta;
        s[i].value = target;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (!q[j].free()) continue;
      double inner = 0.0, sq = row_sq[j];
      if (L.mode() == DiffOperator::Mode::chain) {
        inner = r[j + 1] - r[j];
      } else {
        for (const auto& [col, val] : rows[j]) inner += val * r[col];
        if (sq == 0.0) continue;
      }
      const double target = detail::clip(q[j].value - inner / (lam2 * sq), q[j].lo, q[j].hi);
      const double delta = target - q[j].value;
      if (delta != 0.0) {
        if (L.mode() == DiffOperator::Mode::chain) {
          r[j] -= lam2 * delta;
          r[j + 1] += lam2 * delta;
        } else {
          for (const auto& [col, val] : rows[j]) r[col] += lam2 * val * delta;
        }
        q[j].value = target;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    report.sweeps = sweep;
    if (max_change <= 1e-10) break;
  }

  report.residual_inf = norm_inf(r);
  report.smooth_inf = norm_inf(g);
  double s_inf = 0.0;
  for (const auto& v : s) s_inf = std::max(s_inf, std::abs(v.value));
  report.l1_inf = lam1 * s_inf;
  {
    Vec qv(m);
    for (std::size_t j = 0; j < m; ++j) qv[j] = q[j].value;
    Vec lt;
    L.apply_t_into(qv, lt);
    report.tv_inf = lam2 * norm_inf(lt);
  }
  report.feasible_subgradient = report.residual_inf <= tol_feasible;
  return report;
}

/// Certifies a candidate classifier. The hinge subgradient s_i is pinned at
/// 1 on violated margins and 0 on satisfied ones, free in [0, 1] on the
/// margin itself; the stationarity residual and the balance condition
/// |y^T s| are minimized jointly over all free box variables.
inline KktReport kkt_residual_flsvm(const FusedProblem& pr, Span beta, double intercept,
                                    double tol_active = 1e-6, double tol_feasible = 1e-6) {
  if (pr.kind() != ProblemKind::svm)
    throw std::invalid_argument("kkt_residual_flsvm: problem kind is not svm");
  if (beta.size() != pr.p()) throw std::invalid_argument("kkt_residual_flsvm: length mismatch");
  const std::size_t n = pr.n();
  const std::size_t p = pr.p();
  const DiffOperator& L = pr.coupling();
  const std::size_t m = L.rows();
  const Matrix& X = pr.design();
  const Vec& y = pr.response();
  const double lam1 = pr.lam1(), lam2 = pr.lam2();
  const double nd = static_cast<double>(n);

  const Vec coupled = L.apply(beta);

  std::vector<detail::BoxVar> s(n), pgrad(p), q(m);
  for (std::size_t i = 0; i < n; ++i) {
    const double slack = 1.0 - y[i] * (dot(X.row(i), beta) + intercept);
    if (slack > tol_active)
      s[i] = {1.0, 1.0, 1.0};
    else if (slack < -tol_active)
      s[i] = {0.0, 0.0, 0.0};
    else
      s[i] = {0.0, 1.0, 0.0};
  }
  for (std::size_t i = 0; i < p; ++i) {
    if (std::abs(beta[i]) > tol_active) {
      const double sg = beta[i] > 0.0 ? 1.0 : -1.0;
      pgrad[i] = {sg, sg, sg};
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (std::abs(coupled[j]) > tol_active) {
      const double sg = coupled[j] > 0.0 ? 1.0 : -1.0;
      q[j] = {sg, sg, sg};
    }
  }

  Vec row_sq(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Span row = X.row(i);
    row_sq[i] = dot(row, row) / (nd * nd);
  }

  std::vector<std::vector<std::pair<std::size_t, double>>> coupling_rows;
  std::vector<double> coupling_sq(m, 2.0);
  if (L.mode() == DiffOperator::Mode::general) {
    coupling_rows.resize(m);
    for (const auto& e : L.entries()) coupling_rows[e.row].emplace_back(e.col, e.value);
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (const auto& [col, val] : coupling_rows[j]) acc += val * val;
      coupling_sq[j] = acc;
    }
  }

  // r = -(1/n) X^T Y s + lam1 p + lam2 L^T q, balance = y^T s.
  Vec r(p, 0.0);
  double balance = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = -(y[i] * s[i].value) / nd;
    balance += y[i] * s[i].value;
    if (w == 0.0) continue;
    const Span row = X.row(i);
    for (std::size_t j = 0; j < p; ++j) r[j] += w * row[j];
  }
  for (std::size_t i = 0; i < p; ++i) r[i] += lam1 * pgrad[i].value;
  {
    Vec qv(m);
    for (std::size_t j = 0; j < m; ++j) qv[j] = q[j].value;
    Vec lt;
    L.apply_t_into(qv, lt);
    for (std::size_t i = 0; i < p; ++i) r[i] += lam2 * lt[i];
  }

  KktReport report;
  const int max_sweeps = 500;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!s[i].free()) continue;
      const Span row = X.row(i);
      // direction of s_i in r is -(y_i/n) x_i, in the balance term y_i
      const double inner = -(y[i] / nd) * dot(row, r) + balance * y[i];
      const double curv = row_sq[i] + 1.0;
      const double target = detail::clip(s[i].value - inner / curv, s[i].lo, s[i].hi);
      const double delta = target - s[i].value;
      if (delta != 0.0) {
        const double w = -(y[i] / nd) * delta;
        for (std::size_t j = 0; j < p; ++j) r[j] += w * row[j];
        balance += y[i] * delta;
        s[i].value = target;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    for (std::size_t i = 0; i < p; ++i) {
      if (!pgrad[i].free()) continue;
      const double target = detail::clip(pgrad[i].value - r[i] / lam1, pgrad[i].lo, pgrad[i].hi);
      const double delta = target - pgrad[i].value;
      if (delta != 0.0) {
        r[i] += lam1 * delta;
        pgrad[i].value = target;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (!q[j].free()) continue;
      double inner = 0.0;
      const double sq = coupling_sq[j];
      if (L.mode() == DiffOperator::Mode::chain) {
        inner = r[j + 1] - r[j];
      } else {
        for (const auto& [col, val] : coupling_rows[j]) inner += val * r[col];
        if (sq == 0.0) continue;
      }
      const double target = detail::clip(q[j].value - inner / (lam2 * sq), q[j].lo, q[j].hi);
      const double delta = target - q[j].value;
      if (delta != 0.0) {
        if (L.mode() == DiffOperator::Mode::chain) {
          r[j] -= lam2 * delta;
          r[j + 1] += lam2 * delta;
        } else {
          for (const auto& [col, val] : coupling_rows[j]) r[col] += lam2 * val * delta;
        }
        q[j].value = target;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    report.sweeps = sweep;
    if (max_change <= 1e-10) break;
  }

  report.residual_inf = std::max(norm_inf(r), std::abs(balance));
  report.dual_balance = std::abs(balance);
  {
    Vec xys(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = y[i] * s[i].value / nd;
      if (w == 0.0) continue;
      const Span row = X.row(i);
      for (std::size_t j = 0; j < p; ++j) xys[j] += w * row[j];
    }
    report.smooth_inf = norm_inf(xys);
  }
  double p_inf = 0.0;
  for (const auto& v : pgrad) p_inf = std::max(p_inf, std::abs(v.value));
  report.l1_inf = lam1 * p_inf;
  {
    Vec qv(m);
    for (std::size_t j = 0; j < m; ++j) qv[j] = q[j].value;
    report.tv_inf = lam2 * norm_inf(L.apply_t(qv));
  }
  report.feasible_subgradient = report.residual_inf <= tol_feasible;
  return report;
}

struct BruteForceResult {
  Vec beta;
  double objective = std::numeric_limits<double>::infinity();
  bool unique_pattern = true;
};

/// Exhaustive oracle for tiny chain-coupled instances (p <= 5). Enumerates
/// every sign pattern of beta and of its adjacent differences, solves the
/// equality-constrained quadratic for each consistent pattern, drops
/// candidates that violate their declared pattern, and returns the feasible
/// candidate with the smallest objective. unique_pattern reports whether
/// all near-optimal candidates agree on the coefficients.
inline BruteForceResult brute_force_fused(const FusedProblem& pr) {
  if (pr.kind() == ProblemKind::svm)
    throw std::invalid_argument("brute_force_fused: problem kind is svm");
  if (pr.coupling().mode() != DiffOperator::Mode::chain)
    throw std::invalid_argument("brute_force_fused: requires the chain operator");
  const std::size_t p = pr.p();
  if (p > 5) throw std::invalid_argument("brute_force_fused: refuses p > 5");
  const std::size_t m = p - 1;
  const std::size_t n = pr.n();
  const Vec& y = pr.response();
  const double lam1 = pr.lam1(), lam2 = pr.lam2();

  std::size_t total_sigma = 1, total_tau = 1;
  for (std::size_t i = 0; i < p; ++i) total_sigma *= 3;
  for (std::size_t j = 0; j < m; ++j) total_tau *= 3;

  std::vector<int> sigma(p), tau(m), group_of(p);
  std::vector<std::pair<double, Vec>> feasible;

  for (std::size_t si = 0; si < total_sigma; ++si) {
    std::size_t code = si;
    for (std::size_t i = 0; i < p; ++i) {
      sigma[i] = static_cast<int>(code % 3) - 1;
      code /= 3;
    }
    for (std::size_t ti = 0; ti < total_tau; ++ti) {
      code = ti;
      for (std::size_t j = 0; j < m; ++j) {
        tau[j] = static_cast<int>(code % 3) - 1;
        code /= 3;
      }

      // Fused pairs must share their declared sign.
      bool consistent = true;
      for (std::size_t j = 0; j < m; ++j) {
        if (tau[j] == 0 && sigma[j] != sigma[j + 1]) {
          consistent = false;
          break;
        }
      }
      if (!consistent) continue;

      // Contiguous runs linked by zero-difference edges form groups.
      int groups = 0;
      for (std::size_t i = 0; i < p; ++i) {
        if (i > 0 && tau[i - 1] == 0)
          group_of[i] = group_of[i - 1];
        else
          group_of[i] = groups++;
      }
      std::vector<int> var_of(groups, -1);  // -1 -> pinned at zero
      int K = 0;
      for (std::size_t i = 0; i < p; ++i) {
        const int gid = group_of[i];
        if (sigma[i] != 0 && var_of[gid] < 0) var_of[gid] = K++;
      }

      Vec beta(p, 0.0);
      bool solvable = true;
      if (K > 0) {
        // Reduced quadratic over the free group values z:
        //   0.5 |W z - y|^2 + c^T z, W columns = design columns summed per group.
        Matrix W(n, static_cast<std::size_t>(K), 0.0);
        for (std::size_t i = 0; i < p; ++i) {
          const int k = var_of[group_of[i]];
          if (k < 0) continue;
          if (pr.identity_design()) {
            W(i, static_cast<std::size_t>(k)) += 1.0;
          } else {
            const Matrix& X = pr.design();
            for (std::size_t row = 0; row < n; ++row)
              W(row, static_cast<std::size_t>(k)) += X(row, i);
          }
        }
        Vec c(static_cast<std::size_t>(K), 0.0);
        for (std::size_t i = 0; i < p; ++i) {
          const int k = var_of[group_of[i]];
          if (k >= 0) c[static_cast<std::size_t>(k)] += lam1 * sigma[i];
        }
        for (std::size_t j = 0; j < m; ++j) {
          if (tau[j] == 0) continue;
          const int kl = var_of[group_of[j]];
          const int kr = var_of[group_of[j + 1]];
          if (kl >= 0) c[static_cast<std::size_t>(kl)] -= lam2 * tau[j];
          if (kr >= 0) c[static_cast<std::size_t>(kr)] += lam2 * tau[j];
        }

        Matrix H(static_cast<std::size_t>(K), static_cast<std::size_t>(K), 0.0);
        Vec rhs(static_cast<std::size_t>(K), 0.0);
        for (int a = 0; a < K; ++a) {
          Vec wa(n);
          for (std::size_t row = 0; row < n; ++row) wa[row] = W(row, static_cast<std::size_t>(a));
          for (int b = a; b < K; ++b) {
            double acc = 0.0;
            for (std::size_t row = 0; row < n; ++row)
              acc += wa[row] * W(row, static_cast<std::size_t>(b));
            H(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = acc;
            H(static_cast<std::size_t>(b), static_cast<std::size_t>(a)) = acc;
          }
          rhs[static_cast<std::size_t>(a)] = dot(wa, y) - c[static_cast<std::size_t>(a)];
        }
        solvable = detail::solve_dense_inplace(H, rhs);
        if (solvable) {
          for (std::size_t i = 0; i < p; ++i) {
            const int k = var_of[group_of[i]];
            if (k >= 0) beta[i] = rhs[static_cast<std::size_t>(k)];
          }
        }
      }
      if (!solvable) continue;

      // Weak feasibility against the declared pattern; boundary overlaps
      // are harmless because the objective below is the exact one.
      const double slack = 1e-12 * std::max(1.0, norm_inf(beta));
      bool ok = true;
      for (std::size_t i = 0; i < p && ok; ++i) {
        if (sigma[i] > 0 && beta[i] < -slack) ok = false;
        if (sigma[i] < 0 && beta[i] > slack) ok = false;
      }
      for (std::size_t j = 0; j < m && ok; ++j) {
        const double d = beta[j + 1] - beta[j];
        if (tau[j] > 0 && d < -slack) ok = false;
        if (tau[j] < 0 && d > slack) ok = false;
      }
      if (!ok) continue;

      feasible.emplace_back(fused_objective(pr, beta), beta);
    }
  }

  BruteForceResult best;
  for (const auto& [obj, beta] : feasible) {
    if (obj < best.objective) {
      best.objective = obj;
      best.beta = beta;
    }
  }
  const double tie_tol = 1e-9 * (1.0 + std::abs(best.objective));
  for (const auto& [obj, beta] : feasible) {
    if (obj > best.objective + tie_tol) continue;
    double dist = 0.0;
    for (std::size_t i = 0; i < p; ++i) dist = std::max(dist, std::abs(beta[i] - best.beta[i]));
    if (dist > 1e-6) best.unique_pattern = false;
  }
  return best;
}

}  // namespace fblasso

#endif  // FBLASSO_VERIFY_HPP
