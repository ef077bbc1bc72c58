#ifndef FBLASSO_LINALG_HPP
#define FBLASSO_LINALG_HPP

#include <algorithm>
#include <cstddef>
#include <functional>
#include <utility>

#include "fblasso/core.hpp"

namespace fblasso {

struct SparseEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// First-difference style coupling operator. The chain mode is the
/// (p-1) x p matrix with row i carrying -1 at column i and +1 at column
/// i+1, so apply() produces adjacent differences. The general mode holds
/// an arbitrary sparse m x p matrix as (row, col, value) triples.
class DiffOperator {
 public:
  enum class Mode { chain, general };

  static DiffOperator chain(std::size_t p) {
    if (p == 0) throw std::invalid_argument("DiffOperator: p must be positive");
    DiffOperator op;
    op.mode_ = Mode::chain;
    op.p_ = p;
    op.rows_ = p - 1;
    return op;
  }

  static DiffOperator general(std::size_t rows, std::size_t p, std::vector<SparseEntry> entries) {
    if (p == 0) throw std::invalid_argument("DiffOperator: p must be positive");
    for (const auto& e : entries) {
      if (e.row >= rows || e.col >= p)
        throw std::invalid_argument("DiffOperator: entry out of bounds");
    }
    DiffOperator op;
    op.mode_ = Mode::general;
    op.p_ = p;
    op.rows_ = rows;
    op.entries_ = std::move(entries);
    return op;
  }

  Mode mode() const { return mode_; }
  std::size_t p() const { return p_; }
  std::size_t rows() const { return rows_; }
  const std::vector<SparseEntry>& entries() const { return entries_; }

  // out = L x
  void apply_into(Span x, Vec& out) const {
    if (x.size() != p_) throw std::invalid_argument("DiffOperator::apply: length mismatch");
    out.assign(rows_, 0.0);
    if (mode_ == Mode::chain) {
      for (std::size_t i = 0; i + 1 < p_; ++i) out[i] = x[i + 1] - x[i];
    } else {
      for (const auto& e : entries_) out[e.row] += e.value * x[e.col];
    }
  }

  Vec apply(Span x) const {
    Vec out;
    apply_into(x, out);
    return out;
  }

  // out = L^T v
  void apply_t_into(Span v, Vec& out) const {
    if (v.size() != rows_) throw std::invalid_argument("DiffOperator::apply_t: length mismatch");
    out.assign(p_, 0.0);
    if (mode_ == Mode::chain) {
      for (std::size_t i = 0; i + 1 < p_; ++i) {
        out[i] -= v[i];
        out[i + 1] += v[i];
      }
    } else {
      for (const auto& e : entries_) out[e.col] += e.value * v[e.row];
    }
  }

  Vec apply_t(Span v) const {
    Vec out;
    apply_t_into(v, out);
    return out;
  }

  // out = L^T L x; the chain version is a direct tridiagonal product.
  void gram_into(Span x, Vec& out) const {
    if (x.size() != p_) throw std::invalid_argument("DiffOperator::gram: length mismatch");
    if (mode_ == Mode::chain) {
      out.assign(p_, 0.0);
      if (p_ == 1) return;
      out[0] = x[0] - x[1];
      for (std::size_t j = 1; j + 1 < p_; ++j) out[j] = 2.0 * x[j] - x[j - 1] - x[j + 1];
      out[p_ - 1] = x[p_ - 1] - x[p_ - 2];
    } else {
      Vec tmp;
      apply_into(x, tmp);
      apply_t_into(tmp, out);
    }
  }

  Vec gram(Span x) const {
    Vec out;
    gram_into(x, out);
    return out;
  }

  /// Diagonal of L^T L, used for Jacobi preconditioning with general operators.
  Vec gram_diagonal() const {
    Vec d(p_, 0.0);
    if (mode_ == Mode::chain) {
      if (p_ == 1) return d;
      d.assign(p_, 2.0);
      d.front() = 1.0;
      d.back() = 1.0;
    } else {
      for (const auto& e : entries_) d[e.col] += e.value * e.value;
    }
    return d;
  }

 private:
  DiffOperator() = default;
  Mode mode_ = Mode::chain;
  std::size_t p_ = 1;
  std::size_t rows_ = 0;
  std::vector<SparseEntry> entries_;
};

/// Symmetric tridiagonal matrix stored as main diagonal + one off-diagonal.
struct TridiagMatrix {
  Vec diag;
  Vec offdiag;  // length dim()-1

  std::size_t dim() const { return diag.size(); }

  Vec apply(Span x) const {
    if (x.size() != dim()) throw std::invalid_argument("TridiagMatrix::apply: length mismatch");
    Vec out(dim(), 0.0);
    for (std::size_t i = 0; i < dim(); ++i) {
      double acc = diag[i] * x[i];
      if (i > 0) acc += offdiag[i - 1] * x[i - 1];
      if (i + 1 < dim()) acc += offdiag[i] * x[i + 1];
      out[i] = acc;
    }
    return out;
  }
};

/// mu1*I + mu2*L^T L (+ extra on the main diagonal) for the chain operator:
/// diag = mu1 + mu2*(1 at the endpoints, 2 inside), offdiag = -mu2.
inline TridiagMatrix build_preconditioner(const DiffOperator& op, double mu1, double mu2,
                                          Span extra_diag = {}) {
  if (op.mode() != DiffOperator::Mode::chain)
    throw std::invalid_argument("build_preconditioner: requires the chain operator");
  if (!(mu1 > 0.0)) throw std::invalid_argument("build_preconditioner: mu1 must be positive");
  if (mu2 < 0.0) throw std::invalid_argument("build_preconditioner: mu2 must be nonnegative");
  const std::size_t p = op.p();
  if (!extra_diag.empty() && extra_diag.size() != p)
    throw std::invalid_argument("build_preconditioner: extra_diag length mismatch");

  TridiagMatrix P;
  P.diag.assign(p, mu1);
  P.offdiag.assign(p > 0 ? p - 1 : 0, -mu2);
  if (p >= 2) {
    P.diag.front() += mu2;
    P.diag.back() += mu2;
    for (std::size_t i = 1; i + 1 < p; ++i) P.diag[i] += 2.0 * mu2;
  }
  for (std::size_t i = 0; i < extra_diag.size(); ++i) P.diag[i] += extra_diag[i];
  return P;
}

/// Lower-bidiagonal Cholesky factor F with P = F F^T.
class TridiagFactor {
 public:
  TridiagFactor() = default;
  TridiagFactor(Vec main, Vec sub) : main_(std::move(main)), sub_(std::move(sub)) {}

  std::size_t dim() const { return main_.size(); }
  const Vec& main() const { return main_; }
  const Vec& sub() const { return sub_; }

  // Solves F z = g then F^T x = z; O(p).
  void solve_into(Span g, Vec& out) const {
    const std::size_t p = dim();
    if (g.size() != p) throw std::invalid_argument("TridiagFactor::solve: length mismatch");
    out.resize(p);
    if (p == 0) return;
    out[0] = g[0] / main_[0];
    for (std::size_t i = 1; i < p; ++i) out[i] = (g[i] - sub_[i - 1] * out[i - 1]) / main_[i];
    out[p - 1] /= main_[p - 1];
    for (std::size_t i = p - 1; i-- > 0;) out[i] = (out[i] - sub_[i] * out[i + 1]) / main_[i];
  }

  Vec solve(Span g) const {
    Vec out;
    solve_into(g, out);
    return out;
  }

 private:
  Vec main_;
  Vec sub_;
};

/// O(p) Cholesky factorization of a symmetric positive definite tridiagonal
/// matrix. A pivot at or below 1e-14 * max(diag) is rejected.
inline TridiagFactor tridiag_cholesky(const TridiagMatrix& P) {
  const std::size_t p = P.dim();
  if (P.offdiag.size() + 1 != p && !(p == 0 && P.offdiag.empty()))
    throw std::invalid_argument("tridiag_cholesky: offdiag length mismatch");
  double max_diag = 0.0;
  for (double d : P.diag) max_diag = std::max(max_diag, std::abs(d));
  const double pivot_floor = 1e-14 * max_diag;

  Vec main(p), sub(p > 0 ? p - 1 : 0);
  double prev_sq = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const double pivot = P.diag[i] - prev_sq;
    if (!(pivot > pivot_floor))
      throw std::runtime_error("tridiag_cholesky: matrix is not positive definite");
    main[i] = std::sqrt(pivot);
    if (i + 1 < p) {
      sub[i] = P.offdiag[i] / main[i];
      prev_sq = sub[i] * sub[i];
    }
  }
  return TridiagFactor{std::move(main), std::move(sub)};
}

/// Abstract symmetric positive definite operator with an optional
/// preconditioner solve. Callbacks fill a caller-owned vector so buffers
/// can be reused across iterations.
struct LinOp {
  std::size_t dim = 0;
  std::function<void(Span, Vec&)> apply;
  std::function<void(Span, Vec&)> precond;  // empty -> identity
};

/// Probabilistic symmetry check: |<Ax,y> - <x,Ay>| <= tol * |x| * |y|.
inline bool is_symmetric(const LinOp& A, Rng& rng, int trials = 16, double tol = 1e-8) {
  Vec x(A.dim), y(A.dim), ax, ay;
  for (int t = 0; t < trials; ++t) {
    for (auto& v : x) v = rng.gaussian();
    for (auto& v : y) v = rng.gaussian();
    A.apply(x, ax);
    A.apply(y, ay);
    const double lhs = std::abs(dot(ax, y) - dot(x, ay));
    if (lhs > tol * norm2(x) * norm2(y)) return false;
  }
  return true;
}

struct PcgResult {
  Vec x;
  int iterations = 0;
  double rel_residual = 0.0;
};

/// Thrown when conjugate gradients meets a non-positive curvature direction;
/// carries the last iterate so callers can inspect the partial solve.
class PcgBreakdownError : public std::runtime_error {
 public:
  PcgBreakdownError(const std::string& what, Vec partial, int iterations)
      : std::runtime_error(what), partial_(std::move(partial)), iterations_(iterations) {}

  const Vec& partial() const { return partial_; }
  int iterations() const { return iterations_; }

 private:
  Vec partial_;
  int iterations_;
};

/// Preconditioned conjugate gradients. Stops when |Ax - rhs| <= tol * |rhs|
/// or after max_iter iterations; reports the iteration count either way.
inline PcgResult pcg(const LinOp& A, Span rhs, Span x0, double tol, int max_iter) {
  const std::size_t n = A.dim;
  if (rhs.size() != n || x0.size() != n) throw std::invalid_argument("pcg: length mismatch");

  const double rhs_norm = norm2(rhs);
  if (rhs_norm == 0.0) return PcgResult{Vec(n, 0.0), 0, 0.0};
  const double stop = tol * rhs_norm;

  Vec x(x0.begin(), x0.end());
  Vec r, z, d, q;
  A.apply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  double r_norm = norm2(r);
  if (r_norm <= stop) return PcgResult{std::move(x), 0, r_norm / rhs_norm};

  auto apply_precond = [&](const Vec& in, Vec& out) {
    if (A.precond)
      A.precond(in, out);
    else
      out.assign(in.begin(), in.end());
  };

  apply_precond(r, z);
  d = z;
  double rho = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    A.apply(d, q);
    const double curvature = dot(d, q);
    if (!(curvature > 0.0))
      throw PcgBreakdownError("pcg: non-positive curvature direction", std::move(x), it - 1);
    const double alpha = rho / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * d[i];
      r[i] -= alpha * q[i];
    }
    r_norm = norm2(r);
    if (r_norm <= stop) return PcgResult{std::move(x), it, r_norm / rhs_norm};
    apply_precond(r, z);
    const double rho_next = dot(r, z);
    const double beta = rho_next / rho;
    rho = rho_next;
    for (std::size_t i = 0; i < n; ++i) d[i] = z[i] + beta * d[i];
  }
  return PcgResult{std::move(x), max_iter, r_norm / rhs_norm};
}

}  // namespace fblasso

#endif  // FBLASSO_LINALG_HPP
