#ifndef FBLASSO_PROBLEM_HPP
#define FBLASSO_PROBLEM_HPP

#include <optional>
#include <utility>

#include "fblasso/core.hpp"
#include "fblasso/linalg.hpp"

namespace fblasso {

enum class ProblemKind { regression, flsa, svm };

inline const char* kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::regression: return "regression";
    case ProblemKind::flsa: return "flsa";
    case ProblemKind::svm: return "svm";
  }
  return "unknown";
}

/// Immutable problem statement: design matrix (or identity marker for the
/// signal-approximator case), responses or labels, the two penalty levels,
/// and the coupling operator whose image is penalized in l1.
class FusedProblem {
 public:
  static FusedProblem regression(Matrix X, Vec y, double lam1, double lam2) {
    DiffOperator L = DiffOperator::chain(X.cols());
    return regression(std::move(X), std::move(y), lam1, lam2, std::move(L));
  }

  static FusedProblem regression(Matrix X, Vec y, double lam1, double lam2, DiffOperator coupling) {
    FusedProblem pr;
    pr.kind_ = ProblemKind::regression;
    pr.init_design(std::move(X), std::move(y), lam1, lam2, std::move(coupling));
    return pr;
  }

  static FusedProblem flsa(Vec signal, double lam1, double lam2) {
    FusedProblem pr;
    pr.kind_ = ProblemKind::flsa;
    pr.check_lambdas(lam1, lam2);
    if (signal.empty()) throw std::invalid_argument("FusedProblem: empty signal");
    pr.lam1_ = lam1;
    pr.lam2_ = lam2;
    pr.coupling_ = DiffOperator::chain(signal.size());
    pr.y_ = std::move(signal);
    return pr;
  }

  static FusedProblem svm(Matrix X, Vec labels, double lam1, double lam2) {
    DiffOperator L = DiffOperator::chain(X.cols());
    return svm(std::move(X), std::move(labels), lam1, lam2, std::move(L));
  }

  static FusedProblem svm(Matrix X, Vec labels, double lam1, double lam2, DiffOperator coupling) {
    for (double v : labels) {
      if (v != 1.0 && v != -1.0)
        throw std::invalid_argument("FusedProblem: svm labels must be +1 or -1");
    }
    FusedProblem pr;
    pr.kind_ = ProblemKind::svm;
    pr.init_design(std::move(X), std::move(labels), lam1, lam2, std::move(coupling));
    return pr;
  }

  ProblemKind kind() const { return kind_; }
  std::size_t n() const { return y_.size(); }
  std::size_t p() const { return has_design_ ? X_.cols() : y_.size(); }
  double lam1() const { return lam1_; }
  double lam2() const { return lam2_; }
  const DiffOperator& coupling() const { return coupling_; }
  bool identity_design() const { return !has_design_; }

  const Matrix& design() const {
    if (!has_design_) throw std::logic_error("FusedProblem: identity design has no matrix");
    return X_;
  }

  const Vec& response() const { return y_; }

  // out = X beta (a plain copy under the identity design)
  void design_apply(Span beta, Vec& out) const {
    if (has_design_)
      matvec(X_, beta, out);
    else
      out.assign(beta.begin(), beta.end());
  }

  // out = X^T r
  void design_apply_t(Span r, Vec& out) const {
    if (has_design_)
      matvec_t(X_, r, out);
    else
      out.assign(r.begin(), r.end());
  }

 private:
  FusedProblem() : coupling_(DiffOperator::chain(1)) {}

  void check_lambdas(double lam1, double lam2) const {
    if (!(lam1 > 0.0) || !(lam2 > 0.0))
      throw std::invalid_argument("FusedProblem: lam1 and lam2 must be positive");
  }

  void init_design(Matrix X, Vec y, double lam1, double lam2, DiffOperator coupling) {
    check_lambdas(lam1, lam2);
    if (X.rows() != y.size()) throw std::invalid_argument("FusedProblem: X rows != y length");
    if (X.rows() == 0 || X.cols() == 0) throw std::invalid_argument("FusedProblem: empty design");
    if (coupling.p() != X.cols())
      throw std::invalid_argument("FusedProblem: coupling operator width != p");
    has_design_ = true;
    X_ = std::move(X);
    y_ = std::move(y);
    lam1_ = lam1;
    lam2_ = lam2;
    coupling_ = std::move(coupling);
  }

  ProblemKind kind_ = ProblemKind::regression;
  bool has_design_ = false;
  Matrix X_;
  Vec y_;
  double lam1_ = 1.0;
  double lam2_ = 1.0;
  DiffOperator coupling_;
};

/// Augmented-Lagrangian solver knobs. Dual step sizes left at zero default
/// to their matching penalty weight, which is also the proven-stable choice.
struct SolverConfig {
  double mu1 = 1.0;
  double mu2 = 1.0;
  double mu3 = 1.0;   // hinge-constraint weight, svm only
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  double rel_tol = 1e-5;
  int max_iter = 50000;
  double pcg_tol = 1e-8;
  int pcg_max = 0;          // 0 -> system dimension
  bool mu_auto = false;     // run the pretrial grid before solving
  int pretrial_iters = 30;

  /// Copy with dual steps resolved; throws on an invalid combination
  /// (weights must be positive and each step must satisfy 0 < delta <= mu).
  SolverConfig resolved(ProblemKind kind) const {
    SolverConfig c = *this;
    if (!(c.mu1 > 0.0) || !(c.mu2 > 0.0))
      throw std::invalid_argument("SolverConfig: mu1 and mu2 must be positive");
    if (c.delta1 == 0.0) c.delta1 = c.mu1;
    if (c.delta2 == 0.0) c.delta2 = c.mu2;
    if (!(c.delta1 > 0.0) || c.delta1 > c.mu1)
      throw std::invalid_argument("SolverConfig: need 0 < delta1 <= mu1");
    if (!(c.delta2 > 0.0) || c.delta2 > c.mu2)
      throw std::invalid_argument("SolverConfig: need 0 < delta2 <= mu2");
    if (kind == ProblemKind::svm) {
      if (!(c.mu3 > 0.0)) throw std::invalid_argument("SolverConfig: mu3 must be positive");
      if (c.delta3 == 0.0) c.delta3 = c.mu3;
      if (!(c.delta3 > 0.0) || c.delta3 > c.mu3)
        throw std::invalid_argument("SolverConfig: need 0 < delta3 <= mu3");
    }
    if (c.max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
    if (!(c.pcg_tol > 0.0)) throw std::invalid_argument("SolverConfig: pcg_tol must be positive");
    return c;
  }
};

/// All primal and dual iterates of a run. The split variables carry the
/// thresholded copies of the coefficients, their coupled differences, and
/// (svm only) the hinge slacks; one dual vector per constraint.
struct SolverState {
  Vec beta;
  double intercept = 0.0;
  Vec split_coef;    // thresholded copy of beta
  Vec split_diff;    // thresholded copy of L beta
  Vec split_hinge;   // hinge slacks, svm only
  Vec dual_coef;
  Vec dual_diff;
  Vec dual_hinge;
  int iterations = 0;
  Vec objective_history;
};

/// Packaged solver output. The coefficient estimate is the thresholded
/// split iterate, so zeros are bit-exact.
struct Solution {
  Vec coef;
  double intercept = 0.0;
  double objective = 0.0;
  int iterations = 0;
  double rel_e = std::numeric_limits<double>::infinity();
  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> pcg_iters;
  double gap_coef = 0.0;  // |beta - split_coef|_inf at exit
  double gap_diff = 0.0;  // |L beta - split_diff|_inf at exit
  bool converged = false;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;
  Vec objective_history;

  std::size_t nonzeros() const {
    std::size_t k = 0;
    for (double v : coef)
      if (v != 0.0) ++k;
    return k;
  }
};

}  // namespace fblasso

#endif  // FBLASSO_PROBLEM_HPP
