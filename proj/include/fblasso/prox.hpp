#ifndef FBLASSO_PROX_HPP
#define FBLASSO_PROX_HPP

#include "fblasso/core.hpp"

namespace fblasso {

// Componentwise sgn(w) * max(0, |w| - lam). Shrunk entries are written as
// exact 0.0 so downstream sparsity counts are well defined.
inline double soft_threshold_scalar(double w, double lam) {
  const double mag = std::abs(w) - lam;
  if (mag <= 0.0) return 0.0;
  return w > 0.0 ? mag : -mag;
}

inline void soft_threshold_into(Span w, double lam, Vec& out) {
  if (lam < 0.0) throw std::invalid_argument("soft_threshold: lam must be nonnegative");
  out.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = soft_threshold_scalar(w[i], lam);
}

inline Vec soft_threshold(Span w, double lam) {
  Vec out;
  soft_threshold_into(w, lam, out);
  return out;
}

// Proximal map of lam * max(x, 0): shifts values above lam down by lam,
// zeroes the band [0, lam], and leaves negatives untouched.
inline double hinge_shrink_scalar(double w, double lam) {
  if (w > lam) return w - lam;
  if (w >= 0.0) return 0.0;
  return w;
}

inline void hinge_shrink_into(Span w, double lam, Vec& out) {
  if (lam < 0.0) throw std::invalid_argument("hinge_shrink: lam must be nonnegative");
  out.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = hinge_shrink_scalar(w[i], lam);
}

inline Vec hinge_shrink(Span w, double lam) {
  Vec out;
  hinge_shrink_into(w, lam, out);
  return out;
}

}  // namespace fblasso

#endif  // FBLASSO_PROX_HPP
