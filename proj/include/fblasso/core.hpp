#ifndef FBLASSO_CORE_HPP
#define FBLASSO_CORE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fblasso {

using Vec = std::vector<double>;
using Span = std::span<const double>;
using MutSpan = std::span<double>;

inline double dot(Span a, Span b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm2(Span a) {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return std::sqrt(acc);
}

inline double norm1(Span a) {
  double acc = 0.0;
  for (double v : a) acc += std::abs(v);
  return acc;
}

inline double norm_inf(Span a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// y += alpha * x
inline void axpy(double alpha, Span x, MutSpan y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline bool all_finite(Span a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

/// Dense row-major matrix. Deliberately minimal: the solvers only need
/// matrix-vector products with the design matrix and its transpose.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Span row(std::size_t i) const { return Span{data_.data() + i * cols_, cols_}; }
  MutSpan row(std::size_t i) { return MutSpan{data_.data() + i * cols_, cols_}; }

  const Vec& data() const { return data_; }
  Vec& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

// out = A x
inline void matvec(const Matrix& A, Span x, Vec& out) {
  if (x.size() != A.cols()) throw std::invalid_argument("matvec: length mismatch");
  out.assign(A.rows(), 0.0);
  for (std::size_t i = 0; i < A.rows(); ++i) out[i] = dot(A.row(i), x);
}

// out = A^T w; accumulates row-wise so the access pattern stays contiguous.
inline void matvec_t(const Matrix& A, Span w, Vec& out) {
  if (w.size() != A.rows()) throw std::invalid_argument("matvec_t: length mismatch");
  out.assign(A.cols(), 0.0);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const double wi = w[i];
    if (wi == 0.0) continue;
    Span r = A.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out[j] += wi * r[j];
  }
}

/// Seedable, portable random generator: xoshiro256++ seeded through
/// splitmix64, Gaussians via the polar method. The algorithm is pinned so
/// seeded outputs are reproducible across platforms and library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal deviate (Marsaglia polar method).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  /// Unbiased integer in [0, n).
  std::size_t below(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t threshold = (0 - static_cast<std::uint64_t>(n)) % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x < threshold);
    return static_cast<std::size_t>(x % n);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97f4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fblasso

#endif  // FBLASSO_CORE_HPP
