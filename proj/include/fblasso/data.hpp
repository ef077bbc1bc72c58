#ifndef FBLASSO_DATA_HPP
#define FBLASSO_DATA_HPP

#include <charconv>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <utility>
#include <variant>

#include "fblasso/core.hpp"

namespace fblasso {

struct Dataset {
  Matrix X;
  bool has_design = false;
  Vec y;
  std::vector<std::string> feature_names;
  bool standardized = false;
  bool classification = false;
};

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // fold index in [0, k) per observation
};

struct StandardizeTransform {
  Vec x_mean, x_scale;
  double y_mean = 0.0;
  double y_scale = 1.0;
  bool y_transformed = false;
  std::vector<std::size_t> zero_variance_cols;
};

struct StandardizeResult {
  Dataset data;
  StandardizeTransform transform;
};

/// Equicorrelated Gaussian design: every column is sqrt(rho) * Z0 +
/// sqrt(1-rho) * Zj with a shared factor Z0, giving exact pairwise
/// population correlation rho; columns are then standardized.
inline Dataset gen_equicorrelated(std::size_t n, std::size_t p, double rho, std::uint64_t seed) {
  if (n < 1 || p < 1) throw std::invalid_argument("gen_equicorrelated: n and p must be >= 1");
  if (!(rho >= 0.0) || rho >= 1.0)
    throw std::invalid_argument("gen_equicorrelated: rho must lie in [0, 1)");
  Rng rng(seed);
  Vec shared(n);
  for (auto& v : shared) v = rng.gaussian();
  const double a = std::sqrt(rho), b = std::sqrt(1.0 - rho);

  Matrix X(n, p);
  Vec col(n);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = a * shared[i] + b * rng.gaussian();
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    const double scale = sd > 0.0 ? sd : 1.0;
    for (std::size_t i = 0; i < n; ++i) X(i, j) = (col[i] - mean) / scale;
  }

  Dataset ds;
  ds.X = std::move(X);
  ds.has_design = true;
  ds.standardized = true;
  return ds;
}

/// Blocky reference coefficient vector (1-based): 2 on 1..20 and 121..125,
/// 3 at 41, 1 on 71..85, zero elsewhere. Requires p >= 125 so the pattern
/// is never truncated.
inline Vec default_beta(std::size_t p) {
  if (p < 125) throw std::invalid_argument("default_beta: requires p >= 125");
  Vec beta(p, 0.0);
  for (std::size_t i = 0; i < 20; ++i) beta[i] = 2.0;
  beta[40] = 3.0;
  for (std::size_t i = 70; i < 85; ++i) beta[i] = 1.0;
  for (std::size_t i = 120; i < 125; ++i) beta[i] = 2.0;
  return beta;
}

/// y = X beta + sigma * eps with standard Gaussian eps.
inline Vec gen_regression(const Matrix& X, Span beta, double sigma, std::uint64_t seed) {
  if (beta.size() != X.cols()) throw std::invalid_argument("gen_regression: length mismatch");
  if (sigma < 0.0) throw std::invalid_argument("gen_regression: sigma must be nonnegative");
  Rng rng(seed);
  Vec y(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) y[i] = dot(X.row(i), beta) + sigma * rng.gaussian();
  return y;
}

/// Piecewise-constant signal: the length-500 reference pattern tiled across
/// p coordinates (block widths stay fixed as p grows) plus Gaussian noise.
inline Vec gen_flsa_signal(std::size_t p, double sigma, std::uint64_t seed) {
  if (p < 125) throw std::invalid_argument("gen_flsa_signal: requires p >= 125");
  if (sigma < 0.0) throw std::invalid_argument("gen_flsa_signal: sigma must be nonnegative");
  const Vec base = default_beta(500);
  Rng rng(seed);
  Vec y(p);
  if (sigma == 0.0) {
    for (std::size_t i = 0; i < p; ++i) y[i] = base[i % 500];
  } else {
    for (std::size_t i = 0; i < p; ++i) y[i] = base[i % 500] + sigma * rng.gaussian();
  }
  return y;
}

/// Two balanced Gaussian clouds with the requested mean separation along
/// the blocky reference direction (first coordinate when p < 125); labels
/// are +1 for the first half, -1 for the second.
inline Dataset gen_two_class(std::size_t n, std::size_t p, double separation, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("gen_two_class: n must be even and >= 2");
  if (p < 1) throw std::invalid_argument("gen_two_class: p must be >= 1");
  Vec direction(p, 0.0);
  if (p >= 125) {
    direction = default_beta(p);
    const double nrm = norm2(direction);
    for (double& v : direction) v /= nrm;
  } else {
    direction[0] = 1.0;
  }

  Rng rng(seed);
  Dataset ds;
  ds.X = Matrix(n, p);
  ds.has_design = true;
  ds.y.assign(n, 0.0);
  ds.classification = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double label = i < n / 2 ? 1.0 : -1.0;
    ds.y[i] = label;
    const double shift = 0.5 * separation * label;
    for (std::size_t j = 0; j < p; ++j) ds.X(i, j) = shift * direction[j] + rng.gaussian();
  }
  return ds;
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

inline double parse_field(const std::string& field, std::size_t line_no,
                          const std::string& column_label) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw std::runtime_error("csv line " + std::to_string(line_no) + ", column " + column_label +
                             ": '" + field + "' is not a number");
  return value;
}

}  // namespace detail

using ResponseSelector = std::optional<std::variant<std::size_t, std::string>>;

/// Loads a numeric CSV. A single column with no response selector is a pure
/// signal (no design matrix); otherwise the selected column becomes the
/// response and the remaining columns the design. UTF-8, comma separated,
/// decimal points, optional single header line.
inline Dataset load_csv(const std::string& path, bool has_header = false,
                        ResponseSelector response = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");

  std::vector<std::string> names;
  std::vector<Vec> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_pending = has_header;

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (header_pending) {
      names = fields;
      width = fields.size();
      header_pending = false;
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " +
                               std::to_string(width) + " fields, got " +
                               std::to_string(fields.size()));
    Vec row(width);
    for (std::size_t j = 0; j < width; ++j) {
      const std::string label = j < names.size() ? "'" + names[j] + "'" : std::to_string(j);
      row[j] = detail::parse_field(fields[j], line_no, label);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("load_csv: no data rows in '" + path + "'");

  std::size_t resp_col = width;  // width -> no response
  if (response) {
    if (std::holds_alternative<std::size_t>(*response)) {
      resp_col = std::get<std::size_t>(*response);
      if (resp_col >= width) throw std::runtime_error("load_csv: response index out of range");
    } else {
      const std::string& want = std::get<std::string>(*response);
      for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == want) resp_col = j;
      if (resp_col == width)
        throw std::runtime_error("load_csv: response column '" + want + "' not found");
    }
  }

  Dataset ds;
  const std::size_t n = rows.size();
  if (!response && width == 1) {
    ds.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) ds.y[i] = rows[i][0];
    return ds;
  }

  const std::size_t p = response ? width - 1 : width;
  if (p > 0) {
    ds.X = Matrix(n, p);
    ds.has_design = true;
  }
  if (response) ds.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t out_j = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (j == resp_col)
        ds.y[i] = rows[i][j];
      else
        ds.X(i, out_j++) = rows[i][j];
    }
  }
  for (std::size_t j = 0; j < names.size(); ++j)
    if (j != resp_col) ds.feature_names.push_back(names[j]);
  return ds;
}

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

inline void save_vector_csv(const std::string& path, Span values,
                            const std::string& header = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_vector_csv: cannot write '" + path + "'");
  if (!header.empty()) out << header << '\n';
  for (double v : values) out << format_double(v) << '\n';
  if (!out) throw std::runtime_error("save_vector_csv: write failed for '" + path + "'");
}

inline void save_matrix_csv(const std::string& path, const Matrix& M,
                            const std::vector<std::string>& names = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_matrix_csv: cannot write '" + path + "'");
  if (!names.empty()) {
    for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
    out << '\n';
  }
  for (std::size_t i = 0; i < M.rows(); ++i) {
    const Span row = M.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << format_double(row[j]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_matrix_csv: write failed for '" + path + "'");
}

/// Column-standardized copy (mean 0, unit population standard deviation)
/// plus the transform for test-set application. Regression responses are
/// standardized too; labels and pure signals are left alone. Zero-variance
/// columns stay all-zero and are flagged in the transform.
inline StandardizeResult standardize(const Dataset& input) {
  StandardizeResult out;
  out.data = input;
  if (!input.has_design) return out;  // pure signal: nothing to do

  Matrix& X = out.data.X;
  const std::size_t n = X.rows(), p = X.cols();
  const double nd = static_cast<double>(n);
  out.transform.x_mean.assign(p, 0.0);
  out.transform.x_scale.assign(p, 1.0);

  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += X(i, j);
    mean /= nd;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = X(i, j) - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / nd);
    out.transform.x_mean[j] = mean;
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      out.transform.zero_variance_cols.push_back(j);
      for (std::size_t i = 0; i < n; ++i) X(i, j) = 0.0;
      continue;
    }
    out.transform.x_scale[j] = sd;
    for (std::size_t i = 0; i < n; ++i) X(i, j) = (X(i, j) - mean) / sd;
  }

  if (!input.classification && !input.y.empty()) {
    Vec& y = out.data.y;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= nd;
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / nd);
    if (sd > 1e-12 * std::max(1.0, std::abs(mean))) {
      for (double& v : y) v = (v - mean) / sd;
      out.transform.y_mean = mean;
      out.transform.y_scale = sd;
      out.transform.y_transformed = true;
    }
  }
  out.data.standardized = true;
  return out;
}

/// Applies a fitted transform to fresh rows (test folds).
inline Matrix apply_transform(const StandardizeTransform& t, const Matrix& X) {
  if (X.cols() != t.x_mean.size()) throw std::invalid_argument("apply_transform: shape mismatch");
  Matrix out = X;
  for (std::size_t j = 0; j < X.cols(); ++j) {
    const bool zeroed =
        std::find(t.zero_variance_cols.begin(), t.zero_variance_cols.end(), j) !=
        t.zero_variance_cols.end();
    for (std::size_t i = 0; i < X.rows(); ++i)
      out(i, j) = zeroed ? 0.0 : (X(i, j) - t.x_mean[j]) / t.x_scale[j];
  }
  return out;
}

/// Shuffled balanced fold assignment; sizes differ by at most one.
inline FoldPlan kfold(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold: k must be >= 2");
  if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("kfold: k must be <= n");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = rng.below(i + 1);
    std::swap(order[i], order[j]);
  }
  FoldPlan plan;
  plan.k = k;
  plan.assignments.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos)
    plan.assignments[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  return plan;
}

}  // namespace fblasso

#endif  // FBLASSO_DATA_HPP
