#include "mnmr/window.hpp"

#include <cmath>

namespace mnmr {

void WindowSpec::validate() const {
  if (feature_rows < 0 || response_rows < 1) {
    throw DimensionError("window spec: need response_rows >= 1 and feature_rows >= 0");
  }
  if (d() < 1) throw DimensionError("window spec: need at least one row");
  if (past_steps < 1 || future_steps < 1) {
    throw DimensionError("window spec: past and future steps must be >= 1");
  }
  if (!(step_seconds > 0.0)) {
    throw DimensionError("window spec: step_seconds must be positive");
  }
}

std::vector<std::string> WindowSpec::default_feature_names(Index feature_rows,
                                                           Index response_rows) {
  if (feature_rows == 3 && response_rows == 1) {
    return {"v_fv", "dv", "ds", "a_fv"};
  }
  std::vector<std::string> names;
  for (Index i = 0; i < feature_rows; ++i) names.push_back("x" + std::to_string(i));
  for (Index i = 0; i < response_rows; ++i) names.push_back("y" + std::to_string(i));
  return names;
}

void StandardizationStats::validate() const {
  if (mean.size() != stddev.size() || mean.size() < 1) {
    throw DimensionError("standardization stats: inconsistent sizes");
  }
  for (Index i = 0; i < stddev.size(); ++i) {
    if (!(stddev[i] > 0.0)) {
      const std::string name = i < static_cast<Index>(feature_names.size())
                                   ? feature_names[i]
                                   : "row " + std::to_string(i);
      throw DataError("standardization stats: nonpositive stddev for feature '" +
                      name + "'");
    }
  }
}

StandardizationStats StandardizationStats::identity(Index d) {
  StandardizationStats s;
  s.mean = Vector::Zero(d);
  s.stddev = Vector::Ones(d);
  s.feature_names = WindowSpec::default_feature_names(d - 1, 1);
  s.feature_names.resize(d);
  for (Index i = 0; i < d; ++i) {
    if (s.feature_names[i].empty()) s.feature_names[i] = "row " + std::to_string(i);
  }
  return s;
}

StandardizationStats standardize_fit(const std::vector<Matrix>& windows,
                                     std::vector<std::string> names) {
  if (windows.size() < 2) {
    throw DataError("standardize_fit: need at least 2 windows");
  }
  const Index d = windows.front().rows();
  for (const auto& w : windows) {
    if (w.rows() != d) throw DimensionError("standardize_fit: mixed row counts");
  }
  if (names.empty()) {
    names = WindowSpec::default_feature_names(d - 1, 1);
  }
  if (static_cast<Index>(names.size()) != d) {
    throw DimensionError("standardize_fit: feature name count mismatch");
  }

  Vector sum = Vector::Zero(d);
  Vector sumsq = Vector::Zero(d);
  long n_cols = 0;
  for (const auto& w : windows) {
    sum += w.rowwise().sum();
    sumsq += w.array().square().matrix().rowwise().sum();
    n_cols += w.cols();
  }
  StandardizationStats s;
  s.feature_names = std::move(names);
  s.mean = sum / static_cast<double>(n_cols);
  s.stddev.resize(d);
  for (Index i = 0; i < d; ++i) {
    const double var =
        sumsq[i] / static_cast<double>(n_cols) - s.mean[i] * s.mean[i];
    if (!(var > 0.0)) {
      throw DataError("standardize_fit: feature '" + s.feature_names[i] +
                      "' has zero variance");
    }
    s.stddev[i] = std::sqrt(var);
  }
  return s;
}

Matrix standardize_apply(const Matrix& window, const StandardizationStats& s) {
  if (window.rows() != s.d()) {
    throw DimensionError("standardize_apply: row count mismatch");
  }
  return (window.colwise() - s.mean).array().colwise() / s.stddev.array();
}

Matrix standardize_invert(const Matrix& window, const StandardizationStats& s) {
  if (window.rows() != s.d()) {
    throw DimensionError("standardize_invert: row count mismatch");
  }
  return (window.array().colwise() * s.stddev.array()).matrix().colwise() +
         s.mean;
}

std::vector<Matrix> standardize_apply(const std::vector<Matrix>& windows,
                                      const StandardizationStats& s) {
  std::vector<Matrix> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(standardize_apply(w, s));
  return out;
}

}  // namespace mnmr
