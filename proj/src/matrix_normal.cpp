#include "mnmr/matrix_normal.hpp"

#include <cmath>
#include <numbers>

namespace mnmr {

void MatrixNormalParams::validate() const {
  if (mean.rows() < 1 || mean.cols() < 1) {
    throw DimensionError("matrix normal: empty mean");
  }
  if (row_cov.rows() != mean.rows() || row_cov.cols() != mean.rows()) {
    throw DimensionError("matrix normal: row covariance shape mismatch");
  }
  if (col_cov.rows() != mean.cols() || col_cov.cols() != mean.cols()) {
    throw DimensionError("matrix normal: column covariance shape mismatch");
  }
}

MatrixNormalFactors mn_factorize(const MatrixNormalParams& p) {
  p.validate();
  MatrixNormalFactors f;
  f.row = spd_factor(p.row_cov, "row covariance");
  f.col = spd_factor(p.col_cov, "column covariance");
  return f;
}

double mn_logpdf(const Matrix& x, const Matrix& mean,
                 const MatrixNormalFactors& f) {
  const Index d = mean.rows();
  const Index tau = mean.cols();
  if (x.rows() != d || x.cols() != tau) {
    throw DimensionError("mn_logpdf: sample shape mismatch");
  }
  const Matrix centered = x - mean;
  // tr(v^-1 E^T u^-1 E) = ||L_v^-1 (L_u^-1 E)^T||_F^2
  const Matrix w = f.row.solve_lower(centered);
  const Matrix z = f.col.solve_lower(w.transpose());
  const double qform = z.squaredNorm();
  const double log2pi = std::log(2.0 * std::numbers::pi);
  return -0.5 * (static_cast<double>(d * tau) * log2pi +
                 static_cast<double>(d) * f.col.log_det() +
                 static_cast<double>(tau) * f.row.log_det() + qform);
}

double mn_logpdf(const Matrix& x, const MatrixNormalParams& p) {
  return mn_logpdf(x, p.mean, mn_factorize(p));
}

Matrix mn_sample(const MatrixNormalParams& p, Rng& rng) {
  const MatrixNormalFactors f = mn_factorize(p);
  Matrix z(p.rows(), p.cols());
  for (Index j = 0; j < z.cols(); ++j) {
    for (Index i = 0; i < z.rows(); ++i) z(i, j) = rng.normal();
  }
  return p.mean + f.row.lower() * z * f.col.lower().transpose();
}

MatrixNormalParams mn_condition_cols(const MatrixNormalParams& p,
                                     const BlockSplit& split,
                                     const Matrix& observed) {
  p.validate();
  split.validate(p.cols());
  const Index t = split.first;
  const Index dt = split.second;
  if (observed.rows() != p.rows() || observed.cols() != t) {
    throw DimensionError("mn_condition_cols: observed block shape mismatch");
  }

  const Matrix v11 = p.col_cov.topLeftCorner(t, t);
  const Matrix v12 = p.col_cov.topRightCorner(t, dt);
  const Matrix v22 = p.col_cov.bottomRightCorner(dt, dt);

  const SpdFactor f11 = spd_factor(v11, "V11");
  const Matrix w = f11.solve(v12);  // V11^-1 V12

  MatrixNormalParams out;
  out.mean = p.mean.rightCols(dt) + (observed - p.mean.leftCols(t)) * w;
  out.row_cov = p.row_cov;
  Matrix vc = v22 - v12.transpose() * w;
  out.col_cov = 0.5 * (vc + vc.transpose());
  return out;
}

MatrixNormalParams mn_condition_rows(const MatrixNormalParams& p,
                                     const BlockSplit& split,
                                     const Matrix& observed) {
  p.validate();
  split.validate(p.rows());
  const Index dx = split.first;
  const Index dy = split.second;
  if (observed.rows() != dx || observed.cols() != p.cols()) {
    throw DimensionError("mn_condition_rows: observed block shape mismatch");
  }

  const Matrix u11 = p.row_cov.topLeftCorner(dx, dx);
  const Matrix u12 = p.row_cov.topRightCorner(dx, dy);
  const Matrix u22 = p.row_cov.bottomRightCorner(dy, dy);

  const SpdFactor f11 = spd_factor(u11, "U11");
  const Matrix w = f11.solve(u12);  // U11^-1 U12

  MatrixNormalParams out;
  out.mean = p.mean.bottomRows(dy) +
             w.transpose() * (observed - p.mean.topRows(dx));
  Matrix uc = u22 - u12.transpose() * w;
  out.row_cov = 0.5 * (uc + uc.transpose());
  out.col_cov = p.col_cov;
  return out;
}

MatrixNormalParams mn_marginal(const MatrixNormalParams& p,
                               const std::vector<Index>& row_subset,
                               const std::vector<Index>& col_subset) {
  p.validate();
  if (row_subset.empty() || col_subset.empty()) {
    throw DimensionError("mn_marginal: empty selection");
  }
  for (Index r : row_subset) {
    if (r < 0 || r >= p.rows()) throw DimensionError("mn_marginal: row out of range");
  }
  for (Index c : col_subset) {
    if (c < 0 || c >= p.cols()) throw DimensionError("mn_marginal: column out of range");
  }

  const Index nr = static_cast<Index>(row_subset.size());
  const Index nc = static_cast<Index>(col_subset.size());
  MatrixNormalParams out;
  out.mean.resize(nr, nc);
  out.row_cov.resize(nr, nr);
  out.col_cov.resize(nc, nc);
  for (Index i = 0; i < nr; ++i) {
    for (Index j = 0; j < nc; ++j) out.mean(i, j) = p.mean(row_subset[i], col_subset[j]);
    for (Index j = 0; j < nr; ++j) out.row_cov(i, j) = p.row_cov(row_subset[i], row_subset[j]);
  }
  for (Index i = 0; i < nc; ++i) {
    for (Index j = 0; j < nc; ++j) out.col_cov(i, j) = p.col_cov(col_subset[i], col_subset[j]);
  }
  return out;
}

MatrixNormalParams normalize_scale(const MatrixNormalParams& p) {
  p.validate();
  const double xi = p.col_cov.trace() / static_cast<double>(p.cols());
  if (!(xi > 0.0)) {
    throw NotPositiveDefiniteError("column covariance");
  }
  MatrixNormalParams out;
  out.mean = p.mean;
  out.row_cov = xi * p.row_cov;
  out.col_cov = p.col_cov / xi;
  return out;
}

}  // namespace mnmr
