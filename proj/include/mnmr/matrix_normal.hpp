#pragma once

#include <vector>

#include "mnmr/linalg.hpp"
#include "mnmr/rng.hpp"

namespace mnmr {

// Matrix normal parameters: mean (d x tau), row covariance u (d x d),
// column covariance v (tau x tau). vec(X) ~ N(vec(mean), v (x) u).
struct MatrixNormalParams {
  Matrix mean;
  Matrix row_cov;  // u: correlations across feature rows
  Matrix col_cov;  // v: correlations across time columns

  Index rows() const { return mean.rows(); }
  Index cols() const { return mean.cols(); }
  void validate() const;
};

// Cached Cholesky factors of (row_cov, col_cov) for repeated density work.
struct MatrixNormalFactors {
  SpdFactor row;  // factor of u
  SpdFactor col;  // factor of v
};

MatrixNormalFactors mn_factorize(const MatrixNormalParams& p);

// Log density of x. Evaluated in the factored form
//   -0.5 * (d*tau*ln(2pi) + d*ln|v| + tau*ln|u| + tr(v^-1 (x-m)^T u^-1 (x-m)))
// so the (d*tau)-dimensional covariance is never materialized.
double mn_logpdf(const Matrix& x, const MatrixNormalParams& p);
double mn_logpdf(const Matrix& x, const Matrix& mean,
                 const MatrixNormalFactors& f);

// Draw mean + L_u Z L_v^T with Z iid standard normal. Deterministic per seed.
Matrix mn_sample(const MatrixNormalParams& p, Rng& rng);

// Condition on the first `split.first` columns being `observed` (all rows).
// Returns the matrix normal over the remaining columns; row covariance is
// unchanged, and the result matches dense Gaussian conditioning of vec(X).
MatrixNormalParams mn_condition_cols(const MatrixNormalParams& p,
                                     const BlockSplit& split,
                                     const Matrix& observed);

// Mirror of mn_condition_cols: condition on the first `split.first` rows
// across all columns; column covariance is unchanged.
MatrixNormalParams mn_condition_rows(const MatrixNormalParams& p,
                                     const BlockSplit& split,
                                     const Matrix& observed);

// Marginal over a row and column subset: index selection on mean, u, v.
MatrixNormalParams mn_marginal(const MatrixNormalParams& p,
                               const std::vector<Index>& row_subset,
                               const std::vector<Index>& col_subset);

// Rescale to the identifiable representative with trace(v) = tau; the
// density is unchanged because (xi*u) (x) (v/xi) = u (x) v.
MatrixNormalParams normalize_scale(const MatrixNormalParams& p);

}  // namespace mnmr
