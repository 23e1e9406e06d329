#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "mnmr/errors.hpp"

namespace mnmr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Sizes of two adjacent index blocks partitioning a dimension.
struct BlockSplit {
  Index first = 0;
  Index second = 0;

  Index total() const { return first + second; }
  void validate(Index parent_dim) const;
};

// Kronecker product: block (i,j) of the result is a(i,j) * b.
Matrix kron(const Matrix& a, const Matrix& b);

// Column-stacking vectorization; element (i + rows*j) of the result is x(i,j).
Vector vec(const Matrix& x);

// Inverse of vec(). Throws DimensionError when sizes do not multiply out.
Matrix unvec(const Vector& v, Index rows, Index cols);

// Scale-aware default jitter: 1e-9 * trace(s) / dim.
double default_ridge(const Matrix& s);

// Cholesky factor of a ridged symmetric positive definite matrix, with its
// log-determinant. Solves reuse the factor; the full inverse is never formed.
class SpdFactor {
 public:
  SpdFactor() = default;

  Index dim() const { return lower_.rows(); }
  const Matrix& lower() const { return lower_; }
  double log_det() const { return log_det_; }

  // x with (s + ridge*I) x = b.
  Matrix solve(const Matrix& b) const;
  // x with L x = b (forward substitution only).
  Matrix solve_lower(const Matrix& b) const;
  // trace((s + ridge*I)^{-1})
  double inverse_trace() const;

  friend SpdFactor spd_factor(const Matrix& s, double ridge,
                              std::string_view name);

 private:
  Matrix lower_;
  double log_det_ = 0.0;
};

// Factor s + ridge*I. Preconditions: s square and symmetric within 1e-8
// relative. Throws NotPositiveDefiniteError naming `name` on failure.
SpdFactor spd_factor(const Matrix& s, double ridge,
                     std::string_view name = "matrix");

// Same, with the default ridge policy applied.
SpdFactor spd_factor(const Matrix& s, std::string_view name = "matrix");

Matrix spd_solve(const SpdFactor& f, const Matrix& b);

}  // namespace mnmr
