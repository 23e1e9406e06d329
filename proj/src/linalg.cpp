#include "mnmr/linalg.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace mnmr {

void BlockSplit::validate(Index parent_dim) const {
  if (first < 1 || second < 1) {
    throw DimensionError("block split sizes must both be >= 1");
  }
  if (first + second != parent_dim) {
    throw DimensionError("block split does not cover the parent dimension");
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (rows < 1 || cols < 1 || v.size() != rows * cols) {
    throw DimensionError("unvec: vector length does not match rows*cols");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

double default_ridge(const Matrix& s) {
  if (s.rows() == 0) return 0.0;
  return 1e-9 * s.trace() / static_cast<double>(s.rows());
}

Matrix SpdFactor::solve(const Matrix& b) const {
  if (b.rows() != lower_.rows()) {
    throw DimensionError("spd_solve: right-hand side has wrong row count");
  }
  Matrix y = lower_.triangularView<Eigen::Lower>().solve(b);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix SpdFactor::solve_lower(const Matrix& b) const {
  if (b.rows() != lower_.rows()) {
    throw DimensionError("solve_lower: right-hand side has wrong row count");
  }
  return lower_.triangularView<Eigen::Lower>().solve(b);
}

double SpdFactor::inverse_trace() const {
  // tr(S^{-1}) = ||L^{-1}||_F^2
  Matrix linv = lower_.triangularView<Eigen::Lower>().solve(
      Matrix::Identity(lower_.rows(), lower_.rows()));
  return linv.squaredNorm();
}

SpdFactor spd_factor(const Matrix& s, double ridge, std::string_view name) {
  if (s.rows() != s.cols() || s.rows() < 1) {
    throw DimensionError("spd_factor: matrix must be square and non-empty");
  }
  const double scale = s.cwiseAbs().maxCoeff();
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * std::max(scale, 1e-300)) {
    throw DimensionError("spd_factor: matrix '" + std::string(name) +
                         "' is not symmetric");
  }

  Matrix ridged = 0.5 * (s + s.transpose());
  ridged.diagonal().array() += ridge;

  Eigen::LLT<Matrix> llt(ridged);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError(std::string(name));
  }

  SpdFactor f;
  f.lower_ = llt.matrixL();
  double log_det = 0.0;
  for (Index i = 0; i < f.lower_.rows(); ++i) {
    const double d = f.lower_(i, i);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw NotPositiveDefiniteError(std::string(name));
    }
    log_det += 2.0 * std::log(d);
  }
  f.log_det_ = log_det;
  return f;
}

SpdFactor spd_factor(const Matrix& s, std::string_view name) {
  return spd_factor(s, default_ridge(s), name);
}

Matrix spd_solve(const SpdFactor& f, const Matrix& b) { return f.solve(b); }

}  // namespace mnmr
