#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mnmr/matrix_normal.hpp"
#include "mnmr/window.hpp"

namespace mnmr {

// Hyperparameters of the generative model and of the penalized fit.
struct PriorConfig {
  double dirichlet_alpha = 2.0;  // symmetric concentration on the weights
  double lkj_eta = 2.0;          // correlation concentration for u and v
  double scale_rate_u = 1.0;     // exponential rate for row scales
  double scale_rate_v = 1.0;     // exponential rate for column scales
  // Covariance shrinkage strength, in prior pseudo-counts per data point:
  // each fit uses gamma = shrink_gamma * N / K per component.
  double shrink_gamma = 0.01;

  // Mean-matrix prior; unset fields default to zeros / identities.
  std::optional<Matrix> mean_m0;
  std::optional<Matrix> mean_u0;
  std::optional<Matrix> mean_v0;

  Matrix m0(Index d, Index tau) const;
  Matrix u0(Index d) const;
  Matrix v0(Index tau) const;

  void validate() const;
};

struct FitMetadata {
  int iterations = 0;
  double final_objective = 0.0;
  int restart_index = 0;
  std::uint64_t seed = 0;
  std::vector<int> frozen_components;
};

// The persisted artifact: mixture weights, per-component matrix normal
// parameters (all trace-normalized), the window geometry, and the
// standardization used when the model was fit.
struct MnmmModel {
  Vector weights;  // simplex, length k
  std::vector<MatrixNormalParams> components;
  WindowSpec window_spec;
  StandardizationStats standardization;
  FitMetadata fit_metadata;

  int k() const { return static_cast<int>(components.size()); }
  Index d() const { return components.empty() ? 0 : components.front().rows(); }
  Index tau() const { return components.empty() ? 0 : components.front().cols(); }
  void validate() const;
};

// Soft assignments: r(i, k) is the posterior probability that window i was
// generated by component k; rows sum to one.
struct Responsibilities {
  Matrix r;                      // n x k
  Vector log_likelihoods;        // per-window log marginal density
  double total_log_likelihood = 0.0;
};

// Correlation matrix drawn from LKJ(eta) via the onion construction.
Matrix sample_lkj(Index dim, double eta, Rng& rng);

// Draw a full model from the prior (used for synthetic ground truth).
MnmmModel sample_prior(const WindowSpec& spec, int k, const PriorConfig& prior,
                       Rng& rng);

struct SampledDataset {
  std::vector<Matrix> windows;
  std::vector<int> labels;
};

SampledDataset sample_dataset(const MnmmModel& model, int n, Rng& rng);

Responsibilities e_step(const MnmmModel& model,
                        const std::vector<Matrix>& windows);

struct MStepResult {
  Vector weights;
  std::vector<MatrixNormalParams> components;
  std::vector<int> frozen;  // indices reset to their prior-mean parameters
};

// One penalized M step. Weights get the Dirichlet-MAP update; means are the
// responsibility-weighted averages; covariances run `flip_flop_iters`
// alternations of
//   u_k = (S_u + gamma*tr(v_k^-1)*I) / ((n_k + gamma) * tau)
//   v_k = (S_v + gamma*tr(u_k^-1)*I) / ((n_k + gamma) * d)
// starting from `previous` (the current model parameters), followed by
// trace normalization. This pair of updates is the exact coordinate ascent
// of the shrinkage penalty used in the fit objective, and both the updates
// and the penalty are invariant under the (xi*u, v/xi) rescaling, so the
// trailing normalization never moves the objective.
MStepResult m_step(const std::vector<Matrix>& windows, const Matrix& resp,
                   const PriorConfig& prior, int flip_flop_iters,
                   const std::vector<MatrixNormalParams>& previous);

struct FitConfig {
  int max_iters = 200;
  double rel_tol = 1e-6;
  int restarts = 5;
  int flip_flop_iters = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FitResult {
  MnmmModel model;
  std::vector<double> objective_trace;  // best restart, one entry per iterate
};

// Penalized log-likelihood the fit reports and maximizes:
//   sum_i log sum_k pi_k MN(x_i | theta_k)
//   + (alpha - 1) * sum_k log pi_k
//   - (gamma/2) * sum_k [ tau*ln|u_k| + d*ln|v_k| + tr(u_k^-1) tr(v_k^-1) ]
// with gamma = shrink_gamma * N / K.
double penalized_objective(const MnmmModel& model, double total_log_likelihood,
                           const PriorConfig& prior, Index n_samples);

// Best-of-restarts penalized EM. Initialization is k-means++ with Lloyd
// refinement on per-coordinate standardized vec(window) vectors, one-hot
// responsibilities, then one m_step. Deterministic given config.seed.
FitResult fit_em(const std::vector<Matrix>& windows, int k,
                 const PriorConfig& prior, const FitConfig& config,
                 const WindowSpec& spec, const StandardizationStats& stats);

}  // namespace mnmr
