#include "mnmr/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mnmr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(const Vector& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

}  // namespace

Matrix PriorConfig::m0(Index d, Index tau) const {
  if (mean_m0) {
    if (mean_m0->rows() != d || mean_m0->cols() != tau) {
      throw DimensionError("prior: mean_m0 shape mismatch");
    }
    return *mean_m0;
  }
  return Matrix::Zero(d, tau);
}

Matrix PriorConfig::u0(Index d) const {
  if (mean_u0) {
    if (mean_u0->rows() != d || mean_u0->cols() != d) {
      throw DimensionError("prior: mean_u0 shape mismatch");
    }
    return *mean_u0;
  }
  return Matrix::Identity(d, d);
}

Matrix PriorConfig::v0(Index tau) const {
  if (mean_v0) {
    if (mean_v0->rows() != tau || mean_v0->cols() != tau) {
      throw DimensionError("prior: mean_v0 shape mismatch");
    }
    return *mean_v0;
  }
  return Matrix::Identity(tau, tau);
}

void PriorConfig::validate() const {
  if (!(dirichlet_alpha > 0.0)) throw ConfigError("prior: alpha must be > 0");
  if (!(lkj_eta > 0.0)) throw ConfigError("prior: eta must be > 0");
  if (!(scale_rate_u > 0.0) || !(scale_rate_v > 0.0)) {
    throw ConfigError("prior: scale rates must be > 0");
  }
  if (shrink_gamma < 0.0) throw ConfigError("prior: shrink_gamma must be >= 0");
}

void MnmmModel::validate() const {
  if (components.empty()) throw DimensionError("model: no components");
  if (weights.size() != k()) throw DimensionError("model: weight count mismatch");
  if (weights.minCoeff() < 0.0) throw DataError("model: negative weight");
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw DataError("model: weights do not sum to 1");
  }
  const Index d0 = components.front().rows();
  const Index tau0 = components.front().cols();
  for (const auto& c : components) {
    c.validate();
    if (c.rows() != d0 || c.cols() != tau0) {
      throw DimensionError("model: components disagree on dimensions");
    }
    if (std::abs(c.col_cov.trace() - static_cast<double>(tau0)) >
        1e-9 * static_cast<double>(tau0)) {
      throw DataError("model: component column covariance is not trace-normalized");
    }
  }
  window_spec.validate();
  if (window_spec.d() != d0 || window_spec.tau() != tau0) {
    throw DimensionError("model: window spec disagrees with component shape");
  }
  standardization.validate();
  if (standardization.d() != d0) {
    throw DimensionError("model: standardization row count mismatch");
  }
}

Matrix sample_lkj(Index dim, double eta, Rng& rng) {
  if (dim < 1) throw DimensionError("sample_lkj: dim must be >= 1");
  if (!(eta > 0.0)) throw ConfigError("sample_lkj: eta must be > 0");

  Matrix r = Matrix::Identity(dim, dim);
  if (dim == 1) return r;

  double b = eta + (static_cast<double>(dim) - 2.0) / 2.0;
  const double r12 = 2.0 * rng.beta(b, b) - 1.0;
  r(0, 1) = r12;
  r(1, 0) = r12;

  for (Index m = 2; m < dim; ++m) {
    b -= 0.5;
    const double y = rng.beta(static_cast<double>(m) / 2.0, b);
    const Vector u = rng.unit_sphere(m);
    const Vector w = std::sqrt(y) * u;
    // q = L w keeps q^T R^-1 q = y, so the grown matrix stays a valid
    // correlation matrix.
    const Matrix rm = r.topLeftCorner(m, m);
    const SpdFactor f = spd_factor(rm, 0.0, "lkj partial");
    const Vector q = f.lower() * w;
    for (Index i = 0; i < m; ++i) {
      r(i, m) = q[i];
      r(m, i) = q[i];
    }
  }
  return r;
}

namespace {

Matrix sample_scaled_lkj_cov(Index dim, double eta, double scale_rate, Rng& rng) {
  const Matrix corr = sample_lkj(dim, eta, rng);
  Vector sigma(dim);
  for (Index i = 0; i < dim; ++i) sigma[i] = rng.exponential(scale_rate);
  return sigma.asDiagonal() * corr * sigma.asDiagonal();
}

}  // namespace

MnmmModel sample_prior(const WindowSpec& spec, int k, const PriorConfig& prior,
                       Rng& rng) {
  spec.validate();
  prior.validate();
  if (k < 1) throw ConfigError("sample_prior: k must be >= 1");

  const Index d = spec.d();
  const Index tau = spec.tau();

  MnmmModel model;
  model.window_spec = spec;
  model.standardization = StandardizationStats::identity(d);
  model.standardization.feature_names =
      WindowSpec::default_feature_names(spec.feature_rows, spec.response_rows);
  model.weights = rng.dirichlet(prior.dirichlet_alpha, k);

  MatrixNormalParams mean_prior;
  mean_prior.mean = prior.m0(d, tau);
  mean_prior.row_cov = prior.u0(d);
  mean_prior.col_cov = prior.v0(tau);

  model.components.reserve(k);
  for (int i = 0; i < k; ++i) {
    MatrixNormalParams c;
    c.row_cov = sample_scaled_lkj_cov(d, prior.lkj_eta, prior.scale_rate_u, rng);
    c.col_cov = sample_scaled_lkj_cov(tau, prior.lkj_eta, prior.scale_rate_v, rng);
    c.mean = mn_sample(mean_prior, rng);
    model.components.push_back(normalize_scale(c));
  }
  model.fit_metadata = {};
  return model;
}

SampledDataset sample_dataset(const MnmmModel& model, int n, Rng& rng) {
  if (n < 1) throw ConfigError("sample_dataset: n must be >= 1");
  model.validate();
  SampledDataset out;
  out.windows.reserve(n);
  out.labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int z = rng.categorical(model.weights);
    out.labels.push_back(z);
    out.windows.push_back(mn_sample(model.components[z], rng));
  }
  return out;
}

Responsibilities e_step(const MnmmModel& model,
                        const std::vector<Matrix>& windows) {
  model.validate();
  const int k = model.k();
  const Index n = static_cast<Index>(windows.size());

  std::vector<MatrixNormalFactors> factors;
  factors.reserve(k);
  for (const auto& c : model.components) factors.push_back(mn_factorize(c));

  Vector log_weights(k);
  for (int j = 0; j < k; ++j) {
    log_weights[j] = model.weights[j] > 0.0 ? std::log(model.weights[j]) : kNegInf;
  }

  Responsibilities resp;
  resp.r.resize(n, k);
  resp.log_likelihoods.resize(n);

  Vector logp(k);
  for (Index i = 0; i < n; ++i) {
    if (windows[i].rows() != model.d() || windows[i].cols() != model.tau()) {
      throw DimensionError("e_step: window " + std::to_string(i) +
                           " shape mismatch");
    }
    for (int j = 0; j < k; ++j) {
      logp[j] = log_weights[j] == kNegInf
                    ? kNegInf
                    : log_weights[j] +
                          mn_logpdf(windows[i], model.components[j].mean,
                                    factors[j]);
    }
    const double lse = logsumexp(logp);
    resp.log_likelihoods[i] = lse;
    for (int j = 0; j < k; ++j) {
      resp.r(i, j) = logp[j] == kNegInf ? 0.0 : std::exp(logp[j] - lse);
    }
  }
  resp.total_log_likelihood = resp.log_likelihoods.sum();
  return resp;
}

MStepResult m_step(const std::vector<Matrix>& windows, const Matrix& resp,
                   const PriorConfig& prior, int flip_flop_iters,
                   const std::vector<MatrixNormalParams>& previous) {
  prior.validate();
  const Index n = resp.rows();
  const int k = static_cast<int>(resp.cols());
  if (static_cast<Index>(windows.size()) != n || n < 1) {
    throw DimensionError("m_step: responsibilities/window count mismatch");
  }
  if (static_cast<int>(previous.size()) != k) {
    throw DimensionError("m_step: previous parameter count mismatch");
  }
  if (flip_flop_iters < 1) throw ConfigError("m_step: flip_flop_iters must be >= 1");

  const Index d = windows.front().rows();
  const Index tau = windows.front().cols();
  const double alpha = prior.dirichlet_alpha;
  const double gamma = prior.shrink_gamma * static_cast<double>(n) / k;

  MStepResult out;
  out.components.resize(k);
  out.weights.resize(k);

  const Vector counts = resp.colwise().sum().transpose();
  const double weight_denom =
      static_cast<double>(n) + k * (alpha - 1.0);
  for (int j = 0; j < k; ++j) {
    out.weights[j] = std::max(counts[j] + alpha - 1.0, 1e-12) / weight_denom;
  }
  out.weights /= out.weights.sum();

  for (int j = 0; j < k; ++j) {
    const double nk = counts[j];
    if (nk < static_cast<double>(d + tau) || out.weights[j] < 1e-4) {
      // Starved component: freeze at the prior mean rather than deleting it.
      MatrixNormalParams frozen;
      frozen.mean = prior.m0(d, tau);
      frozen.row_cov = prior.u0(d);
      frozen.col_cov = prior.v0(tau);
      out.components[j] = normalize_scale(frozen);
      out.frozen.push_back(j);
      continue;
    }

    MatrixNormalParams c;
    c.mean.setZero(d, tau);
    for (Index i = 0; i < n; ++i) c.mean += resp(i, j) * windows[i];
    c.mean /= nk;

    c.row_cov = previous[j].row_cov;
    c.col_cov = previous[j].col_cov;
    for (int it = 0; it < flip_flop_iters; ++it) {
      {
        const SpdFactor fv = spd_factor(c.col_cov, "V");
        Matrix su = Matrix::Zero(d, d);
        for (Index i = 0; i < n; ++i) {
          if (resp(i, j) == 0.0) continue;
          const Matrix e = windows[i] - c.mean;
          const Matrix a = fv.solve_lower(e.transpose());  // tau x d
          su.noalias() += resp(i, j) * (a.transpose() * a);
        }
        su += gamma * fv.inverse_trace() * Matrix::Identity(d, d);
        c.row_cov = su / ((nk + gamma) * static_cast<double>(tau));
        c.row_cov = 0.5 * (c.row_cov + c.row_cov.transpose()).eval();
      }
      {
        const SpdFactor fu = spd_factor(c.row_cov, "U");
        Matrix sv = Matrix::Zero(tau, tau);
        for (Index i = 0; i < n; ++i) {
          if (resp(i, j) == 0.0) continue;
          const Matrix e = windows[i] - c.mean;
          const Matrix b = fu.solve_lower(e);  // d x tau
          sv.noalias() += resp(i, j) * (b.transpose() * b);
        }
        sv += gamma * fu.inverse_trace() * Matrix::Identity(tau, tau);
        c.col_cov = sv / ((nk + gamma) * static_cast<double>(d));
        c.col_cov = 0.5 * (c.col_cov + c.col_cov.transpose()).eval();
      }
    }
    out.components[j] = normalize_scale(c);
  }
  return out;
}

void FitConfig::validate() const {
  if (max_iters < 1) throw ConfigError("fit: max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw ConfigError("fit: rel_tol must be > 0");
  if (restarts < 1) throw ConfigError("fit: restarts must be >= 1");
  if (flip_flop_iters < 1) throw ConfigError("fit: flip_flop_iters must be >= 1");
}

double penalized_objective(const MnmmModel& model, double total_log_likelihood,
                           const PriorConfig& prior, Index n_samples) {
  const double alpha = prior.dirichlet_alpha;
  const double gamma =
      prior.shrink_gamma * static_cast<double>(n_samples) / model.k();
  double obj = total_log_likelihood;
  for (int j = 0; j < model.k(); ++j) {
    obj += (alpha - 1.0) * std::log(std::max(model.weights[j], 1e-300));
    const auto& c = model.components[j];
    const SpdFactor fu = spd_factor(c.row_cov, "U");
    const SpdFactor fv = spd_factor(c.col_cov, "V");
    obj -= 0.5 * gamma *
           (static_cast<double>(c.cols()) * fu.log_det() +
            static_cast<double>(c.rows()) * fv.log_det() +
            fu.inverse_trace() * fv.inverse_trace());
  }
  return obj;
}

namespace {

// k-means++ seeding plus bounded Lloyd refinement on z-scored vec(window)
// coordinates; returns one cluster index per window.
std::vector<int> kmeanspp_assign(const std::vector<Matrix>& windows, int k,
                                 Rng& rng) {
  const Index n = static_cast<Index>(windows.size());
  const Index dim = windows.front().size();

  Matrix pts(dim, n);
  for (Index i = 0; i < n; ++i) pts.col(i) = vec(windows[i]);
  for (Index r = 0; r < dim; ++r) {
    const double mean = pts.row(r).mean();
    const double var = (pts.row(r).array() - mean).square().mean();
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      pts.row(r) = (pts.row(r).array() - mean) / sd;
    } else {
      pts.row(r).setZero();
    }
  }

  Matrix centers(dim, k);
  centers.col(0) = pts.col(static_cast<Index>(rng.uniform() * n) % n);
  Vector dist2 =
      (pts.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
  for (int c = 1; c < k; ++c) {
    Index pick;
    if (dist2.sum() > 0.0) {
      pick = rng.categorical(dist2);
    } else {
      pick = static_cast<Index>(rng.uniform() * n) % n;
    }
    centers.col(c) = pts.col(pick);
    dist2 = dist2.cwiseMin(
        (pts.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
  }

  std::vector<int> assign(n, 0);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (pts.col(i) - centers.col(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double dd = (pts.col(i) - centers.col(c)).squaredNorm();
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Matrix sums = Matrix::Zero(dim, k);
    Vector cnt = Vector::Zero(k);
    for (Index i = 0; i < n; ++i) {
      sums.col(assign[i]) += pts.col(i);
      cnt[assign[i]] += 1.0;
    }
    for (int c = 0; c < k; ++c) {
      if (cnt[c] > 0.0) {
        centers.col(c) = sums.col(c) / cnt[c];
      } else {
        // Re-seed an empty cluster at the point farthest from its center.
        Index far = 0;
        double far_d = -1.0;
        for (Index i = 0; i < n; ++i) {
          const double dd = (pts.col(i) - centers.col(assign[i])).squaredNorm();
          if (dd > far_d) {
            far_d = dd;
            far = i;
          }
        }
        centers.col(c) = pts.col(far);
      }
    }
  }
  return assign;
}

}  // namespace

FitResult fit_em(const std::vector<Matrix>& windows, int k,
                 const PriorConfig& prior, const FitConfig& config,
                 const WindowSpec& spec, const StandardizationStats& stats) {
  prior.validate();
  config.validate();
  spec.validate();
  stats.validate();
  const Index n = static_cast<Index>(windows.size());
  if (k < 1) throw ConfigError("fit_em: k must be >= 1");
  if (n < k) throw FitError("fit_em: fewer windows than components");
  const Index d = windows.front().rows();
  const Index tau = windows.front().cols();
  for (const auto& w : windows) {
    if (w.rows() != d || w.cols() != tau) {
      throw DimensionError("fit_em: windows disagree on dimensions");
    }
  }
  if (spec.d() != d || spec.tau() != tau) {
    throw DimensionError("fit_em: window spec disagrees with data");
  }

  FitResult best;
  bool have_best = false;
  std::string first_failure;

  for (int restart = 0; restart < config.restarts; ++restart) {
    try {
      Rng rng = Rng(config.seed).fork(static_cast<std::uint64_t>(restart));

      MnmmModel model;
      model.window_spec = spec;
      model.standardization = stats;
      model.fit_metadata.seed = config.seed;
      model.fit_metadata.restart_index = restart;

      // One-hot initial responsibilities from clustering, then an M step
      // warm-started from identity covariances.
      const std::vector<int> assign = kmeanspp_assign(windows, k, rng);
      Matrix resp0 = Matrix::Zero(n, k);
      for (Index i = 0; i < n; ++i) resp0(i, assign[i]) = 1.0;

      std::vector<MatrixNormalParams> init(k);
      for (int j = 0; j < k; ++j) {
        init[j].mean = Matrix::Zero(d, tau);
        init[j].row_cov = Matrix::Identity(d, d);
        init[j].col_cov = Matrix::Identity(tau, tau);
      }
      MStepResult ms = m_step(windows, resp0, prior, config.flip_flop_iters, init);
      model.weights = ms.weights;
      model.components = ms.components;
      model.fit_metadata.frozen_components = ms.frozen;

      std::vector<double> trace;
      trace.reserve(config.max_iters + 1);
      for (int iter = 0;; ++iter) {
        const Responsibilities resp = e_step(model, windows);
        const double obj = penalized_objective(
            model, resp.total_log_likelihood, prior, n);
        trace.push_back(obj);
        const bool converged =
            iter > 0 && std::abs(obj - trace[iter - 1]) <=
                            config.rel_tol * (1.0 + std::abs(trace[iter - 1]));
        if (converged || iter >= config.max_iters) break;

        ms = m_step(windows, resp.r, prior, config.flip_flop_iters,
                    model.components);
        model.weights = ms.weights;
        model.components = ms.components;
        model.fit_metadata.frozen_components = ms.frozen;
      }

      model.fit_metadata.iterations = static_cast<int>(trace.size()) - 1;
      model.fit_metadata.final_objective = trace.back();

      if (!have_best || trace.back() > best.objective_trace.back()) {
        best.model = std::move(model);
        best.objective_trace = std::move(trace);
        have_best = true;
      }
    } catch (const NotPositiveDefiniteError& e) {
      if (first_failure.empty()) first_failure = e.what();
    } catch (const FitError& e) {
      if (first_failure.empty()) first_failure = e.what();
    }
  }

  if (!have_best) {
    throw FitError("fit_em: all restarts failed (" + first_failure + ")");
  }
  return best;
}

}  // namespace mnmr
