#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace mnmr {

// Deterministic random source. All distributions are generated from raw
// mt19937_64 output with fixed algorithms, so a given seed produces the
// same stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via Marsaglia polar; one spare draw is cached.
  double normal();

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze.
  double gamma(double shape);
  double beta(double a, double b);
  double exponential(double rate);

  // Symmetric Dirichlet(alpha) over k categories.
  Eigen::VectorXd dirichlet(double alpha, int k);

  // Uniform direction on the unit sphere in R^dim.
  Eigen::VectorXd unit_sphere(Eigen::Index dim);

  // Index draw from an (unnormalized is fine) nonnegative weight vector.
  int categorical(const Eigen::VectorXd& weights);

  // Independent substream; deterministic function of (seed, stream id).
  Rng fork(std::uint64_t stream) const;

  // Stateless mixing function used for derived seeds (grid cells, restarts).
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace mnmr
