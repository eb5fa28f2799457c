#pragma once

#include <vector>

#include <Eigen/Core>

#include "codesign/common/rng.hpp"

namespace codesign::bohb {

/// Parzen density over the unit cube: one Gaussian product kernel per
/// observation, truncated to [0,1] and renormalized per dimension, with
/// Scott's-rule bandwidths floored at 1e-3. Integrates to one by
/// construction (each per-dimension kernel is renormalized).
class ParzenKde {
 public:
  /// `include_prior` mixes in one uniform component over the cube, weighted
  /// like one extra observation; it keeps exploration alive once the
  /// observation kernels become tight, and bounds the density ratio away
  /// from data.
  explicit ParzenKde(std::vector<Eigen::VectorXd> points, double bandwidth_floor = 1e-3,
                     bool include_prior = false, std::vector<double> weights = {});

  double log_density(const Eigen::VectorXd& u) const;
  double density(const Eigen::VectorXd& u) const { return std::exp(log_density(u)); }
  /// Marginal density of one dimension (the product kernels factorize).
  double log_density_dim(int dim, double x) const;
  /// Draw one sample: pick a kernel uniformly, then per-dimension truncated
  /// normal via rejection. `width_factor` widens the kernel for sampling
  /// only (exploration around tight models); densities are unaffected.
  Eigen::VectorXd sample(Rng& rng, double width_factor = 1.0) const;
  /// Draw from the marginal of one dimension.
  double sample_dim(int dim, Rng& rng, double width_factor = 1.0) const;

  int dimension() const { return dim_; }
  std::size_t kernel_count() const { return points_.size(); }
  const Eigen::VectorXd& bandwidths() const { return bandwidth_; }

 private:
  std::size_t pick_kernel(Rng& rng) const;

  std::vector<Eigen::VectorXd> points_;
  std::vector<double> weights_;   // per kernel, prior appended last
  double weight_sum_ = 0.0;
  Eigen::VectorXd bandwidth_;
  int dim_ = 0;
  bool include_prior_ = false;
};

/// The good/bad density split over observations at one budget.
struct DensityPair {
  ParzenKde good;
  ParzenKde bad;
  std::size_t n_good = 0;
  double split_score = 0.0;  // score of the worst observation still "good"
};

/// Partitions observations (unit points with scores, higher better) into the
/// best max(min_good, ceil(gamma*n)) and the rest, and fits the two
/// densities. min_good keeps the good model from collapsing onto one or two
/// kernels early on (dimension + 1 in the optimizer).
DensityPair fit_density_pair(const std::vector<Eigen::VectorXd>& points,
                             const std::vector<double>& scores, double gamma,
                             std::size_t min_good = 1, double bandwidth_floor = 1e-3,
                             bool include_prior = false);

}  // namespace codesign::bohb
