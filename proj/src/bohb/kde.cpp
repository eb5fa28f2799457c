#include "codesign/bohb/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "codesign/common/errors.hpp"

namespace codesign::bohb {

namespace {

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

const double kLog2Pi = std::log(2.0 * M_PI);

/// log pdf of a normal(mu, h) truncated to [0, 1], evaluated at x in [0, 1].
double log_truncated_kernel(double x, double mu, double h) {
  const double z = (x - mu) / h;
  const double mass = normal_cdf((1.0 - mu) / h) - normal_cdf((0.0 - mu) / h);
  return -0.5 * kLog2Pi - std::log(h) - 0.5 * z * z - std::log(std::max(mass, 1e-300));
}

}  // namespace

ParzenKde::ParzenKde(std::vector<Eigen::VectorXd> points, double bandwidth_floor,
                     bool include_prior, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)), include_prior_(include_prior) {
  if (points_.empty()) throw BadParams("a Parzen density needs at least one observation");
  if (weights_.empty()) weights_.assign(points_.size(), 1.0);
  if (weights_.size() != points_.size())
    throw BadParams("kernel weights must match the observation count");
  if (include_prior_) {
    // The prior weighs like one average observation.
    double mean_w = 0.0;
    for (double w : weights_) mean_w += w;
    weights_.push_back(mean_w / static_cast<double>(points_.size()));
  }
  weight_sum_ = 0.0;
  for (double w : weights_) weight_sum_ += w;
  dim_ = static_cast<int>(points_[0].size());
  const double n = static_cast<double>(points_.size());
  // Scott's rule per dimension, floored.
  bandwidth_.resize(dim_);
  const double factor = std::pow(n, -1.0 / (dim_ + 4.0));
  for (int d = 0; d < dim_; ++d) {
    double mean = 0.0;
    for (const auto& p : points_) mean += p[d];
    mean /= n;
    double var = 0.0;
    for (const auto& p : points_) var += (p[d] - mean) * (p[d] - mean);
    var /= n;
    bandwidth_[d] = std::max(std::sqrt(var) * factor, bandwidth_floor);
  }
}

double ParzenKde::log_density(const Eigen::VectorXd& u) const {
  // log of the kernel mixture via log-sum-exp; the prior contributes one
  // uniform component (density 1 over the cube).
  std::vector<double> logs(points_.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < points_.size(); ++k) {
    double sum = std::log(weights_[k]);
    for (int d = 0; d < dim_; ++d)
      sum += log_truncated_kernel(u[d], points_[k][d], bandwidth_[d]);
    logs[k] = sum;
    max_log = std::max(max_log, sum);
  }
  if (include_prior_) max_log = std::max(max_log, std::log(weights_.back()));
  double acc = include_prior_ ? std::exp(std::log(weights_.back()) - max_log) : 0.0;
  for (double l : logs) acc += std::exp(l - max_log);
  return max_log + std::log(acc) - std::log(weight_sum_);
}

double ParzenKde::log_density_dim(int dim, double x) const {
  std::vector<double> logs(points_.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < points_.size(); ++k) {
    logs[k] = std::log(weights_[k]) + log_truncated_kernel(x, points_[k][dim], bandwidth_[dim]);
    max_log = std::max(max_log, logs[k]);
  }
  if (include_prior_) max_log = std::max(max_log, std::log(weights_.back()));
  double acc = include_prior_ ? std::exp(std::log(weights_.back()) - max_log) : 0.0;
  for (double l : logs) acc += std::exp(l - max_log);
  return max_log + std::log(acc) - std::log(weight_sum_);
}

std::size_t ParzenKde::pick_kernel(Rng& rng) const {
  double target = rng.uniform() * weight_sum_;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    target -= weights_[k];
    if (target <= 0.0) return k;
  }
  return weights_.size() - 1;
}

double ParzenKde::sample_dim(int dim, Rng& rng, double width_factor) const {
  const std::size_t k = pick_kernel(rng);
  if (k == points_.size()) return rng.uniform();  // the prior component
  double x;
  int tries = 0;
  do {
    x = rng.normal(points_[k][dim], width_factor * bandwidth_[dim]);
    ++tries;
  } while ((x < 0.0 || x > 1.0) && tries < 200);
  return std::clamp(x, 0.0, 1.0);
}

Eigen::VectorXd ParzenKde::sample(Rng& rng, double width_factor) const {
  const std::size_t k = pick_kernel(rng);
  Eigen::VectorXd u(dim_);
  for (int d = 0; d < dim_; ++d) {
    if (k == points_.size()) {
      u[d] = rng.uniform();  // the prior component
      continue;
    }
    double x;
    int tries = 0;
    do {
      x = rng.normal(points_[k][d], width_factor * bandwidth_[d]);
      ++tries;
    } while ((x < 0.0 || x > 1.0) && tries < 200);
    u[d] = std::clamp(x, 0.0, 1.0);
  }
  return u;
}

DensityPair fit_density_pair(const std::vector<Eigen::VectorXd>& points,
                             const std::vector<double>& scores, double gamma,
                             std::size_t min_good, double bandwidth_floor,
                             bool include_prior) {
  if (points.size() != scores.size() || points.size() < 2)
    throw BadParams("density pair needs matching points/scores with >= 2 observations");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const std::size_t n_good = std::min(
      points.size() - 1,
      std::max(min_good, static_cast<std::size_t>(std::ceil(
                             gamma * static_cast<double>(points.size()) - 1e-12))));
  std::vector<Eigen::VectorXd> good_pts, bad_pts;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i < std::max<std::size_t>(n_good, 1))
      good_pts.push_back(points[order[i]]);
    else
      bad_pts.push_back(points[order[i]]);
  }
  // Rank weights: the best good observation carries the most sampling mass.
  std::vector<double> good_weights(good_pts.size());
  for (std::size_t i = 0; i < good_pts.size(); ++i)
    good_weights[i] = static_cast<double>(good_pts.size() - i);
  DensityPair pair{
      ParzenKde(std::move(good_pts), bandwidth_floor, include_prior, std::move(good_weights)),
      ParzenKde(std::move(bad_pts), bandwidth_floor, include_prior),
      std::max<std::size_t>(n_good, 1), 0.0};
  pair.split_score = scores[order[pair.n_good - 1]];
  return pair;
}

}  // namespace codesign::bohb
