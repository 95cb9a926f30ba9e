// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace memx {

/// Gaussian process regressor with a Matern-5/2 ARD kernel and constant
/// (zero, post-standardization) mean. Hyperparameters are fit by maximizing
/// the log marginal likelihood with a deterministic Adam optimizer restarted
/// from seeded draws. Targets are standardized internally; predictions are
/// returned in the original units.
class GaussianProcess {
 public:
  struct Posterior {
    double mean = 0.0;
    double variance = 0.0;
  };

  /// Fits to rows of X (inputs in the encoded [0,1]^d space) and y.
  /// Requires at least two observations. Jitter starts at 1e-6 and escalates
  /// to 1e-3 before a NumericalError is raised.
  void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
           std::uint64_t seed, int restarts = 5);

  Posterior predict(const Eigen::VectorXd& x) const;

  bool fitted() const { return fitted_; }
  double signal_variance() const;  // in original units
  double y_mean() const { return y_mean_; }
  double log_marginal_likelihood() const { return best_lml_; }
  double jitter() const { return jitter_; }
  const Eigen::VectorXd& lengthscales() const { return lengthscales_; }

 private:
  double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  bool fitted_ = false;
  Eigen::MatrixXd X_;
  Eigen::VectorXd alpha_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd lengthscales_;
  double log_sf2_ = 0.0;
  double jitter_ = 1e-6;
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  double best_lml_ = 0.0;
};

}  // namespace memx
