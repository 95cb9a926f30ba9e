// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/gp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "memexplorer/errors.hpp"
#include "memexplorer/rng.hpp"

namespace memx {

namespace {

constexpr double kSqrt5 = 2.23606797749979;

struct KernelEval {
  Eigen::MatrixXd K;
  Eigen::MatrixXd R;       // scaled distances r_ij
  Eigen::MatrixXd Expart;  // sf2 * exp(-sqrt5 r): shared gradient factor
};

KernelEval build_kernel(const Eigen::MatrixXd& X, const Eigen::VectorXd& log_ls,
                        double log_sf2, double jitter) {
  const Eigen::Index n = X.rows();
  const Eigen::VectorXd inv_ls = (-log_ls.array()).exp();
  const double sf2 = std::exp(log_sf2);
  KernelEval out;
  out.K.resize(n, n);
  out.R.resize(n, n);
  out.Expart.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.K(i, i) = sf2 + jitter;
    out.R(i, i) = 0.0;
    out.Expart(i, i) = sf2;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r =
          ((X.row(i) - X.row(j)).transpose().array() * inv_ls.array())
              .matrix()
              .norm();
      const double e = sf2 * std::exp(-kSqrt5 * r);
      const double k = e * (1.0 + kSqrt5 * r + 5.0 / 3.0 * r * r);
      out.K(i, j) = out.K(j, i) = k;
      out.R(i, j) = out.R(j, i) = r;
      out.Expart(i, j) = out.Expart(j, i) = e;
    }
  }
  return out;
}

struct LmlResult {
  double lml = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd grad;  // d(lml)/d(log_ls..., log_sf2)
  bool ok = false;
};

LmlResult lml_and_grad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& log_ls, double log_sf2,
                       double jitter) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  LmlResult res;
  KernelEval ke = build_kernel(X, log_ls, log_sf2, jitter);
  Eigen::LLT<Eigen::MatrixXd> llt(ke.K);
  if (llt.info() != Eigen::Success) return res;

  const Eigen::VectorXd alpha = llt.solve(y);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(llt.matrixL()(i, i));
  res.lml = -0.5 * y.dot(alpha) - log_det - 0.5 * n * std::log(2.0 * M_PI);

  // d(lml)/dtheta = 0.5 * tr((alpha alpha^T - K^-1) dK/dtheta)
  Eigen::MatrixXd Kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd A = alpha * alpha.transpose() - Kinv;

  res.grad.resize(d + 1);
  // dK/dlog_sf2 = K - jitter*I
  double g_sf2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double dk = ke.K(i, j) - (i == j ? jitter : 0.0);
      g_sf2 += A(i, j) * dk;
    }
  }
  res.grad(d) = 0.5 * g_sf2;

  // dK/dlog_l = (5/3) * Expart * (1 + sqrt5 r) * delta_l^2 / l_l^2
  const Eigen::VectorXd inv_ls2 = (-2.0 * log_ls.array()).exp();
  for (Eigen::Index l = 0; l < d; ++l) {
    double g = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double delta = X(i, l) - X(j, l);
        const double dk = 5.0 / 3.0 * ke.Expart(i, j) *
                          (1.0 + kSqrt5 * ke.R(i, j)) * delta * delta *
                          inv_ls2(l);
        g += 2.0 * A(i, j) * dk;  // symmetric off-diagonal pair
      }
    }
    res.grad(l) = 0.5 * g;
  }
  res.ok = true;
  return res;
}

}  // namespace

void GaussianProcess::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          std::uint64_t seed, int restarts) {
  if (X.rows() < 2 || X.rows() != y.size()) {
    throw ValidationError("gp: need at least two observations");
  }
  const Eigen::Index d = X.cols();
  X_ = X;
  y_mean_ = y.mean();
  const double var = (y.array() - y_mean_).square().sum() /
                     std::max<Eigen::Index>(1, y.size() - 1);
  y_std_ = std::sqrt(std::max(var, 0.0));
  if (y_std_ < 1e-12) y_std_ = 1.0;  // constant targets: degenerate but valid
  const Eigen::VectorXd ys = (y.array() - y_mean_) / y_std_;

  Rng rng(seed, "gp-restarts");
  const double lo_ls = std::log(0.05), hi_ls = std::log(5.0);

  double best_lml = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_ls = Eigen::VectorXd::Constant(d, std::log(1.0));
  double best_sf2 = 0.0;
  double jitter = 1e-6;

  for (int restart = 0; restart < restarts; ++restart) {
    Eigen::VectorXd log_ls(d);
    if (restart == 0) {
      log_ls.setConstant(std::log(1.0));
    } else {
      for (Eigen::Index i = 0; i < d; ++i) log_ls(i) = rng.uniform(lo_ls, hi_ls);
    }
    double log_sf2 = restart == 0 ? 0.0 : rng.uniform(std::log(0.3), std::log(3.0));

    // Deterministic Adam ascent on the log marginal likelihood.
    Eigen::VectorXd m = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 1);
    const double lr = 0.08, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    double cur_lml = -std::numeric_limits<double>::infinity();
    for (int it = 1; it <= 60; ++it) {
      LmlResult r = lml_and_grad(X_, ys, log_ls, log_sf2, jitter);
      if (!r.ok) {
        if (jitter < 1e-3) {
          jitter *= 10.0;
          --it;
          continue;
        }
        break;
      }
      cur_lml = r.lml;
      Eigen::VectorXd theta(d + 1);
      theta.head(d) = log_ls;
      theta(d) = log_sf2;
      m = b1 * m + (1.0 - b1) * r.grad;
      v = b2 * v.array().matrix() +
          (1.0 - b2) * r.grad.array().square().matrix();
      const double c1 = 1.0 - std::pow(b1, it), c2 = 1.0 - std::pow(b2, it);
      for (Eigen::Index i = 0; i <= d; ++i) {
        theta(i) += lr * (m(i) / c1) / (std::sqrt(v(i) / c2) + eps);
      }
      log_ls = theta.head(d).cwiseMax(std::log(0.01)).cwiseMin(std::log(100.0));
      log_sf2 = std::clamp(theta(d), std::log(1e-3), std::log(1e3));
    }
    if (cur_lml > best_lml) {
      best_lml = cur_lml;
      best_ls = log_ls;
      best_sf2 = log_sf2;
    }
  }

  // Final factorization at the best hyperparameters, escalating jitter on
  // numerical failure.
  for (;;) {
    KernelEval ke = build_kernel(X_, best_ls, best_sf2, jitter);
    chol_.compute(ke.K);
    if (chol_.info() == Eigen::Success) break;
    if (jitter >= 1e-3) {
      throw NumericalError("gp: kernel matrix singular even at jitter 1e-3");
    }
    jitter *= 10.0;
  }
  lengthscales_ = (best_ls.array().exp()).matrix();
  log_sf2_ = best_sf2;
  jitter_ = jitter;
  best_lml_ = best_lml;
  alpha_ = chol_.solve((y.array() - y_mean_).matrix() / y_std_);
  fitted_ = true;
}

double GaussianProcess::kernel(const Eigen::VectorXd& a,
                               const Eigen::VectorXd& b) const {
  const double r =
      ((a - b).array() / lengthscales_.array()).matrix().norm();
  return std::exp(log_sf2_) * std::exp(-kSqrt5 * r) *
         (1.0 + kSqrt5 * r + 5.0 / 3.0 * r * r);
}

GaussianProcess::Posterior GaussianProcess::predict(
    const Eigen::VectorXd& x) const {
  if (!fitted_) throw ValidationError("gp: predict before fit");
  const Eigen::Index n = X_.rows();
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks(i) = kernel(x, X_.row(i).transpose());
  const double mean_std = ks.dot(alpha_);
  const Eigen::VectorXd w = chol_.solve(ks);
  double var_std = std::exp(log_sf2_) + jitter_ - ks.dot(w);
  if (var_std < 0.0) var_std = 0.0;
  Posterior p;
  p.mean = y_mean_ + y_std_ * mean_std;
  p.variance = y_std_ * y_std_ * var_std;
  return p;
}

double GaussianProcess::signal_variance() const {
  return y_std_ * y_std_ * std::exp(log_sf2_);
}

}  // namespace memx
