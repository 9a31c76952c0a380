#pragma once

// Logistic regression by iteratively reweighted least squares.
//
// Outcomes may be fractional in [0, 1] (quasi-binomial fits of sequential
// regressions); rows carry optional non-negative weights and a fixed offset on
// the logit scale. Any problem that makes the maximum likelihood estimate
// unusable is reported as EstimatorFailure.

#include <Eigen/Dense>

#include <span>

namespace cheapsub {

struct LogisticOptions {
    int max_iterations = 100;
    double score_tolerance = 1e-8;    ///< max |gradient of log-likelihood|
    double loglik_tolerance = 1e-10;  ///< relative log-likelihood change
    /// A converged fit with |linear predictor| above this on any weighted row
    /// (fitted probability within ~1e-13 of 0 or 1) is treated as separation.
    double separation_threshold = 30.0;
};

struct LogisticFit {
    Eigen::VectorXd coefficients;
    int iterations = 0;
    double log_likelihood = 0.0;
    double max_abs_score = 0.0;
};

LogisticFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LogisticOptions& options = {});

/// Weighted fit with an offset. Empty weights mean 1; empty offset means 0.
LogisticFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& weights,
                         const Eigen::VectorXd& offset, const LogisticOptions& options = {});

/// Fitted probabilities expit(X beta + offset).
Eigen::VectorXd predict_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& coefficients);

/// Gradient of the weighted Bernoulli log-likelihood at `coefficients`.
Eigen::VectorXd logistic_score(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& weights,
                               const Eigen::VectorXd& offset, const Eigen::VectorXd& coefficients);

/// Solves sum_i w_i (y_i - expit(offset_i + eps)) = 0 for the scalar shift eps.
/// Returns -inf (+inf) when the weighted outcome mass is all 0 (all 1), which
/// is the limit of the maximum likelihood solution.
double solve_logistic_shift(std::span<const double> offset, std::span<const double> y,
                            std::span<const double> weights);

}  // namespace cheapsub
