#pragma once

// Special functions and distribution quantiles used by the interval
// constructors. Everything here is a pure function of its arguments.

#include <cstdint>

namespace cheapsub {

/// A probability strictly inside (0, 1).
class Probability {
public:
    /// Throws std::domain_error unless 0 < value < 1.
    explicit Probability(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Degrees of freedom of a t distribution; at least 1.
class DegreesOfFreedom {
public:
    explicit DegreesOfFreedom(std::int64_t value);
    std::int64_t value() const noexcept { return value_; }

private:
    std::int64_t value_;
};

/// Logistic function 1/(1+exp(-x)). Saturates to exactly 0 or 1 for |x| > 36.
double expit(double x) noexcept;

/// log(p/(1-p)); p must lie in (0, 1).
double logit(double p);

/// log Gamma(x) for x > 0 (Lanczos approximation).
double log_gamma(double x);

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double reg_inc_beta(double a, double b, double x);

double normal_cdf(double x) noexcept;
double normal_pdf(double x) noexcept;

/// Inverse standard normal CDF.
double normal_quantile(Probability p);

double t_pdf(DegreesOfFreedom df, double x);
double t_cdf(DegreesOfFreedom df, double x);

/// Inverse Student-t CDF: bracketing followed by safeguarded Newton steps on
/// the CDF, falling back to bisection whenever a step leaves the bracket.
double t_quantile(DegreesOfFreedom df, Probability p);

}  // namespace cheapsub
