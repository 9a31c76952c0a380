#include "cheapsub/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cheapsub {

Probability::Probability(double value) : value_(value)
{
    if (!(value > 0.0 && value < 1.0)) {
        throw std::domain_error("probability must lie in (0, 1), got " + std::to_string(value));
    }
}

DegreesOfFreedom::DegreesOfFreedom(std::int64_t value) : value_(value)
{
    if (value < 1) {
        throw std::domain_error("degrees of freedom must be >= 1, got " + std::to_string(value));
    }
}

double expit(double x) noexcept
{
    if (x > 36.0) return 1.0;
    if (x < -36.0) return 0.0;
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p)
{
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("logit: argument must lie in (0, 1)");
    return std::log(p / (1.0 - p));
}

double log_gamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("log_gamma: x must be positive and finite");
    // Lanczos, g = 7, n = 9.
    static constexpr std::array<double, 9> coef = {
        0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
        771.32342877765313,   -176.61502916214059, 12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // Reflection keeps accuracy for small arguments.
        return std::log(std::numbers::pi / std::abs(std::sin(std::numbers::pi * x))) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double sum = coef[0];
    for (std::size_t i = 1; i < coef.size(); ++i) sum += coef[i] / (z + static_cast<double>(i));
    const double t = z + 7.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

namespace {

// Continued fraction for I_x(a,b) (modified Lentz).
double beta_continued_fraction(double a, double b, double x)
{
    constexpr int max_iter = 1000;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("reg_inc_beta: continued fraction failed to converge");
}

}  // namespace

double reg_inc_beta(double a, double b, double x)
{
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("reg_inc_beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("reg_inc_beta: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) noexcept { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_quantile(Probability prob)
{
    const double p = prob.value();
    // Acklam's rational approximation (relative error ~1e-9), then Halley refinement.
    static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                                -2.759285104469687e+02, 1.383577518672690e+02,
                                                -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                                -1.556989798598866e+02, 6.680131188771972e+01,
                                                -1.328068155288572e+01};
    static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                                -2.400758277161838e+00, -2.549732539343734e+00,
                                                4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                                2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x = 0.0;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int i = 0; i < 2; ++i) {
        // Work in the tail nearer to p to keep the residual accurate.
        const double e = (p < 0.5) ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double t_pdf(DegreesOfFreedom df, double x)
{
    const double nu = static_cast<double>(df.value());
    const double log_norm = log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi);
    return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

double t_cdf(DegreesOfFreedom df, double x)
{
    if (std::isnan(x)) throw std::domain_error("t_cdf: x is NaN");
    if (x == 0.0) return 0.5;
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    const double nu = static_cast<double>(df.value());
    const double tail = 0.5 * reg_inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
    return x > 0.0 ? 1.0 - tail : tail;
}

namespace {

// Upper-tail probability P(T > x) for x >= 0, accurate in the far tail.
double t_upper_tail(DegreesOfFreedom df, double x)
{
    const double nu = static_cast<double>(df.value());
    return 0.5 * reg_inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
}

}  // namespace

double t_quantile(DegreesOfFreedom df, Probability prob)
{
    const double p = prob.value();
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -t_quantile(df, Probability(1.0 - p));

    // Solve P(T > x) = q on x > 0.
    const double q = 1.0 - p;
    auto residual = [&](double x) { return t_upper_tail(df, x) - q; };  // decreasing in x

    double lo = 0.0;
    double hi = std::max(1.0, normal_quantile(prob));
    while (residual(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("t_quantile: failed to bracket");
    }

    double x = std::clamp(normal_quantile(prob), lo, hi);
    if (x <= lo || x >= hi) x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double r = residual(x);
        if (r == 0.0) return x;
        if (r > 0.0) lo = x; else hi = x;
        if (std::abs(r) <= 1e-15 * q || (hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
        // d/dx P(T > x) = -pdf(x)
        const double slope = t_pdf(df, x);
        double next = (slope > 0.0) ? x + r / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

}  // namespace cheapsub
