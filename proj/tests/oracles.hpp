#pragma once

// Reference computations used only by the tests. They deliberately avoid the
// library's own numerics (std::lgamma / std::erfc instead of the in-house
// routines, plain quadrature instead of continued fractions).

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                               double fb, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13)
{
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 60);
}

inline double t_density(double df, double x)
{
    const double c = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) - 0.5 * std::log(df * std::numbers::pi);
    return std::exp(c - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

/// P(T <= x) for x >= 0 as 1/2 plus the integral of the density over [0, x].
inline double t_cdf_by_integration(double df, double x)
{
    return 0.5 + integrate([df](double u) { return t_density(df, u); }, 0.0, x);
}

inline double bisect(const std::function<double(double)>& f, double target, double lo, double hi)
{
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Upper quantile p > 0.5 of Student t by bisection on the integrated density.
inline double t_quantile_by_integration(double df, double p)
{
    return bisect([df](double x) { return t_cdf_by_integration(df, x); }, p, 0.0, 1000.0);
}

inline double normal_quantile_by_erfc(double p)
{
    return bisect([](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }, p, -40.0, 40.0);
}

/// Every m-subset of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t m)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (cur.size() == m) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

inline double mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Variance with divisor N (population form).
inline double population_variance(const std::vector<double>& v)
{
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size());
}

/// Sample standard deviation (divisor N - 1).
inline double sample_sd(const std::vector<double>& v)
{
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace oracle
