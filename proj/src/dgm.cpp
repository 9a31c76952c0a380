#include "cheapsub/dgm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cheapsub/format.hpp"
#include "cheapsub/numerics.hpp"
#include "cheapsub/rng.hpp"

namespace cheapsub {

LongitudinalDataset generate_dgm(std::size_t n, std::uint64_t seed, const DgmParameters& p)
{
    if (n == 0) throw std::invalid_argument("generate_dgm: n must be >= 1");
    StreamRng rng(seed, 0);
    LongitudinalDataset data;
    data.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        LongitudinalRecord r;
        r.w0 = rng.normal();
        r.a0 = rng.bernoulli(expit(p.treatment0(r.w0, 0.0))) ? 1 : 0;
        r.c1 = rng.bernoulli(expit(p.censoring1(r.w0, 0.0))) ? 1 : 0;
        if (r.c1 == 0) {
            r.c2 = 0;
            data.records.push_back(r);
            continue;
        }
        r.y1 = rng.bernoulli(expit(p.outcome1(r.w0, r.a0))) ? 1 : 0;
        if (r.y1 == 1) {
            r.y2 = 1;
            data.records.push_back(r);
            continue;
        }
        r.w1 = p.w1_on_w0 * r.w0 + p.w1_on_a0 * r.a0 + rng.normal();
        r.a1 = rng.bernoulli(expit(p.treatment1(r.w0, r.a0))) ? 1 : 0;
        r.c2 = rng.bernoulli(expit(p.censoring2(r.w1, 0.0))) ? 1 : 0;
        if (r.c2 == 1) r.y2 = rng.bernoulli(expit(p.outcome2(r.w1, r.a1))) ? 1 : 0;
        data.records.push_back(r);
    }
    return data;
}

TruthModel TruthModel::from(const DgmParameters& p, int regime)
{
    if (regime != 0 && regime != 1) throw std::invalid_argument("regime must be 0 or 1");
    const double a = regime;
    TruthModel m;
    m.event1 = [o = p.outcome1, a](double w0) { return expit(o(w0, a)); };
    m.event2 = [o = p.outcome2, a](double w1) { return expit(o(w1, a)); };
    m.w1_slope = p.w1_on_w0;
    m.w1_shift = p.w1_on_a0 * a;
    return m;
}

namespace {

// Physicists' Gauss-Hermite nodes/weights (weight exp(-x^2)), Newton on H_n.
void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1) z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2) z = 1.86 * z - 0.86 * x[0];
        else if (i == 3) z = 1.91 * z - 0.91 * x[1];
        else z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
        double pp = 0.0;
        int iter = 0;
        for (; iter < 100; ++iter) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        if (iter == 100) throw std::runtime_error("gauss_hermite: root finding failed");
        x[static_cast<std::size_t>(i)] = z;
        x[static_cast<std::size_t>(n - 1 - i)] = -z;
        w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
        w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
    }
}

}  // namespace

double truth_by_quadrature(const TruthModel& model, int nodes)
{
    if (nodes < 2) throw std::invalid_argument("truth_by_quadrature: need at least 2 nodes");
    std::vector<double> x;
    std::vector<double> w;
    gauss_hermite(nodes, x, w);
    // E[f(Z)], Z ~ N(0,1)  =  sum_k w_k f(sqrt(2) x_k) / sqrt(pi)
    const double scale = std::numbers::sqrt2;
    const double norm = 1.0 / std::sqrt(std::numbers::pi);
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w0 = scale * x[i];
        double inner = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double w1 = model.w1_slope * w0 + model.w1_shift + scale * x[j];
            inner += w[j] * model.event2(w1);
        }
        inner *= norm;
        const double p1 = model.event1(w0);
        total += w[i] * (p1 + (1.0 - p1) * inner);
    }
    return total * norm;
}

double truth_by_monte_carlo(const TruthModel& model, std::size_t draws, std::uint64_t seed)
{
    if (draws == 0) throw std::invalid_argument("truth_by_monte_carlo: draws must be >= 1");
    StreamRng rng(seed, 0);
    std::size_t events = 0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double w0 = rng.normal();
        if (rng.bernoulli(model.event1(w0))) {
            ++events;
            continue;
        }
        const double w1 = model.w1_slope * w0 + model.w1_shift + rng.normal();
        if (rng.bernoulli(model.event2(w1))) ++events;
    }
    return static_cast<double>(events) / static_cast<double>(draws);
}

TruthResult truth_oracle(int regime, const DgmParameters& params, std::size_t draws, std::uint64_t seed,
                         double tolerance)
{
    const TruthModel model = TruthModel::from(params, regime);
    TruthResult result;
    result.regime = regime;
    result.quadrature = truth_by_quadrature(model);
    result.monte_carlo = truth_by_monte_carlo(model, draws, seed);
    result.monte_carlo_draws = draws;
    result.seed = seed;
    if (std::abs(result.quadrature - result.monte_carlo) > tolerance) {
        throw std::runtime_error("truth oracle disagreement: quadrature " + format_double(result.quadrature) +
                                 " vs Monte Carlo " + format_double(result.monte_carlo));
    }
    return result;
}

}  // namespace cheapsub
