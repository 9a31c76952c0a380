#pragma once

// Simulation data-generating mechanism for two-interval survival data with a
// binary treatment, a time-varying confounder and right censoring, together
// with the true risk under a sustained regime computed two independent ways.

#include <cstddef>
#include <cstdint>
#include <functional>

#include "cheapsub/longitudinal.hpp"

namespace cheapsub {

/// Linear predictor b0 + b_w * w + b_a * a on the logit scale.
struct LogitLinear {
    double intercept = 0.0;
    double w = 0.0;
    double a = 0.0;

    double operator()(double w_value, double a_value) const noexcept { return intercept + w * w_value + a * a_value; }
};

struct DgmParameters {
    LogitLinear treatment0{-0.2, 0.4, 0.0};   // A0 | W0
    LogitLinear censoring1{3.5, 1.0, 0.0};    // C1 | W0
    LogitLinear outcome1{-1.4, 0.1, -1.5};    // Y1 | W0, A0
    double w1_on_w0 = 0.5;                    // W1 | W0, A0 ~ N(0.5 W0 + 0.2 A0, 1)
    double w1_on_a0 = 0.2;
    LogitLinear treatment1{0.0, -0.4, 0.8};   // A1 | W0, A0 (w slope on W0, a slope on A0)
    LogitLinear censoring2{3.5, 1.0, 0.0};    // C2 | W1
    LogitLinear outcome2{-1.4, 0.1, -1.5};    // Y2 | W1, A1
};

/// n i.i.d. records drawn in the order W0, A0, C1, Y1, W1, A1, C2, Y2 from
/// stream (seed, 0). C1 = 0 sets C2 = 0; an event at time 1 is absorbing (Y2 = 1).
LongitudinalDataset generate_dgm(std::size_t n, std::uint64_t seed, const DgmParameters& params = {});

/// Ingredients of the intervened risk: event probabilities at each interval as a
/// function of the current confounder, and the law of W1 given W0 under the regime.
struct TruthModel {
    std::function<double(double w0)> event1;
    std::function<double(double w1)> event2;
    double w1_slope = 0.5;
    double w1_shift = 0.0;  ///< W1 | W0 ~ N(w1_slope * W0 + w1_shift, 1)

    static TruthModel from(const DgmParameters& params, int regime);
};

/// E_W0[ p1(W0) + (1 - p1(W0)) E[p2(W1) | W0] ] by nested Gauss-Hermite quadrature.
double truth_by_quadrature(const TruthModel& model, int nodes = 96);

/// Fraction of `draws` simulated intervened trajectories with an event by time 2.
double truth_by_monte_carlo(const TruthModel& model, std::size_t draws, std::uint64_t seed);

struct TruthResult {
    int regime = 1;
    double quadrature = 0.0;
    double monte_carlo = 0.0;
    std::size_t monte_carlo_draws = 0;
    std::uint64_t seed = 0;

    double value() const noexcept { return quadrature; }
};

/// Both routes; throws std::runtime_error if they differ by more than `tolerance`.
TruthResult truth_oracle(int regime, const DgmParameters& params = {}, std::size_t draws = 10'000'000,
                         std::uint64_t seed = 20240601, double tolerance = 5e-4);

}  // namespace cheapsub
