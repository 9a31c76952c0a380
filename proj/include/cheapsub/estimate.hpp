#pragma once

// The estimator contract shared by the replication engine, the interval
// constructors and the simulation harness.

#include <concepts>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cheapsub {

/// Point estimate with optional per-observation influence-function values.
struct EstimateWithIF {
    double point = 0.0;
    std::optional<std::vector<double>> influence;
};

/// A dataset the engine can subset by record position. Found by ADL.
template <class Data>
concept Resamplable = requires(const Data& d, std::span<const std::size_t> rows) {
    { record_count(d) } -> std::convertible_to<std::size_t>;
    { take_rows(d, rows) } -> std::convertible_to<Data>;
};

/// fit() must be deterministic given the dataset and return a finite estimate.
/// It signals a recoverable fitting problem by throwing EstimatorFailure.
template <class Est, class Data>
concept EstimatorFor = requires(const Est& e, const Data& d) {
    { e.fit(d) } -> std::convertible_to<EstimateWithIF>;
    { e.provides_influence() } -> std::convertible_to<bool>;
};

/// Point estimate only; uses a cheaper fit_point() when the estimator has one.
template <class Est, class Data>
    requires EstimatorFor<Est, Data>
double point_estimate(const Est& est, const Data& data)
{
    if constexpr (requires { { est.fit_point(data) } -> std::convertible_to<double>; }) {
        return est.fit_point(data);
    } else {
        return est.fit(data).point;
    }
}

/// Univariate i.i.d. sample.
struct Sample {
    std::vector<double> values;
};

inline std::size_t record_count(const Sample& s) noexcept { return s.values.size(); }
Sample take_rows(const Sample& s, std::span<const std::size_t> rows);

/// Reads one numeric column (by header name, or the first column when `column`
/// is empty) from a CSV with a header row. Throws DataError on bad input.
Sample read_sample_csv(std::istream& in, std::string_view column = {});

/// Sample mean with influence values x_i - mean. Requires at least 2 values.
EstimateWithIF fit_mean(std::span<const double> values);

struct MeanEstimator {
    EstimateWithIF fit(const Sample& s) const { return fit_mean(s.values); }
    double fit_point(const Sample& s) const;
    bool provides_influence() const noexcept { return true; }
};

}  // namespace cheapsub
