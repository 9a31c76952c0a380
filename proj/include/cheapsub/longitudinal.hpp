#pragma once

// Two-interval longitudinal data and the sequential-regression (iterated
// conditional expectation) estimator of the risk of an event by the end of
// interval 2 under a sustained treatment regime, with optional targeting.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cheapsub/estimate.hpp"

namespace cheapsub {

inline constexpr std::int8_t kMissing = -1;

/// One subject. Binary fields hold 0, 1 or kMissing; W1 is NaN when missing.
/// C1/C2 are 1 for uncensored, 0 for censored.
struct LongitudinalRecord {
    double w0 = 0.0;
    std::int8_t a0 = 0;
    std::int8_t c1 = 1;
    std::int8_t y1 = kMissing;
    double w1 = std::numeric_limits<double>::quiet_NaN();
    std::int8_t a1 = kMissing;
    std::int8_t c2 = kMissing;
    std::int8_t y2 = kMissing;

    bool operator==(const LongitudinalRecord&) const = default;
};

struct LongitudinalDataset {
    std::vector<LongitudinalRecord> records;
};

inline std::size_t record_count(const LongitudinalDataset& d) noexcept { return d.records.size(); }
LongitudinalDataset take_rows(const LongitudinalDataset& d, std::span<const std::size_t> rows);

/// Checks monotone missingness; throws DataError naming the first bad row.
///  - C1 = 0: Y1, W1, A1, Y2 missing and C2 = 0.
///  - C1 = 1: Y1 observed.
///  - Y1 = 1: W1, A1 missing; C2 missing or 1; Y2 missing or 1 (absorbing).
///  - C1 = 1, Y1 = 0: W1, A1, C2 observed; Y2 observed iff C2 = 1.
void validate(const LongitudinalDataset& data);

/// validate(), then sets Y2 = 1 wherever Y1 = 1.
void normalize_absorbing(LongitudinalDataset& data);

/// CSV with header W0,A0,C1,Y1,W1,A1,C2,Y2; missing cells are empty.
/// Rejects schema violations with DataError. Output is validated and normalized.
LongitudinalDataset read_longitudinal_csv(std::istream& in);
void write_longitudinal_csv(std::ostream& out, const LongitudinalDataset& data);

/// How the time-2 outcome regression is fitted.
enum class OutcomeRegressionScope {
    /// All uncensored records at risk at time 2, treatment history as covariates
    /// (W0, A0, W1, A1), predicted with treatment set to the regime.
    pooled,
    /// Regime followers only, covariates (W0, W1).
    stratified,
};

struct LongitudinalOptions {
    int regime = 1;  ///< sustained treatment level a in {0, 1}
    bool targeting = true;
    bool compute_influence = true;
    OutcomeRegressionScope q2_scope = OutcomeRegressionScope::pooled;
    /// Adds W0*W1 to the time-2 outcome design (saturated when both are binary).
    bool q2_interaction = false;
    /// Treatment and censoring probabilities are clipped to this range.
    double probability_floor = 0.01;
    double probability_ceiling = 0.99;
};

/// Fitted nuisance coefficients. A censoring vector is empty when no record was
/// censored at that time, in which case the probability of remaining uncensored is 1.
struct NuisanceModelSet {
    Eigen::VectorXd outcome2;     ///< Q2
    Eigen::VectorXd outcome1;     ///< Q1
    Eigen::VectorXd treatment0;   ///< P(A0 = 1 | W0)
    Eigen::VectorXd treatment1;   ///< P(A1 = 1 | W0, A0, W1)
    Eigen::VectorXd censoring1;   ///< P(C1 = 1 | W0, A0)
    Eigen::VectorXd censoring2;   ///< P(C2 = 1 | W0, A0, W1, A1)
};

struct LongitudinalFit {
    EstimateWithIF estimate;
    NuisanceModelSet nuisance;
    double fluctuation2 = 0.0;  ///< targeting shift at time 2 (may be +/-inf)
    double fluctuation1 = 0.0;
    std::size_t followers = 0;  ///< records following the regime through time 2
};

LongitudinalFit fit_longitudinal_risk(const LongitudinalDataset& data, const LongitudinalOptions& options = {});

struct LongitudinalEstimator {
    LongitudinalOptions options;

    EstimateWithIF fit(const LongitudinalDataset& data) const;
    double fit_point(const LongitudinalDataset& data) const;
    bool provides_influence() const noexcept { return true; }
};

}  // namespace cheapsub
