#pragma once

// Deterministic parallel replication engine.
//
// Replicate b draws its index set from stream (plan.master_seed, b). A failed
// fit (EstimatorFailure) is retried on stream b + k * kRetryStride for attempt
// k = 1..max_retries. Results are collected by replicate index, so the output
// does not depend on the worker count.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cheapsub/errors.hpp"
#include "cheapsub/estimate.hpp"
#include "cheapsub/parallel.hpp"
#include "cheapsub/resampling.hpp"

namespace cheapsub {

enum class ResampleScheme {
    subsample,  ///< m < n records without replacement
    bootstrap,  ///< n records with replacement
};

/// m as a fixed count or as floor(eta * n).
class SubsampleRule {
public:
    static SubsampleRule fraction(double eta);
    static SubsampleRule fixed(std::size_t m);

    /// Throws std::invalid_argument if the result violates 1 <= m < n.
    std::size_t resolve(std::size_t n) const;

    bool is_fraction() const noexcept { return eta_.has_value(); }
    double eta() const { return eta_.value(); }
    std::size_t fixed_size() const noexcept { return m_; }

private:
    std::optional<double> eta_;
    std::size_t m_ = 0;
};

inline constexpr std::uint64_t kRetryStride = std::uint64_t{1} << 40;

struct ReplicationPlan {
    std::uint64_t master_seed = 0;
    std::size_t replicates = 1;  ///< B
    SubsampleRule size = SubsampleRule::fraction(0.632);
    ResampleScheme scheme = ResampleScheme::subsample;
    unsigned max_retries = 5;
    unsigned workers = 1;        ///< 0 = all cores
    /// When false, a replicate that fails max_retries + 1 times is a hard error.
    /// When true it is dropped and the realized B shrinks.
    bool drop_exhausted = false;
};

struct ReplicationResult {
    std::vector<double> estimates;          ///< ordered by replicate index
    std::vector<std::size_t> replicate_ids; ///< index b of each estimate
    std::vector<unsigned> retries;          ///< retries used per estimate
    std::size_t n = 0;
    std::size_t m = 0;                      ///< records per replicate
    std::size_t total_retries = 0;
    std::size_t dropped = 0;

    std::size_t realized() const noexcept { return estimates.size(); }
};

/// Thrown when a replicate exhausts its retries and drop_exhausted is false.
class ReplicationFailure : public EstimatorFailure {
public:
    using EstimatorFailure::EstimatorFailure;
};

inline SeedSpec replicate_stream(std::uint64_t master_seed, std::size_t b, unsigned attempt) noexcept
{
    return SeedSpec{master_seed, static_cast<std::uint64_t>(b) + attempt * kRetryStride};
}

/// Index set used by replicate b on a given attempt.
IndexSet draw_replicate_indices(const ReplicationPlan& plan, std::size_t n, std::size_t b, unsigned attempt);

/// Records per replicate for this plan on a dataset of size n.
std::size_t replicate_size(const ReplicationPlan& plan, std::size_t n);

template <class Data, class Est>
    requires Resamplable<Data> && EstimatorFor<Est, Data>
ReplicationResult run_replications(const Data& data, const Est& estimator, const ReplicationPlan& plan)
{
    if (plan.replicates < 1) throw std::invalid_argument("replication plan needs B >= 1");
    const std::size_t n = record_count(data);
    const std::size_t m = replicate_size(plan, n);

    struct Slot {
        std::optional<double> estimate;
        unsigned retries = 0;
        std::string last_error;
    };
    std::vector<Slot> slots(plan.replicates);

    parallel_for(plan.replicates, plan.workers, [&](std::size_t b) {
        Slot& slot = slots[b];
        for (unsigned attempt = 0; attempt <= plan.max_retries; ++attempt) {
            const IndexSet rows = draw_replicate_indices(plan, n, b, attempt);
            try {
                const Data sub = take_rows(data, rows.indices);
                const double value = point_estimate(estimator, sub);
                if (!std::isfinite(value)) throw EstimatorFailure("non-finite replicate estimate");
                slot.estimate = value;
                slot.retries = attempt;
                return;
            } catch (const EstimatorFailure& e) {
                slot.last_error = e.what();
                slot.retries = attempt;
            }
        }
    });

    ReplicationResult result;
    result.n = n;
    result.m = m;
    for (std::size_t b = 0; b < slots.size(); ++b) {
        const Slot& slot = slots[b];
        result.total_retries += slot.retries;
        if (!slot.estimate) {
            if (!plan.drop_exhausted) {
                throw ReplicationFailure("replicate " + std::to_string(b) + " failed after " +
                                         std::to_string(plan.max_retries) + " retries: " + slot.last_error);
            }
            ++result.dropped;
            continue;
        }
        result.estimates.push_back(*slot.estimate);
        result.replicate_ids.push_back(b);
        result.retries.push_back(slot.retries);
    }
    if (result.estimates.empty()) throw ReplicationFailure("every replicate failed");
    return result;
}

}  // namespace cheapsub
