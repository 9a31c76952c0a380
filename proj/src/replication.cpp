#include "cheapsub/replication.hpp"

#include <cmath>
#include <string>

namespace cheapsub {

SubsampleRule SubsampleRule::fraction(double eta)
{
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("subsample proportion eta must lie in (0, 1)");
    SubsampleRule rule;
    rule.eta_ = eta;
    return rule;
}

SubsampleRule SubsampleRule::fixed(std::size_t m)
{
    SubsampleRule rule;
    rule.m_ = m;
    return rule;
}

std::size_t SubsampleRule::resolve(std::size_t n) const
{
    const std::size_t m =
        eta_ ? static_cast<std::size_t>(std::floor(*eta_ * static_cast<double>(n))) : m_;
    if (m == 0 || m >= n) {
        throw std::invalid_argument("subsample size must satisfy 1 <= m < n (got m=" + std::to_string(m) +
                                    ", n=" + std::to_string(n) + ")");
    }
    return m;
}

std::size_t replicate_size(const ReplicationPlan& plan, std::size_t n)
{
    if (plan.scheme == ResampleScheme::bootstrap) {
        if (n == 0) throw std::invalid_argument("cannot resample an empty dataset");
        return n;
    }
    return plan.size.resolve(n);
}

IndexSet draw_replicate_indices(const ReplicationPlan& plan, std::size_t n, std::size_t b, unsigned attempt)
{
    const SeedSpec seed = replicate_stream(plan.master_seed, b, attempt);
    if (plan.scheme == ResampleScheme::bootstrap) return resample_with_replacement(n, n, seed);
    return subsample(n, plan.size.resolve(n), seed);
}

}  // namespace cheapsub
