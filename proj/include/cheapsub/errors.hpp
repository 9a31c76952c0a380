#pragma once

#include <stdexcept>
#include <string>

namespace cheapsub {

/// Input data violates its schema or a documented invariant.
class DataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An estimator could not produce an estimate for the given data
/// (non-convergence, separation, singular design). Replication retries on it.
class EstimatorFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested operation needs a capability the estimator lacks.
class Unsupported : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace cheapsub
