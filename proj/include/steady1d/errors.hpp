#pragma once

#include <stdexcept>
#include <string>

namespace steady1d {

struct PreconditionViolated : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BadWeightSpec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZeroState : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct StateTouchesZero : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BadSubinterval : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct HypothesisViolated : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MaxIterExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularJacobian : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfNeighborhood : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StallDetected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoCandidate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientPoints : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NegativeState : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace steady1d
