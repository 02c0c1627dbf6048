#pragma once

#include <stdexcept>
#include <string>

namespace loadctrl {

// Failure categories used across the library. Argument-shape problems use
// std::invalid_argument directly.

// Invalid scenario/model configuration (bad curvature, bad schedule, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Balance constant outside the reachable consumption range.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An internal scalar search failed to terminate; indicates a bug or an
// invalid function object, never an expected outcome on valid input.
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The dual-ascent comparator was handed a disutility it cannot handle.
struct UnsupportedDisutility : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A stated operating assumption (equal duals, strong convexity) was violated.
struct AssumptionViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A runtime-checked convergence invariant failed; test signal, not a
// recoverable condition.
struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace loadctrl
