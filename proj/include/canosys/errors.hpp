#pragma once

#include <stdexcept>
#include <string>

namespace canosys {

/// Malformed or invariant-violating input (bad file, non-PSD cell, ...).
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iteration failed to reach its tolerance.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A Mobius transform was evaluated at its pole.
struct pole_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The Picard map is not contracting on the requested interval.
struct non_contraction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace canosys
