#pragma once

#include <stdexcept>
#include <string>

namespace mspde {

/// Scalar root-find for a resolvent exceeded its iteration cap.
/// Signals a defective graph definition, not a tolerance problem.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two grid functions living on different meshes were combined.
struct MeshMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Noise increment vector does not match the mode count.
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Implicit step failed to converge even after damping; the caller may
/// retry with substeps before giving up.
struct NewtonDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive truncation level exceeded its cap. Under linear-growth noise
/// this indicates violated hypotheses, so it is surfaced, never clipped.
struct TruncationCapReached : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad or missing configuration key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mspde
