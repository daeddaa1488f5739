#pragma once

#include <stdexcept>
#include <string>

namespace genrl {

/// Input could not be read or does not have the expected structure
/// (bad JSON, missing fields, shape mismatches).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input parsed fine but violates a domain invariant (row sums, gamma
/// range, ...). The message carries the full violation list.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A dense linear solve produced a non-finite or inconsistent result.
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// State-action pair count exceeds the dense-operator guard.
struct SizeExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A utility spec is missing the field its kind requires.
struct MissingField : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A learner update produced a non-finite parameter; carries the step index.
struct NonFiniteUpdate : std::runtime_error {
    NonFiniteUpdate(const std::string& what, long step)
        : std::runtime_error(what), step(step) {}
    long step;
};

/// An environment spec has out-of-range size parameters.
struct InvalidSpec : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace genrl
