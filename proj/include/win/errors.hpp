#pragma once

#include <stdexcept>
#include <string>

namespace win {

// File could not be read/written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File content does not match its declared format.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration (JSON config, flag values).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite loss or gradients during training.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Checkpoint failure modes, kept distinct so callers can tell them apart.
struct CheckpointCorruptError : FormatError {
    using FormatError::FormatError;
};
struct CheckpointVersionError : FormatError {
    using FormatError::FormatError;
};
struct CheckpointTruncatedError : FormatError {
    using FormatError::FormatError;
};

}  // namespace win
