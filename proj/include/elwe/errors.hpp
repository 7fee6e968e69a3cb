#pragma once
// Error taxonomy shared by the library and the CLI exit-code mapping.

#include <stdexcept>
#include <string>

namespace elwe {

// Invalid configuration: malformed seeds, out-of-range parameters, bad files
// of our own formats. CLI maps these to exit 1 (domain failure).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violated operation precondition or a failed runtime check (exhausted
// generation budget, failed security check, rejected morphism).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem / socket trouble.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace elwe
