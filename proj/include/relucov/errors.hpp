#pragma once

#include <stdexcept>
#include <string>

namespace relucov {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad external data: malformed files, shape/dimension mismatches, non-finite
// entries, out-of-range node references.
class InputError : public Error {
public:
    using Error::Error;
};

// Bad parameters or run configuration: out-of-range criteria parameters,
// incompatible engine/value-function combinations, empty pair sets.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace relucov
