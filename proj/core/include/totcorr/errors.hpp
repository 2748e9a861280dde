#pragma once

#include <stdexcept>
#include <string>

namespace totcorr {

/// Invalid argument: bad index set, shape mismatch, out-of-range parameter.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but outside the function's mathematical domain
/// (e.g. support violation in a relative entropy).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A configured size cap was exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace totcorr
