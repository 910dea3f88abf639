#pragma once

#include <stdexcept>
#include <string>

namespace dopkey {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// An iterative scheme failed to converge or produced an inconsistent result.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller combined otherwise valid arguments in an unsupported way.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Configuration could not be parsed or failed validation.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A file could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dopkey
