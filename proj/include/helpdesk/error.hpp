#pragma once

#include <stdexcept>
#include <string>

namespace helpdesk {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied argument or configuration value is out of contract.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Input data is malformed or violates a record invariant.
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace helpdesk
