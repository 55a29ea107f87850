#pragma once

#include <stdexcept>
#include <string>

namespace nhnse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad grid, bad key in a config, mismatched shapes.
class InputError : public Error {
public:
    using Error::Error;
};

/// A configuration document failed schema validation. `key` names the
/// offending entry as a dotted path (e.g. "datum.amplitude").
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error("config error at '" + key + "': " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// A numerical health guard tripped (mass drift, edge radiation, |r| >= 1,
/// quadrature failure, determinant drift).
class NumericalGuardError : public Error {
public:
    using Error::Error;
};

/// Requested (x, t) lies outside the region where the long-time formula
/// applies, or outside what a computed evolution covers.
class ValidityError : public Error {
public:
    using Error::Error;
};

}  // namespace nhnse
