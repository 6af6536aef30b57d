#pragma once

#include <stdexcept>
#include <string>

namespace layered {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration or precondition on user-supplied parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Runtime failure of a simulation (CFL violation, non-finite state).
class RunError : public Error {
public:
    using Error::Error;
};

// Malformed or incompatible file on disk.
class FormatError : public Error {
public:
    using Error::Error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ConfigError(what);
}

}  // namespace layered
