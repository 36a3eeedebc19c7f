#pragma once

#include <stdexcept>
#include <string>

namespace illusion {

// Error taxonomy mapped to CLI exit codes: ConfigError -> 2,
// BackendError -> 3, NumericError -> 4, everything else -> 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class BackendError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace illusion
