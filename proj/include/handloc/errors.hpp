#pragma once

#include <stdexcept>
#include <string>

namespace handloc {

// Error categories map 1:1 onto CLI exit codes (see tools/).
//   ValidationError -> 2   malformed or inconsistent input data
//   IoError         -> 3   filesystem / codec failures
//   ConfigError     -> 4   out-of-range parameters, bad option values

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace handloc
