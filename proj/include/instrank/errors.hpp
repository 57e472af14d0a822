#pragma once

#include <stdexcept>
#include <string>

namespace instrank {

// Exit-code 2 family: bad bytes or failed I/O.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Exit-code 1 family: well-formed input that violates a contract.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ArgumentError : ValidationError {
    explicit ArgumentError(const std::string& msg) : ValidationError(msg) {}
};

struct ConfigError : ValidationError {
    explicit ConfigError(const std::string& msg) : ValidationError(msg) {}
};

}  // namespace instrank
