#pragma once

#include <stdexcept>
#include <string>

namespace fuzzmat {

/// Runtime failure in a library operation (I/O, degenerate input, bad data).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Caller asked for something the API cannot express (CLI maps this to exit 2).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fuzzmat
