#pragma once

#include <stdexcept>
#include <string>

namespace evotune {

// A file (benchmark, strategy, config) is malformed or violates an invariant.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Two components disagree on the domain they operate in (rule count, group
// count, or domain id).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace evotune
