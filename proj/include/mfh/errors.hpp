#pragma once

#include <stdexcept>
#include <string>

namespace mfh {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file. Carries a 1-based line number when known.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t line = 0)
        : Error(line ? msg + " (line " + std::to_string(line) + ")" : msg), line_number(line) {}
    std::size_t line_number;
};

// Well-formed input that violates a documented contract.
struct ValidationError : Error {
    using Error::Error;
};

// Replay provider asked for a digest that is not in the cache.
struct CacheMissError : Error {
    explicit CacheMissError(const std::string& digest)
        : Error("completion cache miss for request digest " + digest), digest(digest) {}
    std::string digest;
};

// HTTP transport failure that survived the retry policy.
struct TransportError : Error {
    explicit TransportError(const std::string& msg, bool retriable = true)
        : Error(msg), retriable(retriable) {}
    bool retriable;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace mfh
