#pragma once

#include <stdexcept>
#include <string>

namespace c2p {

// Base class for all errors raised by the library. The CLI maps the
// concrete type to its exit code: ConfigError -> 1, FormatError -> 2,
// NumericError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration, flags, shapes, or degenerate inputs.
class ConfigError : public Error {
public:
    using Error::Error;
};

// File I/O and binary format violations. Carries the byte offset at
// which decoding failed when known.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(what) {}
    FormatError(const std::string& what, std::size_t byte_offset)
        : Error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset), has_offset_(true) {}

    bool has_offset() const { return has_offset_; }
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_ = 0;
    bool has_offset_ = false;
};

// Non-finite values where finite ones are required (NaN loss, inf input).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace c2p
