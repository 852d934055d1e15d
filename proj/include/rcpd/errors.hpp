#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rcpd {

/// Malformed input file. Carries the byte offset where parsing failed.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& msg, std::size_t byte_offset)
        : std::runtime_error(msg + " (byte offset " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

/// File-system level failure (missing file, short write, ...).
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values appeared in solver state. Carries the iteration index.
class numerical_error : public std::runtime_error {
public:
    numerical_error(const std::string& msg, int iteration)
        : std::runtime_error(msg + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    int iteration() const { return iteration_; }

private:
    int iteration_;
};

} // namespace rcpd
