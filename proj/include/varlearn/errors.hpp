#pragma once

#include <stdexcept>
#include <string>

namespace varlearn {

// Bad arguments or malformed data handed to an operation.
struct invalid_input : std::invalid_argument {
    explicit invalid_input(const std::string& msg) : std::invalid_argument(msg) {}
};

// Text or file content that could not be parsed.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Sample admits no meaningful scaling (e.g. all points coincide).
struct degenerate_sample : std::runtime_error {
    explicit degenerate_sample(const std::string& msg) : std::runtime_error(msg) {}
};

// A resource bound (simplex budget, integer range) would be exceeded.
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace varlearn
