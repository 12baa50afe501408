#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graspmaps {

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// (c, s) == (0, 0) carries no orientation.
struct UndefinedAngle : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};

// Fused quality map is identically zero.
struct NoGrasp : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Malformed map-stack container; field() names the offending header entry.
class FormatError : public std::runtime_error {
public:
    FormatError(std::string field, const std::string& what)
        : std::runtime_error("stack header field '" + field + "': " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace graspmaps
