#pragma once

#include <stdexcept>
#include <string>

namespace cdmd {

/// Thrown when a caller violates an operation's preconditions
/// (bad dimensions, non-finite input, out-of-range arguments, ...).
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a computation fails numerically (iteration did not
/// converge, state left the physical regime, overflow, ...).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Formats a double with 17 significant digits, enough for a binary64
/// value to round-trip exactly through text.
std::string format_full(double v);

/// Strict double parse; throws InputError on trailing junk or empty input.
double parse_double(const std::string& text);

} // namespace cdmd
