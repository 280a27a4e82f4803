#pragma once

#include <stdexcept>
#include <string>

namespace emk {

// Bad construction parameters (kernel size, exponent, percentile range, ...).
struct invalid_spec_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input data violates a precondition (rank mismatch, mask touching the
// border, orientation missing on a stroke pixel, ...).
struct invalid_input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or unsupported file content.
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem-level failure (open/read/write).
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The brute-force oracle refuses problems above its size budget.
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace emk
