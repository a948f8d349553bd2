#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cvq {

// Matrix/vector shapes disagree with the declared number of modes.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A state or channel violates a physicality constraint (Heisenberg bound,
// complete positivity, ...).
struct PhysicalityError : std::domain_error {
    using std::domain_error::domain_error;
};

// The truncated Fock representation carries more weight near the cutoff than
// the configured budget allows.
struct TruncationError : std::runtime_error {
    TruncationError(const std::string& what, int cutoff_, int suggested_, double tail_)
        : std::runtime_error(what), cutoff(cutoff_), suggested_cutoff(suggested_), tail_mass(tail_) {}
    int cutoff;
    int suggested_cutoff;
    double tail_mass;
};

// Phase-space grid does not resolve the POVM completeness to the required level.
struct GridError : std::runtime_error {
    GridError(const std::string& what, double defect_)
        : std::runtime_error(what), defect(defect_) {}
    double defect;
};

// Malformed state-spec text; `position` is the 0-based character offset.
struct SpecError : std::invalid_argument {
    SpecError(const std::string& message_, std::size_t position_)
        : std::invalid_argument("at position " + std::to_string(position_) + ": " + message_),
          message(message_), position(position_) {}
    std::string message;
    std::size_t position;
};

} // namespace cvq
