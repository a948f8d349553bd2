#pragma once

#include <cstdint>

namespace cvq::rng {

// Recorded in simulation metadata; bump when the stream layout changes.
inline constexpr const char* kGeneratorId = "splitmix64-counter/v1";

std::uint64_t mix64(std::uint64_t z);

/// Counter-based SplitMix64 stream. The i-th draw of stream (seed, id) is a
/// pure function of (seed, id, i), so streams can be generated in any order
/// or on any thread.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    double uniform();         // in (0, 1)
    double normal();          // standard normal, Box-Muller
    std::uint64_t below(std::uint64_t n);  // uniform on [0, n)
    double uniform(double lo, double hi);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace cvq::rng
