#pragma once

#include <cstdint>
#include <random>

namespace magsq {

std::uint64_t splitmix64(std::uint64_t& state);

/// Seedable 64-bit random stream. Streams built from the same seed but
/// different stream ids are independent for all practical purposes: the
/// (seed, stream) pair is expanded through SplitMix64 before it reaches the
/// engine. Every sampling routine takes a stream explicitly, which keeps
/// runs reproducible and shardable.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64() { return engine_(); }

    /// Unbiased integer in [0, bound); bound >= 1.
    std::uint64_t below(std::uint64_t bound);

    /// Double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

/// Stable 64-bit seed derived from a base seed and a label, used to give
/// independent sub-experiments their own stream families.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label);

}  // namespace magsq
