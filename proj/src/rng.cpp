#include "magsq/rng.hpp"

namespace magsq {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
    std::uint64_t state = seed ^ (0xda3e39cb94b95bdbULL * (stream + 1));
    std::seed_seq seq{
        static_cast<std::uint32_t>(splitmix64(state)),
        static_cast<std::uint32_t>(splitmix64(state) >> 32),
        static_cast<std::uint32_t>(splitmix64(state)),
        static_cast<std::uint32_t>(splitmix64(state) >> 32),
        static_cast<std::uint32_t>(splitmix64(state)),
        static_cast<std::uint32_t>(splitmix64(state) >> 32),
        static_cast<std::uint32_t>(splitmix64(state)),
        static_cast<std::uint32_t>(splitmix64(state) >> 32),
    };
    engine_.seed(seq);
}

std::uint64_t RngStream::below(std::uint64_t bound) {
    // reject the short top segment so every residue class is equally likely
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) {
    std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (label + 0x51ed2701));
    return splitmix64(state);
}

}  // namespace magsq
