#pragma once

#include <vector>

namespace magsq {

/// Count vector (a_1, ..., a_n) with sum i*a_i = n.
///
/// One struct serves two roles: the component spectrum of a magical square
/// (a_k = number of irreducible k-components) and the cycle type of a
/// permutation (a_k = number of k-cycles). The two coincide in law for
/// 2-regular colored graphs, which is what the sampler exploits.
struct ComponentSpectrum {
    int n = 0;
    std::vector<int> counts;  // counts[i-1] = number of components of size i

    ComponentSpectrum() = default;
    ComponentSpectrum(int n, std::vector<int> counts);

    int count(int i) const { return counts[static_cast<std::size_t>(i) - 1]; }

    int total() const;       // C: number of components
    int nontrivial() const;  // C - a_1: components of size >= 2
    int smallest() const;    // S: smallest component size, requires n >= 1
    int largest() const;     // L: largest component size, requires n >= 1

    /// Throws std::invalid_argument unless sum i*a_i == n with a_i >= 0.
    void validate() const;

    bool operator==(const ComponentSpectrum&) const = default;
};

/// Cycle type of a permutation; same invariants, same accessors.
using CycleType = ComponentSpectrum;

}  // namespace magsq
