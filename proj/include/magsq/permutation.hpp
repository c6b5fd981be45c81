#pragma once

#include <vector>

#include "magsq/rng.hpp"
#include "magsq/spectrum.hpp"

namespace magsq {

/// Permutation of [n] = {1, ..., n} with 1-based labels.
class Permutation {
public:
    /// Identity on [n], n >= 1.
    explicit Permutation(int n);

    /// From an image list: images[i-1] = pi(i). Validates that the list is a
    /// bijection of [n].
    explicit Permutation(std::vector<int> images);

    int size() const { return static_cast<int>(images_.size()); }
    int image(int i) const { return images_[static_cast<std::size_t>(i) - 1]; }
    const std::vector<int>& images() const { return images_; }

    Permutation inverse() const;

    bool operator==(const Permutation&) const = default;

    /// Unchecked constructor for callers that guarantee a bijection.
    static Permutation unchecked(std::vector<int> images);

private:
    struct unchecked_tag {};
    Permutation(std::vector<int> images, unchecked_tag) : images_(std::move(images)) {}
    std::vector<int> images_;
};

/// Uniform draw from the n! permutations of [n] by an unbiased
/// Fisher-Yates shuffle; O(n), deterministic given the stream.
Permutation sample_uniform_permutation(int n, RngStream& rng);

/// Cycle type: counts[i-1] = number of i-cycles; sum i*counts[i-1] = n.
CycleType cycle_type(const Permutation& p);

/// sigma = red o blue^{-1}, i.e. sigma(j) = red(blue^{-1}(j)). The cycles of
/// sigma carry the component structure of the colored graph (blue, red).
Permutation compose_with_inverse(const Permutation& red, const Permutation& blue);

}  // namespace magsq
