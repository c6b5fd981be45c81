#include "magsq/permutation.hpp"

#include <numeric>
#include <stdexcept>
#include <utility>

namespace magsq {

Permutation::Permutation(int n) {
    if (n < 1) throw std::invalid_argument("Permutation: n must be >= 1");
    images_.resize(static_cast<std::size_t>(n));
    std::iota(images_.begin(), images_.end(), 1);
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
    const int n = static_cast<int>(images_.size());
    if (n < 1) throw std::invalid_argument("Permutation: n must be >= 1");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int v : images_) {
        if (v < 1 || v > n || seen[static_cast<std::size_t>(v) - 1])
            throw std::invalid_argument("Permutation: images are not a bijection of [n]");
        seen[static_cast<std::size_t>(v) - 1] = 1;
    }
}

Permutation Permutation::unchecked(std::vector<int> images) {
    return Permutation(std::move(images), unchecked_tag{});
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i)
        inv[static_cast<std::size_t>(images_[i]) - 1] = static_cast<int>(i) + 1;
    return unchecked(std::move(inv));
}

Permutation sample_uniform_permutation(int n, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("sample_uniform_permutation: n must be >= 1");
    std::vector<int> img(static_cast<std::size_t>(n));
    std::iota(img.begin(), img.end(), 1);
    for (int i = n - 1; i > 0; --i) {
        const auto j = rng.below(static_cast<std::uint64_t>(i) + 1);
        std::swap(img[static_cast<std::size_t>(i)], img[j]);
    }
    return Permutation::unchecked(std::move(img));
}

CycleType cycle_type(const Permutation& p) {
    const int n = p.size();
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int i = 1; i <= n; ++i) {
        if (seen[static_cast<std::size_t>(i) - 1]) continue;
        int len = 0;
        int j = i;
        do {
            seen[static_cast<std::size_t>(j) - 1] = 1;
            j = p.image(j);
            ++len;
        } while (j != i);
        ++counts[static_cast<std::size_t>(len) - 1];
    }
    CycleType t;
    t.n = n;
    t.counts = std::move(counts);
    return t;
}

Permutation compose_with_inverse(const Permutation& red, const Permutation& blue) {
    if (red.size() != blue.size())
        throw std::invalid_argument("compose_with_inverse: size mismatch");
    const int n = red.size();
    std::vector<int> binv(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) binv[static_cast<std::size_t>(blue.image(i)) - 1] = i;
    std::vector<int> img(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j)
        img[static_cast<std::size_t>(j) - 1] = red.image(binv[static_cast<std::size_t>(j) - 1]);
    return Permutation::unchecked(std::move(img));
}

}  // namespace magsq
