#include "magsq/spectrum.hpp"

#include <stdexcept>

namespace magsq {

ComponentSpectrum::ComponentSpectrum(int n_, std::vector<int> counts_)
    : n(n_), counts(std::move(counts_)) {
    validate();
}

int ComponentSpectrum::total() const {
    int c = 0;
    for (int a : counts) c += a;
    return c;
}

int ComponentSpectrum::nontrivial() const {
    return total() - (counts.empty() ? 0 : counts[0]);
}

int ComponentSpectrum::smallest() const {
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] > 0) return static_cast<int>(i) + 1;
    throw std::logic_error("smallest(): empty spectrum");
}

int ComponentSpectrum::largest() const {
    for (std::size_t i = counts.size(); i-- > 0;)
        if (counts[i] > 0) return static_cast<int>(i) + 1;
    throw std::logic_error("largest(): empty spectrum");
}

void ComponentSpectrum::validate() const {
    if (n < 0) throw std::invalid_argument("spectrum: n must be nonnegative");
    if (counts.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("spectrum: counts must have length n");
    long long mass = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0) throw std::invalid_argument("spectrum: negative count");
        mass += static_cast<long long>(i + 1) * counts[i];
    }
    if (mass != n) throw std::invalid_argument("spectrum: sum i*a_i != n");
}

}  // namespace magsq
