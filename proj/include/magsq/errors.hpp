#pragma once

#include <stdexcept>
#include <string>

namespace magsq {

// Hard stop when a configured resource cap (enumeration size, DP state count,
// rejection trials) would be exceeded. Never degrades into silent truncation.
struct ResourceCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a quadrature cannot certify the requested tolerance.
struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_bound(achieved) {}
    double achieved_bound;
};

}  // namespace magsq
