#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

#include "magsq/enumerate.hpp"
#include "magsq/sampler.hpp"

namespace magsq {

/// Named spectrum statistics accepted on the command line and in bindings:
///   chi_k                  -> component count of size k
///   smallest, largest      -> S, L
///   components             -> C
///   largest_frac_moment_m  -> (L/n)^m
/// plus indicator variants "name=v" for the integer-valued ones, e.g.
/// "smallest=1" for P(S = 1).
struct StatisticSpec {
    enum class Kind { Chi, Smallest, Largest, Components, LargestFracMoment };
    Kind kind = Kind::Components;
    int index = 1;                   // k for chi_k, m for largest_frac_moment_m
    std::optional<long> indicator;   // set for "name=v"
    std::string name;                // canonical spelling

    /// Throws std::invalid_argument on unknown names.
    static StatisticSpec parse(const std::string& text);

    /// Statistic evaluated on a sampled spectrum view.
    SpectrumStatistic evaluator(int n) const;

    /// Exact value on a single spectrum, for enumeration averages.
    mpq_class exact_value(const ComponentSpectrum& spectrum) const;
};

}  // namespace magsq
