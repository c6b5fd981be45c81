#include "magsq/statistics.hpp"

#include <cmath>
#include <stdexcept>

namespace magsq {

namespace {

int parse_suffix_int(const std::string& text, const std::string& prefix) {
    const std::string digits = text.substr(prefix.size());
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("statistic: bad index in '" + text + "'");
    return std::stoi(digits);
}

}  // namespace

StatisticSpec StatisticSpec::parse(const std::string& text) {
    StatisticSpec spec;
    std::string base = text;
    const auto eq = text.find('=');
    if (eq != std::string::npos) {
        base = text.substr(0, eq);
        const std::string value = text.substr(eq + 1);
        if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("statistic: bad indicator value in '" + text + "'");
        spec.indicator = std::stol(value);
    }

    if (base.rfind("chi_", 0) == 0) {
        spec.kind = Kind::Chi;
        spec.index = parse_suffix_int(base, "chi_");
        if (spec.index < 1) throw std::invalid_argument("statistic: chi index must be >= 1");
    } else if (base == "smallest") {
        spec.kind = Kind::Smallest;
    } else if (base == "largest") {
        spec.kind = Kind::Largest;
    } else if (base == "components") {
        spec.kind = Kind::Components;
    } else if (base.rfind("largest_frac_moment_", 0) == 0) {
        spec.kind = Kind::LargestFracMoment;
        spec.index = parse_suffix_int(base, "largest_frac_moment_");
        if (spec.index < 1) throw std::invalid_argument("statistic: moment order must be >= 1");
        if (spec.indicator)
            throw std::invalid_argument("statistic: no indicator form for fractional moments");
    } else {
        throw std::invalid_argument("statistic: unknown name '" + text + "'");
    }
    spec.name = text;
    return spec;
}

SpectrumStatistic StatisticSpec::evaluator(int n) const {
    const StatisticSpec s = *this;
    switch (s.kind) {
        case Kind::Chi:
            return [s, n](const SpectrumView& v) {
                const long value = s.index <= n ? v.spectrum.count(s.index) : 0;
                return s.indicator ? static_cast<double>(value == *s.indicator)
                                   : static_cast<double>(value);
            };
        case Kind::Smallest:
            return [s](const SpectrumView& v) {
                return s.indicator ? static_cast<double>(v.min_size == *s.indicator)
                                   : static_cast<double>(v.min_size);
            };
        case Kind::Largest:
            return [s](const SpectrumView& v) {
                return s.indicator ? static_cast<double>(v.max_size == *s.indicator)
                                   : static_cast<double>(v.max_size);
            };
        case Kind::Components:
            return [s](const SpectrumView& v) {
                return s.indicator ? static_cast<double>(v.cycles == *s.indicator)
                                   : static_cast<double>(v.cycles);
            };
        case Kind::LargestFracMoment:
            return [s, n](const SpectrumView& v) {
                return std::pow(static_cast<double>(v.max_size) / n, s.index);
            };
    }
    throw std::logic_error("statistic: unreachable");
}

mpq_class StatisticSpec::exact_value(const ComponentSpectrum& spectrum) const {
    long value = 0;
    switch (kind) {
        case Kind::Chi: value = index <= spectrum.n ? spectrum.count(index) : 0; break;
        case Kind::Smallest: value = spectrum.smallest(); break;
        case Kind::Largest: value = spectrum.largest(); break;
        case Kind::Components: value = spectrum.total(); break;
        case Kind::LargestFracMoment: {
            mpq_class frac(spectrum.largest(), spectrum.n);
            frac.canonicalize();
            mpq_class out(1);
            for (int t = 0; t < index; ++t) out *= frac;
            return out;
        }
    }
    if (indicator) return mpq_class(value == *indicator ? 1 : 0);
    return mpq_class(value);
}

}  // namespace magsq
