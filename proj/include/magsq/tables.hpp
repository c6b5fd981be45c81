#pragma once

#include <optional>
#include <string>

#include "magsq/series.hpp"

namespace magsq {

/// Exact H(n, r) for n = 0..n_max. r = 0 and r = 1 are closed forms, r = 2
/// goes through the square-root generating function, r >= 3 through the
/// transfer dynamic program (subject to its state cap).
CountTable count_h_table(int r, int n_max);

/// Exact f(n, r) (irreducible counts) for n = 1..n_max. For r = 2 the closed
/// form n!(n-1)!/2 applies; otherwise f is recovered as the log transform of
/// the H series. The two routes are cross-checked in the test suite.
CountTable count_f_table(int r, int n_max);

/// Convenience lookup of a single exact H(n, r).
mpz_class count_h(int n, int r);

/// On-disk cache of exact count tables, so expensive tables are computed
/// once. Schema: {"tables": [{"kind": "H"|"f", "r": ..., "values": ...}]}.
class CountCache {
public:
    CountCache() = default;

    static CountCache load(const std::string& path);  // missing file -> empty cache
    void save(const std::string& path) const;

    /// Fetches a cached table covering 1..n_max (0..n_max for H), extending
    /// and recomputing as needed. Never trusts a partial table's holes.
    const CountTable& h_table(int r, int n_max);
    const CountTable& f_table(int r, int n_max);

    /// All cached entries re-derived from scratch; returns a description of
    /// the first mismatch, or nullopt when everything checks out.
    std::optional<std::string> verify_consistency() const;

private:
    std::map<int, CountTable> h_;
    std::map<int, CountTable> f_;
};

}  // namespace magsq
