#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "magsq/series.hpp"
#include "magsq/spectrum.hpp"

namespace magsq {

/// n x n nonnegative-integer matrix with every row and column summing to r.
/// Entries are stored sparsely as (row, col) -> value with values in 1..r;
/// labels are 1-based.
struct MagicalSquare {
    int n = 0;
    int r = 0;
    std::map<std::pair<int, int>, int> entries;

    int at(int row, int col) const;
    static MagicalSquare from_dense(int r, const std::vector<std::vector<int>>& grid);
    std::vector<std::vector<int>> dense() const;

    /// Throws std::invalid_argument unless all line sums equal r and entries
    /// lie in 1..r.
    void validate() const;
};

/// Exact pmf with rational probabilities summing to 1.
struct PmfTable {
    std::vector<long> support;
    std::vector<mpq_class> probs;

    mpq_class prob_of(long value) const;  // 0 when off-support
    mpq_class mean() const;
};

inline constexpr std::size_t kDefaultStateCap = 1u << 20;
inline constexpr std::uint64_t kDefaultEnumCap = 1000000;

/// Exact H(n, r) by a column-by-column dynamic program. The state is the
/// multiset of residual row sums, stored as multiplicities (m_0, ..., m_r),
/// which shrinks the state space from (r+1)^n to C(n+r, r); transitions
/// distribute one column's total of r over the residual classes with
/// multinomial weights. Aborts with ResourceCapError if a layer ever holds
/// more than state_cap states.
mpz_class transfer_count_h(int n, int r, std::size_t state_cap = kDefaultStateCap);

/// Visits every element of M(n, r) exactly once, in lexicographic order of
/// the row-major entry list. Refuses (ResourceCapError) when H(n, r) > cap.
/// The visitor returns false to stop early; the return value is the number
/// of matrices visited.
std::uint64_t for_each_matrix(int n, int r, const std::function<bool(const MagicalSquare&)>& visit,
                              std::uint64_t cap = kDefaultEnumCap);

std::vector<MagicalSquare> enumerate_matrices(int n, int r, std::uint64_t cap = kDefaultEnumCap);

/// Component spectrum by union-find over the bipartite adjacency: chi_k is
/// the number of connected components covering k rows.
ComponentSpectrum spectrum_of(const MagicalSquare& square);

/// Histogram spectrum -> number of matrices, over all of M(n, r).
std::map<std::vector<int>, mpz_class> spectrum_histogram(int n, int r,
                                                         std::uint64_t cap = kDefaultEnumCap);

enum class Statistic {
    Smallest,    // S: size of the smallest component
    Largest,     // L: size of the largest component
    Components,  // C: number of components
    Chi,         // chi_k for the k passed alongside
};

/// Exact pmf of the statistic under the uniform law on M(n, r); rationals
/// with denominator H(n, r).
PmfTable exact_statistic_pmf(int n, int r, Statistic stat, int chi_index = 1,
                             std::uint64_t cap = kDefaultEnumCap);

}  // namespace magsq
