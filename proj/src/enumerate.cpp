#include "magsq/enumerate.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "magsq/errors.hpp"

namespace magsq {

int MagicalSquare::at(int row, int col) const {
    auto it = entries.find({row, col});
    return it == entries.end() ? 0 : it->second;
}

MagicalSquare MagicalSquare::from_dense(int r, const std::vector<std::vector<int>>& grid) {
    MagicalSquare sq;
    sq.n = static_cast<int>(grid.size());
    sq.r = r;
    for (int i = 0; i < sq.n; ++i) {
        if (static_cast<int>(grid[static_cast<std::size_t>(i)].size()) != sq.n)
            throw std::invalid_argument("MagicalSquare: grid is not square");
        for (int j = 0; j < sq.n; ++j) {
            int v = grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (v != 0) sq.entries[{i + 1, j + 1}] = v;
        }
    }
    sq.validate();
    return sq;
}

std::vector<std::vector<int>> MagicalSquare::dense() const {
    std::vector<std::vector<int>> grid(static_cast<std::size_t>(n),
                                       std::vector<int>(static_cast<std::size_t>(n), 0));
    for (const auto& [pos, v] : entries)
        grid[static_cast<std::size_t>(pos.first) - 1][static_cast<std::size_t>(pos.second) - 1] = v;
    return grid;
}

void MagicalSquare::validate() const {
    std::vector<long> row_sum(static_cast<std::size_t>(n), 0), col_sum(static_cast<std::size_t>(n), 0);
    for (const auto& [pos, v] : entries) {
        auto [i, j] = pos;
        if (i < 1 || i > n || j < 1 || j > n)
            throw std::invalid_argument("MagicalSquare: entry out of range");
        if (v < 1 || v > r) throw std::invalid_argument("MagicalSquare: entry value outside 1..r");
        row_sum[static_cast<std::size_t>(i) - 1] += v;
        col_sum[static_cast<std::size_t>(j) - 1] += v;
    }
    for (int i = 0; i < n; ++i)
        if (row_sum[static_cast<std::size_t>(i)] != r || col_sum[static_cast<std::size_t>(i)] != r)
            throw std::invalid_argument("MagicalSquare: line sums differ from r");
}

mpq_class PmfTable::prob_of(long value) const {
    for (std::size_t i = 0; i < support.size(); ++i)
        if (support[i] == value) return probs[i];
    return mpq_class(0);
}

mpq_class PmfTable::mean() const {
    mpq_class m(0);
    for (std::size_t i = 0; i < support.size(); ++i) m += mpq_class(support[i]) * probs[i];
    m.canonicalize();
    return m;
}

namespace {

// Enumerates the ways one column (total r) can be spread over the residual
// classes of `state`: rows currently in class d may each receive 0..d units.
// Calls emit(next_state, multiplicity) once per distribution, where the
// multiplicity counts the row choices within each class (multinomials).
void column_transitions(const std::vector<int>& state, int r,
                        const std::function<void(const std::vector<int>&, const mpz_class&)>& emit) {
    const int top = static_cast<int>(state.size()) - 1;
    std::vector<int> next(state.size(), 0);
    next[0] = state[0];  // exhausted rows stay exhausted

    // walk classes top..1; within a class, decide how many rows receive each
    // amount e = d..0 (largest first so the recursion budget only shrinks)
    std::function<void(int, int, int, int, const mpz_class&)> step =
        [&](int d, int e, int rows_left, int budget, const mpz_class& mult) {
            if (d == 0) {
                if (budget == 0) emit(next, mult);
                return;
            }
            if (e == 0) {
                next[d] += rows_left;  // remaining rows of class d take nothing
                step(d - 1, d - 1, state[static_cast<std::size_t>(d) - 1], budget, mult);
                next[d] -= rows_left;
                return;
            }
            for (int k = 0; k * e <= budget && k <= rows_left; ++k) {
                mpz_class binom;
                mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(rows_left),
                             static_cast<unsigned long>(k));
                next[static_cast<std::size_t>(d - e)] += k;
                step(d, e - 1, rows_left - k, budget - k * e, mult * binom);
                next[static_cast<std::size_t>(d - e)] -= k;
            }
        };
    step(top, top, state[static_cast<std::size_t>(top)], r, mpz_class(1));
}

}  // namespace

mpz_class transfer_count_h(int n, int r, std::size_t state_cap) {
    if (n < 0 || r < 0) throw std::invalid_argument("transfer_count_h: negative argument");
    if (n == 0 || r == 0) return 1;

    std::vector<int> start(static_cast<std::size_t>(r) + 1, 0);
    start[static_cast<std::size_t>(r)] = n;
    std::map<std::vector<int>, mpz_class> layer;
    layer[start] = 1;

    for (int col = 0; col < n; ++col) {
        std::map<std::vector<int>, mpz_class> next_layer;
        for (const auto& [state, ways] : layer) {
            column_transitions(state, r, [&](const std::vector<int>& next, const mpz_class& mult) {
                next_layer[next] += ways * mult;
            });
        }
        if (next_layer.size() > state_cap)
            throw ResourceCapError("transfer_count_h: state count " + std::to_string(next_layer.size()) +
                                   " exceeds cap " + std::to_string(state_cap));
        layer = std::move(next_layer);
    }

    std::vector<int> done(static_cast<std::size_t>(r) + 1, 0);
    done[0] = n;
    auto it = layer.find(done);
    return it == layer.end() ? mpz_class(0) : it->second;
}

namespace {

struct MatrixEnumerator {
    int n, r;
    std::vector<std::vector<int>> grid;
    std::vector<int> col_left;
    const std::function<bool(const MagicalSquare&)>* visit;
    std::uint64_t visited = 0;
    bool stopped = false;

    bool emit() {
        ++visited;
        if (!(*visit)(MagicalSquare::from_dense(r, grid))) {
            stopped = true;
            return false;
        }
        return true;
    }

    // fills entry (i, j) onward; row i has row_left units still to place
    void fill(int i, int j, int row_left) {
        if (stopped) return;
        if (j == n) {
            if (row_left != 0) return;
            if (i + 1 == n) {
                emit();
                return;
            }
            fill(i + 1, 0, r);
            return;
        }
        if (i == n - 1) {
            // last row: every entry is forced by the column residual
            int v = col_left[static_cast<std::size_t>(j)];
            if (v > row_left || v > r) return;
            grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            col_left[static_cast<std::size_t>(j)] = 0;
            fill(i, j + 1, row_left - v);
            col_left[static_cast<std::size_t>(j)] = v;
            grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 0;
            return;
        }
        const int hi = std::min(row_left, col_left[static_cast<std::size_t>(j)]);
        for (int v = 0; v <= hi && !stopped; ++v) {
            grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            col_left[static_cast<std::size_t>(j)] -= v;
            fill(i, j + 1, row_left - v);
            col_left[static_cast<std::size_t>(j)] += v;
        }
        grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 0;
    }
};

}  // namespace

std::uint64_t for_each_matrix(int n, int r, const std::function<bool(const MagicalSquare&)>& visit,
                              std::uint64_t cap) {
    if (n < 0 || r < 0) throw std::invalid_argument("for_each_matrix: negative argument");
    mpz_class total = transfer_count_h(n, r);
    if (total > cap)
        throw ResourceCapError("for_each_matrix: H(" + std::to_string(n) + "," + std::to_string(r) +
                               ") = " + total.get_str() + " exceeds cap " + std::to_string(cap));
    if (n == 0 || r == 0) {
        MagicalSquare empty;
        empty.n = n;
        empty.r = r;
        visit(empty);
        return 1;
    }
    MatrixEnumerator e;
    e.n = n;
    e.r = r;
    e.grid.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
    e.col_left.assign(static_cast<std::size_t>(n), r);
    e.visit = &visit;
    e.fill(0, 0, r);
    return e.visited;
}

std::vector<MagicalSquare> enumerate_matrices(int n, int r, std::uint64_t cap) {
    std::vector<MagicalSquare> out;
    for_each_matrix(n, r, [&](const MagicalSquare& sq) {
        out.push_back(sq);
        return true;
    }, cap);
    return out;
}

namespace {

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
            x = parent_[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
        size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
    }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
};

}  // namespace

ComponentSpectrum spectrum_of(const MagicalSquare& square) {
    const int n = square.n;
    // rows are 0..n-1, columns n..2n-1
    UnionFind uf(2 * n);
    for (const auto& [pos, v] : square.entries) {
        (void)v;
        uf.unite(pos.first - 1, n + pos.second - 1);
    }
    std::vector<int> rows_in(static_cast<std::size_t>(2 * n), 0);
    for (int i = 0; i < n; ++i) ++rows_in[static_cast<std::size_t>(uf.find(i))];
    ComponentSpectrum spec;
    spec.n = n;
    spec.counts.assign(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < 2 * n; ++v) {
        if (uf.find(v) != v) continue;
        int k = rows_in[static_cast<std::size_t>(v)];
        if (k > 0) ++spec.counts[static_cast<std::size_t>(k) - 1];
    }
    spec.validate();
    return spec;
}

std::map<std::vector<int>, mpz_class> spectrum_histogram(int n, int r, std::uint64_t cap) {
    std::map<std::vector<int>, mpz_class> hist;
    for_each_matrix(n, r, [&](const MagicalSquare& sq) {
        hist[spectrum_of(sq).counts] += 1;
        return true;
    }, cap);
    return hist;
}

PmfTable exact_statistic_pmf(int n, int r, Statistic stat, int chi_index, std::uint64_t cap) {
    if (n < 1) throw std::invalid_argument("exact_statistic_pmf: n must be >= 1");
    std::map<long, mpz_class> tally;
    mpz_class total = 0;
    for (const auto& [counts, count] : spectrum_histogram(n, r, cap)) {
        ComponentSpectrum spec;
        spec.n = n;
        spec.counts = counts;
        long value = 0;
        switch (stat) {
            case Statistic::Smallest: value = spec.smallest(); break;
            case Statistic::Largest: value = spec.largest(); break;
            case Statistic::Components: value = spec.total(); break;
            case Statistic::Chi:
                if (chi_index < 1 || chi_index > n)
                    throw std::invalid_argument("exact_statistic_pmf: chi index out of range");
                value = spec.count(chi_index);
                break;
        }
        tally[value] += count;
        total += count;
    }
    PmfTable pmf;
    mpq_class check(0);
    for (const auto& [value, count] : tally) {
        pmf.support.push_back(value);
        mpq_class p(count, total);
        p.canonicalize();
        check += p;
        pmf.probs.push_back(std::move(p));
    }
    if (check != 1) throw std::logic_error("exact_statistic_pmf: probabilities do not sum to 1");
    return pmf;
}

}  // namespace magsq
