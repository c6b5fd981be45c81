#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "magsq/enumerate.hpp"
#include "magsq/errors.hpp"
#include "magsq/series.hpp"
#include "magsq/tables.hpp"

using namespace magsq;

TEST_CASE("transfer counts: baselines and pinned values") {
    for (int n = 0; n <= 8; ++n) {
        CHECK(transfer_count_h(n, 0) == 1);
        CHECK(transfer_count_h(n, 1) == factorial(n));
    }
    CHECK(transfer_count_h(2, 2) == 3);
    CHECK(transfer_count_h(3, 2) == 21);
    CHECK(transfer_count_h(2, 3) == 4);
    CHECK(transfer_count_h(3, 3) == 55);
}

TEST_CASE("transfer count equals full enumeration for n <= 4, r <= 3") {
    for (int n = 0; n <= 4; ++n) {
        for (int r = 0; r <= 3; ++r) {
            std::uint64_t seen = 0;
            for_each_matrix(n, r, [&](const MagicalSquare&) {
                ++seen;
                return true;
            });
            CHECK(transfer_count_h(n, r) == mpz_class(seen));
        }
    }
}

TEST_CASE("enumeration order and small cases") {
    auto m12 = enumerate_matrices(1, 2);
    REQUIRE(m12.size() == 1);
    CHECK(m12[0].at(1, 1) == 2);

    auto m23 = enumerate_matrices(2, 3);
    REQUIRE(m23.size() == 4);
    for (const auto& sq : m23) {
        const int a = sq.at(1, 1);
        CHECK(sq.at(1, 2) == 3 - a);
        CHECK(sq.at(2, 1) == 3 - a);
        CHECK(sq.at(2, 2) == a);
    }

    // row-major lexicographic order on M(2,2)
    auto m22 = enumerate_matrices(2, 2);
    REQUIRE(m22.size() == 3);
    CHECK(m22[0].dense() == std::vector<std::vector<int>>{{0, 2}, {2, 0}});
    CHECK(m22[1].dense() == std::vector<std::vector<int>>{{1, 1}, {1, 1}});
    CHECK(m22[2].dense() == std::vector<std::vector<int>>{{2, 0}, {0, 2}});

    CHECK(enumerate_matrices(3, 2).size() == 21);
}

TEST_CASE("spectrum_of") {
    MagicalSquare diag;
    diag.n = 4;
    diag.r = 3;
    for (int i = 1; i <= 4; ++i) diag.entries[{i, i}] = 3;
    diag.validate();
    CHECK(spectrum_of(diag).counts == std::vector<int>{4, 0, 0, 0});

    CHECK(spectrum_of(MagicalSquare::from_dense(2, {{1, 1}, {1, 1}})).counts ==
          std::vector<int>{0, 1});
    CHECK(spectrum_of(MagicalSquare::from_dense(2, {{0, 2}, {2, 0}})).counts ==
          std::vector<int>{2, 0});
}

TEST_CASE("spectrum histogram of M(3,2) matches the component-count formula") {
    auto hist = spectrum_histogram(3, 2);
    REQUIRE(hist.size() == 3);
    CHECK(hist.at({3, 0, 0}) == 6);
    CHECK(hist.at({1, 1, 0}) == 9);
    CHECK(hist.at({0, 0, 1}) == 6);

    CountTable f = count_f_table(2, 3);
    mpz_class total = 0;
    for (const auto& [counts, cnt] : hist) {
        CHECK(spectrum_count(2, ComponentSpectrum(3, counts), f) == cnt);
        total += cnt;
    }
    CHECK(total == 21);
}

TEST_CASE("exact statistic pmfs") {
    PmfTable c22 = exact_statistic_pmf(2, 2, Statistic::Components);
    CHECK(c22.prob_of(1) == mpq_class(1, 3));
    CHECK(c22.prob_of(2) == mpq_class(2, 3));

    PmfTable chi1 = exact_statistic_pmf(3, 2, Statistic::Chi, 1);
    CHECK(chi1.mean() == mpq_class(9, 7));

    PmfTable s15 = exact_statistic_pmf(1, 5, Statistic::Smallest);
    CHECK(s15.prob_of(1) == 1);
}

TEST_CASE("irreducible counts recovered from enumeration for n <= 5, r <= 3") {
    for (int r = 1; r <= 3; ++r) {
        CountTable f = count_f_table(r, 5);
        for (int n = 1; n <= 5; ++n) {
            std::vector<int> irreducible(size_t(n), 0);
            irreducible[size_t(n) - 1] = 1;
            auto hist = spectrum_histogram(n, r);
            auto it = hist.find(irreducible);
            mpz_class observed = it == hist.end() ? mpz_class(0) : it->second;
            CHECK(f.at(n) == observed);
        }
    }
}

TEST_CASE("f/H ratio for r=3 increases over the computed range") {
    CountTable h = count_h_table(3, 8);
    CountTable f = count_f_table(3, 8);
    mpq_class prev(0);
    for (int n = 2; n <= 8; ++n) {
        mpq_class ratio(f.at(n), h.at(n));
        ratio.canonicalize();
        CHECK(ratio > prev);
        prev = ratio;
    }
}

TEST_CASE("resource caps are hard errors") {
    CHECK_THROWS_AS(enumerate_matrices(4, 3, 10), ResourceCapError);
    CHECK_THROWS_AS(transfer_count_h(30, 3, 10), ResourceCapError);
    // the count itself is still fine with the default cap
    CHECK(transfer_count_h(30, 3) > 0);
}

TEST_CASE("MagicalSquare validation") {
    CHECK_THROWS_AS(MagicalSquare::from_dense(2, {{2, 0}, {2, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(MagicalSquare::from_dense(2, {{3, 0}, {0, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(MagicalSquare::from_dense(2, {{1, 1}}), std::invalid_argument);
}
