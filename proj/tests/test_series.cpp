#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "magsq/enumerate.hpp"
#include "magsq/rng.hpp"
#include "magsq/series.hpp"
#include "magsq/tables.hpp"

using namespace magsq;

TEST_CASE("series_exp basics") {
    RationalSeries zero(4);
    RationalSeries one = series_exp(zero);
    CHECK(one[0] == 1);
    for (int k = 1; k <= 4; ++k) CHECK(one[k] == 0);

    RationalSeries x(4);
    x[1] = 1;
    RationalSeries ex = series_exp(x);
    CHECK(ex[0] == 1);
    CHECK(ex[1] == 1);
    CHECK(ex[2] == mpq_class(1, 2));
    CHECK(ex[3] == mpq_class(1, 6));
    CHECK(ex[4] == mpq_class(1, 24));

    RationalSeries bad(2);
    bad[0] = 1;
    CHECK_THROWS_AS(series_exp(bad), std::invalid_argument);
}

TEST_CASE("series_log basics") {
    RationalSeries one(3);
    one[0] = 1;
    RationalSeries zero = series_log(one);
    for (int k = 0; k <= 3; ++k) CHECK(zero[k] == 0);

    RationalSeries bad(2);
    bad[0] = 2;
    CHECK_THROWS_AS(series_log(bad), std::invalid_argument);
}

TEST_CASE("exp/log round trip on random small rationals") {
    RngStream rng(314);
    for (int cap : {12, 16}) {
        for (int rep = 0; rep < 20; ++rep) {
            RationalSeries s(cap);
            for (int k = 1; k <= cap; ++k) {
                const long num = long(rng.below(19)) - 9;
                const long den = long(rng.below(9)) + 1;
                s[k] = mpq_class(num, den);
                s[k].canonicalize();
            }
            CHECK(series_log(series_exp(s)) == s);
        }
    }
}

TEST_CASE("H(n,2) closed form against the transfer count and enumeration") {
    CHECK(h_r2_closed_form(0) == 1);
    CHECK(h_r2_closed_form(1) == 1);
    CHECK(h_r2_closed_form(2) == 3);
    CHECK(h_r2_closed_form(3) == 21);  // equals both oracles below
    CHECK(h_r2_closed_form(3) == transfer_count_h(3, 2));
    CHECK(mpz_class(enumerate_matrices(3, 2).size()) == h_r2_closed_form(3));
    for (int n = 0; n <= 25; ++n) CHECK(h_r2_closed_form(n) == transfer_count_h(n, 2));
}

TEST_CASE("the H(n,2) recurrence table agrees with the series route") {
    auto table = h_r2_table(60);
    for (int n = 0; n <= 60; n += (n < 12 ? 1 : 7)) CHECK(table[size_t(n)] == h_r2_closed_form(n));
}

TEST_CASE("log of the r=2 series recovers the irreducible counts") {
    CountTable h = count_h_table(2, 5);
    RationalSeries hs = series_from_count_table(h, 5);
    RationalSeries fs = series_log(hs);
    // f = 1, 1, 6, 72, 1440 scaled by (n!)^2: x + x^2/4 + x^3/6 + x^4/8 + x^5/10
    CHECK(fs[1] == 1);
    CHECK(fs[2] == mpq_class(1, 4));
    CHECK(fs[3] == mpq_class(1, 6));
    CHECK(fs[4] == mpq_class(1, 8));
    CHECK(fs[5] == mpq_class(1, 10));
    const long expected[] = {0, 1, 1, 6, 72, 1440};
    for (int n = 1; n <= 5; ++n) {
        mpz_class fac = factorial(n);
        mpq_class scaled = fs[n] * mpq_class(fac * fac);
        scaled.canonicalize();
        CHECK(scaled == expected[n]);
        CHECK(f_r2_closed_form(n) == expected[n]);
    }
}

TEST_CASE("f(n,3) from the log transform equals the connectivity count") {
    CountTable f3 = count_f_table(3, 4);
    for (int n = 1; n <= 4; ++n) {
        // oracle: enumerate M(n,3) and keep the connected ones
        mpz_class connected = 0;
        for_each_matrix(n, 3, [&](const MagicalSquare& sq) {
            if (spectrum_of(sq).total() == 1) connected += 1;
            return true;
        });
        CHECK(f3.at(n) == connected);
    }
}

TEST_CASE("r=1 tables: H(n,1)=n!, f(n,1)=[n=1]") {
    CountTable h = count_h_table(1, 10);
    CountTable f = count_f_table(1, 10);
    RationalSeries hs = series_from_count_table(h, 10);
    RationalSeries fs = series_log(hs);
    for (int n = 0; n <= 10; ++n) CHECK(h.at(n) == factorial(n));
    for (int n = 1; n <= 10; ++n) {
        CHECK(f.at(n) == (n == 1 ? 1 : 0));
        mpz_class fac = factorial(n);
        mpq_class scaled = fs[n] * mpq_class(fac * fac);
        scaled.canonicalize();
        CHECK(scaled == (n == 1 ? 1 : 0));
    }
}

TEST_CASE("exponential-formula consistency for r in {1,2,3}, n <= 10") {
    for (int r = 1; r <= 3; ++r) {
        CountTable h = count_h_table(r, 10);
        RationalSeries hs = series_from_count_table(h, 10);
        CHECK(series_exp(series_log(hs)) == hs);
        // the back-conversion certifies (n!)^2 c_n integral and nonnegative
        CountTable round = count_table_from_series(hs, r);
        for (int n = 0; n <= 10; ++n) CHECK(round.at(n) == h.at(n));
    }
}

TEST_CASE("spectrum_count on the n=2 cases and the sum identity up to n=7") {
    CountTable f2 = count_f_table(2, 7);
    CHECK(spectrum_count(2, ComponentSpectrum(2, {2, 0}), f2) == 2);
    CHECK(spectrum_count(2, ComponentSpectrum(2, {0, 1}), f2) == 1);
    CHECK_THROWS_AS(spectrum_count(2, ComponentSpectrum(2, {1, 1}), f2), std::invalid_argument);

    // summing the per-spectrum counts over all spectra recovers H(n,r)
    for (int r = 2; r <= 3; ++r) {
        CountTable f = count_f_table(r, 7);
        for (int n = 1; n <= 7; ++n) {
            mpz_class total = 0;
            std::vector<int> counts(size_t(n), 0);
            std::function<void(int, int)> rec = [&](int remaining, int max_part) {
                if (remaining == 0) {
                    total += spectrum_count(r, ComponentSpectrum(n, counts), f);
                    return;
                }
                for (int part = std::min(remaining, max_part); part >= 1; --part) {
                    ++counts[size_t(part) - 1];
                    rec(remaining - part, part);
                    --counts[size_t(part) - 1];
                }
            };
            rec(n, n);
            CHECK(total == count_h(n, r));
        }
    }
}

TEST_CASE("joint falling moments") {
    CountTable h = count_h_table(2, 200);
    CountTable f = count_f_table(2, 200);

    FallingMoment chi1 = joint_falling_moment(3, 2, {1}, h, f);
    CHECK(chi1.in_range);
    CHECK(chi1.value == mpq_class(9, 7));

    FallingMoment trivial = joint_falling_moment(5, 2, {0, 0, 0}, h, f);
    CHECK(trivial.in_range);
    CHECK(trivial.value == 1);

    FallingMoment out = joint_falling_moment(3, 2, {4}, h, f);
    CHECK_FALSE(out.in_range);
    CHECK(out.value == 0);

    // E chi_2 decreases monotonically to its limit 1/4
    const std::vector<int> chi2_order = {0, 1};
    mpq_class m50 = joint_falling_moment(50, 2, chi2_order, h, f).value;
    mpq_class m100 = joint_falling_moment(100, 2, chi2_order, h, f).value;
    mpq_class m200 = joint_falling_moment(200, 2, chi2_order, h, f).value;
    CHECK(m50 > m100);
    CHECK(m100 > m200);
    CHECK(m200 > mpq_class(1, 4));
    CHECK(std::abs(m200.get_d() - 0.25) < 0.002);
}

TEST_CASE("mixture pmf at x = 1/2") {
    const mpq_class half(1, 2);
    // n = 0: sqrt(1/2) e^{-1/4}
    const double p0 = mixture_pmf_r2(half, 0).get_d();
    CHECK(std::abs(p0 - std::sqrt(0.5) * std::exp(-0.25)) < 1e-12);
    CHECK(std::abs(p0 - 0.5506) < 1e-4);

    // partial sums reach 1 to far beyond double precision
    mpf_class sum(0, 256);
    for (int n = 0; n <= 200; ++n) sum += mixture_pmf_r2(half, n);
    mpf_class gap(0, 256);
    gap = 1 - sum;
    CHECK(abs(gap) < mpf_class(1e-20, 256));

    CHECK_THROWS_AS(mixture_pmf_r2(mpq_class(0), 1), std::invalid_argument);
    CHECK_THROWS_AS(mixture_pmf_r2(mpq_class(1), 1), std::invalid_argument);
    CHECK_THROWS_AS(mixture_pmf_r2(mpq_class(3, 2), 1), std::invalid_argument);
}

TEST_CASE("mixture pmf ratio identity") {
    // pmf(n+1)/pmf(n) = H(n+1,2) x / ((n+1)^2 H(n,2))
    const mpq_class x(1, 3);
    auto h = h_r2_table(8);
    for (int n = 0; n <= 7; ++n) {
        const double lhs = mixture_pmf_r2(x, n + 1).get_d() / mixture_pmf_r2(x, n).get_d();
        mpq_class rhs_q(h[size_t(n) + 1], h[size_t(n)] * (n + 1) * (n + 1));
        rhs_q.canonicalize();
        rhs_q *= x;
        CHECK(std::abs(lhs - rhs_q.get_d()) < 1e-13);
    }
}

TEST_CASE("count tables serialize to JSON and back") {
    CountTable t = count_h_table(3, 12);
    CountTable back = CountTable::from_json(t.to_json());
    CHECK(back.r == t.r);
    CHECK(back.values == t.values);
}

TEST_CASE("table lookups and conversions reject bad input") {
    CountTable t = count_h_table(2, 4);
    CHECK_THROWS_AS(t.at(5), std::out_of_range);
    CHECK(t.covers(0, 4));
    CHECK_FALSE(t.covers(0, 5));

    // a series with a non-integral (n!)^2 c_n cannot be a counting series
    RationalSeries s(2);
    s[0] = 1;
    s[1] = 1;
    s[2] = mpq_class(1, 3);
    s[2].canonicalize();
    CHECK_THROWS_AS(count_table_from_series(s, 2), std::domain_error);
}
