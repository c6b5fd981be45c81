#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "magsq/limits.hpp"
#include "magsq/permutation.hpp"
#include "magsq/rng.hpp"

#include "test_util.hpp"

using namespace magsq;

TEST_CASE("identity and validation") {
    RngStream rng(1);
    CHECK(sample_uniform_permutation(1, rng).images() == std::vector<int>{1});
    CHECK_THROWS_AS(sample_uniform_permutation(0, rng), std::invalid_argument);
    CHECK_THROWS_AS(Permutation({1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Permutation({0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(Permutation(std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("n=2 identity frequency is 1/2") {
    RngStream rng(42);
    int identity = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        if (sample_uniform_permutation(2, rng).image(1) == 1) ++identity;
    CHECK(std::abs(identity / double(draws) - 0.5) < 0.01);
}

TEST_CASE("n=6 fixed-point-free frequency matches the enumerated count") {
    // oracle: count derangements of [6] by full enumeration
    std::vector<int> ref(6);
    std::iota(ref.begin(), ref.end(), 1);
    int derangements = 0, total = 0;
    std::vector<int> perm = ref;
    do {
        ++total;
        bool fixed = false;
        for (int i = 0; i < 6; ++i)
            if (perm[size_t(i)] == i + 1) fixed = true;
        if (!fixed) ++derangements;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(total == 720);
    CHECK(derangements == 265);

    RngStream rng(7);
    const int draws = 100000;
    int hits = 0;
    for (int i = 0; i < draws; ++i) {
        const Permutation p = sample_uniform_permutation(6, rng);
        bool fixed = false;
        for (int j = 1; j <= 6; ++j)
            if (p.image(j) == j) fixed = true;
        if (!fixed) ++hits;
    }
    CHECK(std::abs(hits / double(draws) - derangements / 720.0) < 0.01);
}

TEST_CASE("cycle types") {
    CHECK(cycle_type(Permutation(4)).counts == std::vector<int>{4, 0, 0, 0});
    CHECK(cycle_type(Permutation({2, 1, 3, 4})).counts == std::vector<int>{2, 1, 0, 0});
    // a single 7-cycle
    CHECK(cycle_type(Permutation({2, 3, 4, 5, 6, 7, 1})).counts ==
          std::vector<int>{0, 0, 0, 0, 0, 0, 1});
    const CycleType t = cycle_type(Permutation({2, 1, 3, 4}));
    CHECK(t.total() == 3);
    CHECK(t.nontrivial() == 1);
    CHECK(t.smallest() == 1);
    CHECK(t.largest() == 2);
}

TEST_CASE("compose_with_inverse basics") {
    RngStream rng(5);
    const Permutation p = sample_uniform_permutation(8, rng);
    CHECK(compose_with_inverse(p, p) == Permutation(8));
    CHECK(cycle_type(compose_with_inverse(p, p)).counts[0] == 8);
    CHECK(compose_with_inverse(p, Permutation(8)) == p);
    // hand computation: blue^{-1} = (2,3,1), sigma = red o blue^{-1} = (3,1,2)
    CHECK(compose_with_inverse(Permutation({2, 3, 1}), Permutation({3, 1, 2})).images() ==
          std::vector<int>{3, 1, 2});
    CHECK_THROWS_AS(compose_with_inverse(Permutation(3), Permutation(4)), std::invalid_argument);
}

namespace {

std::vector<std::vector<int>> all_perms(int n) {
    std::vector<int> base(static_cast<size_t>(n));
    std::iota(base.begin(), base.end(), 1);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    return out;
}

}  // namespace

TEST_CASE("sigma is uniform over all 36 pairs at n=3") {
    auto perms = all_perms(3);
    std::map<std::vector<int>, int> hits;
    for (const auto& red : perms)
        for (const auto& blue : perms)
            ++hits[compose_with_inverse(Permutation(red), Permutation(blue)).images()];
    CHECK(hits.size() == 6);
    for (const auto& [img, count] : hits) CHECK(count == 6);
}

TEST_CASE("composition of independent uniforms is uniform (chi-square, n<=5)") {
    for (int n = 3; n <= 5; ++n) {
        auto perms = all_perms(n);
        std::map<std::vector<int>, int> index;
        for (size_t i = 0; i < perms.size(); ++i) index[perms[i]] = int(i);
        std::vector<int> counts(perms.size(), 0);
        RngStream rng(100 + uint64_t(n));
        const int draws = 100000;
        for (int i = 0; i < draws; ++i) {
            const Permutation red = sample_uniform_permutation(n, rng);
            const Permutation blue = sample_uniform_permutation(n, rng);
            ++counts[size_t(index.at(compose_with_inverse(red, blue).images()))];
        }
        const double expected = draws / double(perms.size());
        double chi2 = 0;
        for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
        CHECK(chi2 < testutil::chi2_quantile(0.99, int(perms.size()) - 1));
    }
}

TEST_CASE("geometric-size mixture makes c_1 exactly Poisson(x)") {
    // size N ~ geometric(x), then a uniform permutation of that size: the law
    // of the fixed-point count is Poisson(x); at 10^6 draws the empirical TV
    // distance is pure noise
    const double x = 0.5;
    RngStream rng(2024);
    const int draws = 1000000;
    std::vector<double> hist(64, 0.0);
    for (int i = 0; i < draws; ++i) {
        int n = 0;
        while (rng.next_unit() < x) ++n;  // P(N=n) = (1-x) x^n
        int c1 = 0;
        if (n >= 1) {
            const Permutation p = sample_uniform_permutation(n, rng);
            for (int j = 1; j <= n; ++j)
                if (p.image(j) == j) ++c1;
        }
        hist[size_t(c1)] += 1.0;
    }
    double tv = 0.0, covered = 0.0;
    for (size_t k = 0; k < hist.size(); ++k) {
        const double ref = std::exp(-x + double(k) * std::log(x) - std::lgamma(double(k) + 1.0));
        tv += std::abs(hist[k] / draws - ref);
        covered += ref;
    }
    tv = 0.5 * (tv + (1.0 - covered));
    CHECK(tv < 0.01);
}

TEST_CASE("streams with different ids are reproducible and distinct") {
    RngStream a1(9, 1), a2(9, 1), b(9, 2);
    std::vector<uint64_t> s1, s2, s3;
    for (int i = 0; i < 16; ++i) {
        s1.push_back(a1.next_u64());
        s2.push_back(a2.next_u64());
        s3.push_back(b.next_u64());
    }
    CHECK(s1 == s2);
    CHECK(s1 != s3);
}
