#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "magsq/spectrum.hpp"

namespace magsq {

/// Truncated formal power series sum_{k<=cap} c_k x^k with exact rational
/// coefficients. Counting series carry the normalization c_n = count/(n!)^2,
/// the natural convention for structures labelled on rows and columns.
///
/// All identities here are identities of coefficients; truncation makes them
/// meaningful even for series whose radius of convergence is 0 (which is the
/// case for the line-sum-r counting series once r >= 3).
class RationalSeries {
public:
    explicit RationalSeries(int cap) : coeffs_(static_cast<std::size_t>(cap) + 1) {}
    RationalSeries(int cap, std::vector<mpq_class> coeffs);

    int cap() const { return static_cast<int>(coeffs_.size()) - 1; }
    const mpq_class& operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
    mpq_class& operator[](int k) { return coeffs_[static_cast<std::size_t>(k)]; }

    bool operator==(const RationalSeries&) const = default;

private:
    std::vector<mpq_class> coeffs_;
};

/// exp(s) truncated at s.cap(); requires s[0] == 0. Uses the first-order
/// recurrence n*e_n = sum_k k*s_k*e_{n-k}, so the whole transform is O(cap^2)
/// exact rational operations.
RationalSeries series_exp(const RationalSeries& s);

/// Inverse of series_exp; requires s[0] == 1. exp(series_log(s)) == s up to cap.
RationalSeries series_log(const RationalSeries& s);

/// n! as an exact integer.
mpz_class factorial(int n);

/// Exact table of counts for a fixed line sum r, keyed by dimension n.
struct CountTable {
    int r = 0;
    std::map<int, mpz_class> values;

    const mpz_class& at(int n) const;
    bool covers(int lo, int hi) const;

    /// {"r": int, "values": {"n": "decimal-string"}}
    std::string to_json() const;
    static CountTable from_json(const std::string& text);
};

/// Counting series c_n = table[n]/(n!)^2 for n = 0..cap; every index must be
/// present except 0, which defaults to the empty structure (count 1).
RationalSeries series_from_count_table(const CountTable& table, int cap);

/// Back-conversion (n!)^2 * c_n, checking that every value is a nonnegative
/// integer; throws std::domain_error otherwise.
CountTable count_table_from_series(const RationalSeries& s, int r);

/// H(n,2) = (n!)^2 [x^n] sqrt(e^x/(1-x)), computed exactly by exponentiating
/// x/2 + (1/2) sum_{k>=1} x^k/k. No extra square-root primitive is needed.
mpz_class h_r2_closed_form(int n);

/// H(0..n_max, 2) by the first-order recurrence the closed form satisfies:
/// H_{n+1} = (n+1)^2 H_n - n^2 (n+1)/2 * H_{n-1}. O(n) big-integer steps, so
/// it reaches n in the thousands where the series route would not.
std::vector<mpz_class> h_r2_table(int n_max);

/// f(n,2): 1 for n = 1, n!(n-1)!/2 for n >= 2.
mpz_class f_r2_closed_form(int n);

/// Number of matrices with line sum r and component spectrum (a_1,...,a_n):
///   (n!)^2 / (prod_i (i!)^{2 a_i} a_i!) * prod_i f(i,r)^{a_i}.
/// f_table must cover every i with a_i > 0.
mpz_class spectrum_count(int r, const ComponentSpectrum& spectrum, const CountTable& f_table);

/// Joint falling-factorial moment E prod_m (chi_m)_(r_m) under the uniform
/// law on dimension-n line-sum-r matrices:
///   prod_m (f(m,r)/(m!)^2)^{r_m} * (n!)^2/H(n,r) * H(n-W,r)/((n-W)!)^2,
/// with W = sum m*r_m. Defined for n >= W; below that the moment is 0 and
/// in_range is false.
struct FallingMoment {
    mpq_class value;
    bool in_range = true;
};
FallingMoment joint_falling_moment(int n, int r, const std::vector<int>& orders,
                                   const CountTable& h_table, const CountTable& f_table);

/// (1-x)^{1/2} e^{-x/2} H(n,2) x^n / (n!)^2 for rational x in (0,1).
/// The rational factor is exact; the two irrational prefactors are evaluated
/// in GMP floating point with `prec` bits (default 256, about 77 digits).
mpf_class mixture_pmf_r2(const mpq_class& x, int n, mp_bitcnt_t prec = 256);

}  // namespace magsq
