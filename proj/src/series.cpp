#include "magsq/series.hpp"

#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace magsq {

RationalSeries::RationalSeries(int cap, std::vector<mpq_class> coeffs)
    : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != static_cast<std::size_t>(cap) + 1)
        throw std::invalid_argument("RationalSeries: coefficient count != cap + 1");
}

RationalSeries series_exp(const RationalSeries& s) {
    if (s[0] != 0) throw std::invalid_argument("series_exp: constant term must be 0");
    const int cap = s.cap();
    RationalSeries e(cap);
    e[0] = 1;
    for (int n = 1; n <= cap; ++n) {
        mpq_class acc = 0;
        for (int k = 1; k <= n; ++k) acc += mpq_class(k) * s[k] * e[n - k];
        e[n] = acc / n;
    }
    return e;
}

RationalSeries series_log(const RationalSeries& s) {
    if (s[0] != 1) throw std::invalid_argument("series_log: constant term must be 1");
    const int cap = s.cap();
    RationalSeries l(cap);
    for (int n = 1; n <= cap; ++n) {
        mpq_class acc = 0;
        for (int k = 1; k < n; ++k) acc += mpq_class(k) * l[k] * s[n - k];
        l[n] = s[n] - acc / n;
    }
    return l;
}

mpz_class factorial(int n) {
    if (n < 0) throw std::invalid_argument("factorial: negative argument");
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return f;
}

const mpz_class& CountTable::at(int n) const {
    auto it = values.find(n);
    if (it == values.end())
        throw std::out_of_range("CountTable: missing entry n=" + std::to_string(n));
    return it->second;
}

bool CountTable::covers(int lo, int hi) const {
    for (int n = lo; n <= hi; ++n)
        if (!values.count(n)) return false;
    return true;
}

std::string CountTable::to_json() const {
    nlohmann::json j;
    j["r"] = r;
    nlohmann::json vals = nlohmann::json::object();
    for (const auto& [n, v] : values) vals[std::to_string(n)] = v.get_str();
    j["values"] = std::move(vals);
    return j.dump();
}

CountTable CountTable::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CountTable t;
    t.r = j.at("r").get<int>();
    for (const auto& [key, v] : j.at("values").items())
        t.values[std::stoi(key)] = mpz_class(v.get<std::string>());
    return t;
}

RationalSeries series_from_count_table(const CountTable& table, int cap) {
    RationalSeries s(cap);
    for (int n = 0; n <= cap; ++n) {
        if (n == 0 && !table.values.count(0)) {
            s[0] = 1;  // empty structure
            continue;
        }
        mpz_class fac = factorial(n);
        s[n] = mpq_class(table.at(n), fac * fac);
        s[n].canonicalize();
    }
    return s;
}

CountTable count_table_from_series(const RationalSeries& s, int r) {
    CountTable t;
    t.r = r;
    for (int n = 0; n <= s.cap(); ++n) {
        mpz_class fac = factorial(n);
        mpq_class scaled = s[n] * mpq_class(fac * fac);
        scaled.canonicalize();
        if (scaled.get_den() != 1 || scaled < 0)
            throw std::domain_error("count_table_from_series: (n!)^2 c_n not a nonnegative integer at n=" +
                                    std::to_string(n));
        t.values[n] = scaled.get_num();
    }
    return t;
}

namespace {

// x/2 + (1/2) sum_{k>=1} x^k/k: the log of the line-sum-2 counting series.
RationalSeries h_r2_log_series(int cap) {
    RationalSeries s(cap);
    if (cap >= 1) s[1] = 1;  // 1/2 + 1/2
    for (int k = 2; k <= cap; ++k) {
        s[k] = mpq_class(1, 2 * static_cast<unsigned long>(k));
        s[k].canonicalize();
    }
    return s;
}

}  // namespace

mpz_class h_r2_closed_form(int n) {
    if (n < 0) throw std::invalid_argument("h_r2_closed_form: negative n");
    RationalSeries h = series_exp(h_r2_log_series(n));
    mpz_class fac = factorial(n);
    mpq_class scaled = h[n] * mpq_class(fac * fac);
    scaled.canonicalize();
    if (scaled.get_den() != 1)
        throw std::logic_error("h_r2_closed_form: coefficient not integral");
    return scaled.get_num();
}

std::vector<mpz_class> h_r2_table(int n_max) {
    if (n_max < 0) throw std::invalid_argument("h_r2_table: negative n_max");
    std::vector<mpz_class> h(static_cast<std::size_t>(n_max) + 1);
    h[0] = 1;
    if (n_max >= 1) h[1] = 1;
    for (int n = 1; n < n_max; ++n) {
        // H_{n+1} = (n+1)^2 H_n - n^2 (n+1)/2 H_{n-1}
        mpz_class a = mpz_class(n + 1) * (n + 1) * h[static_cast<std::size_t>(n)];
        mpz_class c = mpz_class(n) * n * (n + 1);
        mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), 2);
        h[static_cast<std::size_t>(n) + 1] = a - c * h[static_cast<std::size_t>(n) - 1];
    }
    return h;
}

mpz_class f_r2_closed_form(int n) {
    if (n < 1) throw std::invalid_argument("f_r2_closed_form: n must be >= 1");
    if (n == 1) return 1;
    mpz_class v = factorial(n) * factorial(n - 1);
    mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), 2);
    return v;
}

mpz_class spectrum_count(int r, const ComponentSpectrum& spectrum, const CountTable& f_table) {
    spectrum.validate();
    if (f_table.r != r)
        throw std::invalid_argument("spectrum_count: f_table is for a different line sum");
    const int n = spectrum.n;
    mpz_class fac_n = factorial(n);
    mpq_class result(fac_n * fac_n);
    for (int i = 1; i <= n; ++i) {
        const int a = spectrum.count(i);
        if (a == 0) continue;
        mpz_class fac_i = factorial(i);
        mpz_class fi_pow, fac_i2_pow;
        mpz_pow_ui(fi_pow.get_mpz_t(), f_table.at(i).get_mpz_t(), static_cast<unsigned long>(a));
        mpz_class fac_i2 = fac_i * fac_i;
        mpz_pow_ui(fac_i2_pow.get_mpz_t(), fac_i2.get_mpz_t(), static_cast<unsigned long>(a));
        mpq_class factor(fi_pow, fac_i2_pow * factorial(a));
        factor.canonicalize();
        result *= factor;
    }
    if (result.get_den() != 1)
        throw std::logic_error("spectrum_count: non-integral result");
    return result.get_num();
}

FallingMoment joint_falling_moment(int n, int r, const std::vector<int>& orders,
                                   const CountTable& h_table, const CountTable& f_table) {
    if (h_table.r != r || f_table.r != r)
        throw std::invalid_argument("joint_falling_moment: table line sum mismatch");
    long long weight = 0;
    for (std::size_t m = 0; m < orders.size(); ++m) {
        if (orders[m] < 0) throw std::invalid_argument("joint_falling_moment: negative order");
        weight += static_cast<long long>(m + 1) * orders[m];
    }
    if (weight > n) return FallingMoment{mpq_class(0), false};

    mpq_class result(1);
    for (std::size_t m = 0; m < orders.size(); ++m) {
        if (orders[m] == 0) continue;
        const int size = static_cast<int>(m) + 1;
        mpz_class fac = factorial(size);
        mpq_class base(f_table.at(size), fac * fac);
        base.canonicalize();
        for (int t = 0; t < orders[m]; ++t) result *= base;
    }
    const int rest = n - static_cast<int>(weight);
    mpz_class fac_n = factorial(n), fac_rest = factorial(rest);
    mpq_class norm(fac_n * fac_n, h_table.at(n));
    norm.canonicalize();
    mpq_class rest_coeff(h_table.at(rest), fac_rest * fac_rest);
    rest_coeff.canonicalize();
    result *= norm;
    result *= rest_coeff;
    return FallingMoment{result, true};
}

namespace {

// e^t for rational |t| <= 1, by an exact rational Taylor partial sum whose
// remainder is pushed below 2^-(prec+8) before conversion.
mpf_class exp_mpq(const mpq_class& t, mp_bitcnt_t prec) {
    mpf_class threshold(1, prec);
    threshold >>= (prec + 8);
    mpq_class term(1), sum(1);
    for (int k = 1; k < 10000; ++k) {
        term *= t;
        term /= k;
        sum += term;
        // once k >= 2|t| the term ratio is <= 1/2, so the tail is <= 2|term|
        if (k >= 4 && mpf_class(abs(term) * 2, prec) < threshold) break;
    }
    return mpf_class(sum, prec);
}

}  // namespace

mpf_class mixture_pmf_r2(const mpq_class& x, int n, mp_bitcnt_t prec) {
    if (x <= 0 || x >= 1) throw std::invalid_argument("mixture_pmf_r2: x must lie in (0,1)");
    if (n < 0) throw std::invalid_argument("mixture_pmf_r2: negative n");

    mpq_class xc = x;
    xc.canonicalize();
    mpz_class h = h_r2_table(n)[static_cast<std::size_t>(n)];
    mpz_class fac = factorial(n);
    mpq_class xn(1);
    for (int k = 0; k < n; ++k) xn *= xc;
    mpq_class rational_part(h, fac * fac);
    rational_part.canonicalize();
    rational_part *= xn;

    mpf_class one_minus_x(mpq_class(1) - xc, prec);
    mpf_class root(0, prec);
    mpf_sqrt(root.get_mpf_t(), one_minus_x.get_mpf_t());
    mpf_class expf = exp_mpq(-xc / 2, prec);
    return root * expf * mpf_class(rational_part, prec);
}

}  // namespace magsq
