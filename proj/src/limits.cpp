#include "magsq/limits.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "magsq/errors.hpp"

namespace magsq {

double poisson_limit_rate(int i, int line_sum) {
    if (i < 1) throw std::invalid_argument("poisson_limit_rate: i must be >= 1");
    if (line_sum < 2) throw std::invalid_argument("poisson_limit_rate: line sum must be >= 2");
    if (line_sum >= 3) return 0.0;
    return i == 1 ? 1.0 : 1.0 / (2.0 * i);
}

double poisson_limit_pmf(int i, int k, int line_sum) {
    if (k < 0) throw std::invalid_argument("poisson_limit_pmf: k must be >= 0");
    const double rate = poisson_limit_rate(i, line_sum);
    if (rate == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(-rate + k * std::log(rate) - std::lgamma(k + 1.0));
}

namespace {

double harmonic(int k) {
    double h = 0.0;
    for (int i = 1; i <= k; ++i) h += 1.0 / i;
    return h;
}

}  // namespace

double smallest_limit_survival(int k) {
    if (k < 1) throw std::invalid_argument("smallest_limit_survival: k must be >= 1");
    return std::exp(-0.5 - harmonic(k) / 2.0);
}

double smallest_limit_pmf(int k) {
    if (k < 1) throw std::invalid_argument("smallest_limit_pmf: k must be >= 1");
    if (k == 1) return 1.0 - std::exp(-1.0);
    return std::exp(-0.5 - harmonic(k - 1) / 2.0) * (1.0 - std::exp(-1.0 / (2.0 * k)));
}

double standard_normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

CltReference clt_reference(double n, double c) {
    if (n < 2.0) throw std::invalid_argument("clt_reference: n must be >= 2");
    const double mu = 0.5 * std::log(n);
    const double z = (c - mu) / std::sqrt(mu);
    return CltReference{z, standard_normal_cdf(z)};
}

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

}  // namespace

double exp_integral_series(double y) {
    if (y <= 0.0) throw std::invalid_argument("exp_integral: y must be positive");
    // E1(y) = -gamma - log y + sum_{k>=1} (-1)^{k+1} y^k / (k k!)
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= 200; ++k) {
        term *= -y / k;
        const double add = -term / k;
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum) + 1e-300) break;
    }
    return -kEulerGamma - std::log(y) + sum;
}

double exp_integral_contfrac(double y) {
    if (y <= 0.0) throw std::invalid_argument("exp_integral: y must be positive");
    // E1(y) = e^{-y} / (y + 1 - 1/(y + 3 - 4/(y + 5 - 9/(...)))), evaluated
    // by the modified Lentz method
    const double tiny = 1e-300;
    double b = y + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int k = 1; k <= 400; ++k) {
        const double a = -static_cast<double>(k) * k;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return h * std::exp(-y);
}

double exp_integral(double y) {
    if (y <= 0.0) throw std::invalid_argument("exp_integral: y must be positive");
    return y <= 1.0 ? exp_integral_series(y) : exp_integral_contfrac(y);
}

namespace {

struct SimpsonState {
    long evals = 0;
    double err = 0.0;
};

template <typename F>
double simpson_step(const F& f, double a, double m, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth, SimpsonState& st) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    st.evals += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        st.err += std::abs(delta) / 15.0 + (depth <= 0 ? std::abs(delta) : 0.0);
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, lm, m, fa, flm, fm, left, tol / 2.0, depth - 1, st) +
           simpson_step(f, m, rm, b, fm, frm, fb, right, tol / 2.0, depth - 1, st);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol, SimpsonState& st) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    st.evals += 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, m, b, fa, fm, fb, whole, tol, 30, st);
}

}  // namespace

QuadratureResult largest_moment_limit(int m, double splice, double tol) {
    if (m < 1) throw std::invalid_argument("largest_moment_limit: m must be >= 1");
    if (splice <= 0.0) throw std::invalid_argument("largest_moment_limit: splice must be positive");

    const auto integrand = [m](double u) {
        return std::exp(-0.5 * exp_integral(u) - u) * std::pow(u, m - 1);
    };

    SimpsonState st;
    const double inner_tol = tol / 8.0;

    // u = t^2 below the splice point removes the u^{-1/2}-type softening at 0
    const auto lower = [&](double t) {
        const double u = t * t;
        if (u == 0.0) return 0.0;  // integrand vanishes like t^{2m}
        return 2.0 * t * integrand(u);
    };
    const double low = adaptive_simpson(lower, 0.0, std::sqrt(splice), inner_tol, st);

    // truncate where e^{-u} is below 1e-16 relative to anything that matters
    const double cutoff = std::max(60.0, 40.0 + 6.0 * m);
    const double high = adaptive_simpson(integrand, splice, cutoff, inner_tol, st);
    // tail: exp(-E1/2) <= 1, so int_U^inf u^{m-1} e^{-u} du <= 2 U^{m-1} e^{-U}
    const double tail_bound = 2.0 * std::pow(cutoff, m - 1) * std::exp(-cutoff);

    // sqrt(pi): the sqrt(e) in the tilted-moment constant cancels against the
    // sqrt(e/pi) in the asymptotics of H(n,2)/(n!)^2
    const double prefactor = std::sqrt(M_PI) / (2.0 * std::tgamma(m + 0.5));
    QuadratureResult result;
    result.value = prefactor * (low + high);
    // double-precision accumulation cannot certify below a few ulps of the value
    result.abs_error_bound =
        prefactor * (st.err + tail_bound) + 8e-16 * std::abs(result.value);
    result.evaluations = st.evals;
    if (result.abs_error_bound > tol)
        throw QuadratureError("largest_moment_limit: achieved bound " +
                                  std::to_string(result.abs_error_bound) + " exceeds tolerance " +
                                  std::to_string(tol),
                              result.abs_error_bound);
    return result;
}

HAsymptotic h_asymptotic(int n, int r) {
    if (n < 1 || r < 2) throw std::invalid_argument("h_asymptotic: need n >= 1, r >= 2");
    const double nr = static_cast<double>(n) * r;
    const double log_r_fac = std::lgamma(r + 1.0);
    const double shift = (r - 1.0) * (r - 1.0) / 2.0;
    HAsymptotic out;
    out.log_factorial_form = std::lgamma(nr + 1.0) - 2.0 * n * log_r_fac + shift;
    out.log_stirling_form = 0.5 * std::log(2.0 * M_PI) + (nr + 0.5) * std::log(static_cast<double>(r)) +
                            (nr + 0.5) * std::log(static_cast<double>(n)) - nr + shift -
                            2.0 * n * log_r_fac;
    return out;
}

}  // namespace magsq
