#pragma once

namespace magsq {

/// Limiting pmf of the count of size-i components under the uniform law as
/// the dimension grows. For line sum 2: Poisson with rate 1 at i = 1 and
/// 1/(2i) at i >= 2. For line sum >= 3 the limit degenerates to the point
/// mass at 0, returned explicitly so callers need no special-casing.
double poisson_limit_pmf(int i, int k, int line_sum = 2);

/// Rate of the limiting Poisson variable above (0 for line_sum >= 3).
double poisson_limit_rate(int i, int line_sum = 2);

/// Limit law of the smallest component size for line sum 2:
///   P(S = 1) = 1 - e^{-1},
///   P(S = k) = exp(-1/2 - H_{k-1}/2) (1 - e^{-1/(2k)})  for k > 1,
/// where H_k is the k-th harmonic number.
double smallest_limit_pmf(int k);

/// Survival function P(S > k) = exp(-1/2 - H_k/2).
double smallest_limit_survival(int k);

/// CLT normalization for the number of components: z = (c - log(n)/2) /
/// sqrt(log(n)/2) together with the standard normal cdf at z.
struct CltReference {
    double z;
    double cdf;
};
CltReference clt_reference(double n, double c);

double standard_normal_cdf(double z);

/// Exponential integral E1(y) = int_y^inf e^{-z}/z dz to relative accuracy
/// 1e-12; power series minus log for y <= 1, continued fraction above.
double exp_integral(double y);
double exp_integral_series(double y);    // evaluation branch, exposed for cross-checks
double exp_integral_contfrac(double y);  // evaluation branch, exposed for cross-checks

struct QuadratureResult {
    double value = 0.0;
    double abs_error_bound = 0.0;
    long evaluations = 0;
};

/// m-th moment of the limit law of (largest component)/n for line sum 2:
///   sqrt(pi)/(2 Gamma(m+1/2)) int_0^inf exp(-E1(u)/2 - u) u^{m-1} du.
/// Near 0 the integrand behaves like u^{m-1/2}, so the piece below `splice`
/// is integrated after the substitution u = t^2; the upper piece is cut off
/// where e^{-u} is negligible, with the tail added to the error bound.
/// Throws QuadratureError if the certified bound misses `tol`.
QuadratureResult largest_moment_limit(int m, double splice = 1.0, double tol = 1e-8);

/// log H(n, r) by the sparse asymptotic formula, in two algebraically
/// equivalent-to-O(1/n) forms: (nr)!/(r!)^{2n} e^{(r-1)^2/2} with the exact
/// log-factorial, and the same with the factorial replaced by Stirling.
struct HAsymptotic {
    double log_factorial_form;
    double log_stirling_form;
};
HAsymptotic h_asymptotic(int n, int r);

}  // namespace magsq
