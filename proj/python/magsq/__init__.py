"""Exact counts, uniform samples and limit laws for magical squares.

A magical square of dimension n and line sum r is an n x n matrix of
nonnegative integers whose rows and columns all sum to r; equivalently an
r-regular bipartite multigraph on 2n labelled vertices. This package wraps
the C++ core: exact counting (H and the irreducible counts f), exhaustive
enumeration with component spectra, importance sampling and exact rejection
sampling for the uniform law at r = 2, and the limiting component laws.
"""

from ._core import (  # noqa: F401
    __version__,
    clt_reference,
    compose_with_inverse,
    count_f,
    count_h,
    cycle_type,
    enumerate_matrices,
    exact_statistic_pmf,
    exp_integral,
    h_asymptotic,
    h_r2_closed_form,
    importance_estimate,
    largest_moment_limit,
    mixture_pmf_r2,
    poisson_limit_pmf,
    rejection_sample,
    sample_permutation,
    smallest_limit_pmf,
    spectrum_of,
    transfer_count_h,
)
