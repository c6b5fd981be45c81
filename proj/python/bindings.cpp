#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "magsq/enumerate.hpp"
#include "magsq/limits.hpp"
#include "magsq/permutation.hpp"
#include "magsq/rng.hpp"
#include "magsq/sampler.hpp"
#include "magsq/series.hpp"
#include "magsq/statistics.hpp"
#include "magsq/tables.hpp"
#include "magsq/version.hpp"

namespace py = pybind11;

namespace {

py::int_ to_py_int(const mpz_class& z) {
    // exact big integers cross the boundary as decimal strings
    return py::cast<py::int_>(py::int_(py::str(z.get_str())));
}

py::object to_py_fraction(const mpq_class& q) {
    py::object fraction = py::module_::import("fractions").attr("Fraction");
    return fraction(py::str(q.get_str()));  // "num/den" or "num"
}

magsq::MagicalSquare square_from_grid(int r, const std::vector<std::vector<int>>& grid) {
    return magsq::MagicalSquare::from_dense(r, grid);
}

py::dict report_to_dict(const magsq::EstimateReport& rep) {
    py::dict d;
    d["n"] = rep.n;
    d["sample_count"] = rep.sample_count;
    d["weighted_sum"] = rep.weighted_sum.value();
    d["weight_sum"] = rep.weight_sum.value();
    d["weight_sq_sum"] = rep.weight_sq_sum.value();
    d["self_normalized"] = rep.self_normalized();
    if (auto raw = rep.raw_estimate())
        d["estimate"] = *raw;
    else
        d["estimate"] = py::none();
    d["ess"] = rep.ess();
    d["seed"] = rep.seed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact counts, uniform samples and limit laws for magical squares "
              "(nonnegative integer matrices with constant line sums)";
    m.attr("__version__") = MAGSQ_VERSION;

    // counting
    m.def("count_h", [](int n, int r) { return to_py_int(magsq::count_h(n, r)); },
          py::arg("n"), py::arg("r"), "Exact H(n, r), the number of matrices in M(n, r).");
    m.def("count_f",
          [](int n, int r) { return to_py_int(magsq::count_f_table(r, n).at(n)); },
          py::arg("n"), py::arg("r"), "Exact f(n, r), the number of irreducible matrices.");
    m.def("transfer_count_h",
          [](int n, int r) { return to_py_int(magsq::transfer_count_h(n, r)); },
          py::arg("n"), py::arg("r"), "H(n, r) by the transfer dynamic program.");
    m.def("h_r2_closed_form",
          [](int n) { return to_py_int(magsq::h_r2_closed_form(n)); }, py::arg("n"),
          "H(n, 2) from the square-root generating function.");

    // enumeration
    m.def("enumerate_matrices",
          [](int n, int r, std::uint64_t cap) {
              std::vector<std::vector<std::vector<int>>> out;
              magsq::for_each_matrix(n, r, [&](const magsq::MagicalSquare& sq) {
                  out.push_back(sq.dense());
                  return true;
              }, cap);
              return out;
          },
          py::arg("n"), py::arg("r"), py::arg("cap") = magsq::kDefaultEnumCap);
    m.def("spectrum_of",
          [](const std::vector<std::vector<int>>& grid, int r) {
              return magsq::spectrum_of(square_from_grid(r, grid)).counts;
          },
          py::arg("grid"), py::arg("r"),
          "Component spectrum (a_1, ..., a_n) of a matrix given as a dense grid.");
    m.def("exact_statistic_pmf",
          [](int n, int r, const std::string& stat, int k, std::uint64_t cap) {
              magsq::Statistic which;
              if (stat == "S" || stat == "smallest") which = magsq::Statistic::Smallest;
              else if (stat == "L" || stat == "largest") which = magsq::Statistic::Largest;
              else if (stat == "C" || stat == "components") which = magsq::Statistic::Components;
              else if (stat == "chi") which = magsq::Statistic::Chi;
              else throw std::invalid_argument("stat must be S, L, C or chi");
              magsq::PmfTable pmf = magsq::exact_statistic_pmf(n, r, which, k, cap);
              py::dict d;
              for (std::size_t i = 0; i < pmf.support.size(); ++i)
                  d[py::int_(pmf.support[i])] = to_py_fraction(pmf.probs[i]);
              return d;
          },
          py::arg("n"), py::arg("r"), py::arg("stat"), py::arg("k") = 1,
          py::arg("cap") = magsq::kDefaultEnumCap,
          "Exact pmf of a spectrum statistic under Uniform(M(n, r)), as Fractions.");

    // permutations
    m.def("sample_permutation",
          [](int n, std::uint64_t seed, std::uint64_t stream) {
              magsq::RngStream rng(seed, stream);
              return magsq::sample_uniform_permutation(n, rng).images();
          },
          py::arg("n"), py::arg("seed"), py::arg("stream") = 0);
    m.def("cycle_type",
          [](const std::vector<int>& images) {
              return magsq::cycle_type(magsq::Permutation(images)).counts;
          },
          py::arg("images"));
    m.def("compose_with_inverse",
          [](const std::vector<int>& red, const std::vector<int>& blue) {
              return magsq::compose_with_inverse(magsq::Permutation(red), magsq::Permutation(blue))
                  .images();
          },
          py::arg("red"), py::arg("blue"), "red o blue^{-1} as an image list.");

    // sampling / estimation
    m.def("importance_estimate",
          [](const std::string& stat, int n, std::uint64_t N, std::uint64_t seed, int threads,
             bool with_normalizer) {
              magsq::StatisticSpec spec = magsq::StatisticSpec::parse(stat);
              std::optional<mpz_class> h_value;
              if (with_normalizer && n <= 8192)
                  h_value = magsq::h_r2_table(n)[static_cast<std::size_t>(n)];
              return report_to_dict(magsq::importance_estimate_sharded(spec.evaluator(n), n, N,
                                                                       seed, threads, h_value));
          },
          py::arg("stat"), py::arg("n"), py::arg("N"), py::arg("seed"), py::arg("threads") = 1,
          py::arg("with_normalizer") = true,
          "Importance-sampling estimate of a spectrum statistic under Uniform(M(n, 2)).");
    m.def("rejection_sample",
          [](int n, std::uint64_t seed, std::uint64_t count, std::uint64_t trial_cap) {
              magsq::RngStream rng(seed);
              py::list out;
              for (std::uint64_t i = 0; i < count; ++i) {
                  auto [square, trials] = magsq::rejection_sample_uniform(n, rng, trial_cap);
                  out.append(py::make_tuple(square.dense(), trials));
              }
              return out;
          },
          py::arg("n"), py::arg("seed"), py::arg("count") = 1,
          py::arg("trial_cap") = magsq::kDefaultTrialCap,
          "Exactly uniform samples from M(n, 2); returns (grid, trials) pairs.");

    // limit laws
    m.def("poisson_limit_pmf", &magsq::poisson_limit_pmf, py::arg("i"), py::arg("k"),
          py::arg("line_sum") = 2);
    m.def("smallest_limit_pmf", &magsq::smallest_limit_pmf, py::arg("k"));
    m.def("clt_reference",
          [](double n, double c) {
              auto ref = magsq::clt_reference(n, c);
              return py::make_tuple(ref.z, ref.cdf);
          },
          py::arg("n"), py::arg("c"));
    m.def("exp_integral", &magsq::exp_integral, py::arg("y"),
          "E1(y) = integral of e^{-z}/z from y to infinity.");
    m.def("largest_moment_limit",
          [](int m_order, double splice, double tol) {
              auto q = magsq::largest_moment_limit(m_order, splice, tol);
              py::dict d;
              d["value"] = q.value;
              d["abs_error_bound"] = q.abs_error_bound;
              d["evaluations"] = q.evaluations;
              return d;
          },
          py::arg("m"), py::arg("splice") = 1.0, py::arg("tol") = 1e-8,
          "m-th moment of the limiting law of (largest component)/n for line sum 2.");
    m.def("h_asymptotic",
          [](int n, int r) {
              auto a = magsq::h_asymptotic(n, r);
              py::dict d;
              d["log_factorial_form"] = a.log_factorial_form;
              d["log_stirling_form"] = a.log_stirling_form;
              return d;
          },
          py::arg("n"), py::arg("r"));
    m.def("mixture_pmf_r2",
          [](long num, long den, int n) {
              mpq_class x(num, den);
              x.canonicalize();
              mpf_class v = magsq::mixture_pmf_r2(x, n);
              return v.get_d();
          },
          py::arg("num"), py::arg("den"), py::arg("n"),
          "(1-x)^(1/2) e^(-x/2) H(n,2) x^n/(n!)^2 at x = num/den.");
}
