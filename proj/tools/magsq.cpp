// Command line front door: exact counting, enumeration, sampling, estimation,
// and limit-law verification for magical squares, emitting CSV or JSON.
//
// Exit codes: 0 success, 1 criterion failure, 2 usage error, 3 resource cap.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "magsq/enumerate.hpp"
#include "magsq/errors.hpp"
#include "magsq/limits.hpp"
#include "magsq/sampler.hpp"
#include "magsq/series.hpp"
#include "magsq/statistics.hpp"
#include "magsq/tables.hpp"
#include "magsq/verify.hpp"
#include "magsq/version.hpp"

namespace {

using nlohmann::json;

struct Output {
    std::string format = "csv";
    std::string path;  // empty -> stdout

    void emit(const std::string& csv_text, const json& payload) const {
        const std::string text = format == "json" ? payload.dump(2) + "\n" : csv_text;
        if (path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot write " + path);
            out << text;
        }
    }
};

// config echo carries the seed for every subcommand, randomized or not
json meta_block(const std::string& command, json config, std::uint64_t seed) {
    config["seed"] = std::to_string(seed);
    json m;
    m["command"] = command;
    m["version"] = MAGSQ_VERSION;
    m["config"] = std::move(config);
    return m;
}

std::string double_str(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------

int cmd_count(int n, int r, const std::string& cache_path, std::uint64_t seed, const Output& out) {
    magsq::CountCache cache;
    if (!cache_path.empty()) cache = magsq::CountCache::load(cache_path);
    const magsq::CountTable& h = cache.h_table(r, n);
    const magsq::CountTable& f = cache.f_table(r, n);
    if (!cache_path.empty()) cache.save(cache_path);

    std::ostringstream csv;
    csv << "n,r,H,f,f_over_H\n";
    json rows = json::array();
    for (int k = 1; k <= n; ++k) {
        mpq_class ratio(f.at(k), h.at(k));
        ratio.canonicalize();
        csv << k << "," << r << "," << h.at(k).get_str() << "," << f.at(k).get_str() << ","
            << ratio.get_str() << "\n";
        rows.push_back({{"n", k},
                        {"H", h.at(k).get_str()},
                        {"f", f.at(k).get_str()},
                        {"f_over_H", ratio.get_str()}});
    }
    json payload;
    payload["meta"] = meta_block("count", {{"n", n}, {"r", r}}, seed);
    payload["rows"] = std::move(rows);
    out.emit(csv.str(), payload);
    return 0;
}

int cmd_enumerate(int n, int r, std::uint64_t cap, std::uint64_t seed, const Output& out) {
    std::ostringstream csv;
    csv << "index";
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) csv << ",e_" << i << "_" << j;
    csv << ",spectrum\n";

    json rows = json::array();
    std::uint64_t index = 0;
    magsq::for_each_matrix(n, r, [&](const magsq::MagicalSquare& sq) {
        auto grid = sq.dense();
        auto spec = magsq::spectrum_of(sq);
        csv << index;
        for (const auto& row : grid)
            for (int v : row) csv << "," << v;
        csv << ",\"";
        for (std::size_t i = 0; i < spec.counts.size(); ++i)
            csv << (i ? " " : "") << spec.counts[i];
        csv << "\"\n";
        rows.push_back({{"index", index}, {"entries", grid}, {"spectrum", spec.counts}});
        ++index;
        return true;
    }, cap);

    json payload;
    payload["meta"] = meta_block("enumerate", {{"n", n}, {"r", r}, {"cap", cap}}, seed);
    payload["count"] = index;
    payload["matrices"] = std::move(rows);
    out.emit(csv.str(), payload);
    return 0;
}

int cmd_spectrum_pmf(int n, int r, const std::string& stat, std::uint64_t cap, std::uint64_t seed,
                     const Output& out) {
    magsq::Statistic which;
    int chi_index = 1;
    if (stat == "S" || stat == "smallest")
        which = magsq::Statistic::Smallest;
    else if (stat == "L" || stat == "largest")
        which = magsq::Statistic::Largest;
    else if (stat == "C" || stat == "components")
        which = magsq::Statistic::Components;
    else if (stat.rfind("chi_", 0) == 0) {
        which = magsq::Statistic::Chi;
        chi_index = std::stoi(stat.substr(4));
    } else
        throw CLI::ValidationError("--stat", "expected S, L, C or chi_k");

    magsq::PmfTable pmf = magsq::exact_statistic_pmf(n, r, which, chi_index, cap);
    std::ostringstream csv;
    csv << "value,prob,prob_decimal\n";
    json rows = json::array();
    for (std::size_t i = 0; i < pmf.support.size(); ++i) {
        csv << pmf.support[i] << "," << pmf.probs[i].get_str() << ","
            << double_str(pmf.probs[i].get_d()) << "\n";
        rows.push_back({{"value", pmf.support[i]},
                        {"prob", pmf.probs[i].get_str()},
                        {"prob_decimal", pmf.probs[i].get_d()}});
    }
    json payload;
    payload["meta"] = meta_block("spectrum-pmf", {{"n", n}, {"r", r}, {"stat", stat}, {"cap", cap}},
                                 seed);
    payload["pmf"] = std::move(rows);
    payload["mean"] = pmf.mean().get_str();
    out.emit(csv.str(), payload);
    return 0;
}

int cmd_sample(int n, std::uint64_t count, std::uint64_t seed, std::uint64_t trial_cap,
               const Output& out) {
    magsq::RngStream rng(seed);
    std::ostringstream csv;
    csv << "index,trials,spectrum\n";
    json rows = json::array();
    for (std::uint64_t i = 0; i < count; ++i) {
        auto [square, trials] = magsq::rejection_sample_uniform(n, rng, trial_cap);
        auto spec = magsq::spectrum_of(square);
        csv << i << "," << trials << ",\"";
        for (std::size_t k = 0; k < spec.counts.size(); ++k)
            csv << (k ? " " : "") << spec.counts[k];
        csv << "\"\n";
        json entries = json::array();
        for (const auto& [pos, v] : square.entries)
            entries.push_back({pos.first, pos.second, v});
        rows.push_back({{"index", i}, {"trials", trials}, {"entries", entries},
                        {"spectrum", spec.counts}});
    }
    json payload;
    payload["meta"] =
        meta_block("sample", {{"n", n}, {"r", 2}, {"N", count}, {"trial_cap", trial_cap}}, seed);
    payload["samples"] = std::move(rows);
    out.emit(csv.str(), payload);
    return 0;
}

// an exact side-by-side value is printed whenever full enumeration is cheap
constexpr std::uint64_t kSideBySideCap = 250000;

int cmd_estimate(const std::string& stat_name, int n, std::uint64_t N, std::uint64_t seed,
                 int threads, const Output& out) {
    magsq::StatisticSpec spec = magsq::StatisticSpec::parse(stat_name);

    // exact H(n,2) is cheap to carry along for moderate n
    std::optional<mpz_class> h_value;
    if (n <= 8192) {
        h_value = magsq::h_r2_table(n)[static_cast<std::size_t>(n)];
    }
    magsq::EstimateReport report =
        magsq::importance_estimate_sharded(spec.evaluator(n), n, N, seed, threads, h_value);

    std::optional<mpq_class> exact;
    if (n <= 8 && magsq::transfer_count_h(n, 2) <= kSideBySideCap) {
        mpq_class acc(0);
        mpz_class total(0);
        for (const auto& [counts, cnt] : magsq::spectrum_histogram(n, 2, kSideBySideCap)) {
            magsq::ComponentSpectrum s;
            s.n = n;
            s.counts = counts;
            mpq_class term = spec.exact_value(s) * mpq_class(cnt);
            acc += term;
            total += cnt;
        }
        acc /= mpq_class(total);
        acc.canonicalize();
        exact = acc;
    }

    std::ostringstream csv;
    csv << "stat,n,N,seed,self_normalized,raw_estimate,ess,ess_ratio,exact\n";
    csv << stat_name << "," << n << "," << N << "," << seed << ","
        << double_str(report.self_normalized()) << ",";
    if (auto raw = report.raw_estimate()) csv << double_str(*raw);
    csv << "," << double_str(report.ess()) << ","
        << double_str(report.ess() / static_cast<double>(N)) << ",";
    if (exact) csv << exact->get_str();
    csv << "\n";

    json payload;
    payload["meta"] = meta_block(
        "estimate", {{"stat", stat_name}, {"n", n}, {"N", N}, {"threads", threads}}, seed);
    payload["report"] = json::parse(report.to_json());
    if (exact) {
        payload["exact"] = {{"value", exact->get_str()}, {"decimal", exact->get_d()}};
    }
    out.emit(csv.str(), payload);
    return 0;
}

int cmd_limits(const std::string& law, int n, int r, int max_value, int m_order, double y,
               std::uint64_t seed, const Output& out) {
    std::ostringstream csv;
    json payload;
    payload["meta"] = meta_block("limits", {{"stat", law}, {"n", n}, {"r", r}}, seed);
    json rows = json::array();

    if (law == "poisson") {
        csv << "i,rate,k,pmf\n";
        for (int i = 1; i <= std::max(1, max_value); ++i) {
            for (int k = 0; k <= 8; ++k) {
                const double p = magsq::poisson_limit_pmf(i, k, r);
                csv << i << "," << double_str(magsq::poisson_limit_rate(i, r)) << "," << k << ","
                    << double_str(p) << "\n";
                rows.push_back({{"i", i}, {"k", k}, {"pmf", p}});
            }
        }
    } else if (law == "smallest") {
        csv << "k,pmf,survival\n";
        for (int k = 1; k <= std::max(1, max_value); ++k) {
            const double p = magsq::smallest_limit_pmf(k);
            const double s = magsq::smallest_limit_survival(k);
            csv << k << "," << double_str(p) << "," << double_str(s) << "\n";
            rows.push_back({{"k", k}, {"pmf", p}, {"survival", s}});
        }
    } else if (law == "clt") {
        csv << "n,c,z,cdf\n";
        for (int c = 0; c <= std::max(1, max_value); ++c) {
            auto ref = magsq::clt_reference(n, c);
            csv << n << "," << c << "," << double_str(ref.z) << "," << double_str(ref.cdf) << "\n";
            rows.push_back({{"n", n}, {"c", c}, {"z", ref.z}, {"cdf", ref.cdf}});
        }
    } else if (law == "largest-moments") {
        csv << "m,value,abs_error_bound,evaluations\n";
        for (int m = 1; m <= std::max(1, m_order); ++m) {
            auto q = magsq::largest_moment_limit(m);
            csv << m << "," << double_str(q.value) << "," << double_str(q.abs_error_bound) << ","
                << q.evaluations << "\n";
            rows.push_back({{"m", m},
                            {"value", q.value},
                            {"abs_error_bound", q.abs_error_bound},
                            {"evaluations", q.evaluations}});
        }
    } else if (law == "h-asymp") {
        csv << "n,r,log_factorial_form,log_stirling_form\n";
        auto a = magsq::h_asymptotic(n, r);
        csv << n << "," << r << "," << double_str(a.log_factorial_form) << ","
            << double_str(a.log_stirling_form) << "\n";
        rows.push_back({{"n", n},
                        {"r", r},
                        {"log_factorial_form", a.log_factorial_form},
                        {"log_stirling_form", a.log_stirling_form}});
    } else if (law == "e1") {
        csv << "y,value\n";
        const double v = magsq::exp_integral(y);
        csv << double_str(y) << "," << double_str(v) << "\n";
        rows.push_back({{"y", y}, {"value", v}});
    } else {
        throw CLI::ValidationError("--stat",
                                   "expected poisson, smallest, clt, largest-moments, h-asymp or e1");
    }
    payload["rows"] = std::move(rows);
    out.emit(csv.str(), payload);
    return 0;
}

int cmd_verify(const std::string& suite, double budget, std::uint64_t seed, int threads,
               const std::string& cache_path, const Output& out) {
    magsq::verify::Options options;
    options.budget_seconds = budget;
    options.seed = seed;
    options.threads = threads;
    if (!cache_path.empty()) options.cache_path = cache_path;

    auto results = magsq::verify::run_suite(suite, options);

    std::ostringstream text;
    json rows = json::array();
    for (const auto& r : results) {
        const char* status = r.status == magsq::verify::CheckResult::Status::Pass   ? "PASS"
                             : r.status == magsq::verify::CheckResult::Status::Fail ? "FAIL"
                                                                                    : "SKIP";
        text << status << " " << r.id << " " << r.name << " (" << double_str(r.seconds) << "s): "
             << r.detail << "\n";
        rows.push_back({{"id", r.id},
                        {"name", r.name},
                        {"status", status},
                        {"detail", r.detail},
                        {"seconds", r.seconds}});
    }
    json payload;
    payload["meta"] = meta_block(
        "verify", {{"suite", suite}, {"budget", budget}, {"threads", threads}}, seed);
    payload["checks"] = std::move(rows);
    payload["passed"] = magsq::verify::all_passed(results);

    if (out.format == "json")
        out.emit("", payload);
    else
        out.emit(text.str(), payload);
    return magsq::verify::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"magsq: exact counts, uniform samples and limit laws for magical squares "
                 "(nonnegative integer matrices with constant line sums)"};
    app.require_subcommand(1);

    std::string format = "csv", out_path, cache_path;
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", out_path, "write output to this path instead of stdout");

    int n = 1, r = 2, threads = 1, max_value = 10, m_order = 2;
    std::uint64_t N = 1000, seed = 12345, enum_cap = magsq::kDefaultEnumCap,
                  trial_cap = magsq::kDefaultTrialCap;
    app.add_option("--seed", seed, "rng seed, recorded in every output")->envname("MAGSQ_SEED");
    double budget = 1e18, y = 1.0;
    std::string stat = "components", suite = "all";

    auto add_common = [&](CLI::App* cmd, bool wants_r) {
        cmd->fallthrough();  // let --format/--out appear after the subcommand
        cmd->add_option("--n", n, "dimension")->required();
        if (wants_r) cmd->add_option("--r", r, "line sum (default 2)");
    };

    auto* c_count = app.add_subcommand("count", "exact H(n,r), f(n,r) and their ratio for 1..n");
    add_common(c_count, true);
    c_count->add_option("--cache", cache_path, "JSON cache file for exact count tables");

    auto* c_enum = app.add_subcommand("enumerate", "list every matrix in M(n,r) with its spectrum");
    add_common(c_enum, true);
    c_enum->add_option("--cap", enum_cap, "refuse when H(n,r) exceeds this");

    auto* c_pmf = app.add_subcommand("spectrum-pmf",
                                     "exact pmf of S, L, C or chi_k under Uniform(M(n,r))");
    add_common(c_pmf, true);
    c_pmf->add_option("--stat", stat, "S, L, C or chi_k")->required();
    c_pmf->add_option("--cap", enum_cap, "refuse when H(n,r) exceeds this");

    auto* c_sample = app.add_subcommand("sample", "exactly uniform samples from M(n,2) by rejection");
    add_common(c_sample, false);
    c_sample->add_option("--N", N, "number of samples");
    c_sample->add_option("--seed", seed, "rng seed")->envname("MAGSQ_SEED");
    c_sample->add_option("--trial-cap", trial_cap, "abort after this many rejected proposals");

    auto* c_est = app.add_subcommand(
        "estimate", "importance-sampling estimate of a spectrum statistic under Uniform(M(n,2))");
    add_common(c_est, false);
    c_est->add_option("--stat", stat,
                      "chi_k | smallest | largest | components | largest_frac_moment_m, "
                      "or an indicator like smallest=1")
        ->required();
    c_est->add_option("--N", N, "sample count");
    c_est->add_option("--seed", seed, "rng seed")->envname("MAGSQ_SEED");
    c_est->add_option("--threads", threads, "worker threads (results do not depend on this)");

    auto* c_lim = app.add_subcommand("limits", "evaluate the limiting laws");
    c_lim->fallthrough();
    c_lim->add_option("--stat", stat, "poisson | smallest | clt | largest-moments | h-asymp | e1")
        ->required();
    c_lim->add_option("--n", n, "dimension (clt, h-asymp)");
    c_lim->add_option("--r", r, "line sum");
    c_lim->add_option("--max", max_value, "table size (poisson, smallest, clt)");
    c_lim->add_option("--m", m_order, "highest moment order (largest-moments)");
    c_lim->add_option("--y", y, "argument for e1");

    auto* c_ver = app.add_subcommand("verify", "run the identity/limit check suites");
    c_ver->fallthrough();
    c_ver->add_option("--suite", suite, "identities | limits | all")
        ->check(CLI::IsMember({"identities", "limits", "all"}));
    c_ver->add_option("--budget", budget, "skip checks whose estimated seconds exceed this");
    c_ver->add_option("--seed", seed, "rng seed")->envname("MAGSQ_SEED");
    c_ver->add_option("--threads", threads, "worker threads (results do not depend on this)");
    c_ver->add_option("--cache", cache_path, "also recheck this count cache against recomputation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Output out{format, out_path};
    const auto start = std::chrono::steady_clock::now();
    int rc = 2;
    try {
        if (*c_count)
            rc = cmd_count(n, r, cache_path, seed, out);
        else if (*c_enum)
            rc = cmd_enumerate(n, r, enum_cap, seed, out);
        else if (*c_pmf)
            rc = cmd_spectrum_pmf(n, r, stat, enum_cap, seed, out);
        else if (*c_sample)
            rc = cmd_sample(n, N, seed, trial_cap, out);
        else if (*c_est)
            rc = cmd_estimate(stat, n, N, seed, threads, out);
        else if (*c_lim)
            rc = cmd_limits(stat, n, r, max_value, m_order, y, seed, out);
        else if (*c_ver)
            rc = cmd_verify(suite, budget, seed, threads, cache_path, out);
    } catch (const magsq::ResourceCapError& e) {
        std::cerr << "magsq: resource cap: " << e.what() << "\n";
        return 3;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "magsq: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "magsq: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "magsq: error: " << e.what() << "\n";
        return 1;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "magsq: wall clock " << elapsed << " s\n";
    return rc;
}
