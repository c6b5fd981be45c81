#include "magsq/sampler.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include "json.hpp"

#include "magsq/errors.hpp"

namespace magsq {

ColoredGraph sample_colored(int n, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("sample_colored: n must be >= 1");
    Permutation blue = sample_uniform_permutation(n, rng);
    Permutation red = sample_uniform_permutation(n, rng);
    return ColoredGraph{std::move(blue), std::move(red)};
}

std::pair<MagicalSquare, ComponentSpectrum> project(const ColoredGraph& g) {
    const int n = g.blue.size();
    if (g.red.size() != n) throw std::invalid_argument("project: blue/red size mismatch");
    MagicalSquare sq;
    sq.n = n;
    sq.r = 2;
    for (int i = 1; i <= n; ++i) {
        sq.entries[{i, g.blue.image(i)}] += 1;
        sq.entries[{i, g.red.image(i)}] += 1;
    }
    sq.validate();
    ComponentSpectrum spec = cycle_type(compose_with_inverse(g.red, g.blue));
    return {std::move(sq), std::move(spec)};
}

int weight_exponent(const ComponentSpectrum& spectrum) {
    return spectrum.nontrivial();
}

double weight(const ComponentSpectrum& spectrum) {
    return std::ldexp(1.0, -weight_exponent(spectrum));
}

mpq_class weight_exact(const ComponentSpectrum& spectrum) {
    mpq_class w(1);
    w /= mpz_class(1) << static_cast<unsigned>(weight_exponent(spectrum));
    return w;
}

void sample_spectra(int n, std::uint64_t N, RngStream& rng,
                    const std::function<void(const SpectrumView&)>& visit) {
    if (n < 1) throw std::invalid_argument("sample_spectra: n must be >= 1");
    const auto un = static_cast<std::size_t>(n);
    std::vector<int> blue(un), red(un), binv(un);
    std::vector<std::uint64_t> mark(un, 0);
    std::uint64_t stamp = 0;

    ComponentSpectrum spec;
    spec.n = n;
    spec.counts.assign(un, 0);
    std::vector<int> touched;  // cycle lengths to zero out after each sample

    for (std::uint64_t it = 0; it < N; ++it) {
        std::iota(blue.begin(), blue.end(), 0);
        for (int i = n - 1; i > 0; --i)
            std::swap(blue[static_cast<std::size_t>(i)], blue[rng.below(static_cast<std::uint64_t>(i) + 1)]);
        std::iota(red.begin(), red.end(), 0);
        for (int i = n - 1; i > 0; --i)
            std::swap(red[static_cast<std::size_t>(i)], red[rng.below(static_cast<std::uint64_t>(i) + 1)]);

        for (int i = 0; i < n; ++i) binv[static_cast<std::size_t>(blue[static_cast<std::size_t>(i)])] = i;

        // cycles of sigma(j) = red[binv[j]]
        ++stamp;
        int cycles = 0, fixed = 0, min_size = n, max_size = 1;
        for (int j = 0; j < n; ++j) {
            if (mark[static_cast<std::size_t>(j)] == stamp) continue;
            int len = 0, k = j;
            do {
                mark[static_cast<std::size_t>(k)] = stamp;
                k = red[static_cast<std::size_t>(binv[static_cast<std::size_t>(k)])];
                ++len;
            } while (k != j);
            ++cycles;
            if (len == 1) ++fixed;
            if (len < min_size) min_size = len;
            if (len > max_size) max_size = len;
            if (spec.counts[static_cast<std::size_t>(len) - 1]++ == 0) touched.push_back(len);
        }

        visit(SpectrumView{spec, cycles, fixed, min_size, max_size});

        for (int len : touched) spec.counts[static_cast<std::size_t>(len) - 1] = 0;
        touched.clear();
    }
}

void KahanSum::add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
        comp += (sum - t) + x;
    else
        comp += (x - t) + sum;
    sum = t;
}

void KahanSum::merge(const KahanSum& other) {
    add(other.sum);
    comp += other.comp;
}

double EstimateReport::self_normalized() const {
    return weighted_sum.value() / weight_sum.value();
}

std::optional<double> EstimateReport::raw_estimate() const {
    if (!has_normalizer) return std::nullopt;
    return weighted_sum.value() / (static_cast<double>(sample_count) * beta);
}

double EstimateReport::ess() const {
    const double w = weight_sum.value();
    return w * w / weight_sq_sum.value();
}

void EstimateReport::merge(const EstimateReport& other) {
    if (n == 0) {
        *this = other;
        return;
    }
    if (other.n != n) throw std::invalid_argument("EstimateReport::merge: dimension mismatch");
    sample_count += other.sample_count;
    weighted_sum.merge(other.weighted_sum);
    weight_sum.merge(other.weight_sum);
    weight_sq_sum.merge(other.weight_sq_sum);
}

namespace {

std::string double_str(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string EstimateReport::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["sample_count"] = sample_count;
    j["raw_weighted_sum"] = double_str(weighted_sum.value());
    j["weight_sum"] = double_str(weight_sum.value());
    j["weight_sq_sum"] = double_str(weight_sq_sum.value());
    j["self_normalized"] = double_str(self_normalized());
    if (auto raw = raw_estimate())
        j["estimate"] = double_str(*raw);
    else
        j["estimate"] = nullptr;
    j["ess"] = double_str(ess());
    j["ess_ratio"] = double_str(ess() / static_cast<double>(sample_count));
    j["seed"] = std::to_string(seed);
    return j.dump();
}

EstimateReport importance_estimate(const SpectrumStatistic& h, int n, std::uint64_t N,
                                   RngStream& rng, const std::optional<mpz_class>& h_value) {
    if (N < 1) throw std::invalid_argument("importance_estimate: N must be >= 1");
    EstimateReport rep;
    rep.n = n;
    rep.sample_count = N;
    rep.seed = rng.seed();
    sample_spectra(n, N, rng, [&](const SpectrumView& view) {
        const double w = std::ldexp(1.0, -(view.cycles - view.fixed_points));
        rep.weighted_sum.add(h(view) * w);
        rep.weight_sum.add(w);
        rep.weight_sq_sum.add(w * w);
    });
    if (h_value) {
        mpz_class fac = factorial(n);
        mpq_class beta(*h_value, fac * fac);
        beta.canonicalize();
        rep.has_normalizer = true;
        rep.beta = beta.get_d();
    }
    return rep;
}

EstimateReport importance_estimate_sharded(const SpectrumStatistic& h, int n, std::uint64_t N,
                                           std::uint64_t seed, int threads,
                                           const std::optional<mpz_class>& h_value) {
    if (N < 1) throw std::invalid_argument("importance_estimate_sharded: N must be >= 1");
    // shard count is a function of N alone, so results do not depend on the
    // number of worker threads
    const std::uint64_t shards = std::min<std::uint64_t>(N, 64);
    std::vector<EstimateReport> parts(shards);
    std::atomic<std::uint64_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const std::uint64_t i = cursor.fetch_add(1);
            if (i >= shards) return;
            const std::uint64_t n_i = N / shards + (i < N % shards ? 1 : 0);
            RngStream rng(seed, i + 1);
            parts[i] = importance_estimate(h, n, n_i, rng, std::nullopt);
        }
    };
    const int t = std::max(1, std::min<int>(threads, static_cast<int>(shards)));
    std::vector<std::thread> pool;
    for (int k = 1; k < t; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    EstimateReport total;
    for (const auto& part : parts) total.merge(part);
    total.seed = seed;
    if (h_value) {
        mpz_class fac = factorial(n);
        mpq_class beta(*h_value, fac * fac);
        beta.canonicalize();
        total.has_normalizer = true;
        total.beta = beta.get_d();
    }
    return total;
}

std::pair<MagicalSquare, std::uint64_t> rejection_sample_uniform(int n, RngStream& rng,
                                                                 std::uint64_t trial_cap) {
    if (n < 1) throw std::invalid_argument("rejection_sample_uniform: n must be >= 1");
    for (std::uint64_t trial = 1; trial <= trial_cap; ++trial) {
        ColoredGraph g = sample_colored(n, rng);
        CycleType type = cycle_type(compose_with_inverse(g.red, g.blue));
        int k = weight_exponent(type);
        // accept with probability 2^{-k}: k fair bits, all must be zero
        bool accept = true;
        while (k > 0) {
            const int take = k > 64 ? 64 : k;
            const std::uint64_t word = rng.next_u64();
            if (take == 64 ? word != 0 : (word >> (64 - take)) != 0) {
                accept = false;
                break;
            }
            k -= take;
        }
        if (accept) {
            auto [square, spec] = project(g);
            (void)spec;
            return {std::move(square), trial};
        }
    }
    throw ResourceCapError("rejection_sample_uniform: no acceptance within " +
                           std::to_string(trial_cap) + " trials");
}

}  // namespace magsq
