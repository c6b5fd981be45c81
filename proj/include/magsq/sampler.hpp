#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "magsq/enumerate.hpp"
#include "magsq/permutation.hpp"
#include "magsq/rng.hpp"

namespace magsq {

/// Edge-colored 2-regular bipartite graph on 2n vertices: one blue and one
/// red perfect matching, i.e. an ordered pair of permutations.
struct ColoredGraph {
    Permutation blue;
    Permutation red;
};

/// Two independent uniform permutations; equivalently a uniform element of
/// the (n!)^2 colored graphs. Blue is drawn first.
ColoredGraph sample_colored(int n, RngStream& rng);

/// Deletes the coloring: matrix with a_ij = [blue(i)=j] + [red(i)=j]. The
/// spectrum is read off the cycles of red o blue^{-1} and always matches
/// spectrum_of() on the matrix.
std::pair<MagicalSquare, ComponentSpectrum> project(const ColoredGraph& g);

/// Importance weight 2^{-(C - a_1)}: the reciprocal number of colorings of
/// the underlying uncolored graph. Exponent and dyadic value variants.
int weight_exponent(const ComponentSpectrum& spectrum);
double weight(const ComponentSpectrum& spectrum);
mpq_class weight_exact(const ComponentSpectrum& spectrum);

/// Per-sample view handed to spectrum statistics. The summary fields are
/// maintained by the sampling loop, so statistics run in O(1) on top of the
/// O(n) cycle scan.
struct SpectrumView {
    const ComponentSpectrum& spectrum;
    int cycles;        // C
    int fixed_points;  // a_1
    int min_size;      // S
    int max_size;      // L
};

using SpectrumStatistic = std::function<double(const SpectrumView&)>;

/// Streams N spectra of red o blue^{-1} for independent uniform pairs on
/// [n]. This is the hot loop every estimator shares; the matrix is never
/// materialized.
void sample_spectra(int n, std::uint64_t N, RngStream& rng,
                    const std::function<void(const SpectrumView&)>& visit);

/// Compensated (Neumaier) accumulator; merging adds sums and compensations,
/// so sharded runs reduce associatively.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x);
    void merge(const KahanSum& other);
    double value() const { return sum + comp; }
};

/// Output of one importance-sampling run. Mergeable: sums add; the derived
/// quantities (estimate, self-normalized value, ESS) are recomputed on read.
struct EstimateReport {
    int n = 0;
    std::uint64_t sample_count = 0;
    KahanSum weighted_sum;   // sum h_i w_i
    KahanSum weight_sum;     // sum w_i
    KahanSum weight_sq_sum;  // sum w_i^2
    std::uint64_t seed = 0;
    bool has_normalizer = false;
    double beta = 0.0;  // H(n,2)/(n!)^2 when supplied

    double self_normalized() const;
    std::optional<double> raw_estimate() const;  // needs the normalizer
    double ess() const;                          // (sum w)^2 / sum w^2
    void merge(const EstimateReport& other);
    std::string to_json() const;  // sums as decimal strings, seed included
};

/// Importance sampling for the uniform law on M(n, 2): draw permutation
/// pairs, weight by 2^{-(C - a_1)}. The raw estimate (1/N)(n!)^2/H * sum h w
/// needs the exact H(n, 2); the self-normalized ratio sum h w / sum w never
/// does.
EstimateReport importance_estimate(const SpectrumStatistic& h, int n, std::uint64_t N,
                                   RngStream& rng, const std::optional<mpz_class>& h_value = {});

/// Same estimator sharded over a fixed number of logical streams (64), so
/// the result is byte-identical for every thread count.
EstimateReport importance_estimate_sharded(const SpectrumStatistic& h, int n, std::uint64_t N,
                                           std::uint64_t seed, int threads,
                                           const std::optional<mpz_class>& h_value = {});

inline constexpr std::uint64_t kDefaultTrialCap = 1000000;

/// Exactly uniform sample from M(n, 2): accept a projected colored graph
/// with probability equal to its weight (a fair-coin cascade, no floating
/// point). Expected trials (n!)^2/H(n,2) ~ sqrt(pi n / e).
std::pair<MagicalSquare, std::uint64_t> rejection_sample_uniform(
    int n, RngStream& rng, std::uint64_t trial_cap = kDefaultTrialCap);

}  // namespace magsq
