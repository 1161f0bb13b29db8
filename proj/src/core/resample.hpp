#pragma once

#include "core/counts.hpp"
#include "core/measures.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace degreescope::resampling {

struct BootstrapConfig {
    uint64_t iterations = 1000;
    uint64_t base_seed = 42; // iteration i uses seed base_seed + i
    double percentile_low = 2.5;
    double percentile_high = 97.5;
};

struct MeasureResult {
    double value = 0.0;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    double alpha = 0.0; // smoothing used by the statistic, for provenance
    std::optional<uint64_t> seed;
    std::optional<uint64_t> iterations;
};

using Statistic = std::function<double(const counts::CountProfile&)>;

// Piece-level bootstrap percentile interval. Iteration i draws
// |pieces| indices with replacement from a generator seeded base_seed + i,
// aggregates the drawn profiles and evaluates the statistic; the interval is
// the linear-interpolation percentile over the sorted replicate values. The
// point estimate is the statistic on the full sample. Replicate evaluation
// order never affects the result. Throws config_error on an empty list.
MeasureResult bootstrap_ci(const std::vector<counts::CountProfile>& pieces,
                           const Statistic& statistic,
                           const BootstrapConfig& cfg, double alpha);

// Same resampling schedule evaluating several statistics on each replicate
// aggregate, so a whole matrix row can share one draw sequence. Entry k of
// the result corresponds to statistics[k]; NaN replicate values are dropped
// from that statistic's percentile computation.
std::vector<MeasureResult> bootstrap_ci_many(
    const std::vector<counts::CountProfile>& pieces,
    const std::vector<Statistic>& statistics, const BootstrapConfig& cfg,
    double alpha);

// Linear interpolation between closest order statistics (inclusive) over a
// sorted sample; q in [0, 100].
double percentile(const std::vector<double>& sorted_values, double q);

enum class Basis { marginal, transitions };

// Flattened counts on the chosen basis (15 marginal cells or 225 row-major
// transition cells).
std::vector<uint64_t> basis_counts(const counts::CountProfile& profile,
                                   Basis basis);

struct RobustnessRow {
    // rho[i][j] = Spearman correlation between the row's KL orderings at
    // alphas[i] and alphas[j].
    std::vector<std::vector<double>> rho;
    double min_rho = 1.0; // minimum over distinct alpha pairs
};

// Marginal-KL-ordering stability under the smoothing parameter. For each
// composer row the orderings of all other composers are compared across
// every alpha pair. Throws config_error with fewer than 2 composers or
// fewer than 2 alphas.
std::map<std::string, RobustnessRow> smoothing_robustness(
    const std::map<std::string, counts::CountProfile>& corpus,
    const std::vector<double>& alphas);

// Per-row Spearman rho between the symmetrized-KL ordering and the JS
// ordering over all other composers. Throws config_error with fewer than 3
// composers. Rows whose orderings carry no rank variance map to nullopt.
std::map<std::string, std::optional<double>> kl_js_crosscheck(
    const std::map<std::string, counts::CountProfile>& corpus, double alpha);

struct EraAssignment {
    std::string era; // argmin-KL era, ties broken by name ascending
    std::map<std::string, double> kl_bits;
};

EraAssignment era_assignment(const counts::CountProfile& artist,
                             const std::vector<counts::EraPool>& pools,
                             double alpha, Basis basis);

struct ConcordanceReport {
    std::string artist;
    std::string full_sample_argmin_era_marginal;
    std::string full_sample_argmin_era_transitions;
    double concordance_marginal = 0.0;
    double concordance_transitions = 0.0;
    uint64_t n_subsamples = 0;
};

// Sensitivity of the era assignment to pool size. Subsample s draws, from a
// generator seeded base_seed + s, target_size pieces without replacement
// from every pool larger than target_size (pools are visited in input
// order); pools at or below target_size are kept whole. Concordance is the
// fraction of subsamples whose argmin era matches the full-sample argmin,
// reported for both bases. Throws config_error when target_size exceeds
// every pool.
ConcordanceReport subsample_concordance(
    const counts::CountProfile& artist,
    const std::vector<counts::EraPool>& pools, uint64_t target_size,
    uint64_t n_subsamples, uint64_t base_seed, double alpha,
    const std::string& artist_name = {});

struct CrossCheckResult {
    double rho = 0.0;
    double p_value = 1.0;
};

// Spearman rho between an ascending-KL ranking of targets and a
// descending-cosine ranking against the artist's feature vector, with the
// two-sided t-approximation p-value. Throws config_error when the target
// sets differ, vectors mismatch in length, or there are fewer than 3
// targets.
CrossCheckResult kl_cosine_crosscheck(
    const std::map<std::string, double>& kl_ranking,
    const std::map<std::string, std::vector<double>>& feature_vectors,
    const std::vector<double>& artist_vector);

} // namespace degreescope::resampling
