#include "core/resample.hpp"

#include "core/errors.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>

namespace degreescope::resampling {

using counts::CountProfile;
using measures::SmoothedDistribution;

double percentile(const std::vector<double>& sorted_values, double q) {
    if (sorted_values.empty())
        throw config_error("percentile of an empty sample");
    const double h = (static_cast<double>(sorted_values.size()) - 1.0) * q / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted_values.size()) return sorted_values.back();
    const double frac = h - static_cast<double>(lo);
    return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

std::vector<uint64_t> basis_counts(const CountProfile& profile, Basis basis) {
    if (basis == Basis::marginal)
        return {profile.marginal.begin(), profile.marginal.end()};
    return {profile.transitions.begin(), profile.transitions.end()};
}

std::vector<MeasureResult> bootstrap_ci_many(
    const std::vector<CountProfile>& pieces,
    const std::vector<Statistic>& statistics, const BootstrapConfig& cfg,
    double alpha) {
    if (pieces.empty())
        throw config_error("bootstrap over an empty piece list");
    if (cfg.iterations < 1) throw config_error("bootstrap needs B >= 1");
    if (!(cfg.percentile_low < cfg.percentile_high) ||
        cfg.percentile_low <= 0.0 || cfg.percentile_high >= 100.0)
        throw config_error("bootstrap percentiles must satisfy 0 < low < high < 100");

    const CountProfile full = counts::aggregate(pieces);
    std::vector<MeasureResult> results(statistics.size());
    for (std::size_t k = 0; k < statistics.size(); ++k) {
        results[k].value = statistics[k](full);
        results[k].alpha = alpha;
        results[k].seed = cfg.base_seed;
        results[k].iterations = cfg.iterations;
    }

    const std::size_t n = pieces.size();
    std::vector<std::vector<double>> replicate_values(
        statistics.size(), std::vector<double>(cfg.iterations));
    std::vector<CountProfile> draw(n);
    for (uint64_t i = 0; i < cfg.iterations; ++i) {
        Xoshiro256ss rng(cfg.base_seed + i);
        for (std::size_t j = 0; j < n; ++j) draw[j] = pieces[rng.bounded(n)];
        const CountProfile agg = counts::aggregate(draw);
        for (std::size_t k = 0; k < statistics.size(); ++k)
            replicate_values[k][i] = statistics[k](agg);
    }

    for (std::size_t k = 0; k < statistics.size(); ++k) {
        auto& vals = replicate_values[k];
        vals.erase(std::remove_if(vals.begin(), vals.end(),
                                  [](double v) { return std::isnan(v); }),
                   vals.end());
        if (vals.empty()) continue; // every replicate undefined: no interval
        std::sort(vals.begin(), vals.end());
        results[k].ci_low = percentile(vals, cfg.percentile_low);
        results[k].ci_high = percentile(vals, cfg.percentile_high);
    }
    return results;
}

MeasureResult bootstrap_ci(const std::vector<CountProfile>& pieces,
                           const Statistic& statistic,
                           const BootstrapConfig& cfg, double alpha) {
    return bootstrap_ci_many(pieces, {statistic}, cfg, alpha).front();
}

namespace {

// KL matrix over the composers' smoothed marginals at one alpha.
std::vector<std::vector<double>> kl_matrix(
    const std::vector<const CountProfile*>& profiles, double alpha,
    Basis basis) {
    const std::size_t n = profiles.size();
    std::vector<SmoothedDistribution> dists;
    dists.reserve(n);
    for (const auto* p : profiles) {
        const auto c = basis_counts(*p, basis);
        dists.push_back(measures::smooth(c, alpha));
    }
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b) m[a][b] = measures::kl_divergence(dists[a], dists[b]);
    return m;
}

std::vector<double> row_without_diagonal(
    const std::vector<std::vector<double>>& m, std::size_t row) {
    std::vector<double> out;
    out.reserve(m.size() - 1);
    for (std::size_t b = 0; b < m.size(); ++b)
        if (b != row) out.push_back(m[row][b]);
    return out;
}

} // namespace

std::map<std::string, RobustnessRow> smoothing_robustness(
    const std::map<std::string, CountProfile>& corpus,
    const std::vector<double>& alphas) {
    if (corpus.size() < 2)
        throw config_error("smoothing robustness needs at least 2 composers");
    if (alphas.size() < 2)
        throw config_error("smoothing robustness needs at least 2 alphas");

    std::vector<const CountProfile*> profiles;
    std::vector<std::string> names;
    for (const auto& [name, p] : corpus) {
        names.push_back(name);
        profiles.push_back(&p);
    }

    std::vector<std::vector<std::vector<double>>> matrices;
    matrices.reserve(alphas.size());
    for (double a : alphas)
        matrices.push_back(kl_matrix(profiles, a, Basis::marginal));

    std::map<std::string, RobustnessRow> out;
    for (std::size_t r = 0; r < names.size(); ++r) {
        RobustnessRow row;
        row.rho.assign(alphas.size(), std::vector<double>(alphas.size(), 1.0));
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            for (std::size_t j = i + 1; j < alphas.size(); ++j) {
                const auto xi = row_without_diagonal(matrices[i], r);
                const auto xj = row_without_diagonal(matrices[j], r);
                // A single-opponent row or an all-tied row has no rank
                // variance; the ordering is vacuously stable.
                double rho = 1.0;
                if (xi.size() >= 2) {
                    const auto s = measures::spearman_rho(xi, xj);
                    if (s) rho = *s;
                }
                row.rho[i][j] = row.rho[j][i] = rho;
                row.min_rho = std::min(row.min_rho, rho);
            }
        }
        out.emplace(names[r], std::move(row));
    }
    return out;
}

std::map<std::string, std::optional<double>> kl_js_crosscheck(
    const std::map<std::string, CountProfile>& corpus, double alpha) {
    if (corpus.size() < 3)
        throw config_error("kl/js cross-check needs at least 3 composers");

    std::vector<std::string> names;
    std::vector<SmoothedDistribution> dists;
    for (const auto& [name, p] : corpus) {
        names.push_back(name);
        dists.push_back(measures::smooth(
            basis_counts(p, Basis::marginal), alpha));
    }

    std::map<std::string, std::optional<double>> out;
    for (std::size_t a = 0; a < names.size(); ++a) {
        std::vector<double> sym_kl, js;
        for (std::size_t b = 0; b < names.size(); ++b) {
            if (b == a) continue;
            sym_kl.push_back(0.5 * (measures::kl_divergence(dists[a], dists[b]) +
                                    measures::kl_divergence(dists[b], dists[a])));
            js.push_back(measures::js_divergence(dists[a], dists[b]));
        }
        out.emplace(names[a], measures::spearman_rho(sym_kl, js));
    }
    return out;
}

EraAssignment era_assignment(const CountProfile& artist,
                             const std::vector<counts::EraPool>& pools,
                             double alpha, Basis basis) {
    if (pools.empty()) throw config_error("era assignment needs >= 1 pool");
    const auto artist_dist =
        measures::smooth(basis_counts(artist, basis), alpha);

    EraAssignment out;
    bool first = true;
    double best = 0.0;
    for (const auto& pool : pools) {
        const auto pool_dist =
            measures::smooth(basis_counts(pool.profile, basis), alpha);
        const double kl = measures::kl_divergence(artist_dist, pool_dist);
        out.kl_bits.emplace(pool.era, kl);
        if (first || kl < best || (kl == best && pool.era < out.era)) {
            best = kl;
            out.era = pool.era;
            first = false;
        }
    }
    return out;
}

ConcordanceReport subsample_concordance(
    const CountProfile& artist, const std::vector<counts::EraPool>& pools,
    uint64_t target_size, uint64_t n_subsamples, uint64_t base_seed,
    double alpha, const std::string& artist_name) {
    if (target_size < 1) throw config_error("subsample target size must be >= 1");
    bool any_at_or_above = false;
    for (const auto& pool : pools)
        if (pool.pieces.size() >= target_size) any_at_or_above = true;
    if (!any_at_or_above)
        throw config_error("subsample target size " +
                           std::to_string(target_size) +
                           " exceeds every pool");

    ConcordanceReport report;
    report.artist = artist_name;
    report.n_subsamples = n_subsamples;

    const auto full_marginal =
        era_assignment(artist, pools, alpha, Basis::marginal);
    const auto full_transitions =
        era_assignment(artist, pools, alpha, Basis::transitions);
    report.full_sample_argmin_era_marginal = full_marginal.era;
    report.full_sample_argmin_era_transitions = full_transitions.era;

    uint64_t hits_marginal = 0;
    uint64_t hits_transitions = 0;
    std::vector<counts::EraPool> sub(pools.size());
    for (uint64_t s = 0; s < n_subsamples; ++s) {
        Xoshiro256ss rng(base_seed + s);
        for (std::size_t pi = 0; pi < pools.size(); ++pi) {
            const auto& pool = pools[pi];
            sub[pi].era = pool.era;
            if (pool.pieces.size() <= target_size) {
                sub[pi].profile = pool.profile;
                continue;
            }
            // Partial Fisher-Yates: the first target_size slots of a
            // shuffled index vector.
            std::vector<std::size_t> idx(pool.pieces.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::vector<CountProfile> chosen;
            chosen.reserve(target_size);
            for (uint64_t i = 0; i < target_size; ++i) {
                const auto j = i + rng.bounded(idx.size() - i);
                std::swap(idx[i], idx[j]);
                chosen.push_back(pool.pieces[idx[i]]);
            }
            sub[pi].profile = counts::aggregate(chosen);
        }
        if (era_assignment(artist, sub, alpha, Basis::marginal).era ==
            full_marginal.era)
            ++hits_marginal;
        if (era_assignment(artist, sub, alpha, Basis::transitions).era ==
            full_transitions.era)
            ++hits_transitions;
    }
    if (n_subsamples > 0) {
        report.concordance_marginal =
            static_cast<double>(hits_marginal) / static_cast<double>(n_subsamples);
        report.concordance_transitions =
            static_cast<double>(hits_transitions) /
            static_cast<double>(n_subsamples);
    }
    return report;
}

CrossCheckResult kl_cosine_crosscheck(
    const std::map<std::string, double>& kl_ranking,
    const std::map<std::string, std::vector<double>>& feature_vectors,
    const std::vector<double>& artist_vector) {
    if (kl_ranking.size() != feature_vectors.size())
        throw config_error("kl/cosine cross-check: target sets differ in size");
    if (kl_ranking.size() < 3)
        throw config_error("kl/cosine cross-check needs at least 3 targets");

    std::vector<double> kl_values, neg_cosine;
    for (const auto& [name, kl] : kl_ranking) {
        const auto it = feature_vectors.find(name);
        if (it == feature_vectors.end())
            throw config_error("kl/cosine cross-check: no feature vector for '" +
                               name + "'");
        const auto cos =
            measures::cosine_similarity(it->second, artist_vector);
        if (!cos)
            throw config_error("kl/cosine cross-check: zero feature vector for '" +
                               name + "'");
        kl_values.push_back(kl);
        // Descending cosine ranking == ascending (-cosine) ranking.
        neg_cosine.push_back(-*cos);
    }
    const auto rho = measures::spearman_rho(kl_values, neg_cosine);
    if (!rho)
        throw config_error(
            "kl/cosine cross-check: an ordering has no rank variance");
    return CrossCheckResult{*rho, measures::spearman_p_value(
                                      *rho, kl_values.size())};
}

} // namespace degreescope::resampling
