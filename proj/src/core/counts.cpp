#include "core/counts.hpp"

#include "core/errors.hpp"

#include <numeric>

namespace degreescope::counts {

void CountProfile::validate() const {
    const uint64_t marg_sum =
        std::accumulate(marginal.begin(), marginal.end(), uint64_t{0});
    if (marg_sum != total_events)
        throw internal_error("count profile: marginal sum " +
                             std::to_string(marg_sum) + " != total_events " +
                             std::to_string(total_events));
    uint64_t trans_sum = 0;
    for (std::size_t i = 0; i < kMarginalCells; ++i) {
        for (std::size_t j = 0; j < kMarginalCells; ++j) {
            const uint64_t c = transitions[i * kMarginalCells + j];
            trans_sum += c;
            if (i == j && c != 0)
                throw internal_error(
                    "count profile: nonzero transition diagonal at degree " +
                    std::to_string(i));
        }
    }
    // Each nonempty piece contributes exactly (events - 1) transitions.
    if (trans_sum + nonempty_pieces != total_events)
        throw internal_error("count profile: transition sum " +
                             std::to_string(trans_sum) +
                             " inconsistent with total_events " +
                             std::to_string(total_events) + " over " +
                             std::to_string(nonempty_pieces) +
                             " nonempty pieces");
}

CountProfile count_piece(const harmony::DegreeSequence& seq) {
    CountProfile p;
    p.n_pieces = 1;
    p.total_events = seq.degrees.size();
    p.nonempty_pieces = seq.degrees.empty() ? 0 : 1;
    int prev = -1;
    for (int d : seq.degrees) {
        if (d == prev)
            throw internal_error(
                "degree sequence has adjacent duplicates; collapse rule "
                "violated upstream");
        ++p.marginal[static_cast<std::size_t>(d)];
        if (prev >= 0)
            ++p.transitions[static_cast<std::size_t>(prev) * kMarginalCells +
                            static_cast<std::size_t>(d)];
        prev = d;
    }
    p.validate();
    return p;
}

CountProfile aggregate(const std::vector<CountProfile>& profiles) {
    CountProfile sum;
    for (const auto& p : profiles) {
        for (std::size_t i = 0; i < kMarginalCells; ++i)
            sum.marginal[i] += p.marginal[i];
        for (std::size_t i = 0; i < kTransitionCells; ++i)
            sum.transitions[i] += p.transitions[i];
        sum.n_pieces += p.n_pieces;
        sum.total_events += p.total_events;
        sum.nonempty_pieces += p.nonempty_pieces;
    }
    return sum;
}

SampleSelection select_high_sample(
    const std::map<std::string, std::vector<CountProfile>>& corpus,
    uint64_t min_pieces) {
    SampleSelection sel;
    for (const auto& [name, pieces] : corpus) {
        CountProfile agg = aggregate(pieces);
        if (agg.n_pieces >= min_pieces)
            sel.included.emplace(name, std::move(agg));
        else
            sel.excluded.emplace(name, agg.n_pieces);
    }
    return sel;
}

std::vector<EraPool> build_era_pools(
    const std::map<std::string, std::vector<CountProfile>>& corpus,
    const std::map<std::string, std::vector<std::string>>& pool_spec) {
    std::vector<EraPool> pools;
    pools.reserve(pool_spec.size());
    for (const auto& [era, members] : pool_spec) {
        EraPool pool;
        pool.era = era;
        pool.members = members;
        for (const auto& composer : members) {
            auto it = corpus.find(composer);
            if (it == corpus.end())
                throw config_error("era pool '" + era +
                                   "' names unknown composer '" + composer +
                                   "'");
            pool.pieces.insert(pool.pieces.end(), it->second.begin(),
                               it->second.end());
        }
        pool.profile = aggregate(pool.pieces);
        pools.push_back(std::move(pool));
    }
    return pools;
}

} // namespace degreescope::counts
