#pragma once

#include "core/harmony.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace degreescope::counts {

inline constexpr std::size_t kMarginalCells = harmony::kNumDegrees;
inline constexpr std::size_t kTransitionCells = kMarginalCells * kMarginalCells;

// Marginal counts plus the row-major 15x15 transition matrix for a piece or
// an aggregate. Raw transition diagonals are structurally zero (consecutive
// repeats are collapsed before counting) but the cells are carried through to
// smoothing and Zipf fitting, where they hold prior-only mass.
struct CountProfile {
    std::array<uint64_t, kMarginalCells> marginal{};
    std::array<uint64_t, kTransitionCells> transitions{};
    uint64_t n_pieces = 0;
    uint64_t total_events = 0;
    uint64_t nonempty_pieces = 0; // pieces contributing >= 1 event

    uint64_t transition_at(std::size_t from, std::size_t to) const {
        return transitions[from * kMarginalCells + to];
    }
    // Invariant check; throws internal_error on violation.
    void validate() const;
};

// Per-piece counting over a collapsed degree sequence.
CountProfile count_piece(const harmony::DegreeSequence& seq);

// Field-wise integer sums; associative and commutative.
CountProfile aggregate(const std::vector<CountProfile>& profiles);

struct SampleSelection {
    std::map<std::string, CountProfile> included;
    // name -> piece count for composers under the threshold
    std::map<std::string, uint64_t> excluded;
};

// Aggregates per-composer piece profiles and keeps composers with at least
// min_pieces pieces; the rest land in the side report.
SampleSelection select_high_sample(
    const std::map<std::string, std::vector<CountProfile>>& corpus,
    uint64_t min_pieces);

struct EraPool {
    std::string era;
    std::vector<std::string> members; // composer names
    CountProfile profile;             // sum of member profiles
    std::vector<CountProfile> pieces; // retained for subsampling
};

// One pool per spec entry, raw counts summed across constituent composers.
// Throws config_error when a named composer is absent from the corpus.
std::vector<EraPool> build_era_pools(
    const std::map<std::string, std::vector<CountProfile>>& corpus,
    const std::map<std::string, std::vector<std::string>>& pool_spec);

} // namespace degreescope::counts
