#pragma once

#include "core/counts.hpp"
#include "core/events.hpp"
#include "core/harmony.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace degreescope::report {

struct RunConfig {
    double alpha = 0.5;
    uint64_t min_pieces = 10;
    uint64_t seed = 42;
    uint64_t bootstrap_iters = 1000;
    std::string key_profile = "kk";
    double chord_window = 2.0;
    double chord_hop = 1.0;
    bool zipf_exclude_diagonal = false;
    bool zipf_raw = false;
    bool keep_going = false;
    std::vector<double> alphas = {0.1, 0.5, 1.0}; // smoothing sweep
    uint64_t subsample_size = 0;
    uint64_t subsample_count = 0;
    std::map<std::string, KeyEstimate> key_overrides; // piece_id -> key
    std::optional<unsigned> threads; // overrides DEGREESCOPE_THREADS
};

// Worker cap: explicit request, else DEGREESCOPE_THREADS, else hardware.
unsigned worker_count(const std::optional<unsigned>& requested);

// Static-chunked parallel map; fn(i) must only touch slot i of its outputs.
// The first exception thrown by any worker is rethrown after join.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

struct PieceResult {
    ManifestEntry entry;
    harmony::DegreeSequence seq;
    counts::CountProfile profile;
    KeyEstimate key;
    bool from_notes = false; // false: chord-stream input
    bool failed = false;
    std::string error;
};

// Full per-piece front end: sniff the file (SMF, note JSONL, or chord
// stream), estimate or override the key, derive chords for note input, and
// produce the collapsed degree sequence and counts. Failures are recorded
// per piece, never thrown.
std::vector<PieceResult> process_pieces(const CorpusManifest& manifest,
                                        const RunConfig& cfg);

// Composer name -> per-piece profiles, successful pieces only, manifest
// order preserved within a composer.
std::map<std::string, std::vector<counts::CountProfile>> group_by_composer(
    const std::vector<PieceResult>& pieces);

} // namespace degreescope::report
