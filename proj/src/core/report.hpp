#pragma once

#include "core/pipeline.hpp"
#include "core/resample.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace degreescope::report {

struct CommandResult {
    bool any_piece_failed = false;
    std::vector<std::string> warnings;
};

// Per-piece degree sequences as JSONL plus a corpus summary line.
// out_path "-" writes to stdout.
CommandResult cmd_degrees(const std::filesystem::path& manifest_path,
                          const RunConfig& cfg,
                          const std::filesystem::path& out_path);

// Full analysis over the manifest: per-composer Shannon/Zipf with bootstrap
// intervals, KL and JS matrices, closest pairs, smoothing robustness sweep,
// KL-vs-JS rank cross-check, count profiles, low-sample side report, and
// human-readable tables, all written under out_dir. Matrix outputs require
// at least two composers above the inclusion threshold; the per-composer
// files are written before that check fails.
CommandResult cmd_analyze(const std::filesystem::path& manifest_path,
                          const RunConfig& cfg,
                          const std::filesystem::path& out_dir);

// Era-pool KL tables on both bases, optional subsampling concordance and
// optional KL-vs-cosine cross-check against supplied feature vectors.
// Without a pool spec, historical composers group by their manifest era.
CommandResult cmd_pools(
    const std::filesystem::path& manifest_path,
    const std::optional<std::filesystem::path>& pool_spec_path,
    const std::optional<std::filesystem::path>& feature_vectors_path,
    const RunConfig& cfg, const std::filesystem::path& out_dir);

// Figure-ready rank-frequency series derived from the count profiles an
// analyze run emitted. Empty composer filter means all composers.
void cmd_plotdata(const std::filesystem::path& report_dir,
                  const std::vector<std::string>& composers,
                  const std::filesystem::path& out_path);

// Ranked rank-frequency points for one basis under the configured smoothing
// and Zipf flags, with the fit over exactly those points.
struct RankedSeries {
    std::vector<std::pair<std::size_t, double>> points; // (cell, prob), rank order
    measures::ZipfFit fit;
};
RankedSeries ranked_series(const counts::CountProfile& profile,
                           resampling::Basis basis, const RunConfig& cfg);

} // namespace degreescope::report
