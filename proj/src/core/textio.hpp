#pragma once

#include "core/events.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace degreescope::ingest {

// Line-delimited note records: {"onset_s":..,"offset_s":..,"pitch":..,
// "velocity":..} per line. Errors name the 1-based line number.
std::vector<NoteEvent> parse_note_jsonl(std::string_view text);

// Chord stream, one event per line, either CSV "onset,label" or a JSON
// object {"onset_s":..,"label":".."}. Labels are validated against the
// root-quality grammar ('N' allowed). Output is sorted by onset, ties in
// input order.
std::vector<ChordEvent> parse_chord_stream(std::string_view text);

// Corpus manifest: {"entries":[{"piece_id","path","composer","era","group"}]}.
// Relative paths resolve against base_dir; every path must be readable.
CorpusManifest load_manifest(const std::filesystem::path& manifest_path);

// Pool spec: {"era name": ["composer", ...], ...}
std::map<std::string, std::vector<std::string>> load_pool_spec(
    const std::filesystem::path& path);

// Feature vectors for the cosine cross-check: {"name": [numbers], ...}
std::map<std::string, std::vector<double>> load_feature_vectors(
    const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
std::vector<uint8_t> read_binary_file(const std::filesystem::path& path);

} // namespace degreescope::ingest
