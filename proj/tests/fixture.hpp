// Micro-corpus fixture: 3 composers x 12 chord-stream pieces with forced
// tonics. The expected analysis values are frozen from
// tests/oracle/expected_micro.py, which regenerates them from the same
// pattern definitions; keep the two in sync.
#pragma once

#include "core/pipeline.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fixture {

inline constexpr int kPieces = 12;
inline constexpr int kEvents = 40;

struct MicroComposer {
    const char* name;
    std::vector<const char*> pattern;
    int tonic_pc;
};

inline const std::vector<MicroComposer>& micro_composers() {
    static const std::vector<MicroComposer> composers{
        {"alder", {"C", "F", "G", "Am", "Dm", "C", "G", "Em"}, 0},
        {"birch", {"C", "Bb", "F", "C", "Gm", "Ab", "C", "F#"}, 0},
        {"cedar", {"Cm", "G", "Cm", "Fm", "G", "Cm", "Bb", "Eb"}, 7},
    };
    return composers;
}

inline std::string micro_piece_csv(int composer, int piece) {
    const auto& c = micro_composers()[static_cast<std::size_t>(composer)];
    std::string out;
    for (int t = 0; t < kEvents; ++t) {
        const char* label =
            (composer == 1 && (t + piece) % 11 == 0)
                ? "N"
                : c.pattern[static_cast<std::size_t>(
                      (t * (composer + 1) + piece) % c.pattern.size())];
        out += std::to_string(t) + "," + label + "\n";
    }
    return out;
}

// Writes the corpus under dir and returns the manifest path; cfg gets the
// forced per-piece keys.
inline std::filesystem::path write_micro_corpus(
    const std::filesystem::path& dir, degreescope::report::RunConfig& cfg) {
    std::filesystem::create_directories(dir);
    std::string entries;
    for (int k = 0; k < 3; ++k) {
        const auto& c = micro_composers()[static_cast<std::size_t>(k)];
        for (int j = 0; j < kPieces; ++j) {
            const std::string id =
                std::string(c.name) + "_" + (j < 10 ? "0" : "") +
                std::to_string(j);
            const std::string file = id + ".csv";
            std::ofstream(dir / file) << micro_piece_csv(k, j);
            if (!entries.empty()) entries += ",\n";
            entries += "{\"piece_id\":\"" + id + "\",\"path\":\"" + file +
                       "\",\"composer\":\"" + c.name +
                       "\",\"era\":\"era_" + c.name +
                       "\",\"group\":\"historical\"}";
            cfg.key_overrides[id] = degreescope::KeyEstimate{
                c.tonic_pc, degreescope::Mode::major, 0.0};
        }
    }
    const auto manifest = dir / "manifest.json";
    std::ofstream(manifest) << "{\"entries\":[\n" << entries << "\n]}\n";
    return manifest;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("ds_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    static inline int counter = 0;
};

} // namespace fixture
