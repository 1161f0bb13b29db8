#pragma once

#include "core/events.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace degreescope::harmony {

// Scale-degree alphabet, canonical order. Quality is only distinguished at
// the tonic, subdominant and dominant; every other interval collapses to one
// symbol.
inline constexpr int kNumDegrees = 15;
inline constexpr std::array<std::string_view, kNumDegrees> kDegreeNames = {
    "I", "i", "bII", "II", "bIII", "III", "IV", "iv",
    "#IV", "V", "v", "bVI", "VI", "bVII", "VII"};

// Canonical index (0-14) for an ASCII degree symbol, or -1.
int degree_index(std::string_view symbol);

struct ParsedChord {
    int root_pc = 0; // 0 = C
    Mode quality = Mode::major;
};

// Root+quality for a non-'N' label; nullopt for the no-chord symbol.
// Throws input_error on grammar violations.
std::optional<ParsedChord> parse_chord_label(std::string_view label);

// Degree index for a chord relative to a tonic pitch class. Total and
// surjective over the 24 (interval, quality) combinations.
int degree_of(const ParsedChord& chord, int tonic_pc);

// Ordered degree stream for a piece, after dropping 'N' events and then
// collapsing runs of identical consecutive degrees. The drop happens first,
// so two identical chords separated only by 'N' merge into one.
struct DegreeSequence {
    std::vector<int> degrees; // canonical indices
    uint64_t dropped_events = 0;
    uint64_t total_events = 0;

    double dropped_fraction() const {
        return total_events == 0
                   ? 0.0
                   : static_cast<double>(dropped_events) /
                         static_cast<double>(total_events);
    }
};

DegreeSequence degree_sequence(const std::vector<ChordEvent>& chords,
                               int tonic_pc);

// Triad template matching over fixed windows. Each window scores the 24
// major/minor triads by cosine between the duration-weighted pitch-class
// histogram of the window and the binary template; silent windows emit 'N'.
// Consecutive windows with the same label merge into one event at the first
// window's start. Throws config_error for non-positive window or hop.
std::vector<ChordEvent> detect_chords(const std::vector<NoteEvent>& notes,
                                      double window_s, double hop_s);

// Label text for a root pitch class and quality (sharp spellings).
std::string chord_label(int root_pc, Mode quality);

} // namespace degreescope::harmony
