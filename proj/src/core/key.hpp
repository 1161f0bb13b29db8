#pragma once

#include "core/events.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace degreescope::tonality {

struct KeyProfile {
    std::string name;
    std::array<double, 12> major_weights{};
    std::array<double, 12> minor_weights{};
};

// Built-in Krumhansl-Kessler probe-tone weights, the default profile.
const KeyProfile& krumhansl_kessler();

// Resolve "--key-profile": a built-in name ("kk") or a JSON file
// {"name": str, "major": [12], "minor": [12]}. Weight vectors must have
// nonzero variance. Throws config_error otherwise.
KeyProfile load_key_profile(const std::string& name_or_path);

// Duration-weighted pitch-class histogram: bin p accumulates the total
// sounding seconds of notes with pitch mod 12 == p. No normalization.
std::array<double, 12> pitch_class_histogram(const std::vector<NoteEvent>& notes);

// Profile-correlation key estimate over 24 candidates (12 rotations x 2
// modes), Pearson correlation against the duration-weighted histogram.
// Ties break toward the lower tonic, then major. A degenerate histogram
// (single sounding pitch class, or flat) falls back to the heaviest pitch
// class, major, score 0. Throws input_error on an empty note list.
KeyEstimate estimate_key(const std::vector<NoteEvent>& notes,
                         const KeyProfile& profile);

} // namespace degreescope::tonality
