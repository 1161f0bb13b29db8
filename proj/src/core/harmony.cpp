#include "core/harmony.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace degreescope::harmony {

int degree_index(std::string_view symbol) {
    for (int i = 0; i < kNumDegrees; ++i)
        if (kDegreeNames[i] == symbol) return i;
    return -1;
}

std::optional<ParsedChord> parse_chord_label(std::string_view label) {
    if (label == "N") return std::nullopt;
    if (label.empty())
        throw input_error("empty chord label");

    static constexpr int kLetterPc[7] = {9, 11, 0, 2, 4, 5, 7}; // A..G
    const char letter = label[0];
    if (letter < 'A' || letter > 'G')
        throw input_error("chord label '" + std::string(label) +
                          "' has no valid root letter");
    int pc = kLetterPc[letter - 'A'];
    std::size_t pos = 1;
    if (pos < label.size() && (label[pos] == '#' || label[pos] == 'b')) {
        pc += label[pos] == '#' ? 1 : -1;
        ++pos;
    }
    Mode quality = Mode::major;
    if (pos < label.size() && label[pos] == 'm') {
        quality = Mode::minor;
        ++pos;
    }
    if (pos != label.size())
        throw input_error("chord label '" + std::string(label) +
                          "' does not match the root-quality grammar");
    return ParsedChord{((pc % 12) + 12) % 12, quality};
}

int degree_of(const ParsedChord& chord, int tonic_pc) {
    const int interval = ((chord.root_pc - tonic_pc) % 12 + 12) % 12;
    const bool minor = chord.quality == Mode::minor;
    switch (interval) {
        case 0: return minor ? 1 : 0;   // i / I
        case 1: return 2;               // bII
        case 2: return 3;               // II
        case 3: return 4;               // bIII
        case 4: return 5;               // III
        case 5: return minor ? 7 : 6;   // iv / IV
        case 6: return 8;               // #IV
        case 7: return minor ? 10 : 9;  // v / V
        case 8: return 11;              // bVI
        case 9: return 12;              // VI
        case 10: return 13;             // bVII
        default: return 14;             // VII
    }
}

DegreeSequence degree_sequence(const std::vector<ChordEvent>& chords,
                               int tonic_pc) {
    DegreeSequence seq;
    seq.total_events = chords.size();
    for (const auto& ev : chords) {
        const auto chord = parse_chord_label(ev.label);
        if (!chord) {
            ++seq.dropped_events;
            continue;
        }
        const int d = degree_of(*chord, tonic_pc);
        if (seq.degrees.empty() || seq.degrees.back() != d)
            seq.degrees.push_back(d);
    }
    return seq;
}

std::string chord_label(int root_pc, Mode quality) {
    static constexpr std::string_view kNames[12] = {
        "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};
    std::string label(kNames[root_pc]);
    if (quality == Mode::minor) label += 'm';
    return label;
}

std::vector<ChordEvent> detect_chords(const std::vector<NoteEvent>& notes,
                                      double window_s, double hop_s) {
    if (!(window_s > 0.0) || !(hop_s > 0.0))
        throw config_error("chord window and hop must be positive");

    std::vector<ChordEvent> out;
    if (notes.empty()) return out;

    double span_end = 0.0;
    for (const auto& n : notes) span_end = std::max(span_end, n.offset_s);

    // A corrupt offset would otherwise turn the window sweep into an
    // effectively unbounded loop.
    constexpr double kMaxWindows = 5e7;
    if (span_end / hop_s > kMaxWindows)
        throw input_error("piece spans " + std::to_string(span_end) +
                          " s; chord detection would need more than 5e7 "
                          "windows at this hop");

    for (std::size_t w = 0;; ++w) {
        const double t = static_cast<double>(w) * hop_s; // no drift
        if (t >= span_end) break;
        const double w_end = t + window_s;
        double hist[12] = {};
        double mass = 0.0;
        for (const auto& n : notes) {
            const double overlap =
                std::min(n.offset_s, w_end) - std::max(n.onset_s, t);
            if (overlap > 0.0) {
                hist[n.pitch % 12] += overlap;
                mass += overlap;
            }
        }

        std::string label = "N";
        if (mass > 0.0) {
            double norm = 0.0;
            for (double h : hist) norm += h * h;
            norm = std::sqrt(norm);

            // Binary triads have equal L2 norm, so the template normalization
            // cancels in the argmax; the histogram one is kept for a true
            // cosine score.
            double best = -1.0;
            int best_root = 0;
            Mode best_quality = Mode::major;
            for (int root = 0; root < 12; ++root) {
                for (int q = 0; q < 2; ++q) {
                    const int third = q == 0 ? 4 : 3;
                    const double score =
                        (hist[root % 12] + hist[(root + third) % 12] +
                         hist[(root + 7) % 12]) /
                        (norm * std::sqrt(3.0));
                    if (score > best) { // ties keep lowest root, major first
                        best = score;
                        best_root = root;
                        best_quality = q == 0 ? Mode::major : Mode::minor;
                    }
                }
            }
            label = chord_label(best_root, best_quality);
        }

        if (out.empty() || out.back().label != label)
            out.push_back(ChordEvent{t, std::move(label)});
    }
    return out;
}

} // namespace degreescope::harmony
