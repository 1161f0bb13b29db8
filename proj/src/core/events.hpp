#pragma once

#include <string>
#include <vector>

namespace degreescope {

// One transcribed or ingested note. Times are absolute seconds from the
// start of the piece.
struct NoteEvent {
    double onset_s = 0.0;
    double offset_s = 0.0;
    int pitch = 0;    // MIDI semitone, 0-127
    int velocity = 0; // 0-127

    bool valid() const {
        return offset_s > onset_s && onset_s >= 0.0 && pitch >= 0 &&
               pitch <= 127 && velocity >= 0 && velocity <= 127;
    }
};

// One timestamped chord label. Labels follow the grammar
//   ROOT  := [A-G]('#'|'b')?
//   LABEL := ROOT 'm'? | 'N'
// where 'N' is the no-chord symbol.
struct ChordEvent {
    double onset_s = 0.0;
    std::string label;
};

enum class Mode { major, minor };

struct KeyEstimate {
    int tonic_pc = 0; // 0 = C
    Mode mode = Mode::major;
    double score = 0.0;
};

struct ManifestEntry {
    std::string piece_id;
    std::string path; // resolved absolute/relative path, readable at load
    std::string composer;
    std::string era;
    bool neoclassical = false; // group: historical | neoclassical
};

struct CorpusManifest {
    std::vector<ManifestEntry> entries;
};

} // namespace degreescope
