#pragma once

#include "core/events.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace degreescope::ingest {

// Standard MIDI File parser covering formats 0 and 1 with ticks-per-quarter
// timing. Produces note events in seconds using the file's tempo map
// (120 BPM until the first tempo meta-event). Format-1 tracks are merged
// into one time-ordered stream, ties broken by track index; Note-On/Note-Off
// pairs are matched FIFO per (channel, pitch); a Note-On with velocity 0
// counts as a Note-Off; unmatched Note-Ons close at their track's end.
//
// Throws input_error naming the byte offset for malformed magic, truncated
// chunks, SMPTE division mode, and format 2.
std::vector<NoteEvent> parse_smf(std::span<const uint8_t> bytes);

} // namespace degreescope::ingest
