#include "core/smf.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <string>

namespace degreescope::ingest {

namespace {

struct Reader {
    std::span<const uint8_t> data;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw input_error("smf: " + what + " at byte offset " +
                          std::to_string(pos));
    }
    void need(std::size_t n) const {
        if (pos + n > data.size())
            throw input_error("smf: truncated chunk at byte offset " +
                              std::to_string(pos) + " (need " +
                              std::to_string(n) + " more bytes)");
    }
    uint8_t u8() {
        need(1);
        return data[pos++];
    }
    uint16_t u16() {
        need(2);
        uint16_t v = (uint16_t(data[pos]) << 8) | data[pos + 1];
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | data[pos + i];
        pos += 4;
        return v;
    }
    uint32_t vlq() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            const uint8_t b = u8();
            v = (v << 7) | (b & 0x7F);
            if ((b & 0x80) == 0) return v;
        }
        fail("variable-length quantity longer than 4 bytes");
    }
    bool match(const char* magic) {
        need(4);
        for (int i = 0; i < 4; ++i)
            if (data[pos + i] != uint8_t(magic[i])) return false;
        pos += 4;
        return true;
    }
};

struct NoteOn {
    uint64_t tick;
    std::size_t seq; // global merge order, for stable output
    int pitch;
    int velocity;
    int track;
};

struct NoteOff {
    uint64_t tick;
    int channel;
    int pitch;
};

struct TempoEvent {
    uint64_t tick;
    uint32_t us_per_quarter;
};

// Piecewise-linear tick -> seconds conversion over the tempo map.
class TempoMap {
public:
    TempoMap(std::vector<TempoEvent> events, uint16_t division)
        : division_(division) {
        std::stable_sort(events.begin(), events.end(),
                         [](const TempoEvent& a, const TempoEvent& b) {
                             return a.tick < b.tick;
                         });
        segments_.push_back({0, 500000, 0.0}); // 120 BPM default
        for (const auto& ev : events) {
            auto& last = segments_.back();
            if (ev.tick == last.tick) {
                last.us_per_quarter = ev.us_per_quarter;
                continue;
            }
            const double sec = last.seconds + ticks_to_sec(ev.tick - last.tick,
                                                           last.us_per_quarter);
            segments_.push_back({ev.tick, ev.us_per_quarter, sec});
        }
    }

    double seconds(uint64_t tick) const {
        std::size_t lo = 0;
        for (std::size_t i = segments_.size(); i-- > 0;) {
            if (segments_[i].tick <= tick) {
                lo = i;
                break;
            }
        }
        const auto& seg = segments_[lo];
        return seg.seconds + ticks_to_sec(tick - seg.tick, seg.us_per_quarter);
    }

private:
    double ticks_to_sec(uint64_t ticks, uint32_t us_per_quarter) const {
        return static_cast<double>(ticks) * us_per_quarter /
               (1e6 * static_cast<double>(division_));
    }

    struct Segment {
        uint64_t tick;
        uint32_t us_per_quarter;
        double seconds;
    };
    std::vector<Segment> segments_;
    uint16_t division_;
};

struct TrackEvent {
    uint64_t tick;
    int track;
    std::size_t seq;       // order within the concatenated stream
    uint8_t kind;          // 0x90 on, 0x80 off
    uint8_t channel;
    uint8_t pitch;
    uint8_t velocity;
};

} // namespace

std::vector<NoteEvent> parse_smf(std::span<const uint8_t> bytes) {
    Reader r{bytes};

    if (!r.match("MThd")) r.fail("bad header magic (expected 'MThd')");
    const uint32_t hlen = r.u32();
    if (hlen < 6) r.fail("header chunk shorter than 6 bytes");
    const std::size_t header_body = r.pos;
    const uint16_t format = r.u16();
    if (format == 2) r.fail("format 2 files are not supported");
    if (format > 1) r.fail("unknown SMF format " + std::to_string(format));
    const uint16_t ntrks = r.u16();
    const uint16_t division = r.u16();
    if (division & 0x8000) r.fail("SMPTE division mode is not supported");
    if (division == 0) r.fail("zero ticks-per-quarter division");
    r.pos = header_body;
    r.need(hlen);
    r.pos = header_body + hlen; // skip any extra header bytes

    std::vector<TrackEvent> merged;
    std::vector<TempoEvent> tempos;
    std::vector<uint64_t> track_end_tick;

    for (uint16_t t = 0; t < ntrks; ++t) {
        // Skip alien chunks between tracks, as the format allows.
        while (!r.match("MTrk")) {
            r.pos += 4;
            const uint32_t alien_len = r.u32();
            r.need(alien_len);
            r.pos += alien_len;
        }
        const uint32_t tlen = r.u32();
        r.need(tlen);
        const std::size_t track_end = r.pos + tlen;

        uint64_t tick = 0;
        uint64_t last_tick = 0;
        uint8_t running_status = 0;
        bool saw_eot = false;

        while (r.pos < track_end && !saw_eot) {
            tick += r.vlq();
            last_tick = tick;

            uint8_t status;
            r.need(1);
            if (bytes[r.pos] & 0x80) {
                status = r.u8();
            } else {
                if (running_status == 0)
                    r.fail("data byte without running status");
                status = running_status;
            }

            if (status == 0xFF) {
                running_status = 0;
                const uint8_t type = r.u8();
                const uint32_t len = r.vlq();
                r.need(len);
                if (type == 0x2F) {
                    saw_eot = true;
                } else if (type == 0x51 && len == 3) {
                    const uint32_t us = (uint32_t(bytes[r.pos]) << 16) |
                                        (uint32_t(bytes[r.pos + 1]) << 8) |
                                        bytes[r.pos + 2];
                    if (us > 0) tempos.push_back({tick, us});
                }
                r.pos += len;
            } else if (status == 0xF0 || status == 0xF7) {
                running_status = 0;
                const uint32_t len = r.vlq();
                r.need(len);
                r.pos += len;
            } else if (status >= 0x80) {
                running_status = status;
                const uint8_t kind = status & 0xF0;
                const int ndata = (kind == 0xC0 || kind == 0xD0) ? 1 : 2;
                const uint8_t d1 = r.u8();
                if (d1 & 0x80) r.fail("data byte with high bit set");
                uint8_t d2 = 0;
                if (ndata == 2) {
                    d2 = r.u8();
                    if (d2 & 0x80) r.fail("data byte with high bit set");
                }
                // Sustain and all other controllers are parsed and dropped;
                // only note on/off feeds the analysis.
                if (kind == 0x90 || kind == 0x80) {
                    const uint8_t k =
                        (kind == 0x90 && d2 > 0) ? uint8_t(0x90) : uint8_t(0x80);
                    merged.push_back(TrackEvent{tick, t, merged.size(), k,
                                                uint8_t(status & 0x0F), d1, d2});
                }
            } else {
                r.fail("invalid status byte");
            }
        }
        track_end_tick.push_back(std::max(tick, last_tick));
        r.pos = track_end;
    }

    std::stable_sort(merged.begin(), merged.end(),
                     [](const TrackEvent& a, const TrackEvent& b) {
                         return a.tick < b.tick;
                     });

    const TempoMap tempo_map(std::move(tempos), division);

    // FIFO pairing per (channel, pitch) over the merged stream.
    std::map<int, std::deque<NoteOn>> open;
    std::vector<std::pair<NoteOn, uint64_t>> closed; // (on, off tick)
    for (const auto& ev : merged) {
        const int key = (ev.channel << 8) | ev.pitch;
        if (ev.kind == 0x90) {
            open[key].push_back(
                NoteOn{ev.tick, ev.seq, ev.pitch, ev.velocity, ev.track});
        } else {
            auto it = open.find(key);
            if (it == open.end() || it->second.empty()) continue; // stray off
            closed.emplace_back(it->second.front(), ev.tick);
            it->second.pop_front();
        }
    }
    for (auto& [key, queue] : open)
        for (const auto& on : queue)
            closed.emplace_back(
                on, track_end_tick[static_cast<std::size_t>(on.track)]);

    std::sort(closed.begin(), closed.end(),
              [](const auto& a, const auto& b) {
                  return a.first.seq < b.first.seq;
              });

    std::vector<NoteEvent> notes;
    notes.reserve(closed.size());
    for (const auto& [on, off_tick] : closed) {
        if (off_tick <= on.tick) continue; // zero-length pair, no duration
        notes.push_back(NoteEvent{tempo_map.seconds(on.tick),
                                  tempo_map.seconds(off_tick), on.pitch,
                                  on.velocity});
    }
    return notes;
}

} // namespace degreescope::ingest
