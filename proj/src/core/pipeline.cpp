#include "core/pipeline.hpp"

#include "core/errors.hpp"
#include "core/key.hpp"
#include "core/smf.hpp"
#include "core/textio.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace degreescope::report {

unsigned worker_count(const std::optional<unsigned>& requested) {
    if (requested) return std::max(1u, *requested);
    if (const char* env = std::getenv("DEGREESCOPE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw config_error(
                "DEGREESCOPE_THREADS must be a positive integer, got '" +
                std::string(env) + "'");
        return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    threads = std::min<std::size_t>(std::max(1u, threads), n);
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

enum class InputKind { smf, note_jsonl, chord_stream };

InputKind sniff_input(const std::vector<uint8_t>& bytes) {
    if (bytes.size() >= 4 && bytes[0] == 'M' && bytes[1] == 'T' &&
        bytes[2] == 'h' && bytes[3] == 'd')
        return InputKind::smf;

    // First non-blank line decides between note JSONL and a chord stream.
    std::string_view text(reinterpret_cast<const char*>(bytes.data()),
                          bytes.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t' ||
                                 line.front() == '\r'))
            line.remove_prefix(1);
        if (line.empty()) continue;
        if (line.front() == '{') {
            const auto obj = nlohmann::json::parse(line, nullptr, false);
            if (obj.is_object() && obj.contains("pitch"))
                return InputKind::note_jsonl;
            return InputKind::chord_stream;
        }
        return InputKind::chord_stream; // CSV form
    }
    return InputKind::chord_stream; // empty file: empty chord stream
}

} // namespace

std::vector<PieceResult> process_pieces(const CorpusManifest& manifest,
                                        const RunConfig& cfg) {
    // Configuration problems are global: reject them here rather than
    // letting every piece fail on the same bad parameter.
    if (!(cfg.chord_window > 0.0) || !(cfg.chord_hop > 0.0))
        throw config_error("chord window and hop must be positive");
    if (!(cfg.alpha > 0.0))
        throw config_error("smoothing alpha must be positive");
    const auto profile = tonality::load_key_profile(cfg.key_profile);
    std::vector<PieceResult> results(manifest.entries.size());

    parallel_for(
        manifest.entries.size(), worker_count(cfg.threads),
        [&](std::size_t i) {
            auto& res = results[i];
            res.entry = manifest.entries[i];
            try {
                const auto bytes = ingest::read_binary_file(res.entry.path);
                const auto kind = sniff_input(bytes);
                const std::string_view text(
                    reinterpret_cast<const char*>(bytes.data()), bytes.size());

                std::vector<ChordEvent> chords;
                const auto override_it =
                    cfg.key_overrides.find(res.entry.piece_id);
                if (kind == InputKind::chord_stream) {
                    if (override_it == cfg.key_overrides.end())
                        throw input_error(
                            "chord-stream piece has no notes to estimate a "
                            "key from; use --key-override");
                    res.key = override_it->second;
                    chords = ingest::parse_chord_stream(text);
                } else {
                    std::vector<NoteEvent> notes =
                        kind == InputKind::smf
                            ? ingest::parse_smf(bytes)
                            : ingest::parse_note_jsonl(text);
                    res.from_notes = true;
                    res.key = override_it != cfg.key_overrides.end()
                                  ? override_it->second
                                  : tonality::estimate_key(notes, profile);
                    chords = harmony::detect_chords(notes, cfg.chord_window,
                                                    cfg.chord_hop);
                }
                res.seq = harmony::degree_sequence(chords, res.key.tonic_pc);
                res.profile = counts::count_piece(res.seq);
            } catch (const std::exception& e) {
                res.failed = true;
                res.error = e.what();
            }
        });
    return results;
}

std::map<std::string, std::vector<counts::CountProfile>> group_by_composer(
    const std::vector<PieceResult>& pieces) {
    std::map<std::string, std::vector<counts::CountProfile>> corpus;
    for (const auto& p : pieces)
        if (!p.failed) corpus[p.entry.composer].push_back(p.profile);
    return corpus;
}

} // namespace degreescope::report
