#include "core/textio.hpp"

#include "core/errors.hpp"
#include "core/harmony.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace degreescope::ingest {

using nlohmann::json;

namespace {

[[noreturn]] void line_fail(std::size_t line_no, const std::string& what) {
    throw input_error("line " + std::to_string(line_no) + ": " + what);
}

// Iterates non-empty lines, 1-based numbering over the raw text.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        ++line_no;
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) fn(line_no, line);
        pos = nl + 1;
        if (nl == text.size()) break;
    }
}

double number_field(const json& obj, const char* key, std::size_t line_no) {
    if (!obj.contains(key)) line_fail(line_no, std::string("missing field '") + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number()) line_fail(line_no, std::string("field '") + key + "' is not numeric");
    return v.get<double>();
}

int int_field(const json& obj, const char* key, std::size_t line_no) {
    const double v = number_field(obj, key, line_no);
    if (v != std::floor(v))
        line_fail(line_no, std::string("field '") + key + "' must be an integer");
    return static_cast<int>(v);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

} // namespace

std::vector<NoteEvent> parse_note_jsonl(std::string_view text) {
    std::vector<NoteEvent> notes;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            line_fail(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) line_fail(line_no, "expected a JSON object");
        NoteEvent n;
        n.onset_s = number_field(obj, "onset_s", line_no);
        n.offset_s = number_field(obj, "offset_s", line_no);
        n.pitch = int_field(obj, "pitch", line_no);
        n.velocity = int_field(obj, "velocity", line_no);
        if (n.offset_s <= n.onset_s)
            line_fail(line_no, "offset_s must be greater than onset_s");
        if (n.onset_s < 0.0) line_fail(line_no, "onset_s must be non-negative");
        if (n.pitch < 0 || n.pitch > 127)
            line_fail(line_no, "pitch out of range 0-127");
        if (n.velocity < 0 || n.velocity > 127)
            line_fail(line_no, "velocity out of range 0-127");
        notes.push_back(n);
    });
    return notes;
}

std::vector<ChordEvent> parse_chord_stream(std::string_view text) {
    std::vector<ChordEvent> events;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        ChordEvent ev;
        if (trim(line).front() == '{') {
            json obj;
            try {
                obj = json::parse(line);
            } catch (const json::exception& e) {
                line_fail(line_no, std::string("invalid JSON: ") + e.what());
            }
            ev.onset_s = number_field(obj, "onset_s", line_no);
            if (!obj.contains("label") || !obj.at("label").is_string())
                line_fail(line_no, "missing string field 'label'");
            ev.label = obj.at("label").get<std::string>();
        } else {
            const std::size_t comma = line.find(',');
            if (comma == std::string_view::npos)
                line_fail(line_no, "expected 'onset,label'");
            const std::string onset_text{trim(line.substr(0, comma))};
            try {
                std::size_t used = 0;
                ev.onset_s = std::stod(onset_text, &used);
                if (used != onset_text.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                line_fail(line_no, "invalid onset '" + onset_text + "'");
            }
            ev.label = std::string(trim(line.substr(comma + 1)));
        }
        try {
            harmony::parse_chord_label(ev.label); // grammar check only
        } catch (const input_error&) {
            line_fail(line_no, "invalid chord label '" + ev.label + "'");
        }
        events.push_back(std::move(ev));
    });
    std::stable_sort(events.begin(), events.end(),
                     [](const ChordEvent& a, const ChordEvent& b) {
                         return a.onset_s < b.onset_s;
                     });
    return events;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot read file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<uint8_t> read_binary_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot read file: " + path.string());
    std::vector<uint8_t> bytes{std::istreambuf_iterator<char>(in),
                               std::istreambuf_iterator<char>()};
    return bytes;
}

CorpusManifest load_manifest(const std::filesystem::path& manifest_path) {
    json doc;
    try {
        doc = json::parse(read_text_file(manifest_path));
    } catch (const json::exception& e) {
        throw input_error("manifest " + manifest_path.string() +
                          ": invalid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("entries") ||
        !doc.at("entries").is_array())
        throw input_error("manifest " + manifest_path.string() +
                          ": expected {\"entries\": [...]}");

    const auto base_dir = manifest_path.parent_path();
    CorpusManifest manifest;
    std::set<std::string> seen_ids;
    for (const auto& item : doc.at("entries")) {
        if (!item.is_object())
            throw input_error("manifest: entries must be objects");
        ManifestEntry e;
        for (const char* key : {"piece_id", "path", "composer", "era", "group"})
            if (!item.contains(key) || !item.at(key).is_string())
                throw input_error("manifest: entry missing string field '" +
                                  std::string(key) + "'");
        e.piece_id = item.at("piece_id").get<std::string>();
        e.composer = item.at("composer").get<std::string>();
        e.era = item.at("era").get<std::string>();
        const auto group = item.at("group").get<std::string>();
        if (group == "neoclassical")
            e.neoclassical = true;
        else if (group != "historical")
            throw input_error("manifest: piece '" + e.piece_id +
                              "' has unknown group '" + group +
                              "' (expected historical or neoclassical)");
        if (!seen_ids.insert(e.piece_id).second)
            throw input_error("manifest: duplicate piece_id '" + e.piece_id +
                              "'");
        std::filesystem::path p = item.at("path").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        std::error_code ec;
        if (!std::filesystem::is_regular_file(p, ec))
            throw input_error("manifest: piece '" + e.piece_id +
                              "' path does not resolve to a readable file: " +
                              p.string());
        e.path = p.string();
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

std::map<std::string, std::vector<std::string>> load_pool_spec(
    const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw config_error("pool spec " + path.string() + ": invalid JSON: " +
                           e.what());
    }
    if (!doc.is_object())
        throw config_error("pool spec: expected {era: [composer, ...]}");
    std::map<std::string, std::vector<std::string>> spec;
    for (const auto& [era, members] : doc.items()) {
        if (!members.is_array())
            throw config_error("pool spec: era '" + era +
                               "' must map to an array of composer names");
        auto& list = spec[era];
        for (const auto& m : members) {
            if (!m.is_string())
                throw config_error("pool spec: era '" + era +
                                   "' contains a non-string member");
            list.push_back(m.get<std::string>());
        }
    }
    return spec;
}

std::map<std::string, std::vector<double>> load_feature_vectors(
    const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw input_error("feature vectors " + path.string() +
                          ": invalid JSON: " + e.what());
    }
    if (!doc.is_object())
        throw input_error("feature vectors: expected {name: [numbers], ...}");
    std::map<std::string, std::vector<double>> vectors;
    for (const auto& [name, arr] : doc.items()) {
        if (!arr.is_array())
            throw input_error("feature vectors: '" + name +
                              "' must map to an array of numbers");
        auto& v = vectors[name];
        for (const auto& x : arr) {
            if (!x.is_number())
                throw input_error("feature vectors: '" + name +
                                  "' contains a non-numeric value");
            v.push_back(x.get<double>());
        }
    }
    return vectors;
}

} // namespace degreescope::ingest
