#include "core/key.hpp"

#include "core/errors.hpp"
#include "core/measures.hpp"
#include "core/textio.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace degreescope::tonality {

const KeyProfile& krumhansl_kessler() {
    static const KeyProfile kk{
        "kk",
        {6.35, 2.23, 3.48, 2.33, 4.38, 4.09, 2.52, 5.19, 2.39, 3.66, 2.29, 2.88},
        {6.33, 2.68, 3.52, 5.38, 2.60, 3.53, 2.54, 4.75, 3.98, 2.69, 3.34, 3.17}};
    return kk;
}

static void check_variance(const std::array<double, 12>& w,
                           const std::string& which) {
    const double first = w[0];
    for (double v : w)
        if (v != first) return;
    throw config_error("key profile " + which +
                       " weights have zero variance; correlation undefined");
}

KeyProfile load_key_profile(const std::string& name_or_path) {
    if (name_or_path == "kk" || name_or_path == "krumhansl-kessler")
        return krumhansl_kessler();

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(ingest::read_text_file(name_or_path));
    } catch (const input_error&) {
        throw config_error("key profile '" + name_or_path +
                           "' is neither a built-in name nor a readable file");
    } catch (const nlohmann::json::exception& e) {
        throw config_error("key profile " + name_or_path + ": invalid JSON: " +
                           e.what());
    }
    KeyProfile profile;
    if (!doc.is_object() || !doc.contains("name") || !doc.contains("major") ||
        !doc.contains("minor"))
        throw config_error("key profile: expected {name, major[12], minor[12]}");
    profile.name = doc.at("name").get<std::string>();
    for (auto [key, dest] : {std::pair{"major", &profile.major_weights},
                             std::pair{"minor", &profile.minor_weights}}) {
        const auto& arr = doc.at(key);
        if (!arr.is_array() || arr.size() != 12)
            throw config_error(std::string("key profile: '") + key +
                               "' must be an array of 12 numbers");
        for (std::size_t i = 0; i < 12; ++i) (*dest)[i] = arr[i].get<double>();
    }
    check_variance(profile.major_weights, "major");
    check_variance(profile.minor_weights, "minor");
    return profile;
}

std::array<double, 12> pitch_class_histogram(
    const std::vector<NoteEvent>& notes) {
    std::array<double, 12> hist{};
    for (const auto& n : notes)
        hist[static_cast<std::size_t>(n.pitch % 12)] += n.offset_s - n.onset_s;
    return hist;
}

KeyEstimate estimate_key(const std::vector<NoteEvent>& notes,
                         const KeyProfile& profile) {
    if (notes.empty()) throw input_error("key estimation: no notes");

    const auto hist = pitch_class_histogram(notes);

    int nonzero = 0;
    int heaviest = 0;
    bool flat = true;
    for (int pc = 0; pc < 12; ++pc) {
        if (hist[pc] > 0.0) ++nonzero;
        if (hist[pc] > hist[heaviest]) heaviest = pc;
        if (hist[pc] != hist[0]) flat = false;
    }
    if (nonzero <= 1 || flat) {
        // Degenerate histogram: no usable correlation shape. Documented
        // fallback: heaviest pitch class as tonic, major, score 0.
        return KeyEstimate{nonzero == 1 ? heaviest : 0, Mode::major, 0.0};
    }

    KeyEstimate best{0, Mode::major, -2.0};
    bool have_best = false;
    std::array<double, 12> rotated;
    const std::vector<double> h(hist.begin(), hist.end());
    for (int mode_i = 0; mode_i < 2; ++mode_i) {
        const auto& weights =
            mode_i == 0 ? profile.major_weights : profile.minor_weights;
        for (int tonic = 0; tonic < 12; ++tonic) {
            for (int pc = 0; pc < 12; ++pc)
                rotated[pc] = weights[((pc - tonic) % 12 + 12) % 12];
            const auto r = measures::pearson(
                h, std::vector<double>(rotated.begin(), rotated.end()));
            if (!r) continue;
            // Ties pick the lower tonic; at the same tonic the earlier
            // (major) pass wins because replacement requires improvement.
            if (!have_best || *r > best.score ||
                (*r == best.score && tonic < best.tonic_pc)) {
                best = KeyEstimate{tonic,
                                   mode_i == 0 ? Mode::major : Mode::minor, *r};
                have_best = true;
            }
        }
    }
    if (!have_best) return KeyEstimate{heaviest, Mode::major, 0.0};
    return best;
}

} // namespace degreescope::tonality
