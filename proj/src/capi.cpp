#include "degreescope.h"

#include "core/counts.hpp"
#include "core/errors.hpp"
#include "core/harmony.hpp"
#include "core/key.hpp"
#include "core/measures.hpp"
#include "core/pipeline.hpp"
#include "core/report.hpp"
#include "core/resample.hpp"
#include "core/smf.hpp"
#include "core/textio.hpp"

#include <cstring>
#include <sstream>
#include <string>

namespace ds = degreescope;

namespace {

thread_local std::string t_last_error;

void set_error(const std::string& msg) { t_last_error = msg; }

// Every entry point funnels through here so the status <-> exception mapping
// stays in one place.
template <typename Fn>
ds_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return DS_OK;
    } catch (const ds::config_error& e) {
        set_error(e.what());
        return DS_ERR_CONFIG;
    } catch (const ds::input_error& e) {
        set_error(e.what());
        return DS_ERR_INPUT;
    } catch (const ds::internal_error& e) {
        set_error(e.what());
        return DS_ERR_INTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return DS_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return DS_ERR_INTERNAL;
    }
}

ds_status require(bool ok, const char* msg) {
    if (ok) return DS_OK;
    set_error(msg);
    return DS_ERR_CONFIG;
}

} // namespace

struct ds_notes {
    std::vector<ds::NoteEvent> events;
};
struct ds_chords {
    std::vector<ds::ChordEvent> events;
};
struct ds_degrees {
    ds::harmony::DegreeSequence seq;
};
struct ds_profile {
    ds::counts::CountProfile profile;
};
struct ds_dist {
    ds::measures::SmoothedDistribution dist;
};
struct ds_config {
    ds::report::RunConfig cfg;
};

extern "C" {

const char* ds_last_error(void) { return t_last_error.c_str(); }

const char* ds_version(void) { return "0.1.0"; }

/* ---- parsing ---- */

ds_status ds_notes_from_smf(const void* bytes, size_t len, ds_notes** out) {
    if (auto st = require(bytes && out, "null argument")) return st;
    return guarded([&] {
        auto handle = std::make_unique<ds_notes>();
        handle->events = ds::ingest::parse_smf(
            {static_cast<const uint8_t*>(bytes), len});
        *out = handle.release();
    });
}

ds_status ds_notes_from_jsonl(const char* text, ds_notes** out) {
    if (auto st = require(text && out, "null argument")) return st;
    return guarded([&] {
        auto handle = std::make_unique<ds_notes>();
        handle->events = ds::ingest::parse_note_jsonl(text);
        *out = handle.release();
    });
}

size_t ds_notes_count(const ds_notes* notes) {
    return notes ? notes->events.size() : 0;
}

ds_status ds_notes_get(const ds_notes* notes, size_t index,
                       ds_note_event* out) {
    if (auto st = require(notes && out, "null argument")) return st;
    if (auto st = require(index < notes->events.size(), "index out of range"))
        return st;
    const auto& n = notes->events[index];
    *out = ds_note_event{n.onset_s, n.offset_s, n.pitch, n.velocity};
    return DS_OK;
}

void ds_notes_free(ds_notes* notes) { delete notes; }

ds_status ds_chords_from_text(const char* text, ds_chords** out) {
    if (auto st = require(text && out, "null argument")) return st;
    return guarded([&] {
        auto handle = std::make_unique<ds_chords>();
        handle->events = ds::ingest::parse_chord_stream(text);
        *out = handle.release();
    });
}

ds_status ds_chords_detect(const ds_notes* notes, double window_s,
                           double hop_s, ds_chords** out) {
    if (auto st = require(notes && out, "null argument")) return st;
    return guarded([&] {
        auto handle = std::make_unique<ds_chords>();
        handle->events =
            ds::harmony::detect_chords(notes->events, window_s, hop_s);
        *out = handle.release();
    });
}

size_t ds_chords_count(const ds_chords* chords) {
    return chords ? chords->events.size() : 0;
}

ds_status ds_chords_get(const ds_chords* chords, size_t index,
                        ds_chord_event* out) {
    if (auto st = require(chords && out, "null argument")) return st;
    if (auto st = require(index < chords->events.size(), "index out of range"))
        return st;
    const auto& ev = chords->events[index];
    out->onset_s = ev.onset_s;
    std::snprintf(out->label, sizeof out->label, "%s", ev.label.c_str());
    return DS_OK;
}

void ds_chords_free(ds_chords* chords) { delete chords; }

/* ---- key estimation ---- */

ds_status ds_estimate_key(const ds_notes* notes, const char* profile,
                          ds_key_estimate* out) {
    if (auto st = require(notes && out, "null argument")) return st;
    return guarded([&] {
        const auto prof =
            ds::tonality::load_key_profile(profile ? profile : "kk");
        const auto key = ds::tonality::estimate_key(notes->events, prof);
        *out = ds_key_estimate{key.tonic_pc,
                               key.mode == ds::Mode::minor ? 1 : 0, key.score};
    });
}

/* ---- degrees and counts ---- */

const char* ds_degree_name(int32_t index) {
    if (index < 0 || index >= ds::harmony::kNumDegrees) return nullptr;
    return ds::harmony::kDegreeNames[static_cast<std::size_t>(index)].data();
}

ds_status ds_degrees_from_chords(const ds_chords* chords, int32_t tonic_pc,
                                 ds_degrees** out) {
    if (auto st = require(chords && out, "null argument")) return st;
    if (auto st = require(tonic_pc >= 0 && tonic_pc <= 11,
                          "tonic_pc must be in 0..11"))
        return st;
    return guarded([&] {
        auto handle = std::make_unique<ds_degrees>();
        handle->seq = ds::harmony::degree_sequence(chords->events, tonic_pc);
        *out = handle.release();
    });
}

size_t ds_degrees_count(const ds_degrees* degrees) {
    return degrees ? degrees->seq.degrees.size() : 0;
}

int32_t ds_degrees_get(const ds_degrees* degrees, size_t index) {
    if (!degrees || index >= degrees->seq.degrees.size()) return -1;
    return degrees->seq.degrees[index];
}

double ds_degrees_dropped_fraction(const ds_degrees* degrees) {
    return degrees ? degrees->seq.dropped_fraction() : 0.0;
}

void ds_degrees_free(ds_degrees* degrees) { delete degrees; }

ds_status ds_profile_from_degrees(const ds_degrees* degrees,
                                  ds_profile** out) {
    if (auto st = require(degrees && out, "null argument")) return st;
    return guarded([&] {
        auto handle = std::make_unique<ds_profile>();
        handle->profile = ds::counts::count_piece(degrees->seq);
        *out = handle.release();
    });
}

ds_status ds_profile_aggregate(const ds_profile* const* profiles, size_t count,
                               ds_profile** out) {
    if (auto st = require(profiles && out, "null argument")) return st;
    return guarded([&] {
        std::vector<ds::counts::CountProfile> list;
        list.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            if (!profiles[i]) throw ds::config_error("null profile in list");
            list.push_back(profiles[i]->profile);
        }
        auto handle = std::make_unique<ds_profile>();
        handle->profile = ds::counts::aggregate(list);
        *out = handle.release();
    });
}

ds_status ds_profile_marginal(const ds_profile* profile,
                              uint64_t out[DS_NUM_DEGREES]) {
    if (auto st = require(profile && out, "null argument")) return st;
    std::memcpy(out, profile->profile.marginal.data(),
                sizeof(uint64_t) * DS_NUM_DEGREES);
    return DS_OK;
}

ds_status ds_profile_transitions(const ds_profile* profile,
                                 uint64_t out[DS_NUM_TRANSITIONS]) {
    if (auto st = require(profile && out, "null argument")) return st;
    std::memcpy(out, profile->profile.transitions.data(),
                sizeof(uint64_t) * DS_NUM_TRANSITIONS);
    return DS_OK;
}

uint64_t ds_profile_n_pieces(const ds_profile* profile) {
    return profile ? profile->profile.n_pieces : 0;
}

uint64_t ds_profile_total_events(const ds_profile* profile) {
    return profile ? profile->profile.total_events : 0;
}

void ds_profile_free(ds_profile* profile) { delete profile; }

/* ---- measures ---- */

ds_status ds_dist_from_counts(const uint64_t* counts, size_t k, double alpha,
                              ds_dist** out) {
    if (auto st = require(counts && out, "null argument")) return st;
    return guarded([&] {
        *out = new ds_dist{ds::measures::smooth({counts, k}, alpha)};
    });
}

ds_status ds_dist_from_profile(const ds_profile* profile, int32_t basis,
                               double alpha, ds_dist** out) {
    if (auto st = require(profile && out, "null argument")) return st;
    if (auto st = require(basis == 0 || basis == 1,
                          "basis must be 0 (marginal) or 1 (transitions)"))
        return st;
    return guarded([&] {
        const auto counts = ds::resampling::basis_counts(
            profile->profile, basis == 0 ? ds::resampling::Basis::marginal
                                         : ds::resampling::Basis::transitions);
        *out = new ds_dist{ds::measures::smooth(counts, alpha)};
    });
}

size_t ds_dist_size(const ds_dist* dist) {
    return dist ? dist->dist.support_size() : 0;
}

ds_status ds_dist_probs(const ds_dist* dist, double* out) {
    if (auto st = require(dist && out, "null argument")) return st;
    const auto probs = dist->dist.probs();
    std::memcpy(out, probs.data(), probs.size() * sizeof(double));
    return DS_OK;
}

void ds_dist_free(ds_dist* dist) { delete dist; }

ds_status ds_entropy(const ds_dist* p, double* bits) {
    if (auto st = require(p && bits, "null argument")) return st;
    return guarded([&] { *bits = ds::measures::shannon_entropy(p->dist); });
}

ds_status ds_kl(const ds_dist* p, const ds_dist* q, double* bits) {
    if (auto st = require(p && q && bits, "null argument")) return st;
    return guarded([&] { *bits = ds::measures::kl_divergence(p->dist, q->dist); });
}

ds_status ds_js(const ds_dist* p, const ds_dist* q, double* bits) {
    if (auto st = require(p && q && bits, "null argument")) return st;
    return guarded([&] { *bits = ds::measures::js_divergence(p->dist, q->dist); });
}

ds_status ds_zipf(const ds_dist* p, ds_zipf_fit* out) {
    if (auto st = require(p && out, "null argument")) return st;
    return guarded([&] {
        const auto fit = ds::measures::zipf_fit(p->dist);
        out->slope_alpha = fit.slope_alpha;
        out->intercept_log_c = fit.intercept_logc;
        out->r_squared = fit.r_squared.value_or(0.0);
        out->r2_defined = fit.r_squared.has_value() ? 1 : 0;
        out->n_points = static_cast<int32_t>(fit.n_points);
    });
}

ds_status ds_spearman(const double* x, const double* y, size_t n, double* rho,
                      int32_t* defined) {
    if (auto st = require(x && y && rho && defined, "null argument")) return st;
    return guarded([&] {
        const auto r = ds::measures::spearman_rho({x, n}, {y, n});
        *defined = r.has_value() ? 1 : 0;
        *rho = r.value_or(0.0);
    });
}

ds_status ds_cosine(const double* u, const double* v, size_t n, double* value,
                    int32_t* defined) {
    if (auto st = require(u && v && value && defined, "null argument"))
        return st;
    return guarded([&] {
        const auto c = ds::measures::cosine_similarity({u, n}, {v, n});
        *defined = c.has_value() ? 1 : 0;
        *value = c.value_or(0.0);
    });
}

ds_status ds_spearman_p_value(double rho, size_t n, double* p) {
    if (auto st = require(p != nullptr, "null argument")) return st;
    return guarded([&] { *p = ds::measures::spearman_p_value(rho, n); });
}

/* ---- commands ---- */

ds_config* ds_config_new(void) { return new ds_config(); }

void ds_config_free(ds_config* config) { delete config; }

ds_status ds_config_set(ds_config* config, const char* key,
                        const char* value) {
    if (auto st = require(config && key && value, "null argument")) return st;
    return guarded([&] {
        auto& cfg = config->cfg;
        const std::string k = key;
        const std::string v = value;
        auto parse_double = [&](const char* what) {
            try {
                std::size_t used = 0;
                const double d = std::stod(v, &used);
                if (used != v.size()) throw std::invalid_argument(v);
                return d;
            } catch (const std::exception&) {
                throw ds::config_error(std::string(what) +
                                       ": invalid number '" + v + "'");
            }
        };
        auto parse_u64 = [&](const char* what) {
            try {
                std::size_t used = 0;
                const long long d = std::stoll(v, &used);
                if (used != v.size() || d < 0) throw std::invalid_argument(v);
                return static_cast<uint64_t>(d);
            } catch (const std::exception&) {
                throw ds::config_error(std::string(what) +
                                       ": invalid non-negative integer '" + v +
                                       "'");
            }
        };
        auto parse_bool = [&](const char* what) {
            if (v == "1" || v == "true") return true;
            if (v == "0" || v == "false") return false;
            throw ds::config_error(std::string(what) + ": expected 0/1, got '" +
                                   v + "'");
        };

        if (k == "alpha") {
            cfg.alpha = parse_double("alpha");
            if (!(cfg.alpha > 0.0))
                throw ds::config_error("alpha must be positive");
        } else if (k == "min-pieces") {
            cfg.min_pieces = parse_u64("min-pieces");
            if (cfg.min_pieces < 1)
                throw ds::config_error("min-pieces must be >= 1");
        } else if (k == "seed") {
            cfg.seed = parse_u64("seed");
        } else if (k == "bootstrap-iters") {
            cfg.bootstrap_iters = parse_u64("bootstrap-iters");
        } else if (k == "key-profile") {
            cfg.key_profile = v;
        } else if (k == "chord-window") {
            cfg.chord_window = parse_double("chord-window");
        } else if (k == "chord-hop") {
            cfg.chord_hop = parse_double("chord-hop");
        } else if (k == "zipf-exclude-diagonal") {
            cfg.zipf_exclude_diagonal = parse_bool("zipf-exclude-diagonal");
        } else if (k == "zipf-raw") {
            cfg.zipf_raw = parse_bool("zipf-raw");
        } else if (k == "keep-going") {
            cfg.keep_going = parse_bool("keep-going");
        } else if (k == "threads") {
            const auto t = parse_u64("threads");
            if (t < 1) throw ds::config_error("threads must be >= 1");
            cfg.threads = static_cast<unsigned>(t);
        } else if (k == "subsample-size") {
            cfg.subsample_size = parse_u64("subsample-size");
        } else if (k == "subsample-count") {
            cfg.subsample_count = parse_u64("subsample-count");
        } else if (k == "alphas") {
            std::vector<double> alphas;
            std::stringstream ss(v);
            std::string part;
            while (std::getline(ss, part, ',')) {
                try {
                    const double a = std::stod(part);
                    if (!(a > 0.0)) throw std::invalid_argument(part);
                    alphas.push_back(a);
                } catch (const std::exception&) {
                    throw ds::config_error("alphas: invalid value '" + part +
                                           "'");
                }
            }
            if (alphas.empty())
                throw ds::config_error("alphas: empty list");
            cfg.alphas = std::move(alphas);
        } else if (k == "key-override") {
            // "<piece_id>=<pc>,<mode>", e.g. "goldberg=7,major"
            const auto eq = v.find('=');
            const auto comma = v.find(',', eq == std::string::npos ? 0 : eq);
            if (eq == std::string::npos || comma == std::string::npos ||
                eq == 0)
                throw ds::config_error(
                    "key-override: expected <piece_id>=<pc>,<mode>, got '" +
                    v + "'");
            const std::string piece = v.substr(0, eq);
            const std::string pc_text = v.substr(eq + 1, comma - eq - 1);
            const std::string mode_text = v.substr(comma + 1);
            int pc = -1;
            try {
                pc = std::stoi(pc_text);
            } catch (const std::exception&) {
            }
            if (pc < 0 || pc > 11)
                throw ds::config_error(
                    "key-override: tonic pitch class must be 0..11, got '" +
                    pc_text + "'");
            ds::Mode mode;
            if (mode_text == "major")
                mode = ds::Mode::major;
            else if (mode_text == "minor")
                mode = ds::Mode::minor;
            else
                throw ds::config_error(
                    "key-override: mode must be major or minor, got '" +
                    mode_text + "'");
            cfg.key_overrides[piece] = ds::KeyEstimate{pc, mode, 0.0};
        } else {
            throw ds::config_error("unknown config key '" + k + "'");
        }
    });
}

namespace {

// Warnings were already printed to stderr at collection time; only the
// exit-code policy lives here.
ds_status finish_command(const ds::report::CommandResult& result,
                         bool keep_going) {
    if (result.any_piece_failed && !keep_going) {
        set_error("one or more pieces failed to process (use keep-going to "
                  "tolerate)");
        return DS_ERR_INPUT;
    }
    t_last_error.clear();
    return DS_OK;
}

} // namespace

ds_status ds_cmd_degrees(const ds_config* config, const char* manifest_path,
                         const char* out_path) {
    if (auto st = require(config && manifest_path && out_path, "null argument"))
        return st;
    ds::report::CommandResult result;
    const auto st = guarded([&] {
        result = ds::report::cmd_degrees(manifest_path, config->cfg, out_path);
    });
    if (st != DS_OK) return st;
    return finish_command(result, config->cfg.keep_going);
}

ds_status ds_cmd_analyze(const ds_config* config, const char* manifest_path,
                         const char* out_dir) {
    if (auto st = require(config && manifest_path && out_dir, "null argument"))
        return st;
    ds::report::CommandResult result;
    const auto st = guarded([&] {
        result = ds::report::cmd_analyze(manifest_path, config->cfg, out_dir);
    });
    if (st != DS_OK) return st;
    return finish_command(result, config->cfg.keep_going);
}

ds_status ds_cmd_pools(const ds_config* config, const char* manifest_path,
                       const char* pool_spec_path,
                       const char* feature_vectors_path, const char* out_dir) {
    if (auto st = require(config && manifest_path && out_dir, "null argument"))
        return st;
    ds::report::CommandResult result;
    const auto st = guarded([&] {
        std::optional<std::filesystem::path> pool_spec;
        if (pool_spec_path && *pool_spec_path) pool_spec = pool_spec_path;
        std::optional<std::filesystem::path> features;
        if (feature_vectors_path && *feature_vectors_path)
            features = feature_vectors_path;
        result = ds::report::cmd_pools(manifest_path, pool_spec, features,
                                       config->cfg, out_dir);
    });
    if (st != DS_OK) return st;
    return finish_command(result, config->cfg.keep_going);
}

ds_status ds_cmd_plotdata(const ds_config* config, const char* report_dir,
                          const char* composers, const char* out_path) {
    if (auto st = require(config && report_dir && out_path, "null argument"))
        return st;
    return guarded([&] {
        std::vector<std::string> names;
        if (composers && *composers) {
            std::stringstream ss(composers);
            std::string part;
            while (std::getline(ss, part, ','))
                if (!part.empty()) names.push_back(part);
        }
        ds::report::cmd_plotdata(report_dir, names, out_path);
    });
}

} /* extern "C" */
