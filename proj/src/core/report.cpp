#include "core/report.hpp"

#include "core/errors.hpp"
#include "core/jsonout.hpp"
#include "core/rng.hpp"
#include "core/textio.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace degreescope::report {

using counts::CountProfile;
using nlohmann::json;
using resampling::Basis;

namespace {

constexpr const char* kSchemaVersion = "1";

json config_json(const RunConfig& cfg) {
    json j;
    j["alpha"] = cfg.alpha;
    j["min_pieces"] = cfg.min_pieces;
    j["seed"] = cfg.seed;
    j["bootstrap_iters"] = cfg.bootstrap_iters;
    j["key_profile"] = cfg.key_profile;
    j["chord_window"] = cfg.chord_window;
    j["chord_hop"] = cfg.chord_hop;
    j["zipf_exclude_diagonal"] = cfg.zipf_exclude_diagonal;
    j["zipf_raw"] = cfg.zipf_raw;
    j["alphas"] = cfg.alphas;
    j["prng"] = rng_provenance();
    return j;
}

json measure_json(const resampling::MeasureResult& m) {
    json j;
    j["value"] = m.value;
    j["alpha"] = m.alpha;
    if (m.ci_low) j["ci_low"] = *m.ci_low;
    if (m.ci_high) j["ci_high"] = *m.ci_high;
    if (m.seed) j["seed"] = *m.seed;
    if (m.iterations) j["B"] = *m.iterations;
    return j;
}

json zipf_json(const measures::ZipfFit& fit) {
    json j;
    j["slope_alpha"] = fit.slope_alpha;
    j["intercept_log_c"] = fit.intercept_logc;
    j["r_squared"] = fit.r_squared ? json(*fit.r_squared) : json(nullptr);
    j["n_points"] = fit.n_points;
    return j;
}

json profile_json(const CountProfile& p) {
    json j;
    j["marginal"] = std::vector<uint64_t>(p.marginal.begin(), p.marginal.end());
    json rows = json::array();
    for (std::size_t i = 0; i < counts::kMarginalCells; ++i) {
        std::vector<uint64_t> row(counts::kMarginalCells);
        for (std::size_t k = 0; k < counts::kMarginalCells; ++k)
            row[k] = p.transition_at(i, k);
        rows.push_back(row);
    }
    j["transitions"] = rows;
    j["n_pieces"] = p.n_pieces;
    j["total_events"] = p.total_events;
    return j;
}

CountProfile profile_from_json(const json& j) {
    CountProfile p;
    const auto& marg = j.at("marginal");
    const auto& trans = j.at("transitions");
    if (!marg.is_array() || marg.size() != counts::kMarginalCells ||
        !trans.is_array() || trans.size() != counts::kMarginalCells)
        throw input_error("count profile: wrong marginal/transition shape");
    for (std::size_t i = 0; i < counts::kMarginalCells; ++i)
        p.marginal[i] = marg[i].get<uint64_t>();
    for (std::size_t i = 0; i < counts::kMarginalCells; ++i) {
        const auto& row = trans[i];
        if (!row.is_array() || row.size() != counts::kMarginalCells)
            throw input_error("count profile: ragged transition matrix");
        for (std::size_t k = 0; k < counts::kMarginalCells; ++k)
            p.transitions[i * counts::kMarginalCells + k] = row[k].get<uint64_t>();
    }
    p.n_pieces = j.at("n_pieces").get<uint64_t>();
    p.total_events = j.at("total_events").get<uint64_t>();
    return p;
}

std::string transition_cell_name(std::size_t flat_index) {
    const auto from = flat_index / counts::kMarginalCells;
    const auto to = flat_index % counts::kMarginalCells;
    return std::string(harmony::kDegreeNames[from]) + ">" +
           std::string(harmony::kDegreeNames[to]);
}

std::string cell_name(Basis basis, std::size_t index) {
    return basis == Basis::marginal
               ? std::string(harmony::kDegreeNames[index])
               : transition_cell_name(index);
}

// Composer processing summary used by analyze and pools.
struct Corpus {
    std::map<std::string, std::vector<CountProfile>> by_composer;
    std::map<std::string, bool> neoclassical;     // composer -> group
    std::map<std::string, std::string> era;       // composer -> manifest era
    uint64_t dropped_events = 0;
    uint64_t total_chord_events = 0;
};

// Piece failures surface immediately on stderr as well as in the result, so
// a later hard error (say, too few composers left) does not swallow the
// reason the pieces disappeared.
void warn(CommandResult& result, const std::string& message) {
    result.warnings.push_back(message);
    std::cerr << "warning: " << message << "\n";
}

Corpus build_corpus(const std::vector<PieceResult>& pieces,
                    CommandResult& result) {
    Corpus corpus;
    for (const auto& p : pieces) {
        if (p.failed) {
            result.any_piece_failed = true;
            warn(result, "piece '" + p.entry.piece_id + "' failed: " + p.error);
            continue;
        }
        corpus.by_composer[p.entry.composer].push_back(p.profile);
        corpus.dropped_events += p.seq.dropped_events;
        corpus.total_chord_events += p.seq.total_events;
        const auto [it, inserted] =
            corpus.neoclassical.emplace(p.entry.composer, p.entry.neoclassical);
        if (!inserted && it->second != p.entry.neoclassical)
            throw input_error("composer '" + p.entry.composer +
                              "' appears in both manifest groups");
        corpus.era.emplace(p.entry.composer, p.entry.era);
    }
    return corpus;
}

std::vector<bool> diagonal_mask() {
    std::vector<bool> mask(counts::kTransitionCells, false);
    for (std::size_t d = 0; d < counts::kMarginalCells; ++d)
        mask[d * counts::kMarginalCells + d] = true;
    return mask;
}

} // namespace

RankedSeries ranked_series(const CountProfile& profile, Basis basis,
                           const RunConfig& cfg) {
    const auto raw = resampling::basis_counts(profile, basis);
    const bool drop_diag =
        basis == Basis::transitions && cfg.zipf_exclude_diagonal;
    static const std::vector<bool> diag = diagonal_mask();

    std::vector<std::size_t> cells;
    std::vector<double> probs;
    if (cfg.zipf_raw) {
        uint64_t total = 0;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (drop_diag && diag[i]) continue;
            if (raw[i] == 0) continue;
            total += raw[i];
            cells.push_back(i);
        }
        if (total == 0 || cells.size() < 3)
            throw input_error(
                "raw zipf mode needs at least 3 nonzero cells in the profile");
        for (std::size_t i : cells)
            probs.push_back(static_cast<double>(raw[i]) /
                            static_cast<double>(total));
    } else {
        const auto dist = measures::smooth(raw, cfg.alpha);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (drop_diag && diag[i]) continue;
            cells.push_back(i);
            probs.push_back(dist[i]);
        }
    }

    RankedSeries series;
    series.fit = measures::zipf_fit_points(probs, cells);

    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (probs[a] != probs[b]) return probs[a] > probs[b];
        return cells[a] < cells[b];
    });
    series.points.reserve(order.size());
    for (std::size_t i : order) series.points.emplace_back(cells[i], probs[i]);
    return series;
}

// ---------------------------------------------------------------------------
// degrees
// ---------------------------------------------------------------------------

CommandResult cmd_degrees(const std::filesystem::path& manifest_path,
                          const RunConfig& cfg,
                          const std::filesystem::path& out_path) {
    const auto manifest = ingest::load_manifest(manifest_path);
    const auto pieces = process_pieces(manifest, cfg);

    CommandResult result;
    std::string out;
    uint64_t dropped = 0;
    uint64_t total = 0;
    uint64_t ok_pieces = 0;
    for (const auto& p : pieces) {
        if (p.failed) {
            result.any_piece_failed = true;
            warn(result, "piece '" + p.entry.piece_id + "' failed: " + p.error);
            continue;
        }
        json line;
        line["piece_id"] = p.entry.piece_id;
        json degrees = json::array();
        for (int d : p.seq.degrees)
            degrees.push_back(std::string(
                harmony::kDegreeNames[static_cast<std::size_t>(d)]));
        line["degrees"] = degrees;
        line["dropped_fraction"] = p.seq.dropped_fraction();
        out += dump_json(line, 0);
        dropped += p.seq.dropped_events;
        total += p.seq.total_events;
        ++ok_pieces;
    }
    json summary;
    summary["summary"] = {
        {"corpus_dropped_fraction",
         total == 0 ? 0.0
                    : static_cast<double>(dropped) / static_cast<double>(total)},
        {"n_pieces", ok_pieces}};
    out += dump_json(summary, 0);

    if (out_path == "-")
        std::cout << out;
    else
        write_file_atomic(out_path, out);
    return result;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

namespace {

struct ComposerAnalysis {
    std::string name;
    CountProfile profile;
    resampling::MeasureResult shannon;
    measures::ZipfFit zipf_marginal;
    measures::ZipfFit zipf_transitions;
    resampling::MeasureResult zipf_t_slope_ci; // CI carriers for the fits
    resampling::MeasureResult zipf_t_r2_ci;
    resampling::MeasureResult zipf_m_slope_ci;
    resampling::MeasureResult zipf_m_r2_ci;
    // Marginal-KL row against every included composer (by index); the
    // diagonal slot stays empty.
    std::vector<std::optional<resampling::MeasureResult>> kl_row_ci;
};

double nan_marker() { return std::numeric_limits<double>::quiet_NaN(); }

// Statistics evaluated on a (re)aggregated profile. Fit statistics map an
// undefined R^2 (or an unfittable raw profile) to NaN so the replicate is
// dropped rather than faked.
resampling::Statistic shannon_stat(const RunConfig& cfg) {
    return [cfg](const CountProfile& p) {
        return measures::shannon_entropy(measures::smooth(
            resampling::basis_counts(p, Basis::marginal), cfg.alpha));
    };
}

resampling::Statistic zipf_stat(const RunConfig& cfg, Basis basis,
                                bool want_slope) {
    return [cfg, basis, want_slope](const CountProfile& p) {
        try {
            const auto fit = ranked_series(p, basis, cfg).fit;
            if (want_slope) return fit.slope_alpha;
            return fit.r_squared ? *fit.r_squared : nan_marker();
        } catch (const std::exception&) {
            return nan_marker();
        }
    };
}

std::string format_double(double v, int precision = 4) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(precision);
    ss << v;
    return ss.str();
}

} // namespace

CommandResult cmd_analyze(const std::filesystem::path& manifest_path,
                          const RunConfig& cfg,
                          const std::filesystem::path& out_dir) {
    const auto manifest = ingest::load_manifest(manifest_path);
    const auto pieces = process_pieces(manifest, cfg);

    CommandResult result;
    const Corpus corpus = build_corpus(pieces, result);
    const auto selection =
        counts::select_high_sample(corpus.by_composer, cfg.min_pieces);

    std::filesystem::create_directories(out_dir);
    const std::size_t n = selection.included.size();
    const std::string n_str = std::to_string(n);
    const json cfg_json = config_json(cfg);

    std::vector<std::string> names;
    std::vector<const CountProfile*> profiles;
    for (const auto& [name, profile] : selection.included) {
        names.push_back(name);
        profiles.push_back(&profile);
    }

    // Smoothed marginal distributions of the full samples, shared by the
    // matrices and by the KL bootstrap statistics.
    std::vector<measures::SmoothedDistribution> marginal_dists;
    std::vector<measures::SmoothedDistribution> transition_dists;
    marginal_dists.reserve(n);
    transition_dists.reserve(n);
    for (const auto* p : profiles) {
        marginal_dists.push_back(measures::smooth(
            resampling::basis_counts(*p, Basis::marginal), cfg.alpha));
        transition_dists.push_back(measures::smooth(
            resampling::basis_counts(*p, Basis::transitions), cfg.alpha));
    }

    // Per-composer scalar analyses, bootstrap draws shared across each row.
    std::vector<ComposerAnalysis> analyses(n);
    const resampling::BootstrapConfig boot{
        std::max<uint64_t>(cfg.bootstrap_iters, 1), cfg.seed, 2.5, 97.5};
    const bool with_ci = cfg.bootstrap_iters > 0;

    parallel_for(n, worker_count(cfg.threads), [&](std::size_t i) {
        auto& a = analyses[i];
        a.name = names[i];
        a.profile = *profiles[i];
        try {
            a.zipf_marginal =
                ranked_series(a.profile, Basis::marginal, cfg).fit;
            a.zipf_transitions =
                ranked_series(a.profile, Basis::transitions, cfg).fit;
        } catch (const input_error& e) {
            // Raw-mode fits can be impossible for a degenerate composer;
            // name the culprit.
            throw input_error("composer '" + a.name + "': " + e.what());
        }

        std::vector<resampling::Statistic> stats;
        stats.push_back(shannon_stat(cfg));
        stats.push_back(zipf_stat(cfg, Basis::marginal, true));
        stats.push_back(zipf_stat(cfg, Basis::marginal, false));
        stats.push_back(zipf_stat(cfg, Basis::transitions, true));
        stats.push_back(zipf_stat(cfg, Basis::transitions, false));
        std::vector<std::size_t> kl_targets;
        for (std::size_t b = 0; b < n; ++b) {
            if (b == i) continue;
            kl_targets.push_back(b);
            const auto* target = &marginal_dists[b];
            const double alpha = cfg.alpha;
            stats.push_back([target, alpha](const CountProfile& p) {
                return measures::kl_divergence(
                    measures::smooth(
                        resampling::basis_counts(p, Basis::marginal), alpha),
                    *target);
            });
        }

        a.kl_row_ci.resize(n);
        if (with_ci) {
            const auto& piece_list = corpus.by_composer.at(a.name);
            auto rs = resampling::bootstrap_ci_many(piece_list, stats, boot,
                                                    cfg.alpha);
            a.shannon = rs[0];
            a.zipf_m_slope_ci = rs[1];
            a.zipf_m_r2_ci = rs[2];
            a.zipf_t_slope_ci = rs[3];
            a.zipf_t_r2_ci = rs[4];
            for (std::size_t k = 0; k < kl_targets.size(); ++k)
                a.kl_row_ci[kl_targets[k]] = rs[5 + k];
        } else {
            a.shannon.value = stats[0](a.profile);
            a.shannon.alpha = cfg.alpha;
        }
    });

    // --- per-composer files (written even when the matrices cannot be) ---
    json shannon_file;
    shannon_file["schema_version"] = kSchemaVersion;
    shannon_file["config"] = cfg_json;
    json shannon_composers = json::array();
    for (const auto& a : analyses) {
        json item;
        item["name"] = a.name;
        item["n_pieces"] = a.profile.n_pieces;
        item["total_events"] = a.profile.total_events;
        item["shannon"] = measure_json(a.shannon);
        shannon_composers.push_back(item);
    }
    shannon_file["composers"] = shannon_composers;
    write_json_atomic(out_dir / ("shannon_scale_degrees_" + n_str + ".json"),
                      shannon_file);

    json zipf_file;
    zipf_file["schema_version"] = kSchemaVersion;
    zipf_file["config"] = cfg_json;
    {
        // Ranked by R^2 descending, undefined fits last.
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            const auto& rx = analyses[x].zipf_transitions.r_squared;
            const auto& ry = analyses[y].zipf_transitions.r_squared;
            if (rx.has_value() != ry.has_value()) return rx.has_value();
            if (rx && ry && *rx != *ry) return *rx > *ry;
            return analyses[x].name < analyses[y].name;
        });
        json rows = json::array();
        for (std::size_t i : order) {
            const auto& a = analyses[i];
            json item;
            item["name"] = a.name;
            item["n_pieces"] = a.profile.n_pieces;
            item["fit"] = zipf_json(a.zipf_transitions);
            if (with_ci) {
                json ci;
                ci["slope_alpha"] = measure_json(a.zipf_t_slope_ci);
                ci["r_squared"] = measure_json(a.zipf_t_r2_ci);
                item["bootstrap_ci"] = ci;
            }
            rows.push_back(item);
        }
        zipf_file["composers"] = rows;
    }
    write_json_atomic(out_dir / ("zipf_transitions_" + n_str + ".json"),
                      zipf_file);

    json profiles_file;
    profiles_file["schema_version"] = kSchemaVersion;
    profiles_file["config"] = cfg_json;
    json profile_rows = json::array();
    for (const auto& a : analyses) {
        json item;
        item["name"] = a.name;
        item["profile"] = profile_json(a.profile);
        profile_rows.push_back(item);
    }
    profiles_file["composers"] = profile_rows;
    write_json_atomic(out_dir / ("count_profiles_" + n_str + ".json"),
                      profiles_file);

    if (!selection.excluded.empty()) {
        json side;
        side["schema_version"] = kSchemaVersion;
        side["config"] = cfg_json;
        json rows = json::array();
        for (const auto& [name, n_pieces] : selection.excluded) {
            const auto agg = counts::aggregate(corpus.by_composer.at(name));
            json item;
            item["name"] = name;
            item["n_pieces"] = n_pieces;
            item["total_events"] = agg.total_events;
            item["low_sample"] = true;
            item["shannon"] = measures::shannon_entropy(measures::smooth(
                resampling::basis_counts(agg, Basis::marginal), cfg.alpha));
            try {
                item["zipf_transitions"] =
                    zipf_json(ranked_series(agg, Basis::transitions, cfg).fit);
            } catch (const std::exception&) {
                item["zipf_transitions"] = nullptr;
            }
            rows.push_back(item);
        }
        side["composers"] = rows;
        write_json_atomic(out_dir / ("low_sample_composers_" +
                                     std::to_string(selection.excluded.size()) +
                                     ".json"),
                          side);
    }

    if (n < 2)
        throw input_error(
            "matrix outputs need at least 2 composers above the inclusion "
            "threshold, got " + n_str);

    // --- matrices ---
    auto matrix_of = [&](const std::vector<measures::SmoothedDistribution>& d) {
        std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (a != b) m[a][b] = measures::kl_divergence(d[a], d[b]);
        return m;
    };
    const auto kl_marginal = matrix_of(marginal_dists);
    const auto kl_transitions = matrix_of(transition_dists);

    std::vector<std::vector<double>> js(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            js[a][b] = js[b][a] =
                measures::js_divergence(marginal_dists[a], marginal_dists[b]);

    auto matrix_json = [&](const std::vector<std::vector<double>>& m) {
        json rows = json::array();
        for (const auto& row : m) rows.push_back(row);
        return rows;
    };

    json kl_file;
    kl_file["schema_version"] = kSchemaVersion;
    kl_file["config"] = cfg_json;
    kl_file["names"] = names;
    kl_file["matrix"] = matrix_json(kl_marginal);
    if (with_ci) {
        json low = json::array(), high = json::array();
        for (std::size_t a = 0; a < n; ++a) {
            json lrow = json::array(), hrow = json::array();
            for (std::size_t b = 0; b < n; ++b) {
                const auto& ci = analyses[a].kl_row_ci[b];
                lrow.push_back(ci && ci->ci_low ? json(*ci->ci_low)
                                                : json(nullptr));
                hrow.push_back(ci && ci->ci_high ? json(*ci->ci_high)
                                                 : json(nullptr));
            }
            low.push_back(lrow);
            high.push_back(hrow);
        }
        kl_file["bootstrap_ci"] = {{"low", low}, {"high", high}};
    }
    const std::string dims = n_str + "x" + n_str;
    write_json_atomic(out_dir / ("kl_scale_degrees_" + dims + ".json"), kl_file);

    json kl_t_file;
    kl_t_file["schema_version"] = kSchemaVersion;
    kl_t_file["config"] = cfg_json;
    kl_t_file["names"] = names;
    kl_t_file["matrix"] = matrix_json(kl_transitions);
    write_json_atomic(out_dir / ("kl_transitions_" + dims + ".json"), kl_t_file);

    json js_file;
    js_file["schema_version"] = kSchemaVersion;
    js_file["config"] = cfg_json;
    js_file["names"] = names;
    js_file["matrix"] = matrix_json(js);
    write_json_atomic(out_dir / ("js_scale_degrees_" + dims + ".json"), js_file);

    // --- closest pairs, both directions as separate rows ---
    struct Pair {
        std::size_t a, b;
        double kl;
    };
    std::vector<Pair> ordered;
    ordered.reserve(n * (n - 1));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b) ordered.push_back({a, b, kl_marginal[a][b]});
    std::sort(ordered.begin(), ordered.end(), [&](const Pair& x, const Pair& y) {
        if (x.kl != y.kl) return x.kl < y.kl;
        if (names[x.a] != names[y.a]) return names[x.a] < names[y.a];
        return names[x.b] < names[y.b];
    });
    json pairs_file;
    pairs_file["schema_version"] = kSchemaVersion;
    pairs_file["config"] = cfg_json;
    json pair_rows = json::array();
    for (const auto& p : ordered) {
        json item;
        item["source"] = names[p.a];
        item["target"] = names[p.b];
        item["kl_bits"] = p.kl;
        pair_rows.push_back(item);
    }
    pairs_file["pairs"] = pair_rows;
    write_json_atomic(out_dir / ("closest_pairs_" + n_str + ".json"),
                      pairs_file);

    // --- smoothing robustness sweep and KL-vs-JS cross-check ---
    if (cfg.alphas.size() >= 2) {
        const auto robustness =
            resampling::smoothing_robustness(selection.included, cfg.alphas);
        json rob;
        rob["schema_version"] = kSchemaVersion;
        rob["config"] = cfg_json;
        rob["alphas"] = cfg.alphas;
        json rows = json::array();
        for (const auto& [name, row] : robustness) {
            json item;
            item["name"] = name;
            item["min_rho"] = row.min_rho;
            json m = json::array();
            for (const auto& r : row.rho) m.push_back(r);
            item["rho"] = m;
            rows.push_back(item);
        }
        rob["rows"] = rows;
        write_json_atomic(out_dir / ("smoothing_robustness_" + n_str + ".json"),
                          rob);
    }
    if (n >= 3) {
        const auto crosscheck =
            resampling::kl_js_crosscheck(selection.included, cfg.alpha);
        json cc;
        cc["schema_version"] = kSchemaVersion;
        cc["config"] = cfg_json;
        json rows = json::array();
        for (const auto& [name, rho] : crosscheck) {
            json item;
            item["name"] = name;
            item["rho"] = rho ? json(*rho) : json(nullptr);
            rows.push_back(item);
        }
        cc["rows"] = rows;
        write_json_atomic(out_dir / ("kl_js_spearman_" + n_str + ".json"), cc);
    }

    // --- combined report ---
    json full;
    full["schema_version"] = kSchemaVersion;
    full["config"] = cfg_json;
    json composers = json::array();
    for (const auto& a : analyses) {
        json item;
        item["name"] = a.name;
        item["n_pieces"] = a.profile.n_pieces;
        item["total_events"] = a.profile.total_events;
        item["shannon"] = measure_json(a.shannon);
        item["zipf_marginal"] = zipf_json(a.zipf_marginal);
        item["zipf_transitions"] = zipf_json(a.zipf_transitions);
        composers.push_back(item);
    }
    full["composers"] = composers;
    full["names"] = names;
    full["kl_matrix"] = matrix_json(kl_marginal);
    full["js_matrix"] = matrix_json(js);
    if (with_ci) full["bootstrap_ci"] = kl_file["bootstrap_ci"];
    write_json_atomic(out_dir / ("report_" + n_str + ".json"), full);

    // --- human-readable tables ---
    std::string tables;
    tables += "Shannon entropy of the scale-degree marginal (bits)\n";
    {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            if (analyses[x].shannon.value != analyses[y].shannon.value)
                return analyses[x].shannon.value > analyses[y].shannon.value;
            return analyses[x].name < analyses[y].name;
        });
        for (std::size_t i : order) {
            const auto& a = analyses[i];
            tables += "  " + a.name + "  H=" + format_double(a.shannon.value, 3);
            if (a.shannon.ci_low)
                tables += "  [" + format_double(*a.shannon.ci_low, 3) + ", " +
                          format_double(*a.shannon.ci_high, 3) + "]";
            tables += "  N=" + std::to_string(a.profile.n_pieces) + "\n";
        }
    }
    tables += "\nClosest pairs by KL divergence (bits), top 10\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(10, ordered.size()); ++i) {
        const auto& p = ordered[i];
        tables += "  " + names[p.a] + " || " + names[p.b] + "  " +
                  format_double(p.kl, 3) + "\n";
    }
    tables += "\nZipf fits on scale-degree transitions, ranked by R^2\n";
    {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            const auto& rx = analyses[x].zipf_transitions.r_squared;
            const auto& ry = analyses[y].zipf_transitions.r_squared;
            if (rx.has_value() != ry.has_value()) return rx.has_value();
            if (rx && ry && *rx != *ry) return *rx > *ry;
            return analyses[x].name < analyses[y].name;
        });
        int rank = 1;
        for (std::size_t i : order) {
            const auto& a = analyses[i];
            tables += "  " + std::to_string(rank++) + ". " + a.name +
                      "  alpha=" + format_double(a.zipf_transitions.slope_alpha, 3) +
                      "  R^2=" +
                      (a.zipf_transitions.r_squared
                           ? format_double(*a.zipf_transitions.r_squared, 3)
                           : std::string("undefined")) +
                      "  N=" + std::to_string(a.profile.n_pieces) + "\n";
        }
    }
    write_file_atomic(out_dir / "tables.txt", tables);

    // --- round-trip validation of the emitted matrices ---
    {
        const auto reloaded = json::parse(ingest::read_text_file(
            out_dir / ("kl_scale_degrees_" + dims + ".json")));
        const auto& m = reloaded.at("matrix");
        if (m.size() != n)
            throw internal_error("reloaded KL matrix has wrong dimension");
        for (std::size_t i = 0; i < n; ++i)
            if (std::fabs(m[i][i].get<double>()) > 1e-12)
                throw internal_error("reloaded KL matrix has nonzero diagonal");
        const auto kl_t_reloaded = json::parse(ingest::read_text_file(
            out_dir / ("kl_transitions_" + dims + ".json")));
        const auto& tm = kl_t_reloaded.at("matrix");
        for (std::size_t i = 0; i < n; ++i)
            if (std::fabs(tm[i][i].get<double>()) > 1e-12)
                throw internal_error(
                    "reloaded transition KL matrix has nonzero diagonal");
        const auto js_reloaded = json::parse(ingest::read_text_file(
            out_dir / ("js_scale_degrees_" + dims + ".json")));
        const auto& jm = js_reloaded.at("matrix");
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (std::fabs(jm[a][b].get<double>() - jm[b][a].get<double>()) >
                    1e-12)
                    throw internal_error("reloaded JS matrix is not symmetric");
    }
    return result;
}

// ---------------------------------------------------------------------------
// pools
// ---------------------------------------------------------------------------

CommandResult cmd_pools(
    const std::filesystem::path& manifest_path,
    const std::optional<std::filesystem::path>& pool_spec_path,
    const std::optional<std::filesystem::path>& feature_vectors_path,
    const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const auto manifest = ingest::load_manifest(manifest_path);
    const auto pieces = process_pieces(manifest, cfg);

    CommandResult result;
    const Corpus corpus = build_corpus(pieces, result);

    std::map<std::string, std::vector<CountProfile>> historical;
    std::map<std::string, std::vector<CountProfile>> neoclassical;
    for (const auto& [name, list] : corpus.by_composer) {
        if (corpus.neoclassical.at(name))
            neoclassical.emplace(name, list);
        else
            historical.emplace(name, list);
    }

    std::map<std::string, std::vector<std::string>> pool_spec;
    if (pool_spec_path) {
        pool_spec = ingest::load_pool_spec(*pool_spec_path);
    } else {
        for (const auto& [name, list] : historical)
            pool_spec[corpus.era.at(name)].push_back(name);
    }
    if (pool_spec.empty())
        throw config_error("no era pools: pool spec is empty and the manifest "
                           "has no historical composers");
    const auto pools = counts::build_era_pools(historical, pool_spec);

    // Artists above the inclusion threshold, aggregated.
    std::map<std::string, CountProfile> artists;
    for (const auto& [name, list] : neoclassical) {
        auto agg = counts::aggregate(list);
        if (agg.n_pieces >= cfg.min_pieces)
            artists.emplace(name, std::move(agg));
        else
            warn(result, "artist '" + name + "' has " +
                             std::to_string(agg.n_pieces) +
                             " pieces, below --min-pieces; skipped");
    }
    if (artists.empty())
        throw input_error(
            "no neoclassical artists above the inclusion threshold");

    std::filesystem::create_directories(out_dir);
    const json cfg_json = config_json(cfg);

    json era_file;
    era_file["schema_version"] = kSchemaVersion;
    era_file["config"] = cfg_json;
    json pool_rows = json::array();
    for (const auto& pool : pools) {
        json item;
        item["era"] = pool.era;
        item["members"] = pool.members;
        item["n_pieces"] = pool.profile.n_pieces;
        pool_rows.push_back(item);
    }
    era_file["pools"] = pool_rows;

    std::string tables = "KL divergence to era pools (bits); * marks the row minimum\n";
    json artist_rows = json::array();
    for (const auto& [name, profile] : artists) {
        json item;
        item["name"] = name;
        for (auto basis : {Basis::marginal, Basis::transitions}) {
            const auto assignment =
                resampling::era_assignment(profile, pools, cfg.alpha, basis);
            json b;
            b["min_era"] = assignment.era;
            b["kl_bits"] = assignment.kl_bits;
            item[basis == Basis::marginal ? "marginal" : "transitions"] = b;
            if (basis == Basis::marginal) {
                tables += "  " + name + ":";
                for (const auto& [era, kl] : assignment.kl_bits)
                    tables += "  " + era + "=" + format_double(kl, 3) +
                              (era == assignment.era ? "*" : "");
                tables += "\n";
            }
        }
        artist_rows.push_back(item);
    }
    era_file["artists"] = artist_rows;
    write_json_atomic(out_dir / ("era_kl_" + std::to_string(artists.size()) +
                                 ".json"),
                      era_file);

    if (cfg.subsample_count > 0) {
        if (cfg.subsample_size == 0)
            throw config_error(
                "--subsample-count needs --subsample-size as well");
        json conc_file;
        conc_file["schema_version"] = kSchemaVersion;
        conc_file["config"] = cfg_json;
        conc_file["subsample_size"] = cfg.subsample_size;
        conc_file["subsample_count"] = cfg.subsample_count;
        json rows = json::array();
        tables += "\nSubsampling concordance (" +
                  std::to_string(cfg.subsample_count) + " subsamples of " +
                  std::to_string(cfg.subsample_size) + " pieces)\n";
        for (const auto& [name, profile] : artists) {
            const auto rep = resampling::subsample_concordance(
                profile, pools, cfg.subsample_size, cfg.subsample_count,
                cfg.seed, cfg.alpha, name);
            json item;
            item["artist"] = rep.artist;
            item["full_sample_argmin_era_marginal"] =
                rep.full_sample_argmin_era_marginal;
            item["full_sample_argmin_era_transitions"] =
                rep.full_sample_argmin_era_transitions;
            item["concordance_marginal"] = rep.concordance_marginal;
            item["concordance_transitions"] = rep.concordance_transitions;
            item["n_subsamples"] = rep.n_subsamples;
            rows.push_back(item);
            tables += "  " + name + ": " + rep.full_sample_argmin_era_marginal +
                      " marginal=" + format_double(rep.concordance_marginal, 2) +
                      " transitions=" +
                      format_double(rep.concordance_transitions, 2) + "\n";
        }
        conc_file["artists"] = rows;
        write_json_atomic(out_dir / "concordance.json", conc_file);
    }

    if (feature_vectors_path) {
        const auto vectors =
            ingest::load_feature_vectors(*feature_vectors_path);
        json cc_file;
        cc_file["schema_version"] = kSchemaVersion;
        cc_file["config"] = cfg_json;
        json rows = json::array();
        tables += "\nSpearman rho between KL and cosine rankings\n";
        for (const auto& [name, profile] : artists) {
            const auto artist_vec = vectors.find(name);
            if (artist_vec == vectors.end()) {
                warn(result, "artist '" + name +
                                 "' has no feature vector; skipped from the "
                                 "cosine cross-check");
                continue;
            }
            // Targets: historical composers (any sample size) present in the
            // feature file, compared on the smoothed marginal.
            const auto artist_dist = measures::smooth(
                resampling::basis_counts(profile, Basis::marginal), cfg.alpha);
            std::map<std::string, double> kl_ranking;
            std::map<std::string, std::vector<double>> target_vectors;
            for (const auto& [target, list] : historical) {
                const auto vec = vectors.find(target);
                if (vec == vectors.end()) continue;
                const auto target_dist = measures::smooth(
                    resampling::basis_counts(counts::aggregate(list),
                                             Basis::marginal),
                    cfg.alpha);
                kl_ranking[target] =
                    measures::kl_divergence(artist_dist, target_dist);
                target_vectors[target] = vec->second;
            }
            const auto cc = resampling::kl_cosine_crosscheck(
                kl_ranking, target_vectors, artist_vec->second);
            json item;
            item["name"] = name;
            item["rho"] = cc.rho;
            item["p_value"] = cc.p_value;
            item["n_targets"] = kl_ranking.size();
            rows.push_back(item);
            tables += "  " + name + ": rho=" + format_double(cc.rho, 3) +
                      " p=" + format_double(cc.p_value, 4) + " (n=" +
                      std::to_string(kl_ranking.size()) + ")\n";
        }
        cc_file["artists"] = rows;
        write_json_atomic(out_dir / "kl_cosine_crosscheck.json", cc_file);
    }

    write_file_atomic(out_dir / "tables.txt", tables);
    return result;
}

// ---------------------------------------------------------------------------
// plotdata
// ---------------------------------------------------------------------------

void cmd_plotdata(const std::filesystem::path& report_dir,
                  const std::vector<std::string>& composers,
                  const std::filesystem::path& out_path) {
    // Locate the count-profile artifact an analyze run emitted.
    std::filesystem::path profiles_path;
    std::error_code ec;
    for (const auto& entry :
         std::filesystem::directory_iterator(report_dir, ec)) {
        const auto name = entry.path().filename().string();
        if (name.starts_with("count_profiles_") && name.ends_with(".json")) {
            if (!profiles_path.empty())
                throw config_error("multiple count_profiles files in " +
                                   report_dir.string());
            profiles_path = entry.path();
        }
    }
    if (ec || profiles_path.empty())
        throw input_error("no count_profiles_*.json found in " +
                          report_dir.string() + "; run analyze first");

    const auto doc = json::parse(ingest::read_text_file(profiles_path));
    RunConfig cfg;
    const auto& c = doc.at("config");
    cfg.alpha = c.at("alpha").get<double>();
    cfg.zipf_exclude_diagonal = c.at("zipf_exclude_diagonal").get<bool>();
    cfg.zipf_raw = c.at("zipf_raw").get<bool>();

    std::map<std::string, CountProfile> profiles;
    for (const auto& item : doc.at("composers"))
        profiles.emplace(item.at("name").get<std::string>(),
                         profile_from_json(item.at("profile")));

    std::vector<std::string> selected = composers;
    if (selected.empty())
        for (const auto& [name, p] : profiles) selected.push_back(name);
    for (const auto& name : selected)
        if (!profiles.count(name))
            throw input_error("composer '" + name + "' is not in " +
                              profiles_path.filename().string());

    json out;
    out["schema_version"] = kSchemaVersion;
    out["config"] = doc.at("config");
    json rows = json::array();
    for (const auto& name : selected) {
        const auto& profile = profiles.at(name);
        json item;
        item["name"] = name;
        for (auto basis : {Basis::marginal, Basis::transitions}) {
            const auto series = ranked_series(profile, basis, cfg);
            json b;
            json points = json::array();
            std::size_t rank = 1;
            for (const auto& [cell, prob] : series.points) {
                json pt;
                pt["rank"] = rank++;
                pt["cell"] = cell_name(basis, cell);
                pt["prob"] = prob;
                points.push_back(pt);
            }
            b["series"] = points;
            b["fit"] = zipf_json(series.fit);
            if (basis == Basis::transitions) {
                json top = json::array();
                for (std::size_t i = 0;
                     i < std::min<std::size_t>(30, points.size()); ++i)
                    top.push_back(points[i]);
                b["top30"] = top;
            }
            item[basis == Basis::marginal ? "marginal" : "transitions"] = b;
        }
        rows.push_back(item);
    }
    out["composers"] = rows;

    if (out_path == "-")
        std::cout << dump_json(out);
    else
        write_json_atomic(out_path, out);
}

} // namespace degreescope::report
