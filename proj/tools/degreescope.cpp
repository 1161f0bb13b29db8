// degreescope CLI: thin argv adapter over the shared-library C API.
// Exit codes: 0 success, 1 input error, 2 configuration error,
// 3 internal invariant violation.

#include <degreescope.h>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

struct ConfigDeleter {
    void operator()(ds_config* c) const { ds_config_free(c); }
};
using ConfigPtr = std::unique_ptr<ds_config, ConfigDeleter>;

int fail(ds_status status) {
    std::cerr << "error: " << ds_last_error() << "\n";
    return static_cast<int>(status);
}

bool set_or_die(ds_config* cfg, const char* key, const std::string& value) {
    if (ds_config_set(cfg, key, value.c_str()) != DS_OK) {
        std::cerr << "error: " << ds_last_error() << "\n";
        return false;
    }
    return true;
}

void print_tables(const std::string& out_dir) {
    std::ifstream in(out_dir + "/tables.txt");
    if (in) std::cout << in.rdbuf();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"degreescope " + std::string(ds_version()) +
                 " - scale-degree corpus statistics"};
    app.require_subcommand(1);

    std::string manifest;
    std::string out_path = "-";
    std::string out_dir = "out";
    std::string pool_spec;
    std::string feature_vectors;
    std::string report_dir;
    std::string composers;
    std::string key_profile = "kk";
    std::string alphas = "0.1,0.5,1.0";
    std::vector<std::string> key_overrides;
    double alpha = 0.5;
    double chord_window = 2.0;
    double chord_hop = 1.0;
    uint64_t min_pieces = 10;
    uint64_t bootstrap_iters = 1000;
    uint64_t seed = 42;
    uint64_t subsample_size = 0;
    uint64_t subsample_count = 0;
    bool zipf_exclude_diagonal = false;
    bool zipf_raw = false;
    bool keep_going = false;

    auto add_common = [&](CLI::App* cmd, bool needs_manifest) {
        if (needs_manifest)
            cmd->add_option("--manifest", manifest, "corpus manifest JSON")
                ->required();
        cmd->add_option("--alpha", alpha, "Laplace smoothing parameter");
        cmd->add_option("--min-pieces", min_pieces,
                        "inclusion threshold in pieces per composer");
        cmd->add_option("--bootstrap-iters", bootstrap_iters,
                        "bootstrap iterations B (0 disables intervals)");
        cmd->add_option("--seed", seed, "bootstrap base seed");
        cmd->add_option("--key-profile", key_profile,
                        "built-in profile name or profile JSON path");
        cmd->add_option("--key-override", key_overrides,
                        "force a key: <piece_id>=<pc>,<mode> (repeatable)");
        cmd->add_option("--chord-window", chord_window,
                        "chord detection window in seconds");
        cmd->add_option("--chord-hop", chord_hop,
                        "chord detection hop in seconds");
        cmd->add_flag("--zipf-exclude-diagonal", zipf_exclude_diagonal,
                      "drop the 15 self-transition cells from Zipf fits");
        cmd->add_flag("--zipf-raw", zipf_raw,
                      "fit Zipf on raw probabilities, zero cells excluded");
        cmd->add_flag("--keep-going", keep_going,
                      "exit 0 even when some pieces fail to process");
        cmd->add_option("--alphas", alphas,
                        "comma-separated smoothing sweep values");
    };

    auto* degrees = app.add_subcommand(
        "degrees", "emit per-piece degree sequences as JSONL");
    add_common(degrees, true);
    degrees->add_option("--out", out_path, "output path ('-' for stdout)");

    auto* analyze = app.add_subcommand(
        "analyze", "entropy, KL/JS matrices, Zipf fits, robustness checks");
    add_common(analyze, true);
    analyze->add_option("--out-dir", out_dir, "output directory");

    auto* pools = app.add_subcommand(
        "pools", "era-pool KL tables, concordance, cosine cross-check");
    add_common(pools, true);
    pools->add_option("--out-dir", out_dir, "output directory");
    pools->add_option("--pool-spec", pool_spec,
                      "era pool JSON {era: [composer, ...]}; defaults to "
                      "grouping historical composers by manifest era");
    pools->add_option("--feature-vectors", feature_vectors,
                      "feature vector JSON {name: [numbers], ...} for the "
                      "cosine cross-check");
    pools->add_option("--subsample-size", subsample_size,
                      "pool subsample size in pieces");
    pools->add_option("--subsample-count", subsample_count,
                      "number of seeded subsamples (0 skips concordance)");

    auto* plotdata = app.add_subcommand(
        "plotdata", "figure-ready rank-frequency series from analyze output");
    plotdata->add_option("--report-dir", report_dir,
                         "directory holding analyze output")
        ->required();
    plotdata->add_option("--composer", composers,
                         "comma-separated composer filter (default: all)");
    plotdata->add_option("--out", out_path, "output path ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    ConfigPtr cfg(ds_config_new());
    char buf[64];
    auto set_num = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return set_or_die(cfg.get(), key, buf);
    };
    auto set_u64 = [&](const char* key, uint64_t v) {
        return set_or_die(cfg.get(), key, std::to_string(v));
    };
    if (!set_num("alpha", alpha) || !set_u64("min-pieces", min_pieces) ||
        !set_u64("bootstrap-iters", bootstrap_iters) ||
        !set_u64("seed", seed) ||
        !set_or_die(cfg.get(), "key-profile", key_profile) ||
        !set_num("chord-window", chord_window) ||
        !set_num("chord-hop", chord_hop) ||
        !set_or_die(cfg.get(), "zipf-exclude-diagonal",
                    zipf_exclude_diagonal ? "1" : "0") ||
        !set_or_die(cfg.get(), "zipf-raw", zipf_raw ? "1" : "0") ||
        !set_or_die(cfg.get(), "keep-going", keep_going ? "1" : "0") ||
        !set_or_die(cfg.get(), "alphas", alphas) ||
        !set_u64("subsample-size", subsample_size) ||
        !set_u64("subsample-count", subsample_count))
        return 2;
    for (const auto& ko : key_overrides)
        if (!set_or_die(cfg.get(), "key-override", ko)) return 2;

    ds_status status = DS_OK;
    if (degrees->parsed()) {
        status = ds_cmd_degrees(cfg.get(), manifest.c_str(), out_path.c_str());
    } else if (analyze->parsed()) {
        status = ds_cmd_analyze(cfg.get(), manifest.c_str(), out_dir.c_str());
        if (status == DS_OK) print_tables(out_dir);
    } else if (pools->parsed()) {
        status = ds_cmd_pools(cfg.get(), manifest.c_str(),
                              pool_spec.empty() ? nullptr : pool_spec.c_str(),
                              feature_vectors.empty() ? nullptr
                                                      : feature_vectors.c_str(),
                              out_dir.c_str());
        if (status == DS_OK) print_tables(out_dir);
    } else if (plotdata->parsed()) {
        status = ds_cmd_plotdata(cfg.get(), report_dir.c_str(),
                                 composers.c_str(), out_path.c_str());
    }

    if (status != DS_OK) return fail(status);
    return 0;
}
