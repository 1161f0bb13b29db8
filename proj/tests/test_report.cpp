#include "core/report.hpp"

#include "core/errors.hpp"
#include "core/jsonout.hpp"
#include "core/textio.hpp"
#include "fixture.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>

using namespace degreescope;
using fixture::TempDir;
using nlohmann::json;

namespace {

std::filesystem::path write(const std::filesystem::path& p,
                            const std::string& text) {
    std::ofstream(p) << text;
    return p;
}

json load(const std::filesystem::path& p) {
    return json::parse(ingest::read_text_file(p));
}

} // namespace

TEST_CASE("cmd_degrees: chord-stream piece with a forced tonic") {
    TempDir dir("degrees");
    write(dir.path / "p.csv", "0.0,C\n1.0,G\n2.0,C\n");
    write(dir.path / "manifest.json",
          R"({"entries":[{"piece_id":"p","path":"p.csv","composer":"x",)"
          R"("era":"E","group":"historical"}]})");
    report::RunConfig cfg;
    cfg.key_overrides["p"] = KeyEstimate{0, Mode::major, 0.0};
    const auto out = dir.path / "degrees.jsonl";
    const auto result =
        report::cmd_degrees(dir.path / "manifest.json", cfg, out);
    CHECK_FALSE(result.any_piece_failed);

    std::ifstream in(out);
    std::string line;
    REQUIRE(std::getline(in, line));
    const auto piece = json::parse(line);
    CHECK(piece.at("piece_id") == "p");
    CHECK(piece.at("degrees") == json::array({"I", "V", "I"}));
    CHECK(piece.at("dropped_fraction") == 0.0);
    REQUIRE(std::getline(in, line));
    const auto summary = json::parse(line);
    CHECK(summary.at("summary").at("n_pieces") == 1);
}

TEST_CASE("cmd_degrees: empty manifest still emits the summary") {
    TempDir dir("degrees_empty");
    write(dir.path / "manifest.json", R"({"entries":[]})");
    const auto out = dir.path / "out.jsonl";
    report::cmd_degrees(dir.path / "manifest.json", report::RunConfig{}, out);
    const auto text = ingest::read_text_file(out);
    const auto summary = json::parse(text);
    CHECK(summary.at("summary").at("n_pieces") == 0);
    CHECK(summary.at("summary").at("corpus_dropped_fraction") == 0.0);
}

TEST_CASE("cmd_degrees: all-N piece reports dropped_fraction 1") {
    TempDir dir("degrees_n");
    write(dir.path / "p.csv", "0.0,N\n1.0,N\n");
    write(dir.path / "manifest.json",
          R"({"entries":[{"piece_id":"p","path":"p.csv","composer":"x",)"
          R"("era":"E","group":"historical"}]})");
    report::RunConfig cfg;
    cfg.key_overrides["p"] = KeyEstimate{0, Mode::major, 0.0};
    const auto out = dir.path / "out.jsonl";
    report::cmd_degrees(dir.path / "manifest.json", cfg, out);
    std::ifstream in(out);
    std::string line;
    REQUIRE(std::getline(in, line));
    const auto piece = json::parse(line);
    CHECK(piece.at("degrees").empty());
    CHECK(piece.at("dropped_fraction") == 1.0);
}

TEST_CASE("cmd_degrees: chord-stream piece without an override fails") {
    TempDir dir("degrees_nokey");
    write(dir.path / "p.csv", "0.0,C\n");
    write(dir.path / "manifest.json",
          R"({"entries":[{"piece_id":"p","path":"p.csv","composer":"x",)"
          R"("era":"E","group":"historical"}]})");
    const auto result = report::cmd_degrees(dir.path / "manifest.json",
                                            report::RunConfig{},
                                            dir.path / "out.jsonl");
    CHECK(result.any_piece_failed);
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("key-override") != std::string::npos);
}

TEST_CASE("process_pieces: input sniffing covers all three front doors") {
    TempDir dir("sniff");
    // Note JSONL piece.
    write(dir.path / "notes.jsonl",
          R"({"onset_s":0.0,"offset_s":2.0,"pitch":60,"velocity":80})"
          "\n"
          R"({"onset_s":0.0,"offset_s":2.0,"pitch":64,"velocity":80})"
          "\n"
          R"({"onset_s":0.0,"offset_s":2.0,"pitch":67,"velocity":80})");
    // Chord JSONL piece.
    write(dir.path / "chords.jsonl", R"({"onset_s":0.0,"label":"G"})");
    write(dir.path / "manifest.json",
          R"({"entries":[
            {"piece_id":"n","path":"notes.jsonl","composer":"x","era":"E","group":"historical"},
            {"piece_id":"c","path":"chords.jsonl","composer":"x","era":"E","group":"historical"}
          ]})");
    report::RunConfig cfg;
    cfg.key_overrides["c"] = KeyEstimate{7, Mode::major, 0.0};
    const auto pieces =
        report::process_pieces(ingest::load_manifest(dir.path / "manifest.json"), cfg);
    REQUIRE(pieces.size() == 2);
    CHECK_FALSE(pieces[0].failed);
    CHECK(pieces[0].from_notes);
    // C-E-G notes detect as a C chord; the estimated key maps it somewhere.
    CHECK(pieces[0].seq.degrees.size() == 1);
    CHECK_FALSE(pieces[1].failed);
    CHECK_FALSE(pieces[1].from_notes);
    CHECK(pieces[1].seq.degrees ==
          std::vector<int>{harmony::degree_index("I")}); // G over tonic G
}

TEST_CASE("cmd_analyze: reruns are byte-identical and matrices validate") {
    TempDir dir("analyze");
    report::RunConfig cfg;
    cfg.bootstrap_iters = 32;
    const auto manifest = fixture::write_micro_corpus(dir.path / "corpus", cfg);
    const auto out_a = dir.path / "a";
    const auto out_b = dir.path / "b";
    REQUIRE_FALSE(
        report::cmd_analyze(manifest, cfg, out_a).any_piece_failed);
    REQUIRE_FALSE(
        report::cmd_analyze(manifest, cfg, out_b).any_piece_failed);

    for (const auto& entry : std::filesystem::directory_iterator(out_a)) {
        const auto name = entry.path().filename();
        CHECK(ingest::read_text_file(entry.path()) ==
              ingest::read_text_file(out_b / name));
    }

    const auto kl = load(out_a / "kl_scale_degrees_3x3.json");
    const auto js = load(out_a / "js_scale_degrees_3x3.json");
    for (int i = 0; i < 3; ++i) {
        CHECK(kl.at("matrix")[i][i].get<double>() == 0.0);
        for (int j = 0; j < 3; ++j)
            CHECK(js.at("matrix")[i][j].get<double>() ==
                  js.at("matrix")[j][i].get<double>());
    }
    // KL bootstrap intervals: null on the diagonal, present elsewhere.
    const auto& low = kl.at("bootstrap_ci").at("low");
    CHECK(low[0][0].is_null());
    CHECK(low[0][1].is_number());

    // Closest pairs are ascending and list both directions separately.
    const auto pairs = load(out_a / "closest_pairs_3.json").at("pairs");
    REQUIRE(pairs.size() == 6);
    double prev = -1.0;
    for (const auto& p : pairs) {
        CHECK(p.at("kl_bits").get<double>() >= prev);
        prev = p.at("kl_bits").get<double>();
    }
}

TEST_CASE("cmd_analyze: single included composer still writes per-composer "
          "files, then fails the matrix step") {
    TempDir dir("analyze_one");
    write(dir.path / "p0.csv", "0.0,C\n1.0,G\n2.0,Am\n3.0,F\n");
    std::string entries;
    report::RunConfig cfg;
    cfg.bootstrap_iters = 0;
    for (int i = 0; i < 3; ++i) {
        const std::string id = "p" + std::to_string(i);
        write(dir.path / (id + ".csv"), "0.0,C\n1.0,G\n2.0,Am\n3.0,F\n");
        if (!entries.empty()) entries += ",";
        // Composer "solo" holds all pieces; composer "thin" holds none above
        // the threshold.
        entries +=R"({"piece_id":")" + id + R"(","path":")" + id +
                   R"(.csv","composer":"solo","era":"E","group":"historical"})";
        cfg.key_overrides[id] = KeyEstimate{0, Mode::major, 0.0};
    }
    write(dir.path / "thin.csv", "0.0,C\n1.0,G\n");
    entries += R"(,{"piece_id":"thin","path":"thin.csv","composer":"thin",)"
               R"("era":"E","group":"historical"})";
    cfg.key_overrides["thin"] = KeyEstimate{0, Mode::major, 0.0};
    write(dir.path / "manifest.json", R"({"entries":[)" + entries + "]}");

    cfg.min_pieces = 2;
    const auto out = dir.path / "out";
    CHECK_THROWS_AS(
        report::cmd_analyze(dir.path / "manifest.json", cfg, out), input_error);
    CHECK(std::filesystem::exists(out / "shannon_scale_degrees_1.json"));
    CHECK(std::filesystem::exists(out / "low_sample_composers_1.json"));
    CHECK_FALSE(std::filesystem::exists(out / "kl_scale_degrees_1x1.json"));
    const auto side = load(out / "low_sample_composers_1.json");
    CHECK(side.at("composers")[0].at("name") == "thin");
    CHECK(side.at("composers")[0].at("low_sample") == true);
}

TEST_CASE("ranked_series honors the zipf flags") {
    harmony::DegreeSequence seq;
    seq.degrees = {0, 9, 0, 6, 9, 0, 9, 12};
    seq.total_events = seq.degrees.size();
    const auto profile = counts::count_piece(seq);

    report::RunConfig cfg;
    const auto full =
        report::ranked_series(profile, resampling::Basis::transitions, cfg);
    CHECK(full.fit.n_points == 225);
    CHECK(full.points.size() == 225);
    // Descending probabilities.
    for (std::size_t i = 1; i < full.points.size(); ++i)
        CHECK(full.points[i].second <= full.points[i - 1].second);

    cfg.zipf_exclude_diagonal = true;
    const auto nodiag =
        report::ranked_series(profile, resampling::Basis::transitions, cfg);
    CHECK(nodiag.fit.n_points == 210);
    for (const auto& [cell, prob] : nodiag.points)
        CHECK(cell / 15 != cell % 15);

    cfg.zipf_exclude_diagonal = false;
    cfg.zipf_raw = true;
    const auto raw =
        report::ranked_series(profile, resampling::Basis::marginal, cfg);
    CHECK(raw.fit.n_points == 4); // I, IV, V, VI observed
    double total = 0.0;
    for (const auto& [cell, prob] : raw.points) total += prob;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cmd_plotdata: series from an analyze run; absent composer named") {
    TempDir dir("plotdata");
    report::RunConfig cfg;
    cfg.bootstrap_iters = 0;
    const auto manifest = fixture::write_micro_corpus(dir.path / "corpus", cfg);
    const auto out = dir.path / "report";
    report::cmd_analyze(manifest, cfg, out);

    const auto plot = dir.path / "plot.json";
    report::cmd_plotdata(out, {"alder"}, plot);
    const auto doc = load(plot);
    REQUIRE(doc.at("composers").size() == 1);
    const auto& series = doc.at("composers")[0].at("transitions");
    CHECK(series.at("series").size() == 225);
    CHECK(series.at("top30").size() == 30);
    CHECK(series.at("top30")[0] == series.at("series")[0]);
    CHECK(doc.at("composers")[0].at("marginal").at("series").size() == 15);
    // Fit parameters match the analyze output for the same composer.
    const auto zipf = load(out / "zipf_transitions_3.json");
    for (const auto& item : zipf.at("composers"))
        if (item.at("name") == "alder")
            CHECK(item.at("fit") == series.at("fit"));

    CHECK_THROWS_WITH_AS(report::cmd_plotdata(out, {"ghost"}, plot),
                         doctest::Contains("ghost"), input_error);
    CHECK_THROWS_AS(report::cmd_plotdata(dir.path / "nowhere", {}, plot),
                    input_error);
}

TEST_CASE("cmd_pools: default era grouping and optional sections") {
    TempDir dir("pools");
    std::string entries;
    report::RunConfig cfg;
    cfg.min_pieces = 2;
    cfg.bootstrap_iters = 0;
    auto add_piece = [&](const std::string& composer, const std::string& era,
                         const std::string& group, int idx,
                         const std::string& csv) {
        const std::string id = composer + std::to_string(idx);
        write(dir.path / (id + ".csv"), csv);
        if (!entries.empty()) entries += ",";
        entries += R"({"piece_id":")" + id + R"(","path":")" + id +
                   R"(.csv","composer":")" + composer + R"(","era":")" + era +
                   R"(","group":")" + group + R"("})";
        cfg.key_overrides[id] = KeyEstimate{0, Mode::major, 0.0};
    };
    for (int i = 0; i < 3; ++i)
        add_piece("early", "Old", "historical", i, "0.0,C\n1.0,G\n2.0,F\n");
    for (int i = 0; i < 3; ++i)
        add_piece("late", "New", "historical", i, "0.0,Bb\n1.0,F#\n2.0,Cm\n");
    for (int i = 0; i < 3; ++i)
        add_piece("artist", "Now", "neoclassical", i, "0.0,C\n1.0,G\n2.0,C\n");
    write(dir.path / "manifest.json", R"({"entries":[)" + entries + "]}");

    const auto out = dir.path / "out";
    const auto result = report::cmd_pools(dir.path / "manifest.json",
                                          std::nullopt, std::nullopt, cfg, out);
    CHECK_FALSE(result.any_piece_failed);
    const auto era_file = load(out / "era_kl_1.json");
    REQUIRE(era_file.at("pools").size() == 2); // grouped by manifest era
    REQUIRE(era_file.at("artists").size() == 1);
    const auto& artist = era_file.at("artists")[0];
    CHECK(artist.at("name") == "artist");
    // The artist's C/G stream is far closer to the Old pool.
    CHECK(artist.at("marginal").at("min_era") == "Old");
    CHECK(artist.at("transitions").at("min_era") == "Old");
    // subsample_count 0: concordance section omitted.
    CHECK_FALSE(std::filesystem::exists(out / "concordance.json"));

    // Artist identical to a pool: zero bits and that pool flagged.
    const auto& kl_map = artist.at("marginal").at("kl_bits");
    CHECK(kl_map.at("Old").get<double>() < kl_map.at("New").get<double>());
}

TEST_CASE("process_pieces: bad global parameters are config errors") {
    TempDir dir("badcfg");
    write(dir.path / "p.csv", "0.0,C\n");
    write(dir.path / "manifest.json",
          R"({"entries":[{"piece_id":"p","path":"p.csv","composer":"x",)"
          R"("era":"E","group":"historical"}]})");
    report::RunConfig cfg;
    cfg.key_overrides["p"] = KeyEstimate{0, Mode::major, 0.0};
    cfg.chord_window = 0.0;
    CHECK_THROWS_AS(report::cmd_degrees(dir.path / "manifest.json", cfg,
                                        dir.path / "out.jsonl"),
                    config_error);
    cfg.chord_window = 2.0;
    cfg.alpha = -0.5;
    CHECK_THROWS_AS(report::cmd_analyze(dir.path / "manifest.json", cfg,
                                        dir.path / "out"),
                    config_error);
}

TEST_CASE("worker_count: explicit, env, and invalid env") {
    CHECK(report::worker_count(4u) == 4u);
    ::setenv("DEGREESCOPE_THREADS", "3", 1);
    CHECK(report::worker_count(std::nullopt) == 3u);
    ::setenv("DEGREESCOPE_THREADS", "banana", 1);
    CHECK_THROWS_AS(report::worker_count(std::nullopt), config_error);
    ::setenv("DEGREESCOPE_THREADS", "0", 1);
    CHECK_THROWS_AS(report::worker_count(std::nullopt), config_error);
    ::unsetenv("DEGREESCOPE_THREADS");
    CHECK(report::worker_count(std::nullopt) >= 1u);
}

TEST_CASE("parallel_for: propagates the first worker exception") {
    CHECK_THROWS_AS(report::parallel_for(
                        100, 4,
                        [](std::size_t i) {
                            if (i == 57) throw input_error("boom");
                        }),
                    input_error);
    std::vector<int> hits(100, 0);
    report::parallel_for(100, 4, [&](std::size_t i) { hits[i] = 1; });
    for (int h : hits) CHECK(h == 1);
}
