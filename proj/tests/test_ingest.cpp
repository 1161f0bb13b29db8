#include "core/textio.hpp"

#include "core/errors.hpp"
#include "core/jsonout.hpp"

#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

using namespace degreescope;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("degreescope_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path file(const std::string& name, const std::string& contents) const {
        const auto p = path / name;
        std::ofstream out(p, std::ios::binary);
        out << contents;
        return p;
    }
    static inline int counter = 0;
};

} // namespace

TEST_CASE("parse_note_jsonl: valid and empty input") {
    const auto one = ingest::parse_note_jsonl(
        R"({"onset_s":0.0,"offset_s":1.0,"pitch":60,"velocity":80})");
    REQUIRE(one.size() == 1);
    CHECK(one[0].onset_s == 0.0);
    CHECK(one[0].offset_s == 1.0);
    CHECK(one[0].pitch == 60);
    CHECK(one[0].velocity == 80);

    CHECK(ingest::parse_note_jsonl("").empty());
    CHECK(ingest::parse_note_jsonl("\n\n").empty());
}

TEST_CASE("parse_note_jsonl: errors name the line") {
    CHECK_THROWS_WITH_AS(
        ingest::parse_note_jsonl(
            R"({"onset_s":1.0,"offset_s":1.0,"pitch":60,"velocity":80})"),
        doctest::Contains("line 1"), input_error);
    CHECK_THROWS_WITH_AS(
        ingest::parse_note_jsonl(
            "{\"onset_s\":0.0,\"offset_s\":1.0,\"pitch\":60,\"velocity\":80}\n"
            "{\"onset_s\":0.0,\"offset_s\":1.0,\"velocity\":80}"),
        doctest::Contains("line 2"), input_error);
    CHECK_THROWS_AS(ingest::parse_note_jsonl(
                        R"({"onset_s":0.0,"offset_s":1.0,"pitch":"x","velocity":1})"),
                    input_error);
    CHECK_THROWS_AS(ingest::parse_note_jsonl(
                        R"({"onset_s":0.0,"offset_s":1.0,"pitch":200,"velocity":1})"),
                    input_error);
    CHECK_THROWS_AS(ingest::parse_note_jsonl(
                        R"({"onset_s":0.0,"offset_s":1.0,"pitch":60.5,"velocity":1})"),
                    input_error);
}

TEST_CASE("parse_chord_stream: CSV and JSONL forms") {
    const auto csv = ingest::parse_chord_stream("0.0,C\n1.0,Gm\n");
    REQUIRE(csv.size() == 2);
    CHECK(csv[0].label == "C");
    CHECK(csv[1].label == "Gm");
    CHECK(csv[1].onset_s == 1.0);

    const auto jsonl = ingest::parse_chord_stream(
        "{\"onset_s\":0.5,\"label\":\"F#\"}\n{\"onset_s\":1.5,\"label\":\"N\"}");
    REQUIRE(jsonl.size() == 2);
    CHECK(jsonl[0].label == "F#");
    CHECK(jsonl[1].label == "N");

    const auto n = ingest::parse_chord_stream("0.0,N");
    REQUIRE(n.size() == 1);
    CHECK(n[0].label == "N");
}

TEST_CASE("parse_chord_stream: grammar violations name line and label") {
    CHECK_THROWS_WITH_AS(ingest::parse_chord_stream("0.0,H"),
                         doctest::Contains("H"), input_error);
    CHECK_THROWS_WITH_AS(ingest::parse_chord_stream("0.0,C\n1.0,Xm"),
                         doctest::Contains("line 2"), input_error);
    CHECK_THROWS_AS(ingest::parse_chord_stream("nonsense"), input_error);
    CHECK_THROWS_AS(ingest::parse_chord_stream("zz,C"), input_error);
}

TEST_CASE("parse_chord_stream: output sorted by onset, ties in input order") {
    const auto evs = ingest::parse_chord_stream("2.0,G\n0.0,C\n2.0,F\n");
    REQUIRE(evs.size() == 3);
    CHECK(evs[0].label == "C");
    CHECK(evs[1].label == "G"); // first of the tied pair keeps its position
    CHECK(evs[2].label == "F");
}

TEST_CASE("load_manifest: happy path and validation") {
    TempDir dir;
    dir.file("a.csv", "0.0,C\n");
    dir.file("b.csv", "0.0,G\n");

    SUBCASE("valid") {
        const auto mpath = dir.file("manifest.json", R"({"entries":[
            {"piece_id":"p1","path":"a.csv","composer":"X","era":"Baroque","group":"historical"},
            {"piece_id":"p2","path":"b.csv","composer":"Y","era":"Modern","group":"neoclassical"}
        ]})");
        const auto m = ingest::load_manifest(mpath);
        REQUIRE(m.entries.size() == 2);
        CHECK(m.entries[0].composer == "X");
        CHECK_FALSE(m.entries[0].neoclassical);
        CHECK(m.entries[1].neoclassical);
        CHECK(fs::path(m.entries[0].path).is_absolute() ==
              mpath.parent_path().is_absolute());
    }
    SUBCASE("duplicate piece_id") {
        const auto mpath = dir.file("manifest.json", R"({"entries":[
            {"piece_id":"p","path":"a.csv","composer":"X","era":"E","group":"historical"},
            {"piece_id":"p","path":"b.csv","composer":"X","era":"E","group":"historical"}
        ]})");
        CHECK_THROWS_WITH_AS(ingest::load_manifest(mpath),
                             doctest::Contains("duplicate"), input_error);
    }
    SUBCASE("missing file") {
        const auto mpath = dir.file("manifest.json", R"({"entries":[
            {"piece_id":"p","path":"ghost.csv","composer":"X","era":"E","group":"historical"}
        ]})");
        CHECK_THROWS_WITH_AS(ingest::load_manifest(mpath),
                             doctest::Contains("ghost.csv"), input_error);
    }
    SUBCASE("bad group") {
        const auto mpath = dir.file("manifest.json", R"({"entries":[
            {"piece_id":"p","path":"a.csv","composer":"X","era":"E","group":"romantic"}
        ]})");
        CHECK_THROWS_AS(ingest::load_manifest(mpath), input_error);
    }
    SUBCASE("missing field") {
        const auto mpath = dir.file("manifest.json", R"({"entries":[
            {"piece_id":"p","path":"a.csv","composer":"X","era":"E"}
        ]})");
        CHECK_THROWS_WITH_AS(ingest::load_manifest(mpath),
                             doctest::Contains("group"), input_error);
    }
}

TEST_CASE("pool spec and feature vector loaders") {
    TempDir dir;
    const auto spec = ingest::load_pool_spec(
        dir.file("pools.json", R"({"Baroque":["a","b"],"Classical":["c"]})"));
    REQUIRE(spec.size() == 2);
    CHECK(spec.at("Baroque") == std::vector<std::string>{"a", "b"});

    CHECK_THROWS_AS(
        ingest::load_pool_spec(dir.file("bad.json", R"({"era": "oops"})")),
        config_error);

    const auto vecs = ingest::load_feature_vectors(
        dir.file("vecs.json", R"({"x":[1,2,3],"y":[4,5,6]})"));
    CHECK(vecs.at("y") == std::vector<double>{4, 5, 6});
    CHECK_THROWS_AS(ingest::load_feature_vectors(
                        dir.file("badvec.json", R"({"x":[1,"two"]})")),
                    input_error);
}

TEST_CASE("dump_json: sorted keys, fixed number formatting, trailing newline") {
    nlohmann::json j;
    j["beta"] = 0.1234567890123456;
    j["alpha"] = 3;
    j["gamma"] = {1.5, nullptr, true};
    const auto text = report::dump_json(j, 0);
    CHECK(text.find("\"alpha\"") < text.find("\"beta\""));
    CHECK(text.find("\"beta\"") < text.find("\"gamma\""));
    CHECK(text.find("0.123456789012") != std::string::npos); // 12 sig digits
    CHECK(text.back() == '\n');

    // Identical values serialize identically.
    CHECK(report::dump_json(j) == report::dump_json(nlohmann::json(j)));
}

TEST_CASE("write_file_atomic leaves no temp file behind") {
    TempDir dir;
    const auto target = dir.path / "out.json";
    report::write_file_atomic(target, "hello\n");
    CHECK(ingest::read_text_file(target) == "hello\n");
    CHECK_FALSE(fs::exists(dir.path / "out.json.tmp"));
}
