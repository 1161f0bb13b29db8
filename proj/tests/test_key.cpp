#include "core/key.hpp"

#include "core/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace degreescope;
using tonality::estimate_key;
using tonality::krumhansl_kessler;
using tonality::pitch_class_histogram;

namespace {

NoteEvent note(double on, double off, int pitch) {
    return NoteEvent{on, off, pitch, 64};
}

} // namespace

TEST_CASE("pitch_class_histogram: duration weighting") {
    CHECK(pitch_class_histogram({}) == std::array<double, 12>{});

    const auto one = pitch_class_histogram({note(0, 2, 60)});
    CHECK(one[0] == doctest::Approx(2.0));
    for (int pc = 1; pc < 12; ++pc) CHECK(one[pc] == 0.0);

    const auto three = pitch_class_histogram(
        {note(0, 1, 60), note(1, 2, 67), note(2, 3, 72)});
    CHECK(three[0] == doctest::Approx(2.0));
    CHECK(three[7] == doctest::Approx(1.0));
}

TEST_CASE("estimate_key: histogram equal to a rotated profile recovers it") {
    const auto& kk = krumhansl_kessler();
    std::vector<NoteEvent> notes;
    for (int pc = 0; pc < 12; ++pc) {
        // Duration equal to the G-major profile weight of this pitch class.
        const double w = kk.major_weights[((pc - 7) % 12 + 12) % 12];
        notes.push_back({0.0, w, 60 + pc, 64});
    }
    const auto key = estimate_key(notes, kk);
    CHECK(key.tonic_pc == 7);
    CHECK(key.mode == Mode::major);
    CHECK(key.score == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("estimate_key: C-major scale with the Krumhansl-Kessler profile") {
    std::vector<NoteEvent> notes;
    for (int pc : {0, 2, 4, 5, 7, 9, 11}) notes.push_back(note(0, 1, 60 + pc));
    const auto key = estimate_key(notes, krumhansl_kessler());
    CHECK(key.tonic_pc == 0);
    CHECK(key.mode == Mode::major);
    // Argmax correlation value confirmed against an external evaluation of
    // all 24 candidates.
    CHECK(key.score == doctest::Approx(0.7564070930899864).epsilon(1e-9));
}

TEST_CASE("estimate_key: degenerate histograms use the documented fallback") {
    const auto single = estimate_key(
        {note(0, 1, 62), note(1, 2, 74), note(2, 3, 50)}, krumhansl_kessler());
    CHECK(single.tonic_pc == 2);
    CHECK(single.mode == Mode::major);
    CHECK(single.score == 0.0);

    // A perfectly flat histogram has no correlation shape either.
    std::vector<NoteEvent> flat;
    for (int pc = 0; pc < 12; ++pc) flat.push_back(note(0, 1, 60 + pc));
    const auto key = estimate_key(flat, krumhansl_kessler());
    CHECK(key.score == 0.0);
    CHECK(key.mode == Mode::major);
}

TEST_CASE("estimate_key: empty input") {
    CHECK_THROWS_WITH_AS(estimate_key({}, krumhansl_kessler()),
                         doctest::Contains("no notes"), input_error);
}

TEST_CASE("estimate_key: transposition equivariance") {
    std::mt19937_64 gen(77);
    std::uniform_int_distribution<int> pitch(36, 84), shift(0, 11);
    std::uniform_real_distribution<double> dur(0.05, 2.0);
    for (int round = 0; round < 60; ++round) {
        std::vector<NoteEvent> notes;
        double t = 0.0;
        for (int i = 0; i < 25; ++i) {
            const double d = dur(gen);
            notes.push_back({t, t + d, pitch(gen), 64});
            t += d * 0.5;
        }
        const int k = shift(gen);
        auto shifted = notes;
        for (auto& n : shifted) n.pitch += k; // stays within 0..127

        const auto base = estimate_key(notes, krumhansl_kessler());
        const auto moved = estimate_key(shifted, krumhansl_kessler());
        CHECK(moved.tonic_pc == (base.tonic_pc + k) % 12);
        CHECK(moved.mode == base.mode);
        CHECK(moved.score == doctest::Approx(base.score).epsilon(1e-9));
    }
}

TEST_CASE("estimate_key: invariant under duration scaling") {
    std::mt19937_64 gen(88);
    std::uniform_int_distribution<int> pitch(36, 84);
    std::uniform_real_distribution<double> dur(0.05, 2.0);
    std::vector<NoteEvent> notes;
    for (int i = 0; i < 30; ++i)
        notes.push_back({0.0, dur(gen), pitch(gen), 64});
    auto scaled = notes;
    for (auto& n : scaled) n.offset_s *= 7.25;

    const auto a = estimate_key(notes, krumhansl_kessler());
    const auto b = estimate_key(scaled, krumhansl_kessler());
    CHECK(a.tonic_pc == b.tonic_pc);
    CHECK(a.mode == b.mode);
    CHECK(a.score == doctest::Approx(b.score).epsilon(1e-12));
}

TEST_CASE("load_key_profile: built-ins and JSON files") {
    CHECK(tonality::load_key_profile("kk").name == "kk");

    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / "ds_test_profile.json";
    {
        std::ofstream out(path);
        out << R"({"name":"custom","major":[5,1,2,1,3,2,1,4,1,2,1,2],)"
            << R"("minor":[5,1,2,3,1,2,1,4,2,1,2,1]})";
    }
    const auto profile = tonality::load_key_profile(path.string());
    CHECK(profile.name == "custom");
    CHECK(profile.major_weights[0] == 5.0);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(tonality::load_key_profile("no-such-profile"),
                    config_error);

    const auto flat = dir / "ds_test_flat.json";
    {
        std::ofstream out(flat);
        out << R"({"name":"flat","major":[1,1,1,1,1,1,1,1,1,1,1,1],)"
            << R"("minor":[5,1,2,3,1,2,1,4,2,1,2,1]})";
    }
    CHECK_THROWS_AS(tonality::load_key_profile(flat.string()), config_error);
    std::filesystem::remove(flat);
}
