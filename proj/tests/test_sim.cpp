#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hemoflow/sim/acquire.hpp"
#include "hemoflow/sim/dataset.hpp"
#include "hemoflow/sim/mixing.hpp"
#include "hemoflow/sim/recording_io.hpp"
#include "hemoflow/sim/windowize.hpp"
#include "hemoflow/spectral/spectrum.hpp"

using namespace hemoflow;

namespace {

sim::SpectraLibrary load_library() {
    sim::SpectraLibrary lib;
    lib.hemoglobin = spectral::load_spectrum_file(HEMOFLOW_DATA_DIR "/hemoglobin.spectrum", "hemoglobin");
    const sim::DatasetConfig defaults;
    for (const auto& m : defaults.mixtures)
        lib.interference[m] =
            spectral::load_spectrum_file(std::string(HEMOFLOW_DATA_DIR "/mixtures/") + m + ".spectrum", m);
    return lib;
}

sim::InfusionScenario bleeding_scenario(sim::FlowClass label, std::uint64_t seed) {
    sim::InfusionScenario s;
    s.label = label;
    s.flow_rate_ml_min = sim::flow_ml_min(label);
    s.duration_s = 60.0;
    s.background_transmission = sim::InfusionScenario::clear_background();
    s.rng_seed = seed;
    return s;
}

sim::InfusionScenario interference_scenario(const std::string& mixture, double premixed, std::uint64_t seed) {
    sim::InfusionScenario s;
    s.label = sim::FlowClass::interference;
    s.interference_id = mixture;
    s.interference_premixed_g_per_l = premixed;
    s.duration_s = 60.0;
    s.background_transmission = sim::InfusionScenario::clear_background();
    s.rng_seed = seed;
    return s;
}

}  // namespace

TEST_CASE("tank concentration follows the accumulating-volume mass balance") {
    CHECK(sim::concentration_at(0.0, 0.5, 250.0, 150.0) == 0.0);
    CHECK(sim::concentration_at(600.0, 0.0, 250.0, 150.0) == 0.0);

    // 0.5 mL/min for 600 s infuses 5 mL: c = 150 * 5 / 255
    CHECK(sim::concentration_at(600.0, 0.5, 250.0, 150.0) == Catch::Approx(150.0 * 5.0 / 255.0).epsilon(1e-12));

    // mass balance identity: c * (V0 + v) == stock * v
    for (double t : {1.0, 30.0, 59.0, 600.0, 7200.0}) {
        const double v = 0.7 * t / 60.0;
        const double c = sim::concentration_at(t, 0.7, 250.0, 150.0);
        CHECK(c * (250.0 + v) == Catch::Approx(150.0 * v).epsilon(1e-12));
    }

    // monotone in t, bounded by the stock concentration
    double prev = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double c = sim::concentration_at(60.0 * k, 0.9, 250.0, 150.0);
        CHECK(c > prev);
        CHECK(c < 150.0);
        prev = c;
    }

    CHECK_THROWS_AS(sim::concentration_at(-1.0, 0.5, 250.0, 150.0), std::invalid_argument);
    CHECK_THROWS_AS(sim::concentration_at(1.0, -0.5, 250.0, 150.0), std::invalid_argument);
    CHECK_THROWS_AS(sim::concentration_at(1.0, 0.5, 0.0, 150.0), std::invalid_argument);
    CHECK_THROWS_AS(sim::concentration_at(1.0, 0.5, 250.0, -1.0), std::invalid_argument);
}

TEST_CASE("scenario validation enforces label consistency") {
    auto s = bleeding_scenario(sim::FlowClass::flow_0_3, 1);
    CHECK_NOTHROW(s.validate());

    SECTION("interference label forbids blood flow") {
        s.label = sim::FlowClass::interference;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SECTION("bleeding flow rate must match the label") {
        s.flow_rate_ml_min = 0.5;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SECTION("bleeding runs must not carry a mixture") {
        s.interference_id = "tea";
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SECTION("background factors confined to (0,1]") {
        s.background_transmission[3] = 0.0;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
        s.background_transmission[3] = 1.2;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SECTION("nonpositive grid rejected") {
        s.sample_period_s = 0.0;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
}

TEST_CASE("noise-free frame with clear water at t=0 reproduces the baselines") {
    const auto lib = load_library();
    const auto path = sim::default_optical_path();
    auto s = bleeding_scenario(sim::FlowClass::flow_0_5, 7);
    util::Rng rng(7);
    const auto frame = sim::acquire_frame(0.0, s, lib, path, sim::NoiseModel::none(), rng);
    for (int ch = 1; ch <= spectral::kFrameChannels; ++ch)
        REQUIRE(frame.channel(ch) == path.incident[static_cast<std::size_t>(ch - 1)]);
}

TEST_CASE("hemoglobin-only channel ratio matches the closed-form model") {
    const auto lib = load_library();
    const auto path = sim::default_optical_path();
    auto s = bleeding_scenario(sim::FlowClass::flow_0_5, 3);
    s.duration_s = 1200.0;
    util::Rng rng(3);

    spectral::RatioModelParams params{path.incident[0] / path.incident[11],
                                      lib.hemoglobin.mu_at(1) - lib.hemoglobin.mu_at(12),
                                      path.path_length_mm};
    for (double t : {5.0, 60.0, 300.0, 900.0}) {
        const auto frame = sim::acquire_frame(t, s, lib, path, sim::NoiseModel::none(), rng);
        const double conc = sim::concentration_at(t, 0.5, s.initial_volume_ml, s.blood_hb_g_per_l);
        const double measured = spectral::intensity_ratio(frame.values, 1, 12);
        const double predicted = spectral::ratio_predict(params, conc);
        REQUIRE(measured == Catch::Approx(predicted).epsilon(1e-12));
    }
}

TEST_CASE("noise path is seed-deterministic and ADC-conformant") {
    const auto lib = load_library();
    const auto path = sim::default_optical_path();
    const auto s = bleeding_scenario(sim::FlowClass::flow_0_9, 42);
    const sim::NoiseModel noise{};  // defaults: 1% gain, 5 counts read, 16-bit

    const auto rec_a = sim::run_recording(s, lib, path, noise, "a");
    const auto rec_b = sim::run_recording(s, lib, path, noise, "b");
    REQUIRE(rec_a.frames.size() == rec_b.frames.size());
    for (std::size_t k = 0; k < rec_a.frames.size(); ++k)
        for (int ch = 0; ch < spectral::kFrameChannels; ++ch)
            REQUIRE(rec_a.frames[k].values[static_cast<std::size_t>(ch)] ==
                    rec_b.frames[k].values[static_cast<std::size_t>(ch)]);

    auto s2 = s;
    s2.rng_seed = 43;
    const auto rec_c = sim::run_recording(s2, lib, path, noise, "c");
    bool any_diff = false;
    for (std::size_t k = 0; k < rec_a.frames.size() && !any_diff; ++k)
        for (int ch = 0; ch < spectral::kFrameChannels; ++ch)
            if (rec_a.frames[k].values[static_cast<std::size_t>(ch)] !=
                rec_c.frames[k].values[static_cast<std::size_t>(ch)]) {
                any_diff = true;
                break;
            }
    CHECK(any_diff);

    // quantized to integer counts, clamped to the 16-bit range
    for (const auto& frame : rec_a.frames)
        for (double v : frame.values) {
            REQUIRE(v == std::floor(v));
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 65535.0);
        }
}

TEST_CASE("recording runs on the sample grid") {
    const auto lib = load_library();
    const auto path = sim::default_optical_path();
    auto s = bleeding_scenario(sim::FlowClass::flow_0_1, 5);
    s.duration_s = 120.0;

    const auto rec = sim::run_recording(s, lib, path, sim::NoiseModel::none(), "grid");
    REQUIRE(rec.frames.size() == 120);
    for (std::size_t k = 0; k < rec.frames.size(); ++k)
        REQUIRE(rec.frames[k].timestamp_s == static_cast<double>(k));
    CHECK_NOTHROW(rec.validate());
    CHECK(rec.id == "grid");

    s.duration_s = 5.0;
    CHECK_THROWS_AS(sim::run_recording(s, lib, path, sim::NoiseModel::none(), "short"), std::invalid_argument);
}

TEST_CASE("premixed interference is static while blood ramps") {
    const auto lib = load_library();
    const auto path = sim::default_optical_path();
    const auto s = interference_scenario("beetroot", 0.3, 11);

    const auto rec = sim::run_recording(s, lib, path, sim::NoiseModel::none(), "static");
    const auto& first = rec.frames.front();
    const auto& last = rec.frames.back();
    for (int ch = 0; ch < spectral::kFrameChannels; ++ch)
        REQUIRE(first.values[static_cast<std::size_t>(ch)] == last.values[static_cast<std::size_t>(ch)]);

    // and the mixture does absorb: the frame is not the clear baseline
    bool attenuated = false;
    for (int ch = 0; ch < spectral::kFrameChannels; ++ch)
        if (first.values[static_cast<std::size_t>(ch)] < path.incident[static_cast<std::size_t>(ch)])
            attenuated = true;
    CHECK(attenuated);

    // a bleeding recording does ramp
    const auto bleed = sim::run_recording(bleeding_scenario(sim::FlowClass::flow_0_9, 11), lib, path,
                                          sim::NoiseModel::none(), "ramp");
    CHECK(bleed.frames.front().values[0] > bleed.frames.back().values[0]);
}

TEST_CASE("windowize slices on the stride grid") {
    sim::Recording rec;
    rec.id = "w";
    rec.scenario = bleeding_scenario(sim::FlowClass::flow_0_7, 1);
    for (int k = 0; k < 120; ++k) {
        sim::SpectralFrame f;
        f.timestamp_s = static_cast<double>(k);
        for (int ch = 0; ch < spectral::kFrameChannels; ++ch)
            f.values[static_cast<std::size_t>(ch)] = 100.0 * k + ch;
        rec.frames.push_back(f);
    }

    const auto at_stride6 = sim::windowize(rec, sim::kWindowLength, 6);
    CHECK(at_stride6.size() == 20);
    const auto at_stride1 = sim::windowize(rec, sim::kWindowLength, 1);
    CHECK(at_stride1.size() == 115);

    const auto& w3 = at_stride6[3];
    CHECK(w3.start_index == 18);
    CHECK(w3.recording_id == "w");
    CHECK(w3.label == sim::FlowClass::flow_0_7);
    for (int t = 0; t < sim::kWindowLength; ++t)
        for (int ch = 0; ch < spectral::kFrameChannels; ++ch)
            REQUIRE(w3.at(t, ch) == 100.0 * (18 + t) + ch);

    rec.frames.resize(6);
    CHECK(sim::windowize(rec).size() == 1);
    rec.frames.resize(5);
    CHECK_THROWS_AS(sim::windowize(rec), std::invalid_argument);
    rec.frames.resize(12);
    CHECK_THROWS_AS(sim::windowize(rec, 5, 1), std::invalid_argument);
    CHECK_THROWS_AS(sim::windowize(rec, sim::kWindowLength, 0), std::invalid_argument);
}

TEST_CASE("medium changes act as static per-channel gains") {
    const auto lib = load_library();
    const auto path = sim::default_optical_path();
    auto water = bleeding_scenario(sim::FlowClass::flow_0_9, 21);
    auto sgf = water;
    sgf.medium = "sgf";
    sgf.background_transmission = sim::medium_background("sgf");

    const auto rec_w = sim::run_recording(water, lib, path, sim::NoiseModel::none(), "w");
    const auto rec_s = sim::run_recording(sgf, lib, path, sim::NoiseModel::none(), "s");
    REQUIRE(rec_w.frames.size() == rec_s.frames.size());
    for (std::size_t k = 0; k < rec_w.frames.size(); ++k)
        for (int ch = 0; ch < spectral::kFrameChannels; ++ch) {
            const double expected = rec_w.frames[k].values[static_cast<std::size_t>(ch)] *
                                    sgf.background_transmission[static_cast<std::size_t>(ch)];
            REQUIRE(rec_s.frames[k].values[static_cast<std::size_t>(ch)] ==
                    Catch::Approx(expected).epsilon(1e-12));
        }

    CHECK(sim::medium_background("water") == sim::InfusionScenario::clear_background());
    CHECK_THROWS_AS(sim::medium_background("milkshake"), std::invalid_argument);
}

TEST_CASE("dataset split arithmetic rounds train and val, test takes the rest") {
    sim::DatasetConfig cfg;
    cfg.recordings_per_class = 40;
    const auto counts = sim::detail::split_counts(cfg);
    CHECK(counts.train == 28);
    CHECK(counts.val == 6);
    CHECK(counts.test == 6);

    cfg.recordings_per_class = 2;
    CHECK_THROWS_AS(sim::detail::split_counts(cfg), std::invalid_argument);

    sim::DatasetConfig bad;
    bad.train_fraction = 0.8;  // sums to 1.1
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    sim::DatasetConfig range;
    range.interference_premixed_min_g_per_l = 0.0;
    CHECK_THROWS_AS(range.validate(), std::invalid_argument);
}

TEST_CASE("generated corpus is deterministic, parallel-safe and mixture-covering") {
    const auto lib = load_library();
    const auto path = sim::default_optical_path();
    sim::DatasetConfig cfg;
    cfg.recordings_per_class = 20;
    cfg.duration_s = 12.0;

    const auto a = sim::generate_dataset(cfg, lib, path, 42, /*parallel=*/false);
    const auto b = sim::generate_dataset(cfg, lib, path, 42, /*parallel=*/false);
    const auto c = sim::generate_dataset(cfg, lib, path, 42, /*parallel=*/true);

    REQUIRE(a.manifest.size() == 120);
    REQUIRE(a.recordings.size() == 120);
    CHECK(sim::manifest_to_csv(a.manifest) == sim::manifest_to_csv(b.manifest));
    CHECK(sim::manifest_to_csv(a.manifest) == sim::manifest_to_csv(c.manifest));
    for (std::size_t k = 0; k < a.recordings.size(); ++k) {
        REQUIRE(sim::recording_to_csv(a.recordings[k]) == sim::recording_to_csv(b.recordings[k]));
        REQUIRE(sim::recording_to_csv(a.recordings[k]) == sim::recording_to_csv(c.recordings[k]));
    }

    const auto d = sim::generate_dataset(cfg, lib, path, 43, false);
    CHECK(sim::recording_to_csv(a.recordings[0]) != sim::recording_to_csv(d.recordings[0]));

    // per-class counts and id scheme
    std::map<int, int> per_class;
    for (std::size_t k = 0; k < a.manifest.size(); ++k) {
        const auto& row = a.manifest[k];
        ++per_class[static_cast<int>(row.label)];
        char expect[16];
        std::snprintf(expect, sizeof(expect), "rec_%04zu", k);
        REQUIRE(row.recording_id == expect);
        REQUIRE(row.recording_id == a.recordings[k].id);
    }
    for (int cls = 0; cls < sim::kNumClasses; ++cls) CHECK(per_class[cls] == 20);

    // every interference mixture reaches the training split
    std::set<std::string> train_mixtures;
    int train_rows = 0, val_rows = 0, test_rows = 0;
    for (const auto& row : a.manifest) {
        if (row.split == sim::Split::train) ++train_rows;
        if (row.split == sim::Split::val) ++val_rows;
        if (row.split == sim::Split::test) ++test_rows;
        if (row.label == sim::FlowClass::interference && row.split == sim::Split::train)
            train_mixtures.insert(row.mixture);
        if (row.label != sim::FlowClass::interference) CHECK(row.mixture == "-");
    }
    CHECK(train_mixtures.size() == cfg.mixtures.size());
    CHECK(train_rows == 14 * 6);
    CHECK(val_rows == 3 * 6);
    CHECK(test_rows == 3 * 6);

    // both media occur
    int water = 0, sgf = 0;
    for (const auto& rec : a.recordings) {
        if (rec.scenario.medium == "water") ++water;
        if (rec.scenario.medium == "sgf") ++sgf;
    }
    CHECK(water + sgf == 120);
    CHECK(water > 20);
    CHECK(sgf > 20);

    // premixed concentrations respect the configured range
    for (const auto& rec : a.recordings) {
        if (rec.scenario.label != sim::FlowClass::interference) continue;
        CHECK(rec.scenario.interference_premixed_g_per_l >= cfg.interference_premixed_min_g_per_l);
        CHECK(rec.scenario.interference_premixed_g_per_l <= cfg.interference_premixed_max_g_per_l);
        CHECK(rec.scenario.flow_rate_ml_min == 0.0);
    }

    // windows_for_split honors the stride
    const auto test_windows = sim::windows_for_split(a, sim::Split::test, 6);
    CHECK(test_windows.size() == static_cast<std::size_t>(test_rows) * 2);  // (12-6)/6+1 = 2 per recording
    const auto dense = sim::windows_for_split(a, sim::Split::test, 1);
    CHECK(dense.size() == static_cast<std::size_t>(test_rows) * 7);  // (12-6)/1+1 = 7
}

TEST_CASE("manifest CSV round-trips") {
    std::vector<sim::ManifestRow> rows;
    sim::ManifestRow r;
    r.recording_id = "rec_0000";
    r.label = sim::FlowClass::flow_0_3;
    r.split = sim::Split::val;
    r.mixture = "-";
    r.seed = 123456789;
    rows.push_back(r);
    r.recording_id = "rec_0001";
    r.label = sim::FlowClass::interference;
    r.split = sim::Split::train;
    r.mixture = "cola";
    r.seed = 42;
    rows.push_back(r);

    const std::string csv = sim::manifest_to_csv(rows);
    CHECK(csv.rfind("recording_id,class,flow_ml_min,split,mixture,seed\n", 0) == 0);
    const auto parsed = sim::manifest_from_csv(csv);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].recording_id == "rec_0000");
    CHECK(parsed[0].label == sim::FlowClass::flow_0_3);
    CHECK(parsed[0].split == sim::Split::val);
    CHECK(parsed[0].mixture == "-");
    CHECK(parsed[0].seed == 123456789);
    CHECK(parsed[1].label == sim::FlowClass::interference);
    CHECK(parsed[1].mixture == "cola");

    CHECK_THROWS_AS(sim::manifest_from_csv("id,class\n"), sim::RecordingIoError);
    CHECK_THROWS_AS(sim::manifest_from_csv("recording_id,class,flow_ml_min,split,mixture,seed\nrec,0\n"),
                    sim::RecordingIoError);
}

TEST_CASE("recording files round-trip bit-exactly") {
    const auto lib = load_library();
    const auto path = sim::default_optical_path();
    auto s = interference_scenario("milk", 0.25, 77);
    s.medium = "sgf";
    s.background_transmission = sim::medium_background("sgf");
    const auto rec = sim::run_recording(s, lib, path, sim::NoiseModel{}, "rt");

    namespace fs = std::filesystem;
    const fs::path dir = fs::path("sim_io_scratch");
    fs::create_directories(dir);
    const std::string csv_path = (dir / "rt.csv").string();
    const std::string meta_path = (dir / "rt.meta").string();
    sim::save_recording(csv_path, meta_path, rec);

    const auto loaded = sim::load_recording(csv_path, meta_path);
    CHECK(loaded.id == "rt");
    CHECK(loaded.scenario.label == sim::FlowClass::interference);
    CHECK(loaded.scenario.interference_id == "milk");
    CHECK(loaded.scenario.interference_premixed_g_per_l == rec.scenario.interference_premixed_g_per_l);
    CHECK(loaded.scenario.medium == "sgf");
    CHECK(loaded.scenario.rng_seed == 77);
    REQUIRE(loaded.frames.size() == rec.frames.size());
    for (std::size_t k = 0; k < rec.frames.size(); ++k) {
        REQUIRE(loaded.frames[k].timestamp_s == rec.frames[k].timestamp_s);
        for (int ch = 0; ch < spectral::kFrameChannels; ++ch)
            REQUIRE(loaded.frames[k].values[static_cast<std::size_t>(ch)] ==
                    rec.frames[k].values[static_cast<std::size_t>(ch)]);
    }
    CHECK_NOTHROW(loaded.validate());

    // saving the loaded recording reproduces the same bytes
    const std::string csv2 = (dir / "rt2.csv").string();
    const std::string meta2 = (dir / "rt2.meta").string();
    sim::save_recording(csv2, meta2, loaded);
    CHECK(sim::read_text_file(csv2) == sim::read_text_file(csv_path));
    CHECK(sim::read_text_file(meta2) == sim::read_text_file(meta_path));

    fs::remove_all(dir);
    CHECK_THROWS_AS(sim::read_text_file((dir / "gone.csv").string()), sim::RecordingIoError);
}
