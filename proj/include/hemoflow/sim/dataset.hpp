#pragma once

#include <cmath>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/sim/acquire.hpp"
#include "hemoflow/sim/recording_io.hpp"
#include "hemoflow/sim/windowize.hpp"
#include "hemoflow/util/config.hpp"
#include "hemoflow/util/format.hpp"
#include "hemoflow/util/rng.hpp"

namespace hemoflow::sim {

enum class Split { train = 0, val = 1, test = 2 };

inline const char* to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

inline Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "val") return Split::val;
    if (s == "test") return Split::test;
    throw std::invalid_argument("unknown split: " + s);
}

struct DatasetConfig {
    // 160 per class gives each interference mixture several training
    // recordings and enough optimizer steps that early stopping lands on a
    // well-converged model; fewer leaves rare mixtures underrepresented and
    // class margins mushy.
    int recordings_per_class = 160;
    double train_fraction = 0.70;
    double val_fraction = 0.15;
    double test_fraction = 0.15;

    // 60 s keeps peak hemoglobin concentration near 0.5 g/L, where the Soret
    // channels still transmit; longer runs drive them dark and flow levels
    // become hard to separate late in the recording.
    double duration_s = 60.0;
    double sample_period_s = 1.0;
    double initial_volume_ml = 250.0;
    double blood_hb_g_per_l = 150.0;

    NoiseModel noise{};

    std::vector<std::string> mixtures{"tea",          "coffee",   "grape_juice",  "cola",
                                      "kvass",        "milk",     "chocolate_milk", "beetroot",
                                      "tomato_sauce", "grapefruit_juice"};

    // Interference runs dissolve one mixture into the tank before the run,
    // so its signature is static while blood ramps. Concentration is drawn
    // per recording; the cap keeps broadband mixtures (milk) within a few
    // sigma of the channel population on the channels blood never moves,
    // where extreme outliers would wreck int8 activation calibration.
    double interference_premixed_min_g_per_l = 0.1;
    double interference_premixed_max_g_per_l = 0.5;

    void validate() const {
        if (recordings_per_class < 1)
            throw std::invalid_argument("DatasetConfig: every class needs at least one recording");
        if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9)
            throw std::invalid_argument("DatasetConfig: split fractions must sum to 1");
        if (!(train_fraction > 0.0) || !(val_fraction > 0.0) || !(test_fraction > 0.0))
            throw std::invalid_argument("DatasetConfig: split fractions must be positive");
        if (mixtures.empty()) throw std::invalid_argument("DatasetConfig: interference mixture list is empty");
        noise.validate();
        if (!(duration_s / sample_period_s >= kMinRecordingFrames))
            throw std::invalid_argument("DatasetConfig: recordings must cover at least one window");
        if (!(interference_premixed_min_g_per_l > 0.0) ||
            !(interference_premixed_max_g_per_l >= interference_premixed_min_g_per_l))
            throw std::invalid_argument("DatasetConfig: bad interference concentration range");
    }

    static DatasetConfig from_config(const util::Config& cfg) {
        DatasetConfig d;
        d.recordings_per_class = static_cast<int>(cfg.get_int("dataset.recordings_per_class", d.recordings_per_class));
        d.train_fraction = cfg.get_double("dataset.train_fraction", d.train_fraction);
        d.val_fraction = cfg.get_double("dataset.val_fraction", d.val_fraction);
        d.test_fraction = cfg.get_double("dataset.test_fraction", d.test_fraction);
        d.duration_s = cfg.get_double("scenario.duration_s", d.duration_s);
        d.sample_period_s = cfg.get_double("scenario.sample_period_s", d.sample_period_s);
        d.initial_volume_ml = cfg.get_double("scenario.initial_volume_ml", d.initial_volume_ml);
        d.blood_hb_g_per_l = cfg.get_double("scenario.blood_hb_g_per_l", d.blood_hb_g_per_l);
        d.noise.multiplicative_sigma = cfg.get_double("noise.multiplicative_sigma", d.noise.multiplicative_sigma);
        d.noise.additive_sigma = cfg.get_double("noise.additive_sigma", d.noise.additive_sigma);
        d.noise.adc_bits = static_cast<int>(cfg.get_int("noise.adc_bits", d.noise.adc_bits));
        d.interference_premixed_min_g_per_l =
            cfg.get_double("interference.premixed_min_g_per_l", d.interference_premixed_min_g_per_l);
        d.interference_premixed_max_g_per_l =
            cfg.get_double("interference.premixed_max_g_per_l", d.interference_premixed_max_g_per_l);
        const std::string mixture_list = cfg.get_string("dataset.mixtures", "");
        if (!mixture_list.empty()) {
            d.mixtures.clear();
            std::istringstream in(mixture_list);
            std::string name;
            while (std::getline(in, name, ','))
                if (!name.empty()) d.mixtures.push_back(name);
        }
        d.validate();
        return d;
    }

    static std::vector<std::string> config_keys() {
        return {"dataset.recordings_per_class", "dataset.train_fraction", "dataset.val_fraction",
                "dataset.test_fraction",        "dataset.mixtures",       "scenario.duration_s",
                "scenario.sample_period_s",     "scenario.initial_volume_ml", "scenario.blood_hb_g_per_l",
                "noise.multiplicative_sigma",   "noise.additive_sigma",   "noise.adc_bits",
                "interference.premixed_min_g_per_l", "interference.premixed_max_g_per_l"};
    }

    void write_to(util::Config& cfg) const {
        std::string mixture_list;
        for (std::size_t i = 0; i < mixtures.size(); ++i)
            mixture_list += (i ? "," : "") + mixtures[i];
        cfg.set("dataset.mixtures", mixture_list);
        cfg.set("dataset.recordings_per_class", std::to_string(recordings_per_class));
        cfg.set("dataset.train_fraction", util::fmt_double(train_fraction));
        cfg.set("dataset.val_fraction", util::fmt_double(val_fraction));
        cfg.set("dataset.test_fraction", util::fmt_double(test_fraction));
        cfg.set("scenario.duration_s", util::fmt_double(duration_s));
        cfg.set("scenario.sample_period_s", util::fmt_double(sample_period_s));
        cfg.set("scenario.initial_volume_ml", util::fmt_double(initial_volume_ml));
        cfg.set("scenario.blood_hb_g_per_l", util::fmt_double(blood_hb_g_per_l));
        cfg.set("noise.multiplicative_sigma", util::fmt_double(noise.multiplicative_sigma));
        cfg.set("noise.additive_sigma", util::fmt_double(noise.additive_sigma));
        cfg.set("noise.adc_bits", std::to_string(noise.adc_bits));
        cfg.set("interference.premixed_min_g_per_l", util::fmt_double(interference_premixed_min_g_per_l));
        cfg.set("interference.premixed_max_g_per_l", util::fmt_double(interference_premixed_max_g_per_l));
    }
};

struct ManifestRow {
    std::string recording_id;
    FlowClass label = FlowClass::interference;
    Split split = Split::train;
    std::string mixture;  // "-" for bleeding recordings
    std::uint64_t seed = 0;
};

struct DatasetBundle {
    std::vector<Recording> recordings;   // parallel to manifest
    std::vector<ManifestRow> manifest;
};

inline std::string manifest_to_csv(const std::vector<ManifestRow>& manifest) {
    std::ostringstream out;
    out << "recording_id,class,flow_ml_min,split,mixture,seed\n";
    for (const auto& row : manifest) {
        out << row.recording_id << "," << static_cast<int>(row.label) << ","
            << to_string(row.label) << "," << to_string(row.split) << "," << row.mixture << ","
            << row.seed << "\n";
    }
    return out.str();
}

inline std::vector<ManifestRow> manifest_from_csv(const std::string& text, const std::string& origin = "<text>") {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "recording_id,class,flow_ml_min,split,mixture,seed")
        throw RecordingIoError(origin + ": bad manifest header");
    std::vector<ManifestRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string id, cls, flow, split, mixture, seed;
        if (!std::getline(row, id, ',') || !std::getline(row, cls, ',') || !std::getline(row, flow, ',') ||
            !std::getline(row, split, ',') || !std::getline(row, mixture, ',') || !std::getline(row, seed, ','))
            throw RecordingIoError(origin + ":" + std::to_string(line_no) + ": short manifest row");
        ManifestRow r;
        r.recording_id = id;
        r.label = flow_class_from_index(std::stoi(cls));
        r.split = split_from_string(split);
        r.mixture = mixture;
        r.seed = std::stoull(seed);
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace detail {

// Per-class split sizes; train and val round to nearest, test takes the rest.
struct SplitCounts {
    int train, val, test;
};

inline SplitCounts split_counts(const DatasetConfig& cfg) {
    const int n = cfg.recordings_per_class;
    SplitCounts c{};
    c.train = static_cast<int>(std::llround(cfg.train_fraction * n));
    c.val = static_cast<int>(std::llround(cfg.val_fraction * n));
    c.test = n - c.train - c.val;
    if (c.train < 1 || c.val < 1 || c.test < 1)
        throw std::invalid_argument("DatasetConfig: split leaves an empty partition");
    return c;
}

}  // namespace detail

// Builds the full labeled corpus. Scenario planning (splits, media,
// interference draws) runs serially off one planning stream; frame synthesis
// uses an independent stream per recording, so the parallel and serial paths
// produce identical bytes.
inline DatasetBundle generate_dataset(const DatasetConfig& cfg, const SpectraLibrary& spectra,
                                      const spectral::OpticalPath& path, std::uint64_t master_seed,
                                      bool parallel = false) {
    cfg.validate();
    path.validate();
    for (const auto& mixture : cfg.mixtures) spectra.interference_spectrum(mixture);  // fail fast

    const detail::SplitCounts counts = detail::split_counts(cfg);
    util::Rng plan_rng(util::derive_stream_seed(master_seed, 0x706C616EULL));  // planning stream

    DatasetBundle bundle;
    const int per_class = cfg.recordings_per_class;
    bundle.manifest.reserve(static_cast<std::size_t>(per_class) * kNumClasses);

    std::vector<InfusionScenario> scenarios;
    scenarios.reserve(bundle.manifest.capacity());

    for (int cls = 0; cls < kNumClasses; ++cls) {
        const FlowClass label = flow_class_from_index(cls);

        // split assignment: shuffled positions, first train, then val, then test
        std::vector<int> order(static_cast<std::size_t>(per_class));
        for (int i = 0; i < per_class; ++i) order[static_cast<std::size_t>(i)] = i;
        plan_rng.shuffle(order);
        std::vector<Split> split_of(static_cast<std::size_t>(per_class));
        for (int pos = 0; pos < per_class; ++pos) {
            Split s = Split::test;
            if (pos < counts.train)
                s = Split::train;
            else if (pos < counts.train + counts.val)
                s = Split::val;
            split_of[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = s;
        }

        std::vector<std::string> mixture_of(static_cast<std::size_t>(per_class), "-");
        if (label == FlowClass::interference) {
            for (int i = 0; i < per_class; ++i)
                mixture_of[static_cast<std::size_t>(i)] =
                    cfg.mixtures[static_cast<std::size_t>(i) % cfg.mixtures.size()];
            // every mixture must reach the training split at least once
            for (std::size_t m = 0; m < cfg.mixtures.size() && m < static_cast<std::size_t>(per_class); ++m) {
                const std::string& needed = cfg.mixtures[m];
                bool in_train = false;
                for (int i = 0; i < per_class; ++i)
                    if (mixture_of[static_cast<std::size_t>(i)] == needed &&
                        split_of[static_cast<std::size_t>(i)] == Split::train) {
                        in_train = true;
                        break;
                    }
                if (in_train) continue;
                // swap with a train slot whose mixture is the most redundant
                std::map<std::string, int> train_count;
                for (int i = 0; i < per_class; ++i)
                    if (split_of[static_cast<std::size_t>(i)] == Split::train)
                        ++train_count[mixture_of[static_cast<std::size_t>(i)]];
                int donor = -1;
                int best = 1;
                for (int i = 0; i < per_class; ++i)
                    if (split_of[static_cast<std::size_t>(i)] == Split::train &&
                        train_count[mixture_of[static_cast<std::size_t>(i)]] > best) {
                        best = train_count[mixture_of[static_cast<std::size_t>(i)]];
                        donor = i;
                    }
                int receiver = -1;
                for (int i = 0; i < per_class; ++i)
                    if (mixture_of[static_cast<std::size_t>(i)] == needed &&
                        split_of[static_cast<std::size_t>(i)] != Split::train) {
                        receiver = i;
                        break;
                    }
                if (donor >= 0 && receiver >= 0)
                    std::swap(split_of[static_cast<std::size_t>(donor)],
                              split_of[static_cast<std::size_t>(receiver)]);
            }
        }

        for (int i = 0; i < per_class; ++i) {
            const std::size_t global = bundle.manifest.size();
            InfusionScenario s;
            s.label = label;
            s.blood_hb_g_per_l = cfg.blood_hb_g_per_l;
            s.initial_volume_ml = cfg.initial_volume_ml;
            s.duration_s = cfg.duration_s;
            s.sample_period_s = cfg.sample_period_s;
            s.medium = plan_rng.next_double() < 0.5 ? "water" : "sgf";
            s.background_transmission = medium_background(s.medium);
            s.rng_seed = util::derive_stream_seed(master_seed, global);
            if (label == FlowClass::interference) {
                s.flow_rate_ml_min = 0.0;
                s.interference_id = mixture_of[static_cast<std::size_t>(i)];
                s.interference_premixed_g_per_l = plan_rng.uniform(
                    cfg.interference_premixed_min_g_per_l, cfg.interference_premixed_max_g_per_l);
            } else {
                s.flow_rate_ml_min = flow_ml_min(label);
            }

            ManifestRow row;
            char id_buf[16];
            std::snprintf(id_buf, sizeof(id_buf), "rec_%04zu", global);
            row.recording_id = id_buf;
            row.label = label;
            row.split = split_of[static_cast<std::size_t>(i)];
            row.mixture = mixture_of[static_cast<std::size_t>(i)];
            row.seed = s.rng_seed;
            bundle.manifest.push_back(std::move(row));
            scenarios.push_back(std::move(s));
        }
    }

    bundle.recordings.resize(scenarios.size());
    auto synthesize = [&](std::size_t k) {
        bundle.recordings[k] = run_recording(scenarios[k], spectra, path, cfg.noise,
                                             bundle.manifest[k].recording_id);
    };
    if (parallel) {
        const std::size_t lanes = 4;
        std::vector<std::future<void>> futures;
        for (std::size_t lane = 0; lane < lanes; ++lane) {
            futures.push_back(std::async(std::launch::async, [&, lane] {
                for (std::size_t k = lane; k < scenarios.size(); k += lanes) synthesize(k);
            }));
        }
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t k = 0; k < scenarios.size(); ++k) synthesize(k);
    }
    return bundle;
}

inline std::vector<Window> windows_for_split(const DatasetBundle& bundle, Split split, int stride = kWindowLength) {
    std::vector<Window> windows;
    for (std::size_t k = 0; k < bundle.recordings.size(); ++k) {
        if (bundle.manifest[k].split != split) continue;
        auto w = windowize(bundle.recordings[k], kWindowLength, stride);
        windows.insert(windows.end(), w.begin(), w.end());
    }
    return windows;
}

}  // namespace hemoflow::sim
