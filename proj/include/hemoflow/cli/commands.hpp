#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hemoflow/edge/footprint.hpp"
#include "hemoflow/edge/qforward.hpp"
#include "hemoflow/edge/qmodel_io.hpp"
#include "hemoflow/edge/quantize.hpp"
#include "hemoflow/energy/duty_cycle.hpp"
#include "hemoflow/nn/eval.hpp"
#include "hemoflow/nn/model_io.hpp"
#include "hemoflow/nn/train.hpp"
#include "hemoflow/sim/dataset.hpp"
#include "hemoflow/sim/physics_check.hpp"
#include "hemoflow/sim/recording_io.hpp"
#include "hemoflow/telemetry/packed_recording.hpp"
#include "hemoflow/util/config.hpp"
#include "hemoflow/util/format.hpp"

namespace hemoflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

inline void write_resolved_config(const std::string& out_dir, const util::Config& cfg) {
    sim::write_text_file(out_dir + "/resolved_config.txt", cfg.to_text());
}

inline sim::SpectraLibrary load_spectra(const std::string& data_dir,
                                        const std::vector<std::string>& mixtures) {
    sim::SpectraLibrary lib;
    lib.hemoglobin = spectral::load_spectrum_file(data_dir + "/hemoglobin.spectrum", "hemoglobin");
    for (const auto& m : mixtures)
        lib.interference.emplace(m, spectral::load_spectrum_file(data_dir + "/mixtures/" + m + ".spectrum", m));
    return lib;
}

inline sim::DatasetBundle load_dataset(const std::string& dataset_dir) {
    const auto manifest =
        sim::manifest_from_csv(sim::read_text_file(dataset_dir + "/manifest.csv"), dataset_dir + "/manifest.csv");
    sim::DatasetBundle bundle;
    bundle.manifest = manifest;
    bundle.recordings.reserve(manifest.size());
    for (const auto& row : manifest) {
        const std::string base = dataset_dir + "/recordings/" + row.recording_id;
        bundle.recordings.push_back(sim::load_recording(base + ".csv", base + ".meta"));
        if (bundle.recordings.back().scenario.label != row.label)
            throw sim::RecordingIoError(row.recording_id + ": manifest/metadata class mismatch");
    }
    return bundle;
}

// windows plus the mixture id of their source recording, aligned by index
struct SplitWindows {
    std::vector<sim::Window> windows;
    std::vector<std::string> mixtures;
};

inline SplitWindows split_windows(const sim::DatasetBundle& bundle, sim::Split split, int stride) {
    SplitWindows out;
    for (std::size_t k = 0; k < bundle.recordings.size(); ++k) {
        if (bundle.manifest[k].split != split) continue;
        auto w = sim::windowize(bundle.recordings[k], sim::kWindowLength, stride);
        for (auto& win : w) {
            out.windows.push_back(std::move(win));
            out.mixtures.push_back(bundle.manifest[k].mixture);
        }
    }
    return out;
}

}  // namespace detail

// ----- gen -----

struct GenOptions {
    std::string config_path;  // empty: built-in defaults
    std::string data_dir = "data";
    std::string out_dir = "dataset";
    std::optional<std::uint64_t> seed;  // wins over the config file
    bool parallel = false;
};

inline int cmd_gen(const GenOptions& opt, std::ostream& out = std::cout) {
    util::Config cfg;
    if (!opt.config_path.empty()) cfg = util::Config::parse_file(opt.config_path);
    auto allowed = sim::DatasetConfig::config_keys();
    allowed.push_back("seed");
    cfg.validate_keys(allowed);

    const sim::DatasetConfig dataset_cfg = sim::DatasetConfig::from_config(cfg);
    const std::uint64_t seed = opt.seed ? *opt.seed : cfg.get_u64("seed", 42);

    const auto spectra = detail::load_spectra(opt.data_dir, dataset_cfg.mixtures);
    const auto path = sim::default_optical_path();
    const sim::DatasetBundle bundle = sim::generate_dataset(dataset_cfg, spectra, path, seed, opt.parallel);

    detail::ensure_dir(opt.out_dir + "/recordings");
    sim::write_text_file(opt.out_dir + "/manifest.csv", sim::manifest_to_csv(bundle.manifest));
    for (std::size_t k = 0; k < bundle.recordings.size(); ++k) {
        const std::string base = opt.out_dir + "/recordings/" + bundle.manifest[k].recording_id;
        sim::save_recording(base + ".csv", base + ".meta", bundle.recordings[k]);
    }

    util::Config resolved;
    dataset_cfg.write_to(resolved);
    resolved.set("seed", std::to_string(seed));
    detail::write_resolved_config(opt.out_dir, resolved);

    out << "generated " << bundle.recordings.size() << " recordings ("
        << dataset_cfg.recordings_per_class << " per class) into " << opt.out_dir << "\n";
    return kExitOk;
}

// ----- train -----

struct TrainOptions {
    std::string config_path;
    std::string dataset_dir = "dataset";
    std::string out_dir = "model";
    std::optional<std::uint64_t> seed;
};

inline int cmd_train(const TrainOptions& opt, std::ostream& out = std::cout) {
    util::Config cfg;
    if (!opt.config_path.empty()) cfg = util::Config::parse_file(opt.config_path);
    cfg.validate_keys({"train.lr", "train.beta1", "train.beta2", "train.eps", "train.batch_size",
                       "train.max_epochs", "train.patience", "train.lanes", "train.window_stride",
                       "windows.stride", "seed"});

    const nn::TrainConfig train_cfg = nn::TrainConfig::from_config(cfg);
    // Training and validation windows overlap (stride 1): training for
    // coverage of every phase offset, validation so the early-stopping
    // accuracy estimate has fine enough resolution to see real plateaus.
    const int train_stride = static_cast<int>(cfg.get_int("train.window_stride", 1));
    const int stride = static_cast<int>(cfg.get_int("windows.stride", sim::kWindowLength));
    // Training seed is independent of the dataset seed; it only drives
    // weight init and batch shuffling.
    const std::uint64_t seed = opt.seed ? *opt.seed : cfg.get_u64("seed", 1);

    const auto bundle = detail::load_dataset(opt.dataset_dir);
    const auto train_split = detail::split_windows(bundle, sim::Split::train, train_stride);
    const auto val_split = detail::split_windows(bundle, sim::Split::val, train_stride);

    util::Config resolved;
    train_cfg.write_to(resolved);
    resolved.set("train.window_stride", std::to_string(train_stride));
    resolved.set("windows.stride", std::to_string(stride));
    resolved.set("seed", std::to_string(seed));
    resolved.set("in.dataset_dir", opt.dataset_dir);
    const std::uint64_t config_hash = util::fnv1a64(resolved.to_text());

    const nn::TrainResult result = nn::train(train_split.windows, val_split.windows, train_cfg, seed);

    detail::ensure_dir(opt.out_dir);
    nn::save_model(opt.out_dir + "/model.bin", result.model, result.normalizer, config_hash);
    sim::write_text_file(opt.out_dir + "/history.csv", nn::history_to_csv(result.history));
    detail::write_resolved_config(opt.out_dir, resolved);

    out << "trained " << result.history.size() << " epochs; best epoch " << result.best_epoch
        << ", val_accuracy=" << util::fmt_double(result.best_val_accuracy) << "\n";
    return kExitOk;
}

// ----- eval -----

struct EvalOptions {
    std::string config_path;
    std::string model_path = "model/model.bin";
    std::string dataset_dir = "dataset";
    std::string out_dir = "eval";
};

inline int cmd_eval(const EvalOptions& opt, std::ostream& out = std::cout) {
    util::Config cfg;
    if (!opt.config_path.empty()) cfg = util::Config::parse_file(opt.config_path);
    cfg.validate_keys({"windows.stride"});
    const int stride = static_cast<int>(cfg.get_int("windows.stride", sim::kWindowLength));

    const nn::LoadedModel loaded = nn::load_model(opt.model_path);
    const auto bundle = detail::load_dataset(opt.dataset_dir);
    const auto test_split = detail::split_windows(bundle, sim::Split::test, stride);
    const nn::EvalReport report = nn::evaluate(loaded.model, loaded.normalizer, test_split.windows);

    detail::ensure_dir(opt.out_dir);
    sim::write_text_file(opt.out_dir + "/eval_report.txt", report.to_text());
    util::Config resolved;
    resolved.set("windows.stride", std::to_string(stride));
    resolved.set("in.model", opt.model_path);
    resolved.set("in.dataset_dir", opt.dataset_dir);
    detail::write_resolved_config(opt.out_dir, resolved);

    out << "accuracy=" << util::fmt_double(report.accuracy)
        << ", adjacent_err=" << util::fmt_double(report.adjacent_error_fraction)
        << ", interference_recall=" << util::fmt_double(report.interference_recall) << "\n";
    return kExitOk;
}

// ----- quantize -----

struct QuantizeOptions {
    std::string config_path;
    std::string model_path = "model/model.bin";
    std::string dataset_dir = "dataset";
    std::string out_dir = "qmodel";
};

inline int cmd_quantize(const QuantizeOptions& opt, std::ostream& out = std::cout) {
    util::Config cfg;
    if (!opt.config_path.empty()) cfg = util::Config::parse_file(opt.config_path);
    cfg.validate_keys({"windows.stride", "quantize.calibration_windows"});
    const int stride = static_cast<int>(cfg.get_int("windows.stride", sim::kWindowLength));
    const int calib_budget = static_cast<int>(cfg.get_int("quantize.calibration_windows", 512));
    if (calib_budget < 1) throw util::ConfigError("quantize.calibration_windows must be >= 1");

    const nn::LoadedModel loaded = nn::load_model(opt.model_path);
    const auto bundle = detail::load_dataset(opt.dataset_dir);
    const auto train_windows = detail::split_windows(bundle, sim::Split::train, stride);

    // Calibrate on bleeding windows only. Static mixture windows carry the
    // most extreme activations in the corpus but also enormous class margins,
    // so letting them saturate costs nothing in top-1 while keeping the
    // min/max ranges, and with them the quantization step, several times
    // tighter for the flow-rate boundaries that actually need resolution.
    std::vector<const sim::Window*> pool;
    pool.reserve(train_windows.windows.size());
    for (const auto& w : train_windows.windows)
        if (sim::is_bleeding(w.label)) pool.push_back(&w);
    if (pool.empty())
        for (const auto& w : train_windows.windows) pool.push_back(&w);

    // Evenly strided subsample; calibration cost is bounded and independent
    // of dataset size.
    std::vector<sim::Window> calib;
    const std::size_t total = pool.size();
    const std::size_t budget = std::min<std::size_t>(static_cast<std::size_t>(calib_budget), total);
    calib.reserve(budget);
    for (std::size_t k = 0; k < budget; ++k) calib.push_back(*pool[k * total / budget]);
    const edge::QuantizeResult result = edge::quantize(loaded.model, loaded.normalizer, calib);

    detail::ensure_dir(opt.out_dir);
    edge::save_qmodel(opt.out_dir + "/qmodel.bin", result.qmodel, loaded.config_hash);
    sim::write_text_file(opt.out_dir + "/quantize_report.txt", result.report.to_text());
    util::Config resolved;
    resolved.set("windows.stride", std::to_string(stride));
    resolved.set("quantize.calibration_windows", std::to_string(calib_budget));
    resolved.set("in.model", opt.model_path);
    resolved.set("in.dataset_dir", opt.dataset_dir);
    detail::write_resolved_config(opt.out_dir, resolved);

    out << "quantized model written; max_calibration_logit_dev="
        << util::fmt_double(result.report.max_calibration_logit_dev) << "\n";
    return kExitOk;
}

// ----- qeval -----

struct QEvalOptions {
    std::string config_path;
    std::string qmodel_path = "qmodel/qmodel.bin";
    std::string model_path = "model/model.bin";
    std::string dataset_dir = "dataset";
    std::string out_dir = "qeval";
};

struct QEvalSummary {
    double agreement = 0.0;
    double max_abs_logit_dev = 0.0;
    nn::EvalReport int8_report;
};

inline QEvalSummary qeval_summary(const nn::LoadedModel& loaded, const edge::QuantizedModel& qm,
                                  const std::vector<sim::Window>& windows) {
    if (windows.empty()) throw std::invalid_argument("qeval: empty test set");
    QEvalSummary s;
    s.int8_report.total = static_cast<int>(windows.size());
    std::size_t agree = 0;
    for (const auto& w : windows) {
        const nn::Tensor input = loaded.normalizer.apply(w);
        const auto float_logits = nn::forward(loaded.model, input);
        const nn::Tensor qinput = qm.normalizer.apply(w);
        const auto q = edge::qforward(qm, qinput);
        const int float_pred = nn::predict_class(float_logits);
        const int q_pred = nn::predict_class(q.logits);
        if (float_pred == q_pred) ++agree;
        for (std::size_t i = 0; i < nn::kNumLogits; ++i)
            s.max_abs_logit_dev = std::max(s.max_abs_logit_dev, std::abs(float_logits[i] - q.logits[i]));
        ++s.int8_report.confusion[static_cast<std::size_t>(w.label)][static_cast<std::size_t>(q_pred)];
    }
    s.agreement = static_cast<double>(agree) / static_cast<double>(windows.size());
    int correct = 0;
    for (int c = 0; c < sim::kNumClasses; ++c)
        correct += s.int8_report.confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    s.int8_report.accuracy = static_cast<double>(correct) / static_cast<double>(windows.size());
    return s;
}

inline int cmd_qeval(const QEvalOptions& opt, std::ostream& out = std::cout) {
    util::Config cfg;
    if (!opt.config_path.empty()) cfg = util::Config::parse_file(opt.config_path);
    cfg.validate_keys({"windows.stride"});
    const int stride = static_cast<int>(cfg.get_int("windows.stride", sim::kWindowLength));

    const nn::LoadedModel loaded = nn::load_model(opt.model_path);
    const edge::LoadedQModel qloaded = edge::load_qmodel(opt.qmodel_path);
    const auto bundle = detail::load_dataset(opt.dataset_dir);
    const auto test_split = detail::split_windows(bundle, sim::Split::test, stride);

    const QEvalSummary s = qeval_summary(loaded, qloaded.qmodel, test_split.windows);

    detail::ensure_dir(opt.out_dir);
    std::ostringstream rep;
    rep << "windows = " << test_split.windows.size() << "\n";
    rep << "top1_agreement = " << util::fmt_double(s.agreement) << "\n";
    rep << "max_abs_logit_dev = " << util::fmt_double(s.max_abs_logit_dev) << "\n";
    rep << "int8_accuracy = " << util::fmt_double(s.int8_report.accuracy) << "\n";
    sim::write_text_file(opt.out_dir + "/qeval_report.txt", rep.str());
    util::Config resolved;
    resolved.set("windows.stride", std::to_string(stride));
    resolved.set("in.model", opt.model_path);
    resolved.set("in.qmodel", opt.qmodel_path);
    resolved.set("in.dataset_dir", opt.dataset_dir);
    detail::write_resolved_config(opt.out_dir, resolved);

    out << "agreement=" << util::fmt_double(s.agreement)
        << ", max_abs_logit_dev=" << util::fmt_double(s.max_abs_logit_dev) << "\n";
    return kExitOk;
}

// ----- physics-check -----

struct PhysicsCheckOptions {
    std::string config_path;
    std::string data_dir = "data";
    std::string out_dir = "physics";
};

inline int cmd_physics_check(const PhysicsCheckOptions& opt, std::ostream& out = std::cout) {
    util::Config cfg;
    if (!opt.config_path.empty()) cfg = util::Config::parse_file(opt.config_path);
    cfg.validate_keys({"physics.duration_s", "physics.sample_period_s"});
    const double duration = cfg.get_double("physics.duration_s", 120.0);
    const double period = cfg.get_double("physics.sample_period_s", 1.0);

    const auto spectra = detail::load_spectra(opt.data_dir, {});
    const sim::PhysicsCheckResult result = sim::run_physics_check(spectra, duration, period);

    detail::ensure_dir(opt.out_dir);
    sim::write_text_file(opt.out_dir + "/ratio_series.csv", result.to_csv());
    sim::write_text_file(opt.out_dir + "/physics_report.txt", result.to_text());
    util::Config resolved;
    resolved.set("physics.duration_s", util::fmt_double(duration));
    resolved.set("physics.sample_period_s", util::fmt_double(period));
    detail::write_resolved_config(opt.out_dir, resolved);

    out << (result.pass ? "PASS" : "FAIL") << ": attenuation ratio physics\n";
    return result.pass ? kExitOk : kExitFailure;
}

// ----- energy-report -----

struct EnergyReportOptions {
    std::string config_path;
    std::string cases_path = "data/energy_cases.txt";
    std::string out_dir = "energy";
};

inline int cmd_energy_report(const EnergyReportOptions& opt, std::ostream& out = std::cout) {
    util::Config cfg;
    if (!opt.config_path.empty()) cfg = util::Config::parse_file(opt.config_path);
    cfg.validate_keys({"energy.n_infer", "energy.n_tx", "energy.infer_case", "energy.tx_case",
                       "energy.capacity_mah"});
    const int n_infer = static_cast<int>(cfg.get_int("energy.n_infer", 9));
    const int n_tx = static_cast<int>(cfg.get_int("energy.n_tx", 1));
    const std::string infer_name = cfg.get_string("energy.infer_case", "case1");
    const std::string tx_name = cfg.get_string("energy.tx_case", "case2");
    const double capacity = cfg.get_double("energy.capacity_mah", 40.0);

    const auto cases = energy::parse_cases(sim::read_text_file(opt.cases_path), opt.cases_path);
    if (cases.empty()) throw util::ConfigError("cases file has no cases: " + opt.cases_path);

    const energy::DutyCycleCase* infer_case = nullptr;
    const energy::DutyCycleCase* tx_case = nullptr;
    std::ostringstream rep;
    for (const auto& c : cases) {
        const auto s = energy::cycle_energy(c);
        rep << c.name << ": active " << util::fmt_double(c.active_time_s) << " s / "
            << util::fmt_double(c.mcu_active_energy_uah) << " uAh, " << energy::to_string(c.low_power_mode)
            << " " << util::fmt_double(c.standby_current_ua) << " uA x "
            << util::fmt_double(c.standby_time_s) << " s\n";
        rep << "  standby_energy = " << util::fmt_fixed(s.standby_energy_uah, 5) << " uAh\n";
        rep << "  total_energy = " << util::fmt_fixed(s.total_energy_uah, 5) << " uAh\n";
        rep << "  total_charge = " << util::fmt_fixed(s.total_charge_uc, 2) << " uC\n";
        if (c.active_time_s > 0.0)
            rep << "  implied_active_current = " << util::fmt_fixed(s.implied_active_current_ua, 2) << " uA\n";
        if (c.reference_total_uah > 0.0) {
            const double mismatch = energy::reference_mismatch(c);
            rep << "  stated_total = " << util::fmt_double(c.reference_total_uah) << " uAh (computed differs by "
                << util::fmt_fixed(mismatch * 100.0, 2) << "%)"
                << (mismatch > energy::kReferenceMismatchFlagThreshold
                        ? " [FLAG: stated components are inconsistent with the stated total]"
                        : "")
                << "\n";
        }
        if (c.name == infer_name) infer_case = &c;
        if (c.name == tx_name) tx_case = &c;
    }
    if (infer_case == nullptr) throw util::ConfigError("unknown inference case: " + infer_name);
    if (tx_case == nullptr) throw util::ConfigError("unknown transmit case: " + tx_name);

    const auto cmp = energy::scenario_compare(*infer_case, *tx_case, n_infer, n_tx);
    rep << "scenario: " << n_infer << " x " << infer_name << " + " << n_tx << " x " << tx_name << " = "
        << util::fmt_fixed(cmp.energy_mixed_uah, 5) << " uAh vs " << (n_infer + n_tx) << " x " << tx_name
        << " = " << util::fmt_fixed(cmp.energy_all_tx_uah, 5) << " uAh\n";
    rep << "reduction = " << util::fmt_fixed(cmp.reduction * 100.0, 2) << "%\n";

    const double lifetime =
        energy::battery_lifetime_hours(energy::cycle_energy(*infer_case).total_energy_uah, capacity);
    rep << "battery_lifetime(" << util::fmt_double(capacity) << " mAh, all-" << infer_name
        << " cycles) = " << util::fmt_fixed(lifetime, 1) << " h\n";

    detail::ensure_dir(opt.out_dir);
    sim::write_text_file(opt.out_dir + "/energy_report.txt", rep.str());
    util::Config resolved;
    resolved.set("energy.n_infer", std::to_string(n_infer));
    resolved.set("energy.n_tx", std::to_string(n_tx));
    resolved.set("energy.infer_case", infer_name);
    resolved.set("energy.tx_case", tx_name);
    resolved.set("energy.capacity_mah", util::fmt_double(capacity));
    resolved.set("in.cases", opt.cases_path);
    detail::write_resolved_config(opt.out_dir, resolved);

    out << "mixed=" << util::fmt_fixed(cmp.energy_mixed_uah, 5)
        << " uAh, all_tx=" << util::fmt_fixed(cmp.energy_all_tx_uah, 5)
        << " uAh, reduction=" << util::fmt_fixed(cmp.reduction * 100.0, 2) << "%\n";
    return kExitOk;
}

// ----- export-features -----

struct ExportFeaturesOptions {
    std::string config_path;
    std::string model_path = "model/model.bin";
    std::string dataset_dir = "dataset";
    std::string split = "test";
    std::string out_dir = "features";
};

inline int cmd_export_features(const ExportFeaturesOptions& opt, std::ostream& out = std::cout) {
    util::Config cfg;
    if (!opt.config_path.empty()) cfg = util::Config::parse_file(opt.config_path);
    cfg.validate_keys({"windows.stride"});
    const int stride = static_cast<int>(cfg.get_int("windows.stride", sim::kWindowLength));

    const nn::LoadedModel loaded = nn::load_model(opt.model_path);
    const auto bundle = detail::load_dataset(opt.dataset_dir);
    const auto split = detail::split_windows(bundle, sim::split_from_string(opt.split), stride);
    const std::string csv =
        nn::export_features(loaded.model, loaded.normalizer, split.windows, split.mixtures);

    detail::ensure_dir(opt.out_dir);
    sim::write_text_file(opt.out_dir + "/features.csv", csv);
    util::Config resolved;
    resolved.set("windows.stride", std::to_string(stride));
    resolved.set("in.model", opt.model_path);
    resolved.set("in.dataset_dir", opt.dataset_dir);
    resolved.set("in.split", opt.split);
    detail::write_resolved_config(opt.out_dir, resolved);

    out << "exported " << split.windows.size() << " feature rows (" << opt.split << " split)\n";
    return kExitOk;
}

// ----- encode -----

struct EncodeOptions {
    std::string recording_csv;  // required
    std::string meta_path;      // default: csv path with .meta extension
    std::string out_dir = "packed";
};

inline int cmd_encode(const EncodeOptions& opt, std::ostream& out = std::cout) {
    if (opt.recording_csv.empty()) throw util::ConfigError("encode: missing recording path");
    std::string meta = opt.meta_path;
    if (meta.empty()) {
        meta = opt.recording_csv;
        const auto dot = meta.rfind('.');
        if (dot != std::string::npos) meta.resize(dot);
        meta += ".meta";
    }
    const sim::Recording rec = sim::load_recording(opt.recording_csv, meta);

    detail::ensure_dir(opt.out_dir);
    telemetry::save_packed_recording(opt.out_dir + "/packed.bin", rec);
    util::Config resolved;
    resolved.set("in.recording", opt.recording_csv);
    resolved.set("in.meta", meta);
    detail::write_resolved_config(opt.out_dir, resolved);

    out << "packed " << rec.frames.size() << " frames ("
        << (telemetry::kPackedHeaderSize + rec.frames.size() * telemetry::kRawFrameSize) << " bytes)\n";
    return kExitOk;
}

// ----- decode -----

struct DecodeOptions {
    std::string packed_path;  // required
    std::string out_dir = "decoded";
};

inline int cmd_decode(const DecodeOptions& opt, std::ostream& out = std::cout) {
    if (opt.packed_path.empty()) throw util::ConfigError("decode: missing packed file path");
    const telemetry::UnpackedRecording unpacked = telemetry::load_packed_recording(opt.packed_path);

    std::ostringstream csv;
    csv << "t_s";
    for (int ch = 1; ch <= spectral::kFrameChannels; ++ch) csv << ",ch" << ch;
    csv << "\n";
    for (const auto& f : unpacked.frames) {
        const auto& p = std::get<telemetry::RawPayload>(f.payload);
        csv << util::fmt_fixed(static_cast<double>(f.timestamp_ms) / 1000.0, 3);
        for (std::uint16_t v : p.channels) csv << "," << v;
        csv << "\n";
    }

    detail::ensure_dir(opt.out_dir);
    sim::write_text_file(opt.out_dir + "/decoded.csv", csv.str());
    util::Config resolved;
    resolved.set("in.packed", opt.packed_path);
    detail::write_resolved_config(opt.out_dir, resolved);

    out << "decoded " << unpacked.frames.size() << " frames\n";
    return kExitOk;
}

}  // namespace hemoflow::cli
