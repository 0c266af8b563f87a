#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/sim/frame.hpp"
#include "hemoflow/util/config.hpp"
#include "hemoflow/util/format.hpp"

namespace hemoflow::sim {

class RecordingIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Recording CSV: header `t_s,ch1..ch24`, one row per frame. Timestamps are
// written with millisecond precision (the telemetry link carries them as
// whole milliseconds); channel values round-trip exactly.
inline std::string recording_to_csv(const Recording& rec) {
    std::ostringstream out;
    out << "t_s";
    for (int ch = 1; ch <= spectral::kFrameChannels; ++ch) out << ",ch" << ch;
    out << "\n";
    for (const auto& frame : rec.frames) {
        out << util::fmt_fixed(frame.timestamp_s, 3);
        for (double v : frame.values) out << "," << util::fmt_double(v);
        out << "\n";
    }
    return out.str();
}

inline std::vector<SpectralFrame> frames_from_csv(const std::string& text, const std::string& origin = "<text>") {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw RecordingIoError(origin + ": empty recording file");
    {
        std::ostringstream expected;
        expected << "t_s";
        for (int ch = 1; ch <= spectral::kFrameChannels; ++ch) expected << ",ch" << ch;
        if (line != expected.str()) throw RecordingIoError(origin + ": bad recording CSV header");
    }
    std::vector<SpectralFrame> frames;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        SpectralFrame frame;
        if (!std::getline(row, field, ','))
            throw RecordingIoError(origin + ":" + std::to_string(line_no) + ": missing timestamp");
        frame.timestamp_s = std::stod(field);
        for (int ch = 0; ch < spectral::kFrameChannels; ++ch) {
            if (!std::getline(row, field, ','))
                throw RecordingIoError(origin + ":" + std::to_string(line_no) + ": missing channel value");
            frame.values[static_cast<std::size_t>(ch)] = std::stod(field);
        }
        if (std::getline(row, field, ','))
            throw RecordingIoError(origin + ":" + std::to_string(line_no) + ": trailing fields");
        frames.push_back(frame);
    }
    return frames;
}

// Sidecar metadata, key = value. Everything needed to reconstruct the
// scenario and regenerate the recording.
inline std::string scenario_meta_text(const Recording& rec) {
    util::Config meta;
    const InfusionScenario& s = rec.scenario;
    meta.set("schema_version", std::to_string(rec.schema_version));
    meta.set("recording_id", rec.id);
    meta.set("label_class", std::to_string(static_cast<int>(s.label)));
    meta.set("flow_ml_min", util::fmt_double(s.flow_rate_ml_min));
    meta.set("blood_hb_g_per_l", util::fmt_double(s.blood_hb_g_per_l));
    meta.set("mixture", s.interference_id.empty() ? "-" : s.interference_id);
    meta.set("interference_premixed_g_per_l", util::fmt_double(s.interference_premixed_g_per_l));
    meta.set("interference_rate_ml_min", util::fmt_double(s.interference_rate_ml_min));
    meta.set("interference_stock_g_per_l", util::fmt_double(s.interference_stock_g_per_l));
    meta.set("initial_volume_ml", util::fmt_double(s.initial_volume_ml));
    meta.set("duration_s", util::fmt_double(s.duration_s));
    meta.set("sample_period_s", util::fmt_double(s.sample_period_s));
    meta.set("medium", s.medium);
    meta.set("rng_seed", std::to_string(s.rng_seed));
    std::ostringstream bg;
    for (std::size_t k = 0; k < s.background_transmission.size(); ++k) {
        if (k) bg << ",";
        bg << util::fmt_double(s.background_transmission[k]);
    }
    meta.set("background_transmission", bg.str());
    return meta.to_text();
}

inline InfusionScenario scenario_from_meta(const util::Config& meta) {
    InfusionScenario s;
    s.label = flow_class_from_index(static_cast<int>(meta.get_int("label_class", 0)));
    s.flow_rate_ml_min = meta.get_double("flow_ml_min", 0.0);
    s.blood_hb_g_per_l = meta.get_double("blood_hb_g_per_l", 150.0);
    const std::string mixture = meta.get_string("mixture", "-");
    s.interference_id = mixture == "-" ? "" : mixture;
    s.interference_premixed_g_per_l = meta.get_double("interference_premixed_g_per_l", 0.0);
    s.interference_rate_ml_min = meta.get_double("interference_rate_ml_min", 0.0);
    s.interference_stock_g_per_l = meta.get_double("interference_stock_g_per_l", 0.0);
    s.initial_volume_ml = meta.get_double("initial_volume_ml", 250.0);
    s.duration_s = meta.get_double("duration_s", 120.0);
    s.sample_period_s = meta.get_double("sample_period_s", 1.0);
    s.medium = meta.get_string("medium", "water");
    s.rng_seed = meta.get_u64("rng_seed", 0);
    std::istringstream bg(meta.get_string("background_transmission", ""));
    std::string field;
    std::size_t k = 0;
    while (std::getline(bg, field, ',')) {
        if (k >= s.background_transmission.size())
            throw RecordingIoError("scenario meta: too many background factors");
        s.background_transmission[k++] = std::stod(field);
    }
    if (k != s.background_transmission.size())
        throw RecordingIoError("scenario meta: expected 24 background factors");
    return s;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RecordingIoError("cannot open for writing: " + path);
    out << text;
    if (!out) throw RecordingIoError("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RecordingIoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void save_recording(const std::string& csv_path, const std::string& meta_path, const Recording& rec) {
    write_text_file(csv_path, recording_to_csv(rec));
    write_text_file(meta_path, scenario_meta_text(rec));
}

inline Recording load_recording(const std::string& csv_path, const std::string& meta_path) {
    Recording rec;
    const util::Config meta = util::Config::parse_file(meta_path);
    rec.schema_version = static_cast<int>(meta.get_int("schema_version", kRecordingSchemaVersion));
    if (rec.schema_version != kRecordingSchemaVersion)
        throw RecordingIoError(meta_path + ": unsupported recording schema version " +
                               std::to_string(rec.schema_version));
    rec.id = meta.get_string("recording_id", "");
    rec.scenario = scenario_from_meta(meta);
    rec.frames = frames_from_csv(read_text_file(csv_path), csv_path);
    return rec;
}

}  // namespace hemoflow::sim
