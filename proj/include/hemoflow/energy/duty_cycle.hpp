#pragma once

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/util/format.hpp"

namespace hemoflow::energy {

enum class LowPowerMode { standby, stop };

inline const char* to_string(LowPowerMode m) { return m == LowPowerMode::standby ? "standby" : "stop"; }

inline LowPowerMode low_power_mode_from_string(const std::string& s) {
    if (s == "standby") return LowPowerMode::standby;
    if (s == "stop") return LowPowerMode::stop;
    throw std::invalid_argument("unknown low-power mode: " + s);
}

// One row of the duty-cycle accounting: a burst of active work followed by
// a low-power wait, over a one-minute cycle.
struct DutyCycleCase {
    std::string name;
    double active_time_s = 0.0;
    double mcu_active_energy_uah = 0.0;
    LowPowerMode low_power_mode = LowPowerMode::standby;
    double standby_current_ua = 0.0;
    double standby_time_s = 0.0;
    // Externally stated cycle total, when one exists. 0 means "none": totals
    // are then taken from the computed component sum.
    double reference_total_uah = 0.0;

    void validate() const {
        if (active_time_s < 0.0 || mcu_active_energy_uah < 0.0 || standby_time_s < 0.0 ||
            reference_total_uah < 0.0)
            throw std::invalid_argument("DutyCycleCase: times and energies must be >= 0");
        if (!(standby_current_ua > 0.0))
            throw std::invalid_argument("DutyCycleCase: standby current must be positive");
    }
};

struct EnergySummary {
    double standby_energy_uah = 0.0;
    double total_energy_uah = 0.0;
    double total_charge_uc = 0.0;
    double implied_active_current_ua = 0.0;  // 0 when active_time is 0
};

// standby = I_sb * t_sb / 3600; total = active + standby; charge = total * 3600.
inline EnergySummary cycle_energy(const DutyCycleCase& c) {
    c.validate();
    EnergySummary s;
    s.standby_energy_uah = c.standby_current_ua * c.standby_time_s / 3600.0;
    s.total_energy_uah = c.mcu_active_energy_uah + s.standby_energy_uah;
    s.total_charge_uc = s.total_energy_uah * 3600.0;
    s.implied_active_current_ua =
        c.active_time_s > 0.0 ? c.mcu_active_energy_uah * 3600.0 / c.active_time_s : 0.0;
    return s;
}

inline double implied_active_current_ua(const DutyCycleCase& c) {
    if (!(c.active_time_s > 0.0))
        throw std::invalid_argument("implied active current undefined for zero active time");
    return c.mcu_active_energy_uah * 3600.0 / c.active_time_s;
}

// Stated total when available, otherwise the computed one.
inline double effective_total_uah(const DutyCycleCase& c) {
    return c.reference_total_uah > 0.0 ? c.reference_total_uah : cycle_energy(c).total_energy_uah;
}

// Relative gap between computed and stated totals; 0 when no stated total.
inline double reference_mismatch(const DutyCycleCase& c) {
    if (!(c.reference_total_uah > 0.0)) return 0.0;
    return std::abs(cycle_energy(c).total_energy_uah - c.reference_total_uah) / c.reference_total_uah;
}

inline constexpr double kReferenceMismatchFlagThreshold = 0.005;

struct ScenarioComparison {
    double energy_mixed_uah = 0.0;
    double energy_all_tx_uah = 0.0;
    double reduction = 0.0;  // 1 - mixed/all_tx
};

inline ScenarioComparison scenario_compare(double infer_energy_uah, double tx_energy_uah, int n_infer,
                                           int n_tx) {
    if (n_infer < 0 || n_tx < 0 || (n_infer == 0 && n_tx == 0))
        throw std::invalid_argument("scenario_compare: counts must be >= 0 and not both zero");
    ScenarioComparison cmp;
    cmp.energy_mixed_uah = n_infer * infer_energy_uah + n_tx * tx_energy_uah;
    cmp.energy_all_tx_uah = (n_infer + n_tx) * tx_energy_uah;
    if (!(cmp.energy_all_tx_uah > 0.0))
        throw std::invalid_argument("scenario_compare: all-transmit energy is zero");
    cmp.reduction = 1.0 - cmp.energy_mixed_uah / cmp.energy_all_tx_uah;
    return cmp;
}

inline ScenarioComparison scenario_compare(const DutyCycleCase& infer_case, const DutyCycleCase& tx_case,
                                           int n_infer, int n_tx) {
    return scenario_compare(effective_total_uah(infer_case), effective_total_uah(tx_case), n_infer, n_tx);
}

// cycle_energy is per one-minute cycle, so 60 cycles drain per hour.
inline double battery_lifetime_hours(double cycle_energy_uah_per_min, double capacity_mah) {
    if (!(cycle_energy_uah_per_min > 0.0))
        throw std::invalid_argument("battery_lifetime: cycle energy must be positive");
    if (capacity_mah < 0.0) throw std::invalid_argument("battery_lifetime: negative capacity");
    return capacity_mah * 1000.0 / (cycle_energy_uah_per_min * 60.0);
}

class CasesParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Cases file: one case per line,
//   name, active_time_s, active_energy_uah, mode, standby_current_ua,
//   standby_time_s[, reference_total_uah]
// '#' starts a comment.
inline std::vector<DutyCycleCase> parse_cases(const std::string& text, const std::string& origin = "<text>") {
    std::vector<DutyCycleCase> cases;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        bool blank = true;
        for (char ch : line)
            if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
        if (blank) continue;

        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) {
            const auto first = field.find_first_not_of(" \t");
            const auto last = field.find_last_not_of(" \t");
            fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
        }
        if (fields.size() != 6 && fields.size() != 7)
            throw CasesParseError(origin + ":" + std::to_string(line_no) +
                                  ": expected 6 or 7 fields, found " + std::to_string(fields.size()));
        try {
            DutyCycleCase c;
            c.name = fields[0];
            std::size_t used = 0;
            c.active_time_s = std::stod(fields[1], &used);
            if (used != fields[1].size()) throw std::invalid_argument("trailing junk");
            c.mcu_active_energy_uah = std::stod(fields[2], &used);
            if (used != fields[2].size()) throw std::invalid_argument("trailing junk");
            c.low_power_mode = low_power_mode_from_string(fields[3]);
            c.standby_current_ua = std::stod(fields[4], &used);
            if (used != fields[4].size()) throw std::invalid_argument("trailing junk");
            c.standby_time_s = std::stod(fields[5], &used);
            if (used != fields[5].size()) throw std::invalid_argument("trailing junk");
            if (fields.size() == 7) {
                c.reference_total_uah = std::stod(fields[6], &used);
                if (used != fields[6].size()) throw std::invalid_argument("trailing junk");
            }
            c.validate();
            cases.push_back(std::move(c));
        } catch (const std::exception& e) {
            throw CasesParseError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cases;
}

}  // namespace hemoflow::energy
