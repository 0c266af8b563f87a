#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/spectral/channels.hpp"

namespace hemoflow::spectral {

class SpectrumParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Absorption coefficients of one substance sampled at the 12 sensor channel
// centers. Units: 1 / ((g/L) * mm), so mu * concentration * path_length is
// the dimensionless exponent of the attenuation law.
struct AbsorptionSpectrum {
    std::string substance_id;
    std::array<double, kSensorChannels> mu{};

    double mu_at(int sensor_channel) const {
        if (sensor_channel < 1 || sensor_channel > kSensorChannels)
            throw std::out_of_range("AbsorptionSpectrum: sensor channel out of range");
        return mu[static_cast<std::size_t>(sensor_channel - 1)];
    }

    void validate() const {
        for (double m : mu) {
            if (!(m >= 0.0) || !std::isfinite(m))
                throw std::invalid_argument("AbsorptionSpectrum '" + substance_id +
                                            "': absorption coefficients must be finite and >= 0");
        }
    }
};

// Parses the plain-text spectrum table: one row per sensor channel,
// `channel_index, center_nm, mu`, '#' comments. All 12 channels must be
// present exactly once and the wavelengths must match the channel bank.
inline AbsorptionSpectrum parse_spectrum(const std::string& text, const std::string& substance_id,
                                         const std::string& origin = "<text>") {
    AbsorptionSpectrum spectrum;
    spectrum.substance_id = substance_id;
    std::array<bool, kSensorChannels> seen{};
    const ChannelBank bank;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        if (blank) continue;

        std::string row = line;
        for (char& c : row)
            if (c == ',') c = ' ';
        std::istringstream fields(row);
        int channel = 0;
        double center_nm = 0.0;
        double mu = 0.0;
        if (!(fields >> channel >> center_nm >> mu))
            throw SpectrumParseError(origin + ":" + std::to_string(line_no) +
                                     ": expected 'channel_index, center_nm, mu'");
        std::string rest;
        if (fields >> rest)
            throw SpectrumParseError(origin + ":" + std::to_string(line_no) + ": trailing fields");
        if (channel < 1 || channel > kSensorChannels)
            throw SpectrumParseError(origin + ":" + std::to_string(line_no) + ": channel index out of range");
        if (seen[static_cast<std::size_t>(channel - 1)])
            throw SpectrumParseError(origin + ":" + std::to_string(line_no) + ": duplicate channel " +
                                     std::to_string(channel));
        if (std::abs(bank.center_nm(channel) - center_nm) > 1e-9)
            throw SpectrumParseError(origin + ":" + std::to_string(line_no) + ": center wavelength mismatch for channel " +
                                     std::to_string(channel));
        if (!(mu >= 0.0) || !std::isfinite(mu))
            throw SpectrumParseError(origin + ":" + std::to_string(line_no) + ": mu must be finite and >= 0");
        seen[static_cast<std::size_t>(channel - 1)] = true;
        spectrum.mu[static_cast<std::size_t>(channel - 1)] = mu;
    }

    for (int ch = 1; ch <= kSensorChannels; ++ch) {
        if (!seen[static_cast<std::size_t>(ch - 1)])
            throw SpectrumParseError(origin + ": missing channel " + std::to_string(ch));
    }
    spectrum.validate();
    return spectrum;
}

inline AbsorptionSpectrum load_spectrum_file(const std::string& path, const std::string& substance_id) {
    std::ifstream in(path);
    if (!in) throw SpectrumParseError("cannot open spectrum file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spectrum(buf.str(), substance_id, path);
}

}  // namespace hemoflow::spectral
