#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "hemoflow/spectral/beer_lambert.hpp"
#include "hemoflow/spectral/channels.hpp"
#include "hemoflow/spectral/spectrum.hpp"
#include "hemoflow/util/rng.hpp"

using namespace hemoflow;
using spectral::ChannelBank;

namespace {

std::string valid_spectrum_text() {
    const ChannelBank bank;
    std::string text = "# test spectrum\n";
    for (int ch = 1; ch <= spectral::kSensorChannels; ++ch)
        text += std::to_string(ch) + ", " + std::to_string(bank.center_nm(ch)) + ", " +
                std::to_string(0.01 * ch) + "\n";
    return text;
}

}  // namespace

TEST_CASE("channel bank maps frame channels onto the sensor") {
    CHECK(spectral::kSensorChannels == 12);
    CHECK(spectral::kFrameChannels == 24);

    const ChannelBank bank;
    CHECK(bank.center_nm(1) == 405.0);
    CHECK(bank.center_nm(6) == 550.0);
    CHECK(bank.center_nm(12) == 855.0);
    CHECK_THROWS_AS(bank.center_nm(0), std::out_of_range);
    CHECK_THROWS_AS(bank.center_nm(13), std::out_of_range);

    CHECK(ChannelBank::sensor_channel_of(1) == 1);
    CHECK(ChannelBank::sensor_channel_of(12) == 12);
    CHECK(ChannelBank::sensor_channel_of(13) == 1);
    CHECK(ChannelBank::sensor_channel_of(24) == 12);
    CHECK_THROWS_AS(ChannelBank::sensor_channel_of(25), std::out_of_range);

    CHECK(ChannelBank::illumination_state_of(1) == spectral::IlluminationState::a);
    CHECK(ChannelBank::illumination_state_of(12) == spectral::IlluminationState::a);
    CHECK(ChannelBank::illumination_state_of(13) == spectral::IlluminationState::b);
    CHECK(ChannelBank::same_illumination_state(1, 12));
    CHECK(ChannelBank::same_illumination_state(13, 24));
    CHECK_FALSE(ChannelBank::same_illumination_state(1, 13));
}

TEST_CASE("spectrum parser accepts a full table") {
    const auto s = spectral::parse_spectrum(valid_spectrum_text(), "test");
    CHECK(s.substance_id == "test");
    CHECK(s.mu_at(1) == Catch::Approx(0.01));
    CHECK(s.mu_at(12) == Catch::Approx(0.12));
    CHECK_THROWS_AS(s.mu_at(0), std::out_of_range);
}

TEST_CASE("spectrum parser rejects structural defects") {
    // missing channel
    CHECK_THROWS_AS(spectral::parse_spectrum("1, 405, 0.5\n", "x"), spectral::SpectrumParseError);
    // duplicate channel
    std::string dup = valid_spectrum_text() + "3, 450, 0.9\n";
    CHECK_THROWS_AS(spectral::parse_spectrum(dup, "x"), spectral::SpectrumParseError);
    // wavelength mismatch
    std::string wrong = valid_spectrum_text();
    const auto pos = wrong.find("450");
    wrong.replace(pos, 3, "451");
    CHECK_THROWS_AS(spectral::parse_spectrum(wrong, "x"), spectral::SpectrumParseError);
    // trailing field
    std::string trail = valid_spectrum_text();
    trail.insert(trail.find('\n', trail.find("1, ")), ", 9");
    CHECK_THROWS_AS(spectral::parse_spectrum(trail, "x"), spectral::SpectrumParseError);
    // negative mu
    std::string neg = valid_spectrum_text();
    neg.replace(neg.find("0.010000"), 8, "-0.01000");
    CHECK_THROWS_AS(spectral::parse_spectrum(neg, "x"), spectral::SpectrumParseError);
    // channel index out of range
    CHECK_THROWS_AS(spectral::parse_spectrum("13, 405, 0.5\n" + valid_spectrum_text(), "x"),
                    spectral::SpectrumParseError);
}

TEST_CASE("shipped hemoglobin spectrum has the expected band structure") {
    const auto hb = spectral::load_spectrum_file(HEMOFLOW_DATA_DIR "/hemoglobin.spectrum", "hemoglobin");
    // strong violet peak, green shoulder, weak red, weakest near-infrared
    CHECK(hb.mu_at(1) > hb.mu_at(6));
    CHECK(hb.mu_at(6) > hb.mu_at(10));
    CHECK(hb.mu_at(10) > 0.0);
    CHECK(hb.mu_at(1) > hb.mu_at(12));
    CHECK(hb.mu_at(12) > 0.0);
}

TEST_CASE("all shipped interference spectra load") {
    const std::vector<std::string> mixtures{"tea",          "coffee",         "grape_juice",
                                            "cola",         "kvass",          "milk",
                                            "chocolate_milk", "beetroot",     "tomato_sauce",
                                            "grapefruit_juice"};
    for (const auto& m : mixtures) {
        const auto s =
            spectral::load_spectrum_file(std::string(HEMOFLOW_DATA_DIR "/mixtures/") + m + ".spectrum", m);
        CHECK(s.substance_id == m);
        double total = 0.0;
        for (int ch = 1; ch <= spectral::kSensorChannels; ++ch) total += s.mu_at(ch);
        CHECK(total > 0.0);
    }
}

TEST_CASE("transmitted intensity follows exponential attenuation") {
    CHECK(spectral::transmit(1000.0, 0.5, 1.0, 3.0) == Catch::Approx(1000.0 * std::exp(-1.5)));
    CHECK(spectral::transmit(1000.0, 0.0, 5.0, 3.0) == 1000.0);
    CHECK(spectral::transmit(1000.0, 0.5, 0.0, 3.0) == 1000.0);
    CHECK_THROWS_AS(spectral::transmit(0.0, 0.5, 1.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(spectral::transmit(1000.0, -0.1, 1.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(spectral::transmit(1000.0, 0.5, -1.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(spectral::transmit(1000.0, 0.5, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("doubling the concentration squares the transmittance") {
    util::Rng rng(2024);
    for (int i = 0; i < 2000; ++i) {
        const double incident = rng.uniform(10.0, 60000.0);
        const double mu = rng.uniform(1e-4, 2.0);
        const double length = rng.uniform(0.5, 5.0);
        double conc = rng.uniform(0.01, 5.0);
        // keep the exponent in a comfortably representable range
        if (mu * conc * length > 15.0) conc = 15.0 / (mu * length);

        const double t1 = spectral::transmit(incident, mu, conc, length) / incident;
        const double t2 = spectral::transmit(incident, mu, 2.0 * conc, length) / incident;
        REQUIRE(std::abs(t2 - t1 * t1) <= 1e-12 * t1 * t1);
    }
}

TEST_CASE("two-channel ratio matches the closed-form prediction") {
    const double i0_a = 32000.0, i0_b = 26000.0;
    const double mu_a = 1.8, mu_b = 0.05;
    const double length = 3.0;
    spectral::RatioModelParams params{i0_a / i0_b, mu_a - mu_b, length};

    for (double conc : {0.0, 0.05, 0.2, 0.7, 1.5}) {
        std::array<double, spectral::kFrameChannels> values{};
        values.fill(1.0);
        values[0] = spectral::transmit(i0_a, mu_a, conc, length);
        values[11] = spectral::transmit(i0_b, mu_b, conc, length);
        const double measured = spectral::intensity_ratio(values, 1, 12);
        const double predicted = spectral::ratio_predict(params, conc);
        REQUIRE(std::abs(measured - predicted) <= 1e-12 * predicted);
    }
}

TEST_CASE("predicted ratio decays strictly with concentration") {
    spectral::RatioModelParams params{1.23, 1.75, 3.0};
    double prev = spectral::ratio_predict(params, 0.0);
    CHECK(prev == Catch::Approx(1.23));
    for (int k = 1; k <= 50; ++k) {
        const double r = spectral::ratio_predict(params, 0.05 * k);
        REQUIRE(r < prev);
        prev = r;
    }
}

TEST_CASE("intensity ratio rejects invalid channel pairs") {
    std::array<double, spectral::kFrameChannels> values{};
    values.fill(100.0);
    CHECK(spectral::intensity_ratio(values, 1, 12) == 1.0);
    CHECK_THROWS_AS(spectral::intensity_ratio(values, 1, 13), std::invalid_argument);
    CHECK_THROWS_AS(spectral::intensity_ratio(values, 0, 12), std::out_of_range);
    CHECK_THROWS_AS(spectral::intensity_ratio(values, 1, 25), std::out_of_range);
    values[11] = 0.0;
    CHECK_THROWS_AS(spectral::intensity_ratio(values, 1, 12), std::domain_error);
}

TEST_CASE("monotone check finds the first violation") {
    const std::vector<double> good{5.0, 4.0, 3.5, 1.0};
    CHECK(spectral::check_monotone_decreasing(good, 0.0).ok);

    const std::vector<double> bad{5.0, 4.0, 4.0, 3.0};
    const auto res = spectral::check_monotone_decreasing(bad, 0.0);
    CHECK_FALSE(res.ok);
    CHECK(res.first_violation == 2);

    // tolerance admits bounded upward noise
    const std::vector<double> noisy{5.0, 4.9995, 4.9996, 4.5};
    CHECK_FALSE(spectral::check_monotone_decreasing(noisy, 0.0).ok);
    CHECK(spectral::check_monotone_decreasing(noisy, 0.01).ok);

    const std::vector<double> single{1.0};
    CHECK_THROWS_AS(spectral::check_monotone_decreasing(single, 0.0), std::invalid_argument);
}

TEST_CASE("optical path validation rejects missing baselines") {
    spectral::OpticalPath path;
    path.path_length_mm = 3.0;
    CHECK_THROWS_AS(path.validate(), std::invalid_argument);  // all-zero baselines
    path.incident.fill(100.0);
    CHECK_NOTHROW(path.validate());
    path.path_length_mm = 0.0;
    CHECK_THROWS_AS(path.validate(), std::invalid_argument);
}
