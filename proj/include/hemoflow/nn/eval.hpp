#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/nn/model.hpp"
#include "hemoflow/nn/normalizer.hpp"
#include "hemoflow/sim/scenario.hpp"
#include "hemoflow/util/format.hpp"

namespace hemoflow::nn {

struct EvalReport {
    // rows = true class, cols = predicted class
    std::array<std::array<int, sim::kNumClasses>, sim::kNumClasses> confusion{};
    int total = 0;
    double accuracy = 0.0;
    std::array<double, sim::kNumClasses> recall{};
    std::array<double, sim::kNumClasses> precision{};
    // among all errors, the fraction that are between consecutive bleeding
    // levels; defined as 1.0 when there are no errors at all
    double adjacent_error_fraction = 1.0;
    int non_adjacent_error_count = 0;  // bleeding<->bleeding, |level gap| >= 2
    double interference_recall = 0.0;

    std::string to_text() const {
        std::ostringstream out;
        out << "confusion matrix (rows=true, cols=predicted):\n";
        out << "        ";
        for (int c = 0; c < sim::kNumClasses; ++c)
            out << " " << sim::to_string(sim::flow_class_from_index(c));
        out << "\n";
        for (int r = 0; r < sim::kNumClasses; ++r) {
            out << "  " << sim::to_string(sim::flow_class_from_index(r)) << " |";
            for (int c = 0; c < sim::kNumClasses; ++c) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "%4d", confusion[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
                out << buf;
            }
            out << "\n";
        }
        out << "total_windows = " << total << "\n";
        out << "accuracy = " << util::fmt_double(accuracy) << "\n";
        for (int c = 0; c < sim::kNumClasses; ++c)
            out << "class_" << sim::to_string(sim::flow_class_from_index(c))
                << ": recall = " << util::fmt_double(recall[static_cast<std::size_t>(c)])
                << ", precision = " << util::fmt_double(precision[static_cast<std::size_t>(c)]) << "\n";
        out << "adjacent_error_fraction = " << util::fmt_double(adjacent_error_fraction) << "\n";
        out << "non_adjacent_error_count = " << non_adjacent_error_count << "\n";
        out << "interference_recall = " << util::fmt_double(interference_recall) << "\n";
        return out.str();
    }
};

inline EvalReport evaluate(const ModelParams& model, const Normalizer& norm,
                           const std::vector<sim::Window>& windows) {
    if (windows.empty()) throw std::invalid_argument("evaluate: empty test set");
    EvalReport rep;
    rep.total = static_cast<int>(windows.size());

    for (const auto& w : windows) {
        const int truth = static_cast<int>(w.label);
        const int pred = predict_class(forward(model, norm.apply(w)));
        ++rep.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)];
    }

    int correct = 0;
    int errors = 0, adjacent_errors = 0;
    for (int r = 0; r < sim::kNumClasses; ++r) {
        for (int c = 0; c < sim::kNumClasses; ++c) {
            const int n = rep.confusion[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            if (n == 0) continue;
            if (r == c) {
                correct += n;
                continue;
            }
            errors += n;
            const auto a = sim::flow_class_from_index(r);
            const auto b = sim::flow_class_from_index(c);
            if (sim::adjacent(a, b)) adjacent_errors += n;
            if (sim::is_bleeding(a) && sim::is_bleeding(b) && std::abs(r - c) >= 2)
                rep.non_adjacent_error_count += n;
        }
    }
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(rep.total);
    rep.adjacent_error_fraction =
        errors == 0 ? 1.0 : static_cast<double>(adjacent_errors) / static_cast<double>(errors);

    for (int c = 0; c < sim::kNumClasses; ++c) {
        int row_sum = 0, col_sum = 0;
        for (int k = 0; k < sim::kNumClasses; ++k) {
            row_sum += rep.confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
            col_sum += rep.confusion[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
        }
        const int diag = rep.confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
        rep.recall[static_cast<std::size_t>(c)] =
            row_sum == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(row_sum);
        rep.precision[static_cast<std::size_t>(c)] =
            col_sum == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(col_sum);
    }
    rep.interference_recall = rep.recall[0];
    return rep;
}

// One row per window: hidden-layer embedding (fc1 post-ReLU, 64 wide),
// class, and interference mixture id ("-" for bleeding windows).
inline std::string export_features(const ModelParams& model, const Normalizer& norm,
                                   const std::vector<sim::Window>& windows,
                                   const std::vector<std::string>& mixtures) {
    if (!mixtures.empty() && mixtures.size() != windows.size())
        throw std::invalid_argument("export_features: mixture list does not match window count");
    std::ostringstream out;
    out << "class,flow_ml_min,mixture";
    for (std::size_t i = 1; i <= kHidden; ++i) out << ",e" << i;
    out << "\n";
    for (std::size_t k = 0; k < windows.size(); ++k) {
        const auto& w = windows[k];
        ForwardTrace trace;
        forward(model, norm.apply(w), &trace);
        out << static_cast<int>(w.label) << "," << sim::to_string(w.label) << ","
            << (mixtures.empty() ? "-" : mixtures[k]);
        for (std::size_t i = 0; i < kHidden; ++i) out << "," << util::fmt_double(trace.fc1_act[i]);
        out << "\n";
    }
    return out.str();
}

}  // namespace hemoflow::nn
