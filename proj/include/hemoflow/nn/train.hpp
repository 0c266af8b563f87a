#pragma once

#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoflow/nn/grad.hpp"
#include "hemoflow/nn/model.hpp"
#include "hemoflow/nn/normalizer.hpp"
#include "hemoflow/sim/frame.hpp"
#include "hemoflow/util/config.hpp"
#include "hemoflow/util/format.hpp"
#include "hemoflow/util/rng.hpp"

namespace hemoflow::nn {

struct TrainConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int batch_size = 32;
    int max_epochs = 100;
    int patience = 10;  // epochs without a new best validation accuracy
    int lanes = 1;      // worker lanes for in-batch backprop

    void validate() const {
        if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be positive");
        if (batch_size < 1 || max_epochs < 1 || patience < 1 || lanes < 1)
            throw std::invalid_argument("TrainConfig: counts must be >= 1");
    }

    static TrainConfig from_config(const util::Config& cfg) {
        TrainConfig t;
        t.lr = cfg.get_double("train.lr", t.lr);
        t.beta1 = cfg.get_double("train.beta1", t.beta1);
        t.beta2 = cfg.get_double("train.beta2", t.beta2);
        t.eps = cfg.get_double("train.eps", t.eps);
        t.batch_size = static_cast<int>(cfg.get_int("train.batch_size", t.batch_size));
        t.max_epochs = static_cast<int>(cfg.get_int("train.max_epochs", t.max_epochs));
        t.patience = static_cast<int>(cfg.get_int("train.patience", t.patience));
        t.lanes = static_cast<int>(cfg.get_int("train.lanes", t.lanes));
        t.validate();
        return t;
    }

    void write_to(util::Config& cfg) const {
        cfg.set("train.lr", util::fmt_double(lr));
        cfg.set("train.beta1", util::fmt_double(beta1));
        cfg.set("train.beta2", util::fmt_double(beta2));
        cfg.set("train.eps", util::fmt_double(eps));
        cfg.set("train.batch_size", std::to_string(batch_size));
        cfg.set("train.max_epochs", std::to_string(max_epochs));
        cfg.set("train.patience", std::to_string(patience));
        cfg.set("train.lanes", std::to_string(lanes));
    }
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainResult {
    ModelParams model;  // best-validation checkpoint
    Normalizer normalizer;
    std::vector<EpochStats> history;
    int best_epoch = 0;
    double best_val_accuracy = 0.0;
};

inline std::string history_to_csv(const std::vector<EpochStats>& history) {
    std::ostringstream out;
    out << "epoch,train_loss,val_loss,val_accuracy\n";
    for (const auto& e : history)
        out << e.epoch << "," << util::fmt_double(e.train_loss) << "," << util::fmt_double(e.val_loss)
            << "," << util::fmt_double(e.val_accuracy) << "\n";
    return out.str();
}

// Per-sample gradients are reduced in sample order, so the result is
// bit-identical for any lane count.
inline double batch_loss_and_grad(const ModelParams& model, const std::vector<Sample>& batch,
                                  ModelParams& grad, int lanes) {
    if (lanes <= 1 || batch.size() < 2) return loss_and_grad(model, batch, grad);

    std::vector<ModelParams> sample_grads(batch.size());
    std::vector<double> sample_loss(batch.size(), 0.0);
    for (auto& g : sample_grads) g.fill(0.0);

    const std::size_t n_lanes = static_cast<std::size_t>(lanes);
    std::vector<std::future<void>> futures;
    for (std::size_t lane = 0; lane < n_lanes; ++lane) {
        futures.push_back(std::async(std::launch::async, [&, lane] {
            for (std::size_t k = lane; k < batch.size(); k += n_lanes)
                sample_loss[k] = backprop_sample(model, batch[k], sample_grads[k]);
        }));
    }
    for (auto& f : futures) f.get();

    grad.fill(0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < batch.size(); ++k) {
        total += sample_loss[k];
        auto dst = grad.tensors();
        auto src = sample_grads[k].tensors();
        for (std::size_t t = 0; t < dst.size(); ++t)
            for (std::size_t i = 0; i < dst[t].tensor->size(); ++i)
                (*dst[t].tensor)[i] += (*src[t].tensor)[i];
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (auto& t : grad.tensors())
        for (std::size_t i = 0; i < t.tensor->size(); ++i) (*t.tensor)[i] *= inv;
    return total * inv;
}

struct Adam {
    ModelParams m, v;
    double beta1_t = 1.0, beta2_t = 1.0;

    Adam() {
        m.fill(0.0);
        v.fill(0.0);
    }

    void step(ModelParams& params, const ModelParams& grad, const TrainConfig& cfg) {
        beta1_t *= cfg.beta1;
        beta2_t *= cfg.beta2;
        auto pt = params.tensors();
        auto gt = grad.tensors();
        auto mt = m.tensors();
        auto vt = v.tensors();
        for (std::size_t t = 0; t < pt.size(); ++t) {
            for (std::size_t i = 0; i < pt[t].tensor->size(); ++i) {
                const double g = (*gt[t].tensor)[i];
                double& mi = (*mt[t].tensor)[i];
                double& vi = (*vt[t].tensor)[i];
                mi = cfg.beta1 * mi + (1.0 - cfg.beta1) * g;
                vi = cfg.beta2 * vi + (1.0 - cfg.beta2) * g * g;
                const double m_hat = mi / (1.0 - beta1_t);
                const double v_hat = vi / (1.0 - beta2_t);
                (*pt[t].tensor)[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
            }
        }
    }
};

inline std::vector<Sample> make_samples(const std::vector<sim::Window>& windows, const Normalizer& norm) {
    std::vector<Sample> samples;
    samples.reserve(windows.size());
    for (const auto& w : windows) {
        Sample s;
        s.input = norm.apply(w);
        s.label = static_cast<int>(w.label);
        samples.push_back(std::move(s));
    }
    return samples;
}

inline double accuracy(const ModelParams& model, const std::vector<Sample>& samples) {
    if (samples.empty()) throw std::invalid_argument("accuracy: empty sample set");
    std::size_t hits = 0;
    for (const auto& s : samples)
        if (predict_class(forward(model, s.input)) == s.label) ++hits;
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

// Full training run. Normalization statistics come from the training split
// alone; the returned model is the best-validation-accuracy checkpoint.
inline TrainResult train(const std::vector<sim::Window>& train_windows,
                         const std::vector<sim::Window>& val_windows, const TrainConfig& cfg,
                         std::uint64_t seed) {
    cfg.validate();
    if (train_windows.empty()) throw std::invalid_argument("train: empty training split");
    if (val_windows.empty()) throw std::invalid_argument("train: empty validation split");

    TrainResult result;
    result.normalizer = Normalizer::fit(train_windows, "training-split");
    const auto train_samples = make_samples(train_windows, result.normalizer);
    const auto val_samples = make_samples(val_windows, result.normalizer);

    util::Rng rng(util::derive_stream_seed(seed, 0x747261696EULL));
    ModelParams params = ModelParams::init(rng);
    ModelParams grad;
    Adam adam;

    std::vector<std::size_t> order(train_samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    result.best_val_accuracy = -1.0;
    int stale_epochs = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        std::vector<Sample> batch;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            batch.clear();
            for (std::size_t k = start; k < end; ++k) batch.push_back(train_samples[order[k]]);
            const double loss = batch_loss_and_grad(params, batch, grad, cfg.lanes);
            if (!std::isfinite(loss))
                throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                         ", batch starting at " + std::to_string(start));
            adam.step(params, grad, cfg);
            loss_sum += loss * static_cast<double>(batch.size());
            seen += batch.size();
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_sum / static_cast<double>(seen);
        stats.val_loss = loss_only(params, val_samples);
        stats.val_accuracy = accuracy(params, val_samples);
        result.history.push_back(stats);

        if (stats.val_accuracy > result.best_val_accuracy) {
            result.best_val_accuracy = stats.val_accuracy;
            result.best_epoch = epoch;
            result.model = params;
            stale_epochs = 0;
        } else if (++stale_epochs >= cfg.patience) {
            break;
        }
    }
    result.model.check_finite();
    return result;
}

}  // namespace hemoflow::nn
