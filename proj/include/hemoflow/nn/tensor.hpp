#pragma once

#include <array>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hemoflow::nn {

// Dense row-major tensor of doubles. Shapes are small and fixed by the
// model, so this stays deliberately minimal: no views, no broadcasting.
class Tensor {
  public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
        std::size_t n = 1;
        for (std::size_t d : shape_) {
            if (d == 0) throw std::invalid_argument("Tensor: zero dimension");
            n *= d;
        }
        data_.assign(n, 0.0);
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at2(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    double at2(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

    // [c][h][w] indexing for rank-3 activation maps
    double& at3(std::size_t c, std::size_t h, std::size_t w) {
        return data_[(c * shape_[1] + h) * shape_[2] + w];
    }
    double at3(std::size_t c, std::size_t h, std::size_t w) const {
        return data_[(c * shape_[1] + h) * shape_[2] + w];
    }

    // [o][i][kh][kw] indexing for conv kernels
    double& at4(std::size_t o, std::size_t i, std::size_t kh, std::size_t kw) {
        return data_[((o * shape_[1] + i) * shape_[2] + kh) * shape_[3] + kw];
    }
    double at4(std::size_t o, std::size_t i, std::size_t kh, std::size_t kw) const {
        return data_[((o * shape_[1] + i) * shape_[2] + kh) * shape_[3] + kw];
    }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    void require_shape(const std::vector<std::size_t>& expect, const std::string& what) const {
        if (shape_ != expect) {
            std::string msg = what + ": shape mismatch, got (";
            for (std::size_t k = 0; k < shape_.size(); ++k)
                msg += (k ? "," : "") + std::to_string(shape_[k]);
            msg += "), expected (";
            for (std::size_t k = 0; k < expect.size(); ++k)
                msg += (k ? "," : "") + std::to_string(expect[k]);
            msg += ")";
            throw std::invalid_argument(msg);
        }
    }

  private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

}  // namespace hemoflow::nn
