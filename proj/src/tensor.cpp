#include "spanrole/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "spanrole/errors.hpp"

namespace spanrole {

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    require(rows > 0 && cols > 0, "tensor dimensions must be positive");
}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    require(rows > 0 && cols > 0, "tensor dimensions must be positive");
    require(data_.size() == rows * cols, "tensor data length must equal rows * cols");
}

Tensor Tensor::scalar(double value) { return Tensor(1, 1, value); }

Tensor Tensor::row_vector(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor(1, n, std::move(values));
}

Tensor Tensor::identity(std::size_t n) {
    Tensor out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out(k, k) = 1.0;
    }
    return out;
}

double Tensor::item() const {
    require(rows_ == 1 && cols_ == 1, "item() requires a 1x1 tensor");
    return data_[0];
}

bool Tensor::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Tensor::squared_norm() const noexcept {
    double total = 0.0;
    for (double v : data_) {
        total += v * v;
    }
    return total;
}

Tensor& Tensor::operator+=(const Tensor& other) {
    require(same_shape(other), "shape mismatch in +=");
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] += other.data_[k];
    }
    return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
    require(same_shape(other), "shape mismatch in -=");
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] -= other.data_[k];
    }
    return *this;
}

Tensor& Tensor::operator*=(double factor) noexcept {
    for (double& v : data_) {
        v *= factor;
    }
    return *this;
}

Tensor operator+(Tensor lhs, const Tensor& rhs) { return lhs += rhs; }
Tensor operator-(Tensor lhs, const Tensor& rhs) { return lhs -= rhs; }
Tensor operator*(Tensor lhs, double factor) { return lhs *= factor; }

Tensor matmul(const Tensor& a, const Tensor& b) {
    require(a.cols() == b.rows(), "matmul: inner dimensions differ");
    Tensor out(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double* dst = &out(r, 0);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double scale = a(r, k);
            const double* src = b.row(k).data();
            for (std::size_t c = 0; c < n; ++c) {
                dst[c] += scale * src[c];
            }
        }
    }
    return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    require(a.cols() == b.cols(), "matmul_nt: inner dimensions differ");
    Tensor out(a.rows(), b.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto lhs = a.row(r);
        for (std::size_t c = 0; c < b.rows(); ++c) {
            out(r, c) = dot(lhs, b.row(c));
        }
    }
    return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
    require(a.rows() == b.rows(), "matmul_tn: inner dimensions differ");
    Tensor out(a.cols(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* src = b.row(k).data();
        for (std::size_t r = 0; r < a.cols(); ++r) {
            const double scale = a(k, r);
            if (scale == 0.0) {
                continue;
            }
            double* dst = &out(r, 0);
            for (std::size_t c = 0; c < n; ++c) {
                dst[c] += scale * src[c];
            }
        }
    }
    return out;
}

Tensor transpose(const Tensor& a) {
    Tensor out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out(c, r) = a(r, c);
        }
    }
    return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    require(a.same_shape(b), "hadamard: shape mismatch");
    Tensor out = a;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] *= b[k];
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double total = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        total += a[k] * b[k];
    }
    return total;
}

double max_abs_difference(const Tensor& a, const Tensor& b) {
    require(a.same_shape(b), "max_abs_difference: shape mismatch");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        worst = std::max(worst, std::abs(a[k] - b[k]));
    }
    return worst;
}

}  // namespace spanrole
