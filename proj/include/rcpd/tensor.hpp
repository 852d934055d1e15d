#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcpd {

/// Dense real tensor of order >= 2. Row-major layout with the last index
/// varying fastest; entry (i_1, ..., i_d) lives at sum_j i_j * stride_j with
/// stride_d = 1. This layout also defines the on-disk RCPD1 value order.
class DenseTensor {
public:
    DenseTensor() = default;

    explicit DenseTensor(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        init_strides();
        data_.assign(size_, 0.0);
    }

    DenseTensor(std::vector<std::size_t> dims, std::vector<double> data)
        : dims_(std::move(dims)), data_(std::move(data)) {
        init_strides();
        if (data_.size() != size_)
            throw std::invalid_argument("DenseTensor: data length " + std::to_string(data_.size()) +
                                        " does not match dims product " + std::to_string(size_));
    }

    static DenseTensor constant(std::vector<std::size_t> dims, double value) {
        DenseTensor t(std::move(dims));
        t.data_.assign(t.size_, value);
        return t;
    }

    int order() const { return static_cast<int>(dims_.size()); }
    std::size_t dim(int j) const { return dims_[static_cast<std::size_t>(j)]; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t size() const { return size_; }
    std::size_t stride(int j) const { return strides_[static_cast<std::size_t>(j)]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::size_t offset_of(std::span<const std::size_t> idx) const {
        std::size_t off = 0;
        for (int j = 0; j < order(); ++j) off += idx[static_cast<std::size_t>(j)] * stride(j);
        return off;
    }

    double& at(std::initializer_list<std::size_t> idx) {
        return data_[offset_of(std::span<const std::size_t>(idx.begin(), idx.size()))];
    }
    double at(std::initializer_list<std::size_t> idx) const {
        return data_[offset_of(std::span<const std::size_t>(idx.begin(), idx.size()))];
    }

    bool same_dims(const DenseTensor& other) const { return dims_ == other.dims_; }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    void init_strides() {
        if (dims_.size() < 2)
            throw std::invalid_argument("DenseTensor: order must be >= 2");
        size_ = 1;
        for (std::size_t n : dims_) {
            if (n == 0) throw std::invalid_argument("DenseTensor: every dimension must be >= 1");
            if (size_ > std::numeric_limits<std::size_t>::max() / n)
                throw std::invalid_argument("DenseTensor: dims product overflows");
            size_ *= n;
        }
        strides_.resize(dims_.size());
        std::size_t s = 1;
        for (std::size_t j = dims_.size(); j-- > 0;) {
            strides_[j] = s;
            s *= dims_[j];
        }
    }

    std::vector<std::size_t> dims_;
    std::vector<std::size_t> strides_;
    std::vector<double> data_;
    std::size_t size_ = 0;
};

inline void check_same_dims(const DenseTensor& a, const DenseTensor& b, const char* what) {
    if (!a.same_dims(b))
        throw std::invalid_argument(std::string(what) + ": tensor dimensions differ");
}

} // namespace rcpd
