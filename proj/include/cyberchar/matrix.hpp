#pragma once

#include <cstddef>
#include <cstring>
#include <span>
#include <vector>

namespace cyberchar {

/// Dense row-major matrix of doubles. NaN marks a null cell.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    /// Contiguous block of `count` rows starting at `first`.
    std::span<const double> rows_span(std::size_t first, std::size_t count) const noexcept {
        return {data_.data() + first * cols_, count * cols_};
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) cols_ = values.size();
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    void reserve_rows(std::size_t n) { data_.reserve(n * cols_); }

    /// Exact equality of shape and bit patterns (NaN cells compare equal to NaN cells).
    bool bitwise_equal(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_ &&
               (data_.empty() ||
                std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(double)) == 0);
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace cyberchar
