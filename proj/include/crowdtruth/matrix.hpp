#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace crowdtruth {

// Dense row-major matrix of doubles. Just enough for the model code;
// nothing here needs real linear algebra.
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return data_[static_cast<std::size_t>(r) * cols_ + c];
    }
    double operator()(int r, int c) const {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return data_[static_cast<std::size_t>(r) * cols_ + c];
    }

    std::span<double> row(int r) {
        return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
    }
    std::span<const double> row(int r) const {
        return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

}  // namespace crowdtruth
