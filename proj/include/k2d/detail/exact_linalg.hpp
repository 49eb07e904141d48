#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "k2d/scalar.hpp"

namespace k2d::detail {

/// Dense row-major matrix of rationals.
class ExactMatrix {
public:
    ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    Rational &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_, cols_;
    std::vector<Rational> data_;
};

/// Reduces `a` to reduced row echelon form in place; returns the pivot columns.
inline std::vector<std::size_t> row_reduce(ExactMatrix &a) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
        std::size_t pivot = row;
        while (pivot < a.rows() && a(pivot, col).is_zero()) {
            ++pivot;
        }
        if (pivot == a.rows()) {
            continue;
        }
        if (pivot != row) {
            for (std::size_t c = 0; c < a.cols(); ++c) {
                std::swap(a(pivot, c), a(row, c));
            }
        }
        const Rational inv = Rational(1) / a(row, col);
        for (std::size_t c = col; c < a.cols(); ++c) {
            a(row, c) *= inv;
        }
        for (std::size_t r = 0; r < a.rows(); ++r) {
            if (r == row || a(r, col).is_zero()) {
                continue;
            }
            const Rational factor = a(r, col);
            for (std::size_t c = col; c < a.cols(); ++c) {
                if (!a(row, c).is_zero()) {
                    a(r, c) -= factor * a(row, c);
                }
            }
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

/// Basis of {x : a x = 0}, one vector per free column, with that column set to 1.
inline std::vector<std::vector<Rational>> nullspace(ExactMatrix a) {
    const auto pivots = row_reduce(a);
    std::vector<bool> is_pivot(a.cols(), false);
    for (auto c : pivots) {
        is_pivot[c] = true;
    }
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free = 0; free < a.cols(); ++free) {
        if (is_pivot[free]) {
            continue;
        }
        std::vector<Rational> v(a.cols(), Rational(0));
        v[free] = Rational(1);
        for (std::size_t r = 0; r < pivots.size(); ++r) {
            v[pivots[r]] = -a(r, free);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace k2d::detail
