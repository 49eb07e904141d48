#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "k2d/combinatorics.hpp"
#include "k2d/detail/parallel.hpp"
#include "k2d/hyper.hpp"
#include "k2d/params.hpp"

namespace k2d {

/// P_{m}(x) for every (spectral label, state) pair of the grid, exact.
/// Immutable after construction.
class PolynomialTable {
public:
    PolynomialTable(const ParameterSet &params, int n) : params_(params), grid_(n) {
        const std::size_t g = grid_.size();
        values_.resize(g * g);
        detail::parallel_for(g * g, [&](std::size_t idx) {
            const F12Arguments args{grid_[idx / g], grid_[idx % g], n, params_.u1(), params_.v1(), params_.u2(),
                                    params_.v2()};
            values_[idx] = eval_P(args);
        });
    }

    [[nodiscard]] int N() const noexcept { return grid_.N(); }
    [[nodiscard]] const ParameterSet &params() const noexcept { return params_; }
    [[nodiscard]] const TriangularGrid &grid() const noexcept { return grid_; }

    [[nodiscard]] const Rational &at(GridPoint m, GridPoint x) const {
        return values_[grid_.index(m) * grid_.size() + grid_.index(x)];
    }

private:
    ParameterSet params_;
    TriangularGrid grid_;
    std::vector<Rational> values_;
};

}  // namespace k2d
