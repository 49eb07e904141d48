#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "k2d/combinatorics.hpp"
#include "k2d/detail/parallel.hpp"
#include "k2d/error.hpp"
#include "k2d/params.hpp"
#include "k2d/polynomial_table.hpp"

namespace k2d {

/// Symmetric matrix of exact inner products indexed by grid points (spectral
/// labels for the Gram matrix, states for the dual one), in grid order.
class GramMatrix {
public:
    explicit GramMatrix(int n) : grid_(n), entries_(grid_.size() * grid_.size()) {}

    [[nodiscard]] int N() const noexcept { return grid_.N(); }
    [[nodiscard]] const TriangularGrid &grid() const noexcept { return grid_; }

    [[nodiscard]] const Rational &at(GridPoint row, GridPoint col) const {
        return entries_[grid_.index(row) * grid_.size() + grid_.index(col)];
    }
    [[nodiscard]] const Rational &at_index(std::size_t row, std::size_t col) const {
        return entries_[row * grid_.size() + col];
    }
    void set_index(std::size_t row, std::size_t col, Rational value) {
        entries_[row * grid_.size() + col] = std::move(value);
    }

    /// Off-diagonal positions (row, col) with a nonzero entry.
    [[nodiscard]] std::vector<std::pair<GridPoint, GridPoint>> nonzero_off_diagonal() const {
        std::vector<std::pair<GridPoint, GridPoint>> out;
        for (std::size_t r = 0; r < grid_.size(); ++r) {
            for (std::size_t c = 0; c < grid_.size(); ++c) {
                if (r != c && !at_index(r, c).is_zero()) {
                    out.emplace_back(grid_[r], grid_[c]);
                }
            }
        }
        return out;
    }

    [[nodiscard]] bool is_diagonal() const { return nonzero_off_diagonal().empty(); }

private:
    TriangularGrid grid_;
    std::vector<Rational> entries_;
};

/// sum_x w(x) P_m(x) P_n(x) for an explicit weight vector in grid order.
inline Rational inner_product(const PolynomialTable &table, std::span<const Rational> weights, GridPoint m,
                              GridPoint n) {
    const auto &grid = table.grid();
    if (weights.size() != grid.size()) {
        throw Error(ErrorCode::size_mismatch, "weight vector has " + std::to_string(weights.size()) +
                                                  " entries, grid has " + std::to_string(grid.size()));
    }
    Rational sum(0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        sum += weights[i] * table.at(m, grid[i]) * table.at(n, grid[i]);
    }
    return sum;
}

/// Inner product under the table's own trinomial weight b2(x; N; eta1, eta2).
inline Rational inner_product(const PolynomialTable &table, GridPoint m, GridPoint n) {
    const auto weights = trinomial_weights(table.N(), table.params().eta1(), table.params().eta2());
    return inner_product(table, weights, m, n);
}

/**
 * I_{0,0}^{n} two ways: brute force over the grid, and the closed form
 * (1 - eta1 u1 - eta2 v1)^n1 (1 - eta1 u2 - eta2 v2)^n2.
 * The two agree for every parameter set; both vanish for n != (0,0) when the
 * first two orthogonality conditions hold.
 */
inline std::pair<Rational, Rational> generating_check(const ParameterSet &ps, int n, GridPoint label) {
    const PolynomialTable table(ps, n);
    const Rational brute = inner_product(table, {0, 0}, label);
    const Rational one(1);
    const Rational closed = pow(one - ps.eta1() * ps.u1() - ps.eta2() * ps.v1(), label.a) *
                            pow(one - ps.eta1() * ps.u2() - ps.eta2() * ps.v2(), label.b);
    return {brute, closed};
}

/**
 * Squared norm of P_m through the dual weights:
 *   ( b2(m1, m2; N; eb1, eb2) (1 - eb1 - eb2)^(-N) )^(-1).
 */
inline Rational norm_closed_form(const ParameterSet &ps, int n, GridPoint m) {
    if (!ps.flags().orthogonal) {
        throw Error(ErrorCode::non_orthogonal, "norm formula needs an orthogonal parameter set");
    }
    const auto [eb1, eb2] = dual_weights(ps);
    const TriangularGrid grid(n);
    (void)grid.index(m);
    const Rational rest = Rational(1) - eb1 - eb2;
    const Rational dual_mass =
        Rational(multinomial(n, m.a, m.b), 1) * pow(eb1, m.a) * pow(eb2, m.b) * pow(rest, n - m.total());
    return Rational(1) / (dual_mass * pow(rest, -n));
}

/// Which product expression for the norm to evaluate.
enum class NormProductForm {
    /// (1-v1)^m1 (1-v2)^m2 (-u2/u1)^m2 (-eta2 v1 (1 - u1 v2/(u2 v1)))^(m1+m2) / C(N; m1, m2).
    /// Agrees with the dual-weight form and with brute force.
    sign_corrected,
    /// Same with (u2/u1)^m2: off by (-1)^m2.
    printed_one_minus_v2,
    /// (1-u2)^m2 in place of (1-v2)^m2 with (u2/u1)^m2: wrong whenever m2 > 0.
    printed_one_minus_u2,
};

inline Rational norm_product_form(const ParameterSet &ps, int n, GridPoint m,
                                  NormProductForm form = NormProductForm::sign_corrected) {
    if (!ps.flags().orthogonal) {
        throw Error(ErrorCode::non_orthogonal, "norm formula needs an orthogonal parameter set");
    }
    const Rational one(1);
    const Rational ratio = ps.u2() / ps.u1();
    const Rational core = -ps.eta2() * ps.v1() * (one - ps.u1() * ps.v2() / (ps.u2() * ps.v1()));
    Rational value = pow(one - ps.v1(), m.a) * pow(core, m.total()) / Rational(multinomial(n, m.a, m.b), 1);
    switch (form) {
        case NormProductForm::sign_corrected:
            value *= pow(one - ps.v2(), m.b) * pow(-ratio, m.b);
            break;
        case NormProductForm::printed_one_minus_v2:
            value *= pow(one - ps.v2(), m.b) * pow(ratio, m.b);
            break;
        case NormProductForm::printed_one_minus_u2:
            value *= pow(one - ps.u2(), m.b) * pow(ratio, m.b);
            break;
    }
    return value;
}

/// Full Gram matrix over spectral labels from an existing table.
inline GramMatrix gram(const PolynomialTable &table) {
    const auto &grid = table.grid();
    const std::size_t g = grid.size();
    const auto weights = trinomial_weights(table.N(), table.params().eta1(), table.params().eta2());
    GramMatrix out(table.N());
    detail::parallel_for(g, [&](std::size_t r) {
        for (std::size_t c = r; c < g; ++c) {
            Rational value = inner_product(table, weights, grid[r], grid[c]);
            out.set_index(c, r, value);
            out.set_index(r, c, std::move(value));
        }
    });
    return out;
}

inline GramMatrix gram(const ParameterSet &ps, int n) { return gram(PolynomialTable(ps, n)); }

/// Double-precision Gram matrix, row-major in grid order, for grids too large
/// for the exact path.
inline std::vector<double> gram_float(const ParameterSet &ps, int n) {
    const TriangularGrid grid(n);
    const std::size_t g = grid.size();
    const double u1 = ps.u1().to_double(), v1 = ps.v1().to_double();
    const double u2 = ps.u2().to_double(), v2 = ps.v2().to_double();
    std::vector<double> values(g * g);
    detail::parallel_for(g * g, [&](std::size_t idx) {
        values[idx] = eval_P(BasicF12Arguments<double>{grid[idx / g], grid[idx % g], n, u1, v1, u2, v2});
    });
    std::vector<double> weights;
    for (const auto &w : trinomial_weights(n, ps.eta1(), ps.eta2())) {
        weights.push_back(w.to_double());
    }
    std::vector<double> out(g * g, 0.0);
    detail::parallel_for(g, [&](std::size_t r) {
        for (std::size_t c = 0; c < g; ++c) {
            double sum = 0.0;
            for (std::size_t i = 0; i < g; ++i) {
                sum += weights[i] * values[r * g + i] * values[c * g + i];
            }
            out[r * g + c] = sum;
        }
    });
    return out;
}

/// J_{x,y} = sum_m b2(m; N; eb1, eb2) P_m(x) P_m(y), indexed by states.
inline GramMatrix dual_gram(const PolynomialTable &table) {
    const auto [eb1, eb2] = dual_weights(table.params());
    const auto &grid = table.grid();
    const std::size_t g = grid.size();
    const auto weights = trinomial_weights(table.N(), eb1, eb2);
    GramMatrix out(table.N());
    detail::parallel_for(g, [&](std::size_t r) {
        for (std::size_t c = r; c < g; ++c) {
            Rational sum(0);
            for (std::size_t i = 0; i < g; ++i) {
                sum += weights[i] * table.at(grid[i], grid[r]) * table.at(grid[i], grid[c]);
            }
            out.set_index(c, r, sum);
            out.set_index(r, c, std::move(sum));
        }
    });
    return out;
}

inline GramMatrix dual_gram(const ParameterSet &ps, int n) { return dual_gram(PolynomialTable(ps, n)); }

}  // namespace k2d
