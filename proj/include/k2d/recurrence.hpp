#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "k2d/combinatorics.hpp"
#include "k2d/detail/parallel.hpp"
#include "k2d/error.hpp"
#include "k2d/hyper.hpp"
#include "k2d/params.hpp"
#include "k2d/polynomial_table.hpp"

namespace k2d {

/// Coefficients of the five-term recurrence in the spectral labels.
struct RecurrenceCoefficients {
    Rational cA, cB, cC, cD;
};

/// Throws delta_zero when p1 p4 = p2 p3; the coefficients diverge there.
inline RecurrenceCoefficients coefficients(const PQuadruple &p) {
    const Rational delta = p.delta();
    if (delta.is_zero()) {
        throw Error(ErrorCode::delta_zero, "p1 p4 - p2 p3 = 0 for p = " + p.str() + "; recurrence is singular");
    }
    const Rational s = p.sum();
    const Rational p13 = p.p1() + p.p3();
    const Rational p24 = p.p2() + p.p4();
    RecurrenceCoefficients c{p.p1() * p.p3() * p24 * s / (p13 * delta), p.p2() * p.p4() * p13 * s / (p24 * delta),
                             delta / p13, delta / p24};

    const ParameterSet ps = from_p(p);
    if (c.cB * ps.u2() - c.cA * ps.u1() != p.p1() + p.p2() || c.cB * ps.v2() - c.cA * ps.v1() != -(p.p3() + p.p4())) {
        throw std::logic_error("recurrence coefficient identities fail for p = " + p.str());
    }
    return c;
}

struct RecurrenceSides {
    Rational lhs;
    Rational rhs;
};

/**
 * Both sides of the recurrence at (m, x):
 *
 *   lhs = (N-m1-m2) { cA (P_{m1+1,m2} - P) - cB (P_{m1,m2+1} - P) }
 *         + m1 cC (P_{m1-1,m2} - P) - m2 cD (P_{m1,m2-1} - P)
 *   rhs = ((p1+p2) x1 - (p3+p4) x2) P
 *
 * A term whose multiplier is zero is skipped before its neighbour is looked
 * up, so no label outside the grid is touched. The table must hold from_p(p).
 */
inline RecurrenceSides apply_recurrence(const PolynomialTable &table, const RecurrenceCoefficients &c,
                                        const PQuadruple &p, GridPoint m, GridPoint x) {
    const int n = table.N();
    const Rational &centre = table.at(m, x);
    Rational lhs(0);
    if (const int up = n - m.total(); up != 0) {
        lhs += Rational(up) * (c.cA * (table.at({m.a + 1, m.b}, x) - centre) -
                               c.cB * (table.at({m.a, m.b + 1}, x) - centre));
    }
    if (m.a != 0) {
        lhs += Rational(m.a) * c.cC * (table.at({m.a - 1, m.b}, x) - centre);
    }
    if (m.b != 0) {
        lhs -= Rational(m.b) * c.cD * (table.at({m.a, m.b - 1}, x) - centre);
    }
    const Rational rhs = ((p.p1() + p.p2()) * Rational(x.a) - (p.p3() + p.p4()) * Rational(x.b)) * centre;
    return {std::move(lhs), rhs};
}

inline RecurrenceSides apply_recurrence(const PolynomialTable &table, const PQuadruple &p, GridPoint m, GridPoint x) {
    return apply_recurrence(table, coefficients(p), p, m, x);
}

struct RecurrenceFailure {
    GridPoint m;
    GridPoint x;
    Rational lhs;
    Rational rhs;
};

struct RecurrenceReport {
    int N = 0;
    std::vector<Rational> p;
    std::size_t pairs_checked = 0;
    std::vector<RecurrenceFailure> failures;
};

/// Checks the recurrence at every (m, x) pair of the grid. Failures are listed
/// in (m, x) grid order.
inline RecurrenceReport verify_recurrence_full(const PQuadruple &p, int n) {
    const RecurrenceCoefficients c = coefficients(p);
    const PolynomialTable table(from_p(p), n);
    const auto &grid = table.grid();
    const std::size_t g = grid.size();
    std::vector<std::optional<RecurrenceFailure>> slots(g * g);
    detail::parallel_for(g * g, [&](std::size_t idx) {
        const GridPoint m = grid[idx / g];
        const GridPoint x = grid[idx % g];
        auto sides = apply_recurrence(table, c, p, m, x);
        if (sides.lhs != sides.rhs) {
            slots[idx] = RecurrenceFailure{m, x, std::move(sides.lhs), std::move(sides.rhs)};
        }
    });
    RecurrenceReport report;
    report.N = n;
    report.p.assign(p.values().begin(), p.values().end());
    report.pairs_checked = g * g;
    for (auto &slot : slots) {
        if (slot) {
            report.failures.push_back(std::move(*slot));
        }
    }
    return report;
}

/**
 * (-p4 u1 d/du1 + p2 v1 d/dv1 - p3 u2 d/du2 + p1 v2 d/dv2) P_m(x), evaluated
 * exactly at the given parameter set.
 *
 * This operator does not annihilate the polynomials: for m = (1,0) the
 * residual is (p4 u1 x1 - p2 v1 x2) / N, which vanishes only on special
 * states. The functions report the true residual.
 */
inline Rational identity_residual(const PQuadruple &p, const ParameterSet &ps, GridPoint m, GridPoint x, int n) {
    const F12Arguments args{m, x, n, ps.u1(), ps.v1(), ps.u2(), ps.v2()};
    const auto d = eval_P_partials(args);
    return -p.p4() * ps.u1() * d[0] + p.p2() * ps.v1() * d[1] - p.p3() * ps.u2() * d[2] + p.p1() * ps.v2() * d[3];
}

/// Residual at the parameter set generated by p itself.
inline Rational identity_residual(const PQuadruple &p, GridPoint m, GridPoint x, int n) {
    return identity_residual(p, from_p(p), m, x, n);
}

struct IdentityFailure {
    GridPoint m;
    GridPoint x;
    Rational residual;
};

struct IdentityReport {
    int N = 0;
    std::size_t pairs_checked = 0;
    std::vector<IdentityFailure> failures;
};

/// Residual at every (m, x) pair; nonzero residuals are listed in grid order.
inline IdentityReport verify_identity_full(const PQuadruple &p, const ParameterSet &ps, int n) {
    const TriangularGrid grid(n);
    const std::size_t g = grid.size();
    std::vector<Rational> residuals(g * g);
    detail::parallel_for(g * g,
                         [&](std::size_t idx) { residuals[idx] = identity_residual(p, ps, grid[idx / g], grid[idx % g], n); });
    IdentityReport report;
    report.N = n;
    report.pairs_checked = g * g;
    for (std::size_t idx = 0; idx < g * g; ++idx) {
        if (!residuals[idx].is_zero()) {
            report.failures.push_back({grid[idx / g], grid[idx % g], std::move(residuals[idx])});
        }
    }
    return report;
}

inline IdentityReport verify_identity_full(const PQuadruple &p, int n) { return verify_identity_full(p, from_p(p), n); }

}  // namespace k2d
