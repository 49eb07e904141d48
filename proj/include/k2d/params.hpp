#pragma once

#include <array>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "k2d/error.hpp"
#include "k2d/scalar.hpp"

namespace k2d {

/// Four strictly positive rationals (p1, p2, p3, p4) generating an orthogonal
/// parameter set.
class PQuadruple {
public:
    static PQuadruple make(Rational p1, Rational p2, Rational p3, Rational p4) {
        PQuadruple q;
        q.p_ = {std::move(p1), std::move(p2), std::move(p3), std::move(p4)};
        for (std::size_t i = 0; i < 4; ++i) {
            if (q.p_[i].sign() <= 0) {
                throw Error(ErrorCode::invalid_parameters,
                            "p" + std::to_string(i + 1) + " = " + q.p_[i].str() + " must be strictly positive");
            }
        }
        return q;
    }

    /// "1,2,3,4" or "1/2,3,5/7,4".
    static PQuadruple parse(std::string_view text) {
        std::vector<Rational> parts;
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto comma = text.find(',', start);
            const auto end = comma == std::string_view::npos ? text.size() : comma;
            parts.push_back(Rational::parse(text.substr(start, end - start)));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (parts.size() != 4) {
            throw Error(ErrorCode::usage, "expected four comma-separated rationals, got '" + std::string(text) + "'");
        }
        return make(parts[0], parts[1], parts[2], parts[3]);
    }

    [[nodiscard]] const Rational &p1() const noexcept { return p_[0]; }
    [[nodiscard]] const Rational &p2() const noexcept { return p_[1]; }
    [[nodiscard]] const Rational &p3() const noexcept { return p_[2]; }
    [[nodiscard]] const Rational &p4() const noexcept { return p_[3]; }
    [[nodiscard]] const std::array<Rational, 4> &values() const noexcept { return p_; }

    /// S = p1 + p2 + p3 + p4.
    [[nodiscard]] Rational sum() const { return p_[0] + p_[1] + p_[2] + p_[3]; }
    /// Delta = p1 p4 - p2 p3. Zero means the recurrence coefficients diverge.
    [[nodiscard]] Rational delta() const { return p_[0] * p_[3] - p_[1] * p_[2]; }

    [[nodiscard]] PQuadruple scaled(const Rational &c) const {
        return make(c * p_[0], c * p_[1], c * p_[2], c * p_[3]);
    }

    [[nodiscard]] std::string str() const {
        return p_[0].str() + "," + p_[1].str() + "," + p_[2].str() + "," + p_[3].str();
    }

    friend bool operator==(const PQuadruple &, const PQuadruple &) = default;

private:
    PQuadruple() = default;
    std::array<Rational, 4> p_;
};

/// Degeneracies are tracked separately because different operations fail
/// under different ones.
struct ParameterFlags {
    bool orthogonal = false;          ///< the three orthogonality conditions hold exactly
    bool trinomial_valid = false;     ///< 0 < eta1, 0 < eta2, eta1 + eta2 < 1
    bool boundary_trinomial = false;  ///< eta1 + eta2 == 1
    bool dual_singular = false;       ///< u1 v2 - u2 v1 == 0
    bool delta_singular = false;      ///< source quadruple has p1 p4 == p2 p3
};

/**
 * Polynomial parameters (u1, v1, u2, v2) together with the trinomial weight
 * parameters (eta1, eta2).
 *
 * Sets that fail the orthogonality conditions are still valid inputs: the
 * polynomials are defined for any u, v. `flags().orthogonal` records whether
 * the conditions hold, and norm/recurrence code checks it.
 */
class ParameterSet {
public:
    static ParameterSet make(Rational u1, Rational v1, Rational u2, Rational v2, Rational eta1, Rational eta2,
                             std::optional<PQuadruple> source = std::nullopt);

    [[nodiscard]] const Rational &u1() const noexcept { return u1_; }
    [[nodiscard]] const Rational &v1() const noexcept { return v1_; }
    [[nodiscard]] const Rational &u2() const noexcept { return u2_; }
    [[nodiscard]] const Rational &v2() const noexcept { return v2_; }
    [[nodiscard]] const Rational &eta1() const noexcept { return eta1_; }
    [[nodiscard]] const Rational &eta2() const noexcept { return eta2_; }

    /// D = u1 v2 - u2 v1.
    [[nodiscard]] Rational dual_det() const { return u1_ * v2_ - u2_ * v1_; }
    /// Dual trinomial parameters; empty when D == 0.
    [[nodiscard]] const std::optional<Rational> &eta_bar1() const noexcept { return eta_bar1_; }
    [[nodiscard]] const std::optional<Rational> &eta_bar2() const noexcept { return eta_bar2_; }

    [[nodiscard]] const ParameterFlags &flags() const noexcept { return flags_; }
    [[nodiscard]] const std::optional<PQuadruple> &source() const noexcept { return source_; }

    /// Same set with (u, v) replaced; used by perturbation tests.
    [[nodiscard]] ParameterSet with_uv(Rational u1, Rational v1, Rational u2, Rational v2) const {
        return make(std::move(u1), std::move(v1), std::move(u2), std::move(v2), eta1_, eta2_);
    }

private:
    ParameterSet() = default;

    Rational u1_, v1_, u2_, v2_, eta1_, eta2_;
    std::optional<Rational> eta_bar1_, eta_bar2_;
    ParameterFlags flags_;
    std::optional<PQuadruple> source_;
};

/// Residuals eta1 u1 + eta2 v1 - 1, eta1 u2 + eta2 v2 - 1, eta1 u1 u2 + eta2 v1 v2 - 1.
/// All three vanish exactly iff the family is orthogonal for the trinomial weight.
inline std::array<Rational, 3> orthogonality_residuals(const Rational &u1, const Rational &v1, const Rational &u2,
                                                       const Rational &v2, const Rational &eta1,
                                                       const Rational &eta2) {
    const Rational one(1);
    return {eta1 * u1 + eta2 * v1 - one, eta1 * u2 + eta2 * v2 - one, eta1 * u1 * u2 + eta2 * v1 * v2 - one};
}

inline std::array<Rational, 3> orthogonality_residuals(const ParameterSet &ps) {
    return orthogonality_residuals(ps.u1(), ps.v1(), ps.u2(), ps.v2(), ps.eta1(), ps.eta2());
}

/// Residuals of the dual system: eb1 u1 + eb2 u2 - 1, eb1 v1 + eb2 v2 - 1, eb1 u1 v1 + eb2 u2 v2 - 1.
inline std::array<Rational, 3> dual_orthogonality_residuals(const ParameterSet &ps, const Rational &eta_bar1,
                                                            const Rational &eta_bar2) {
    const Rational one(1);
    return {eta_bar1 * ps.u1() + eta_bar2 * ps.u2() - one, eta_bar1 * ps.v1() + eta_bar2 * ps.v2() - one,
            eta_bar1 * ps.u1() * ps.v1() + eta_bar2 * ps.u2() * ps.v2() - one};
}

inline ParameterSet ParameterSet::make(Rational u1, Rational v1, Rational u2, Rational v2, Rational eta1,
                                       Rational eta2, std::optional<PQuadruple> source) {
    ParameterSet ps;
    ps.u1_ = std::move(u1);
    ps.v1_ = std::move(v1);
    ps.u2_ = std::move(u2);
    ps.v2_ = std::move(v2);
    ps.eta1_ = std::move(eta1);
    ps.eta2_ = std::move(eta2);
    ps.source_ = std::move(source);

    const auto residuals = orthogonality_residuals(ps);
    ps.flags_.orthogonal = residuals[0].is_zero() && residuals[1].is_zero() && residuals[2].is_zero();
    const Rational eta_sum = ps.eta1_ + ps.eta2_;
    ps.flags_.trinomial_valid = ps.eta1_.sign() > 0 && ps.eta2_.sign() > 0 && eta_sum < Rational(1);
    ps.flags_.boundary_trinomial = eta_sum == Rational(1);
    ps.flags_.delta_singular = ps.source_.has_value() && ps.source_->delta().is_zero();

    const Rational det = ps.dual_det();
    ps.flags_.dual_singular = det.is_zero();
    if (!ps.flags_.dual_singular) {
        ps.eta_bar1_ = (ps.v2_ - ps.u2_) / det;
        ps.eta_bar2_ = (ps.u1_ - ps.v1_) / det;
    }
    return ps;
}

/**
 * The p-parametrization:
 *
 *   u1 = (p1+p2)(p1+p3) / (p1 S),   u2 = (p1+p2)(p2+p4) / (p2 S),
 *   v1 = (p1+p3)(p3+p4) / (p3 S),   v2 = (p2+p4)(p3+p4) / (p4 S),
 *   eta1 = p1 p2 S / ((p1+p2)(p1+p3)(p2+p4)),
 *   eta2 = p3 p4 S / ((p2+p4)(p3+p4)(p1+p3)),
 *
 * with S = p1+p2+p3+p4. The result always satisfies the orthogonality
 * conditions; that is checked before returning.
 */
inline ParameterSet from_p(const PQuadruple &p) {
    const Rational &p1 = p.p1();
    const Rational &p2 = p.p2();
    const Rational &p3 = p.p3();
    const Rational &p4 = p.p4();
    const Rational s = p.sum();

    Rational u1 = (p1 + p2) * (p1 + p3) / (p1 * s);
    Rational u2 = (p1 + p2) * (p2 + p4) / (p2 * s);
    Rational v1 = (p1 + p3) * (p3 + p4) / (p3 * s);
    Rational v2 = (p2 + p4) * (p3 + p4) / (p4 * s);
    Rational eta1 = p1 * p2 * s / ((p1 + p2) * (p1 + p3) * (p2 + p4));
    Rational eta2 = p3 * p4 * s / ((p2 + p4) * (p3 + p4) * (p1 + p3));

    auto ps = ParameterSet::make(std::move(u1), std::move(v1), std::move(u2), std::move(v2), std::move(eta1),
                                 std::move(eta2), p);
    if (!ps.flags().orthogonal) {
        throw std::logic_error("p-parametrization produced a non-orthogonal set for p = " + p.str());
    }
    return ps;
}

/**
 * U1 V2 - U2 V1 with U_i = 1 - 1/u_i, V_i = 1 - 1/v_i.
 *
 * Given the first two orthogonality conditions, the third is equivalent to
 * this residual vanishing (a cone in (u, v)-space).
 */
inline Rational cone_residual(const ParameterSet &ps) {
    if (ps.u1().is_zero() || ps.u2().is_zero() || ps.v1().is_zero() || ps.v2().is_zero()) {
        throw Error(ErrorCode::division_by_zero, "cone residual needs nonzero u1, u2, v1, v2");
    }
    const Rational one(1);
    const Rational big_u1 = one - one / ps.u1();
    const Rational big_u2 = one - one / ps.u2();
    const Rational big_v1 = one - one / ps.v1();
    const Rational big_v2 = one - one / ps.v2();
    return big_u1 * big_v2 - big_u2 * big_v1;
}

/**
 * Dual weights eta_bar1 = (v2 - u2)/D, eta_bar2 = (u1 - v1)/D with D = u1 v2 - u2 v1.
 *
 * For orthogonal sets the dual system is asserted to hold exactly.
 */
inline std::pair<Rational, Rational> dual_weights(const ParameterSet &ps) {
    if (ps.flags().dual_singular) {
        throw Error(ErrorCode::dual_singular, "u1 v2 - u2 v1 = 0: dual weights undefined");
    }
    std::pair<Rational, Rational> out{*ps.eta_bar1(), *ps.eta_bar2()};
    if (ps.flags().orthogonal) {
        for (const auto &r : dual_orthogonality_residuals(ps, out.first, out.second)) {
            if (!r.is_zero()) {
                throw std::logic_error("dual orthogonality system violated for an orthogonal parameter set");
            }
        }
    }
    return out;
}

/// Unique (eta1, eta2) with eta1 u1 + eta2 v1 = 1 and eta1 u2 + eta2 v2 = 1.
/// The third condition is not imposed.
inline std::pair<Rational, Rational> solve_eta(const Rational &u1, const Rational &v1, const Rational &u2,
                                               const Rational &v2) {
    const Rational det = u1 * v2 - u2 * v1;
    if (det.is_zero()) {
        throw Error(ErrorCode::singular_system, "u1 v2 - u2 v1 = 0: eta is not determined");
    }
    return {(v2 - v1) / det, (u1 - u2) / det};
}

}  // namespace k2d
