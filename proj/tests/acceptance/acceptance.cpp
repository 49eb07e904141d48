// Acceptance runner: `k2d_acceptance <criterion>` checks one criterion (1-10)
// and prints one PASS/FAIL line per sub-check, then a summary line. The exit
// status is nonzero when any sub-check fails. Tolerances are pinned below.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "k2d/k2d.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace {

using k2d::GridPoint;
using k2d::ParameterSet;
using k2d::PQuadruple;
using k2d::Rational;

constexpr double appell_tolerance = 1e-10;
constexpr double double_integral_tolerance = 1e-8;
constexpr double spectrum_tolerance = 1e-8;
constexpr std::size_t panel_size = 20;
constexpr std::uint64_t transform_seed = 7001;
constexpr std::uint64_t kernel_seed = 7002;
constexpr std::uint64_t property_seed = 7003;

class Report {
public:
    explicit Report(int criterion) : criterion_(criterion) {}

    void check(const std::string &name, bool ok, const std::string &detail = {}) {
        std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion_, name.c_str(),
                    detail.empty() ? "" : " -- ", detail.c_str());
        failed_ += ok ? 0 : 1;
        ++total_;
    }

    int finish() const {
        std::printf("%s criterion %d: %d/%d checks passed\n", failed_ == 0 ? "PASS" : "FAIL", criterion_,
                    total_ - failed_, total_);
        std::fflush(stdout);
        return failed_ == 0 ? 0 : 1;
    }

private:
    int criterion_;
    int failed_ = 0;
    int total_ = 0;
};

PQuadruple reference() { return PQuadruple::parse("1,2,3,4"); }

std::vector<PQuadruple> panel() {
    std::vector<PQuadruple> out{reference()};
    for (auto &q : k2d::random_quadruples(k2d::default_panel_seed, panel_size)) {
        out.push_back(std::move(q));
    }
    return out;
}

std::string first_failure(const k2d::GramMatrix &g) {
    const auto bad = g.nonzero_off_diagonal();
    if (bad.empty()) {
        return {};
    }
    return "entry (" + bad.front().first.str() + "; " + bad.front().second.str() + ") = " +
           g.at(bad.front().first, bad.front().second).str();
}

// ------------------------------------------------------------------ 1

int orthogonality(Report &r) {
    for (const auto &q : panel()) {
        const ParameterSet ps = k2d::from_p(q);
        bool ok = true;
        std::string detail;
        for (int n = 0; n <= 8 && ok; ++n) {
            const auto g = k2d::gram(ps, n);
            if (!g.is_diagonal()) {
                ok = false;
                detail = "N=" + std::to_string(n) + " " + first_failure(g);
            }
        }
        r.check("Gram matrix diagonal for N <= 8, p = " + q.str(), ok, detail);
    }
    return r.finish();
}

// ------------------------------------------------------------------ 2

int necessity(Report &r) {
    const ParameterSet ps = k2d::from_p(reference());
    const Rational t(1, 7);
    // keep eta and one (u_i, v_i) pair; move the other along the third condition
    const Rational u1 = ps.u1() + t;
    const auto first = ps.with_uv(u1, (Rational(1) - ps.eta1() * u1 * ps.u2()) / (ps.eta2() * ps.v2()), ps.u2(), ps.v2());
    const Rational u2 = ps.u2() + t;
    const auto second =
        ps.with_uv(ps.u1(), ps.v1(), u2, (Rational(1) - ps.eta1() * ps.u1() * u2) / (ps.eta2() * ps.v1()));
    const auto [e1, e2] = k2d::solve_eta(Rational(2), Rational(1, 2), Rational(1, 3), Rational(3));
    const auto third = ParameterSet::make(Rational(2), Rational(1, 2), Rational(1, 3), Rational(3), e1, e2);

    const std::vector<std::pair<const ParameterSet *, std::size_t>> cases{{&first, 0}, {&second, 1}, {&third, 2}};
    for (const auto &[set, broken] : cases) {
        const auto res = k2d::orthogonality_residuals(*set);
        bool only_one = true;
        for (std::size_t c = 0; c < 3; ++c) {
            only_one = only_one && (res[c].is_zero() == (c != broken));
        }
        const auto g = k2d::gram(*set, 2);
        const std::string name = "violating only condition " + std::to_string(broken + 1);
        r.check(name + " breaks exactly that condition", only_one);
        r.check(name + " gives a non-diagonal Gram matrix at N=2", !g.is_diagonal());
    }
    return r.finish();
}

// ------------------------------------------------------------------ 3

int norms(Report &r) {
    const ParameterSet ref = k2d::from_p(reference());
    const k2d::PolynomialTable t2(ref, 2);
    r.check("||P_(1,0)||^2 = 1/90 at N=2 by brute force", k2d::inner_product(t2, {1, 0}, {1, 0}) == Rational(1, 90));
    r.check("||P_(1,0)||^2 = 1/90 at N=2 by dual weights", k2d::norm_closed_form(ref, 2, {1, 0}) == Rational(1, 90));
    r.check("||P_(1,0)||^2 = 1/90 at N=2 by product form", k2d::norm_product_form(ref, 2, {1, 0}) == Rational(1, 90));
    for (const auto &q : panel()) {
        const ParameterSet ps = k2d::from_p(q);
        if (ps.flags().dual_singular) {
            r.check("norms for p = " + q.str(), false, "dual weights undefined");
            continue;
        }
        bool ok = true;
        std::string detail;
        for (int n = 0; n <= 8 && ok; ++n) {
            const auto g = k2d::gram(ps, n);
            for (const auto m : g.grid()) {
                const Rational &diag = g.at(m, m);
                if (diag != k2d::norm_closed_form(ps, n, m) || diag != k2d::norm_product_form(ps, n, m)) {
                    ok = false;
                    detail = "N=" + std::to_string(n) + " m=" + m.str();
                    break;
                }
            }
        }
        r.check("norms match both closed forms for N <= 8, p = " + q.str(), ok, detail);
    }
    return r.finish();
}

// ------------------------------------------------------------------ 4

int dual_orthogonality(Report &r) {
    for (const auto &q : panel()) {
        const ParameterSet ps = k2d::from_p(q);
        if (ps.flags().dual_singular) {
            r.check("dual Gram for p = " + q.str(), false, "dual weights undefined");
            continue;
        }
        bool ok = true;
        std::string detail;
        for (int n = 0; n <= 6 && ok; ++n) {
            const auto g = k2d::dual_gram(ps, n);
            if (!g.is_diagonal()) {
                ok = false;
                detail = "N=" + std::to_string(n) + " " + first_failure(g);
            }
        }
        r.check("dual Gram matrix diagonal for N <= 6, p = " + q.str(), ok, detail);
    }
    return r.finish();
}

// ------------------------------------------------------------------ 5

int recurrence(Report &r) {
    for (const auto &q : panel()) {
        std::size_t pairs = 0;
        std::string detail;
        for (int n = 0; n <= 8; ++n) {
            const auto report = k2d::verify_recurrence_full(q, n);
            pairs += report.pairs_checked;
            if (!report.failures.empty() && detail.empty()) {
                const auto &f = report.failures.front();
                detail = "N=" + std::to_string(n) + " m=" + f.m.str() + " x=" + f.x.str() + " lhs=" + f.lhs.str() +
                         " rhs=" + f.rhs.str();
            }
        }
        r.check("recurrence on all " + std::to_string(pairs) + " pairs for N <= 8, p = " + q.str(), detail.empty(),
                detail);
    }
    return r.finish();
}

// ------------------------------------------------------------------ 6

int differential_identity(Report &r) {
    for (const auto &q : panel()) {
        std::size_t nonzero = 0;
        std::string detail;
        for (int n = 0; n <= 6; ++n) {
            const auto report = k2d::verify_identity_full(q, n);
            nonzero += report.failures.size();
            if (!report.failures.empty() && detail.empty()) {
                const auto &f = report.failures.front();
                detail = "N=" + std::to_string(n) + " m=" + f.m.str() + " x=" + f.x.str() +
                         " residual=" + f.residual.str();
            }
        }
        r.check("identity residual vanishes for N <= 6, p = " + q.str(), nonzero == 0,
                nonzero == 0 ? "" : std::to_string(nonzero) + " nonzero residuals, first " + detail);
    }
    // control: a parameter set not generated by p must leave a nonzero residual
    const auto off = k2d::ParameterSet::make(Rational(1, 2), Rational(3), Rational(2), Rational(-1, 3), Rational(1, 4),
                                             Rational(1, 4));
    const auto control = k2d::verify_identity_full(reference(), off, 2);
    r.check("control set leaves a nonzero residual", !control.failures.empty());
    return r.finish();
}

// ------------------------------------------------------------------ 7

struct TransformCount {
    std::size_t checked = 0;
    std::string failure;
};

void transform_at(TransformCount &count, const k2d::F12Arguments &a) {
    const Rational one(1);
    const auto record = [&](const char *name, const Rational &lhs, const Rational &rhs) {
        ++count.checked;
        if (lhs != rhs && count.failure.empty()) {
            count.failure = std::string(name) + " m=" + a.m.str() + " x=" + a.x.str() + " N=" + std::to_string(a.N);
        }
    };
    if (a.v1 != one && a.v2 != one) {
        const auto [l, r] = k2d::pfaff_transform(a, k2d::PfaffVariant::pivot_v);
        record("pfaff_pivot_v", l, r);
    }
    if (a.u1 != one && a.u2 != one) {
        const auto [l, r] = k2d::pfaff_transform(a, k2d::PfaffVariant::pivot_u);
        record("pfaff_pivot_u", l, r);
    }
    const auto [l, r] = k2d::reflection_transform(a);
    record("reflection", l, r);
    const auto s = k2d::reflection_transform_2f1(a.m.a, a.x.a, a.N, a.u1);
    record("reflection_2f1 (m prefactor)", s.lhs, s.rhs_m);
    record("reflection_2f1 (x prefactor)", s.lhs, s.rhs_x);
}

int transforms(Report &r) {
    for (const auto &q : panel()) {
        const ParameterSet ps = k2d::from_p(q);
        TransformCount count;
        for (int n = 0; n <= 5; ++n) {
            for (const auto m : k2d::TriangularGrid(n)) {
                for (const auto x : k2d::TriangularGrid(n)) {
                    transform_at(count, {m, x, n, ps.u1(), ps.v1(), ps.u2(), ps.v2()});
                }
            }
        }
        r.check("transformations on every grid pair for N <= 5 (" + std::to_string(count.checked) +
                    " checks), p = " + q.str(),
                count.failure.empty(), count.failure);
    }
    gen::Gen g(transform_seed);
    TransformCount count;
    for (int i = 0; i < 100; ++i) {
        const int n = static_cast<int>(g.integer(0, 8));
        const GridPoint m = g.point(n);
        const GridPoint x = g.point(n);
        transform_at(count, {m, x, n, g.rational(9, 5), g.rational(9, 5), g.rational(9, 5), g.rational(9, 5)});
    }
    r.check("transformations at 100 random (u, v, m, x, N) draws", count.failure.empty(), count.failure);
    return r.finish();
}

// ------------------------------------------------------------------ 8

int quadrature(Report &r) {
    const auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };
    {
        const double series = k2d::appell_f1_series(0.5, 0.5, 0.5, 2, 0.25, 0.25);
        const double integral = k2d::appell_f1_integral(0.5, 0.5, 0.5, 2, 0.25, 0.25);
        r.check("Appell F1(1/2;1/2,1/2;2;1/4,1/4): series vs integral within 1e-10",
                near(series, integral, appell_tolerance), std::to_string(series - integral));
    }
    {
        const double value = k2d::appell_f1_integral(1, 1, 0, 2, 0.5, 0);
        r.check("Appell F1(1;1,0;2;1/2,0) = 2 ln 2 within 1e-10", near(value, 2 * std::numbers::ln2, appell_tolerance));
    }
    {
        const double series = k2d::appell_f1_series(0.7, -0.3, 1.2, 2.5, -0.6, 0.4);
        const double integral = k2d::appell_f1_integral(0.7, -0.3, 1.2, 2.5, -0.6, 0.4);
        r.check("Appell F1(0.7;-0.3,1.2;2.5;-0.6,0.4): series vs integral within 1e-10",
                near(series, integral, appell_tolerance), std::to_string(series - integral));
    }
    const std::vector<std::vector<double>> cases{
        {0.5, 0.5, -1, -1, 3, 0.1, 0.2, -0.1, 0.15},
        {0.6, 0.8, 0.5, 1.5, 2.5, 0.3, -0.2, 0.25, 0.4},
        {1.0, 0.5, 2.0, -0.5, 4.0, -0.3, 0.2, 0.1, -0.25},
    };
    for (const auto &c : cases) {
        const auto check = k2d::f12_integral_check(c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7], c[8]);
        std::string name = "bivariate series vs double integral within 1e-8 at (";
        for (std::size_t i = 0; i < c.size(); ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%s%g", i == 0 ? "" : ",", c[i]);
            name += buf;
        }
        r.check(name + ")", near(check.series, check.integral, double_integral_tolerance),
                std::to_string(check.series - check.integral));
    }
    return r.finish();
}

// ------------------------------------------------------------------ 9

int kernel(Report &r) {
    gen::Gen g(kernel_seed);
    bool stochastic = true;
    bool constant = true;
    std::string detail;
    for (int i = 0; i < 20; ++i) {
        const auto [b1, b2] = g.simplex_pair(7);
        const k2d::KernelParameters kp{g.unit_open(7), g.unit_open(7), b1, b2, static_cast<int>(i % 7)};
        const auto k = k2d::build_kernel(kp);
        for (const auto &s : k.column_sums()) {
            if (s != Rational(1)) {
                stochastic = false;
                detail = kp.str();
            }
        }
        const k2d::PolynomialTable table(k2d::from_p(reference()), kp.N);
        const auto test = k2d::eigenfunction_ratio_test(k, table, {0, 0});
        constant = constant && test.is_eigen && *test.lambda == Rational(1);
    }
    r.check("transition probabilities from every state sum to 1 (20 kernels, N <= 6)", stochastic, detail);
    r.check("constant function is an eigenfunction with eigenvalue 1", constant);

    for (int n = 1; n <= 4; ++n) {
        const auto found = k2d::calibration_search(n, 6, 3);
        r.check("calibration search finds kernels at N=" + std::to_string(n), !found.empty());
        for (const auto &pair : found) {
            const auto k = k2d::build_kernel(pair.kernel);
            const k2d::PolynomialTable table(pair.family, n);
            bool eigen = true;
            std::vector<double> predicted;
            for (const auto m : table.grid()) {
                const auto test = k2d::eigenfunction_ratio_test(k, table, m);
                eigen = eigen && test.is_eigen && *test.lambda == pair.eigenvalue(m);
                predicted.push_back(pair.eigenvalue(m).to_double());
            }
            r.check("every P_m is an eigenfunction with eigenvalue lambda1^m1 lambda2^m2, kernel " + pair.kernel.str() +
                        " N=" + std::to_string(n),
                    eigen);
            std::vector<double> observed;
            double imag = 0.0;
            for (const auto &z : k2d::spectrum_float(k)) {
                observed.push_back(z.real());
                imag = std::max(imag, std::abs(z.imag()));
            }
            std::sort(predicted.begin(), predicted.end());
            std::sort(observed.begin(), observed.end());
            double worst = imag;
            for (std::size_t i = 0; i < observed.size(); ++i) {
                worst = std::max(worst, std::abs(observed[i] - predicted[i]));
            }
            r.check("eigenvalue multiset matches the numerical spectrum within 1e-8, kernel " + pair.kernel.str() +
                        " N=" + std::to_string(n),
                    observed.size() == predicted.size() && worst <= spectrum_tolerance, std::to_string(worst));
        }
    }
    return r.finish();
}

// ------------------------------------------------------------------ 10

int properties(Report &r) {
    gen::Gen g(property_seed);
    bool termination = true;
    for (int i = 0; i < 200; ++i) {
        const int n = static_cast<int>(g.integer(0, 12));
        const int k = static_cast<int>(g.integer(0, 16));
        const Rational value = k2d::pochhammer(Rational(-n), k);
        const bool expect_zero = k > n;
        termination = termination && value.is_zero() == expect_zero &&
                      value == Rational(oracle::poch(oracle::Q(-n), k)) && value == k2d::pochhammer_neg(n, k);
    }
    r.check("(-n)_k vanishes exactly for k > n and matches the naive product (200 draws)", termination);

    bool normalized = true;
    for (int i = 0; i < 100; ++i) {
        const int n = static_cast<int>(g.integer(0, 12));
        const auto [p, q] = g.simplex_pair(11);
        const auto w = k2d::trinomial_weights(n, p, q);
        Rational total(0);
        for (const auto &v : w) {
            total += v;
        }
        const k2d::TriangularGrid grid(n);
        for (std::size_t s = 0; s < grid.size(); ++s) {
            normalized = normalized && w[s] == Rational(oracle::trinomial(grid[s].a, grid[s].b, n, p.mpq(), q.mpq()));
        }
        normalized = normalized && total == Rational(1);
    }
    r.check("trinomial weights sum to 1 and match the binomial product (100 draws)", normalized);

    bool invariant = true;
    for (int i = 0; i < 200; ++i) {
        const auto q = g.quadruple(false);
        const auto a = k2d::from_p(q);
        const auto b = k2d::from_p(q.scaled(g.positive(20, 9)));
        invariant = invariant && a.u1() == b.u1() && a.v1() == b.v1() && a.u2() == b.u2() && a.v2() == b.v2() &&
                    a.eta1() == b.eta1() && a.eta2() == b.eta2();
    }
    r.check("parameters are invariant under p -> c p (200 draws)", invariant);
    return r.finish();
}

}  // namespace

int main(int argc, char **argv) {
    const std::map<int, std::function<int(Report &)>> criteria{
        {1, orthogonality}, {2, necessity},  {3, norms},      {4, dual_orthogonality}, {5, recurrence},
        {6, differential_identity}, {7, transforms}, {8, quadrature}, {9, kernel}, {10, properties},
    };
    std::vector<int> selected;
    if (argc == 1) {
        for (const auto &[id, fn] : criteria) {
            selected.push_back(id);
        }
    } else {
        for (int i = 1; i < argc; ++i) {
            const int id = std::atoi(argv[i]);
            if (criteria.count(id) == 0) {
                std::fprintf(stderr, "unknown criterion '%s' (expected 1-10)\n", argv[i]);
                return 2;
            }
            selected.push_back(id);
        }
    }
    int status = 0;
    for (int id : selected) {
        Report report(id);
        status |= criteria.at(id)(report);
    }
    return status;
}
