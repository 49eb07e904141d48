#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "k2d/kernel.hpp"
#include "k2d/panel.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using k2d::Error;
using k2d::ErrorCode;
using k2d::GridPoint;
using k2d::KernelParameters;
using k2d::Rational;

namespace {

ErrorCode code_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "expected k2d::Error";
    return ErrorCode::usage;
}

KernelParameters reference_kernel(int n) {
    return {Rational(1, 6), Rational(1, 3), Rational(1, 6), Rational(1, 3), n};
}

KernelParameters random_interior(gen::Gen &g, int n) {
    const auto [b1, b2] = g.simplex_pair(7);
    return {g.unit_open(7), g.unit_open(7), b1, b2, n};
}

bool stochastic(const k2d::KernelMatrix &k) {
    for (const auto &s : k.column_sums()) {
        if (s != Rational(1)) {
            return false;
        }
    }
    for (std::size_t r = 0; r < k.size(); ++r) {
        for (std::size_t c = 0; c < k.size(); ++c) {
            if (k.at_index(r, c).sign() < 0) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST(KernelParameters, Validation) {
    EXPECT_NO_THROW(reference_kernel(2).validate());
    EXPECT_TRUE(reference_kernel(2).interior());
    const KernelParameters bad_alpha{Rational(3, 2), Rational(1, 2), Rational(1, 4), Rational(1, 4), 2};
    EXPECT_EQ(code_of([&] { bad_alpha.validate(); }), ErrorCode::invalid_parameters);
    const KernelParameters bad_beta{Rational(1, 2), Rational(1, 2), Rational(2, 3), Rational(1, 2), 2};
    EXPECT_EQ(code_of([&] { bad_beta.validate(); }), ErrorCode::invalid_parameters);
    const KernelParameters bad_n{Rational(1, 2), Rational(1, 2), Rational(1, 4), Rational(1, 4), -1};
    EXPECT_EQ(code_of([&] { bad_n.validate(); }), ErrorCode::out_of_range);
    EXPECT_EQ(reference_kernel(2).str(), "1/6,1/3,1/6,1/3");
}

TEST(BuildKernel, TrivialGrid) {
    const auto k = k2d::build_kernel(reference_kernel(0));
    ASSERT_EQ(k.size(), 1U);
    EXPECT_EQ(k.at({0, 0}, {0, 0}), Rational(1));
}

TEST(BuildKernel, SingleDieEntries) {
    const KernelParameters kp{Rational(1, 2), Rational(1, 3), Rational(1, 4), Rational(1, 4), 1};
    const auto k = k2d::build_kernel(kp);
    // from face 1: kept with 1/2, else re-rolled
    EXPECT_EQ(k.at({1, 0}, {1, 0}), Rational(1, 2) + Rational(1, 2) * Rational(1, 4));
    EXPECT_EQ(k.at({0, 1}, {1, 0}), Rational(1, 2) * Rational(1, 4));
    EXPECT_EQ(k.at({0, 0}, {1, 0}), Rational(1, 2) * Rational(1, 2));
    EXPECT_EQ(k.at({0, 0}, {0, 0}), Rational(1, 2));
}

TEST(BuildKernel, ColumnsAreProbabilityVectors) {
    const KernelParameters listed{Rational(1, 2), Rational(1, 3), Rational(1, 4), Rational(1, 4), 4};
    EXPECT_TRUE(stochastic(k2d::build_kernel(listed)));
    constexpr std::uint64_t seed = 81;
    gen::Gen g(seed);
    for (int i = 0; i < 20; ++i) {
        SCOPED_TRACE(gen::replay(seed, i));
        EXPECT_TRUE(stochastic(k2d::build_kernel(random_interior(g, static_cast<int>(g.integer(0, 6))))));
    }
}

TEST(BuildKernel, FullyStickyDiceAreAbsorbing) {
    const KernelParameters kp{Rational(1), Rational(1), Rational(1, 3), Rational(1, 3), 2};
    EXPECT_FALSE(kp.interior());
    const auto k = k2d::build_kernel(kp);
    EXPECT_TRUE(stochastic(k));
    for (const auto s : k.grid()) {
        if (s.total() == 2) {
            EXPECT_EQ(k.at(s, s), Rational(1)) << s.str();
        }
    }
    EXPECT_EQ(code_of([&] { (void)k2d::stationary_distribution(k); }), ErrorCode::singular_system);
}

TEST(Stationary, TrinomialWithListedWeights) {
    // alpha = 1/2 and beta proportional to (1 - alpha) eta
    const KernelParameters kp{Rational(1, 2), Rational(1, 2), Rational(35, 127), Rational(90, 127), 2};
    const auto pi = k2d::stationary_distribution(k2d::build_kernel(kp));
    const auto expected = k2d::trinomial_weights(2, Rational(5, 18), Rational(5, 7));
    EXPECT_EQ(pi, expected);
    const auto fit = k2d::fit_eta(pi, 2);
    EXPECT_TRUE(fit.trinomial);
    EXPECT_FALSE(fit.degenerate);
    EXPECT_EQ(fit.eta1, Rational(5, 18));
    EXPECT_EQ(fit.eta2, Rational(5, 7));
}

TEST(Stationary, FloatPowerIterationTracksExact) {
    const auto k = k2d::build_kernel(reference_kernel(4));
    const auto exact = k2d::stationary_distribution(k);
    const auto approx = k2d::stationary_distribution_float(k);
    ASSERT_EQ(exact.size(), approx.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
        EXPECT_NEAR(approx[i], exact[i].to_double(), 1e-12);
    }
}

TEST(StationaryProperty, MatchesIndependentDiceOracle) {
    constexpr std::uint64_t seed = 82;
    gen::Gen g(seed);
    for (int i = 0; i < 20; ++i) {
        SCOPED_TRACE(gen::replay(seed, i));
        const int n = static_cast<int>(g.integer(0, 4));
        const auto kp = random_interior(g, n);
        const auto pi = k2d::stationary_distribution(k2d::build_kernel(kp));
        // one die: pi_a proportional to beta_a / (1 - alpha_a), with alpha_0 = 0
        const oracle::Q w0 = 1 - kp.beta1.mpq() - kp.beta2.mpq();
        const oracle::Q w1 = kp.beta1.mpq() / (1 - kp.alpha1.mpq());
        const oracle::Q w2 = kp.beta2.mpq() / (1 - kp.alpha2.mpq());
        const oracle::Q total = w0 + w1 + w2;
        const k2d::TriangularGrid grid(n);
        for (std::size_t s = 0; s < grid.size(); ++s) {
            EXPECT_EQ(pi[s], Rational(oracle::trinomial(grid[s].a, grid[s].b, n, w1 / total, w2 / total)));
        }
    }
}

TEST(FitEta, RecognizesNonTrinomialAndDegenerateLaws) {
    const std::vector<Rational> uniform(6, Rational(1, 6));
    const auto u = k2d::fit_eta(uniform, 2);
    EXPECT_FALSE(u.trinomial);
    EXPECT_EQ(u.eta1, Rational(1, 3));
    std::vector<Rational> point(6, Rational(0));
    point[0] = Rational(1);
    const auto p = k2d::fit_eta(point, 2);
    EXPECT_TRUE(p.trinomial);
    EXPECT_TRUE(p.degenerate);
    EXPECT_EQ(code_of([] { (void)k2d::fit_eta(std::vector<Rational>(5, Rational(1, 5)), 2); }),
              ErrorCode::size_mismatch);
}

TEST(OneDieSpectrum, ReferenceKernel) {
    const auto s = k2d::one_die_spectrum(reference_kernel(1));
    ASSERT_TRUE(s.has_value());
    EXPECT_EQ(s->lambda1, Rational(1, 4));
    EXPECT_EQ(s->lambda2, Rational(1, 9));
}

TEST(Calibrate, ReferenceKernelFamily) {
    const auto pair = k2d::calibrate(reference_kernel(3));
    ASSERT_TRUE(pair.has_value());
    const auto &f = pair->family;
    EXPECT_EQ(f.u1(), Rational(-3, 2));
    EXPECT_EQ(f.v1(), Rational(3));
    EXPECT_EQ(f.u2(), Rational(8, 3));
    EXPECT_EQ(f.v2(), Rational(4, 3));
    EXPECT_EQ(f.eta1(), Rational(1, 6));
    EXPECT_EQ(f.eta2(), Rational(5, 12));
    EXPECT_TRUE(f.flags().orthogonal);
    EXPECT_EQ(pair->eigenvalue({1, 2}), Rational(1, 4) * Rational(1, 81));
}

TEST(Calibrate, RejectsBoundaryKernels) {
    EXPECT_FALSE(k2d::calibrate(reference_kernel(0)).has_value());
    const KernelParameters sticky{Rational(1), Rational(1, 3), Rational(1, 6), Rational(1, 3), 2};
    EXPECT_FALSE(k2d::calibrate(sticky).has_value());
}

TEST(RatioTest, ConstantFunctionHasEigenvalueOne) {
    const auto k = k2d::build_kernel(reference_kernel(3));
    const k2d::PolynomialTable table(k2d::from_p(k2d::PQuadruple::parse("1,2,3,4")), 3);
    const auto r = k2d::eigenfunction_ratio_test(k, table, {0, 0});
    EXPECT_TRUE(r.is_eigen);
    ASSERT_TRUE(r.lambda.has_value());
    EXPECT_EQ(*r.lambda, Rational(1));
    EXPECT_FALSE(k2d::eigenfunction_ratio_test(k, table, {1, 0}).is_eigen);
    const k2d::PolynomialTable other(table.params(), 2);
    EXPECT_EQ(code_of([&] { (void)k2d::eigenfunction_ratio_test(k, other, {0, 0}); }), ErrorCode::size_mismatch);
}

TEST(RatioTest, CalibratedFamiliesAreEigenfunctions) {
    const auto found = k2d::calibration_search(3, 6, 4);
    ASSERT_FALSE(found.empty());
    for (const auto &pair : found) {
        SCOPED_TRACE(pair.kernel.str());
        EXPECT_TRUE(pair.family.flags().orthogonal);
        const auto k = k2d::build_kernel(pair.kernel);
        const k2d::PolynomialTable table(pair.family, 3);
        for (const auto m : table.grid()) {
            const auto r = k2d::eigenfunction_ratio_test(k, table, m);
            ASSERT_TRUE(r.is_eigen) << m.str();
            EXPECT_EQ(*r.lambda, pair.eigenvalue(m)) << m.str();
        }
    }
}

TEST(Spectrum, ShapeAndLeadingValue) {
    const auto trivial = k2d::spectrum_float(k2d::build_kernel(reference_kernel(0)));
    ASSERT_EQ(trivial.size(), 1U);
    EXPECT_NEAR(trivial[0].real(), 1.0, 1e-14);
    const auto three = k2d::spectrum_float(k2d::build_kernel(reference_kernel(3)));
    ASSERT_EQ(three.size(), 10U);
    EXPECT_NEAR(three[0].real(), 1.0, 1e-12);
    EXPECT_NEAR(three[0].imag(), 0.0, 1e-12);
    EXPECT_EQ(code_of([] { (void)k2d::spectrum_float(k2d::build_kernel(reference_kernel(13))); }),
              ErrorCode::out_of_range);
}

TEST(Spectrum, MatchesCalibratedEigenvalues) {
    const auto pair = k2d::calibrate(reference_kernel(3));
    ASSERT_TRUE(pair.has_value());
    std::vector<double> predicted;
    for (const auto m : k2d::TriangularGrid(3)) {
        predicted.push_back(pair->eigenvalue(m).to_double());
    }
    std::vector<double> observed;
    for (const auto &z : k2d::spectrum_float(k2d::build_kernel(pair->kernel))) {
        EXPECT_NEAR(z.imag(), 0.0, 1e-10);
        observed.push_back(z.real());
    }
    std::sort(predicted.begin(), predicted.end());
    std::sort(observed.begin(), observed.end());
    ASSERT_EQ(predicted.size(), observed.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        EXPECT_NEAR(observed[i], predicted[i], 1e-8);
    }
}

TEST(KernelForFamily, RoundTripsTheReferenceFamily) {
    const auto pair = k2d::calibrate(reference_kernel(2));
    ASSERT_TRUE(pair.has_value());
    const Rational kappa = pair->lambda1 / (pair->lambda1 - Rational(1));
    const auto kp = k2d::kernel_for_family(pair->family, kappa, 2);
    ASSERT_TRUE(kp.has_value());
    EXPECT_EQ(kp->alpha1, Rational(1, 6));
    EXPECT_EQ(kp->alpha2, Rational(1, 3));
    EXPECT_EQ(kp->beta1, Rational(1, 6));
    EXPECT_EQ(kp->beta2, Rational(1, 3));
}

TEST(KernelForFamily, PositiveQuadrupleFamiliesHaveNoKernel) {
    for (const auto &q : k2d::random_quadruples(k2d::default_panel_seed, 10)) {
        const auto ps = k2d::from_p(q);
        for (const Rational &kappa : {Rational(-1, 3), Rational(1, 2), Rational(2), Rational(-5)}) {
            EXPECT_FALSE(k2d::kernel_for_family(ps, kappa, 2).has_value()) << q.str();
        }
    }
}
