#include "whitham/asymptotics.hpp"
#include "whitham/continuation.hpp"
#include "whitham/steady.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace whitham;

namespace {

double sup_residual(const std::vector<double>& values, double mu, DispersionModel model) {
    double m = 0.0;
    for (double r : residual(values, mu, model)) m = std::max(m, std::abs(r));
    return m;
}

}  // namespace

TEST(WhithamCoefficients, ClosedFormValues) {
    const auto c = whitham_coefficients();
    EXPECT_NEAR(c.mu_star, 0.87, 5e-3);
    EXPECT_NEAR(c.c1, 1.0 / (std::sqrt(std::tanh(1.0)) - 1.0), 1e-15);
    EXPECT_NEAR(c.c1, -7.857, 5e-3);
    EXPECT_NEAR(c.c2, 2.80, 5e-3);
    EXPECT_LT(c.c1, 0.0);
    EXPECT_LT(c.c1 + c.c2, 0.0);
}

TEST(WhithamExpansion, ZeroAmplitudeIsBifurcationPoint) {
    const CollocationGrid grid(8);
    const auto e = whitham_expansion(0.0, grid.points());
    for (double v : e.values) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(e.mu, whitham_coefficients().mu_star);
}

TEST(WhithamExpansion, SubcriticalSpeed) {
    const auto c = whitham_coefficients();
    EXPECT_NEAR(whitham_expansion_speed(0.01), c.mu_star + 1e-4 * (c.c1 + c.c2), 1e-16);
    EXPECT_LT(whitham_expansion_speed(0.01), c.mu_star);
}

TEST(WhithamExpansion, CollocationResidualIsThirdOrder) {
    const CollocationGrid grid(32);
    const auto e2 = whitham_expansion(0.02, grid.points());
    const auto e1 = whitham_expansion(0.01, grid.points());
    const double r2 = sup_residual(e2.values, e2.mu, DispersionModel::whitham());
    const double r1 = sup_residual(e1.values, e1.mu, DispersionModel::whitham());
    EXPECT_GE(r2 / r1, 7.0);
}

TEST(WhithamExpansion, PitchforkSymmetry) {
    // φ(-ε)(x) = φ(ε)(x + π) exactly at second order.
    for (double x : {0.0, 0.4, 2.0}) {
        EXPECT_NEAR(whitham_expansion_at(-0.03, x), whitham_expansion_at(0.03, x + std::numbers::pi), 1e-15);
    }
    EXPECT_EQ(whitham_expansion_speed(-0.03), whitham_expansion_speed(0.03));
}

TEST(KdVExpansion, DirectValues) {
    EXPECT_EQ(kdv_expansion_at(0.0, 1.0), 0.0);
    EXPECT_NEAR(kdv_expansion_at(0.1, 0.0), 0.08, 1e-15);
}

TEST(KdVExpansion, CollocationResidualShrinksFasterThanAmplitudeSquared) {
    const CollocationGrid grid(32);
    const double mu_star = 5.0 / 6.0;
    const auto a = kdv_expansion(0.02, grid.points());
    const auto b = kdv_expansion(0.01, grid.points());
    const double ra = sup_residual(a, mu_star, DispersionModel::kdv());
    const double rb = sup_residual(b, mu_star, DispersionModel::kdv());
    EXPECT_GE(ra / rb, 7.0);
}

TEST(KdVExpansion, SpeedCorrectionMatchesNewton) {
    // The ε² speed correction is checked against the Newton solution whose
    // first cosine amplitude equals ε (up to O(ε³)).
    std::vector<double> errs;
    for (double eps : {0.02, 0.01}) {
        const auto guess = small_amplitude_guess(DispersionModel::kdv(), 1, eps, 32);
        const auto sol = newton_fixed_speed(guess.values, guess.mu, DispersionModel::kdv());
        ASSERT_TRUE(sol.report.converged);
        const double a1 = cosine_weight(1, 32) * sol.profile.spectrum.coeffs[1];
        errs.push_back(std::abs(a1 - eps));
    }
    EXPECT_GE(errs[0] / errs[1], 6.0);
}

TEST(Expansions, AgreeAtFirstOrderOnly) {
    for (double eps : {0.02, 0.01}) {
        for (double x : {0.0, 1.0, 2.5}) {
            const double diff = whitham_expansion_at(eps, x) - kdv_expansion_at(eps, x);
            EXPECT_LE(std::abs(diff), 10.0 * eps * eps);
        }
    }
    // the ε² terms differ: mean levels C₁/2 vs -3
    EXPECT_GT(std::abs(whitham_expansion_at(0.01, std::numbers::pi / 2) - kdv_expansion_at(0.01, std::numbers::pi / 2)),
              1e-5);
}

TEST(KdVCoefficients, SameStructureAsWhitham) {
    const auto c = kdv_coefficients();
    EXPECT_DOUBLE_EQ(c.mu_star, 5.0 / 6.0);
    EXPECT_DOUBLE_EQ(0.5 * c.c1, -3.0);
    EXPECT_DOUBLE_EQ(c.c2, 1.0);
    EXPECT_DOUBLE_EQ(kdv_expansion_speed(0.1), 5.0 / 6.0 - 0.05);
}
