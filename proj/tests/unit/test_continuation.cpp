#include "whitham/asymptotics.hpp"
#include "whitham/continuation.hpp"
#include "whitham/error.hpp"
#include "whitham/steady.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

using namespace whitham;

namespace {

ContinuationConfig quick_config(std::size_t n, double height_max) {
    ContinuationConfig cfg;
    cfg.n_initial = n;
    cfg.height_max = height_max;
    cfg.verify_points = false;
    return cfg;
}

const BranchPoint* nearest_height(const Branch& branch, double h) {
    const BranchPoint* best = nullptr;
    for (const auto& p : branch.points) {
        if (!best || std::abs(p.height - h) < std::abs(best->height - h)) best = &p;
    }
    return best;
}

}  // namespace

TEST(BifurcationSpeed, WhithamAndKdV) {
    EXPECT_NEAR(bifurcation_speed(DispersionModel::whitham(), 1).mu, 0.87, 5e-3);
    EXPECT_EQ(bifurcation_speed(DispersionModel::kdv(), 1).mu, 5.0 / 6.0);
    EXPECT_NEAR(bifurcation_speed(DispersionModel::whitham(), 2).mu, 0.6943, 5e-5);
    EXPECT_FALSE(bifurcation_speed(DispersionModel::kdv(), 2).nonphysical);
    const auto k3 = bifurcation_speed(DispersionModel::kdv(), 3);
    EXPECT_TRUE(k3.nonphysical);
    EXPECT_LE(k3.mu, 0.0);
    EXPECT_THROW(bifurcation_speed(DispersionModel::whitham(), 0), std::invalid_argument);
}

TEST(SmallAmplitudeGuess, Examples) {
    const auto zero = small_amplitude_guess(DispersionModel::whitham(), 1, 0.0, 8);
    for (double v : zero.values) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(zero.mu, std::sqrt(std::tanh(1.0)));

    const auto c = whitham_coefficients();
    EXPECT_NEAR(small_amplitude_guess(DispersionModel::whitham(), 1, 0.01, 8).mu,
                c.mu_star + 1e-4 * (c.c1 + c.c2), 1e-15);

    const CollocationGrid grid(8);
    const auto kdv = small_amplitude_guess(DispersionModel::kdv(), 1, 0.01, 8);
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(kdv.values[i], 0.01 * std::cos(grid[i]) + 1e-4 * (std::cos(2 * grid[i]) - 3), 1e-16);
    }
    EXPECT_LT(kdv.mu, 5.0 / 6.0);

    const auto k2 = small_amplitude_guess(DispersionModel::whitham(), 2, 0.01, 8);
    EXPECT_LT(k2.mu, bifurcation_speed(DispersionModel::whitham(), 2).mu);
    EXPECT_NEAR(k2.values[0], 0.01 * std::cos(2 * grid[0]), 1e-16);
}

TEST(ContinuationConfig, RejectsNonPositiveSteps) {
    ContinuationConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.mu_step = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.height_step = -1.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.refine_factor = 1;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(TraceBranch, SmallAmplitudeMatchesExpansion) {
    const auto branch = trace_branch(DispersionModel::whitham(), quick_config(32, 0.05));
    ASSERT_GE(branch.points.size(), 3u);
    EXPECT_EQ(branch.termination, Termination::HeightLimit);
    for (const auto& p : branch.points) {
        EXPECT_NEAR(p.mu, whitham_expansion_speed(p.height / 2), 1e-3);
        EXPECT_TRUE(p.report.converged);
    }
}

TEST(TraceBranch, AsymptoticOrderUnderHeightHalving) {
    // Fixed-height solves at h and h/2 measured against μ(ε = h/2).
    const auto mu_star = whitham_coefficients().mu_star;
    std::vector<double> errs;
    for (double h : {0.04, 0.02}) {
        const auto guess = small_amplitude_guess(DispersionModel::whitham(), 1, h / 2, 32);
        const auto sol = newton_fixed_height(guess.values, guess.mu, h, DispersionModel::whitham());
        ASSERT_TRUE(sol.report.converged);
        ASSERT_LT(sol.profile.mu, mu_star);
        errs.push_back(std::abs(sol.profile.mu - whitham_expansion_speed(h / 2)));
    }
    EXPECT_GE(std::log2(errs[0] / errs[1]), 2.5);
}

TEST(TraceBranch, CoarseGridPointAtReferenceHeight) {
    ContinuationConfig cfg = quick_config(16, 0.35);
    const auto branch = trace_branch(DispersionModel::whitham(), cfg);
    const auto* p = nearest_height(branch, 0.3368);
    ASSERT_NE(p, nullptr);
    EXPECT_NEAR(p->height, 0.3368, 5e-3);
    EXPECT_NEAR(p->mu, 0.789, 5e-3);

    // correct onto the exact reference height from the traced neighbor
    const auto sol = newton_fixed_height(p->profile.values(), p->mu, 0.3368, DispersionModel::whitham());
    ASSERT_TRUE(sol.report.converged);
    EXPECT_NEAR(sol.profile.mu, 0.789, 5e-3);
}

TEST(TraceBranch, BranchInvariants) {
    ContinuationConfig cfg = quick_config(64, 0.5);
    const auto branch = trace_branch(DispersionModel::whitham(), cfg);
    const double mu1 = bifurcation_speed(DispersionModel::whitham(), 1).mu;
    ASSERT_GE(branch.points.size(), 10u);
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
        const auto& p = branch.points[i];
        EXPECT_TRUE(p.report.converged);
        EXPECT_LT(p.mu, mu1);
        EXPECT_GT(p.mu, 0.0);
        const auto v = p.profile.values();
        EXPECT_LT(*std::max_element(v.begin(), v.end()), p.mu / 2);
        if (i > 0) EXPECT_GT(p.height, branch.points[i - 1].height);
    }
    EXPECT_EQ(branch.points.back().param_mode, ParamMode::Height);
}

TEST(TraceBranch, PrincipalBranchHasOneTurningPoint) {
    ContinuationConfig cfg = quick_config(64, 0.55);
    const auto branch = trace_branch(DispersionModel::whitham(), cfg);
    ASSERT_TRUE(branch.turning_point_index.has_value());
    int sign_changes = 0;
    for (std::size_t i = 2; i < branch.points.size(); ++i) {
        const double d1 = branch.points[i - 1].mu - branch.points[i - 2].mu;
        const double d2 = branch.points[i].mu - branch.points[i - 1].mu;
        if (d1 * d2 < 0) ++sign_changes;
    }
    EXPECT_EQ(sign_changes, 1);
    const std::size_t t = *branch.turning_point_index;
    ASSERT_GT(t, 0u);
    ASSERT_LT(t + 1, branch.points.size());
    EXPECT_LT(branch.points[t].mu, branch.points[t - 1].mu);
    EXPECT_GT(branch.points[t + 1].mu, branch.points[t].mu);
    EXPECT_NEAR(branch.points[t].mu, 0.766, 3e-3);
}

TEST(TraceBranch, KdVBranchIsMonotone) {
    ContinuationConfig cfg = quick_config(64, 1.0);
    cfg.height_step = 0.04;
    const auto branch = trace_branch(DispersionModel::kdv(), cfg);
    EXPECT_EQ(branch.termination, Termination::HeightLimit);
    EXPECT_FALSE(branch.turning_point_index.has_value());
    EXPECT_GT(branch.points.back().height, 0.9);
    for (std::size_t i = 1; i < branch.points.size(); ++i) {
        EXPECT_LT(branch.points[i].mu, branch.points[i - 1].mu);
    }
}

TEST(TraceBranch, HeightLimitBelowFirstStepGivesSinglePoint) {
    ContinuationConfig cfg = quick_config(16, 0.0105);
    const auto branch = trace_branch(DispersionModel::whitham(), cfg);
    EXPECT_EQ(branch.points.size(), 1u);
    EXPECT_EQ(branch.termination, Termination::HeightLimit);
}

TEST(TraceBranch, MaxPointsTermination) {
    ContinuationConfig cfg = quick_config(16, 0.5);
    cfg.max_points = 3;
    const auto branch = trace_branch(DispersionModel::whitham(), cfg);
    EXPECT_EQ(branch.points.size(), 3u);
    EXPECT_EQ(branch.termination, Termination::MaxPoints);
}

TEST(TraceBranch, SecondBranchStartsAtItsBifurcationSpeed) {
    ContinuationConfig cfg = quick_config(32, 0.1);
    cfg.k = 2;
    const auto branch = trace_branch(DispersionModel::whitham(), cfg);
    ASSERT_GE(branch.points.size(), 2u);
    const double mu2 = bifurcation_speed(DispersionModel::whitham(), 2).mu;
    EXPECT_NEAR(branch.points.front().mu, mu2, 1e-3);
    for (const auto& p : branch.points) {
        EXPECT_LT(p.mu, mu2);
        // k = 2 waves are π-periodic: odd cosine modes vanish
        const auto& c = p.profile.spectrum.coeffs;
        for (std::size_t l = 1; l < c.size(); l += 2) EXPECT_LT(std::abs(c[l]), 1e-10);
    }
}

TEST(VerifyBranchPoint, SmoothAndCorruptedWaves) {
    const auto branch = trace_branch(DispersionModel::whitham(), quick_config(32, 0.05));
    const auto* p = nearest_height(branch, 0.05);
    ASSERT_NE(p, nullptr);
    EXPECT_TRUE(verify_branch_point(*p, 2));

    BranchPoint corrupt = *p;
    for (double& c : corrupt.profile.spectrum.coeffs) c += 0.1;
    EXPECT_FALSE(verify_branch_point(corrupt, 2, {}, 1e-6));

    EXPECT_THROW(verify_branch_point(*p, 1), std::invalid_argument);
}

TEST(VerifyBranchPoint, SteepPointOnFineGrid) {
    ContinuationConfig cfg = quick_config(64, 0.41);
    const auto branch = trace_branch(DispersionModel::whitham(), cfg);
    const auto& last = branch.points.back();
    const auto sol = newton_fixed_height(last.profile.values(), last.mu, 0.4152, DispersionModel::whitham());
    ASSERT_TRUE(sol.report.converged);
    EXPECT_NEAR(sol.profile.mu, 0.7715, 5e-3);
    BranchPoint point{sol.profile.mu, waveheight(sol.profile), sol.profile, ParamMode::Height, sol.report};
    EXPECT_TRUE(verify_branch_point(point, 2));
}

TEST(TraceBranch, StartFailureRaises) {
    ContinuationConfig cfg = quick_config(16, 0.2);
    cfg.newton.max_iter = 1;
    cfg.newton.tol = 1e-300;
    EXPECT_THROW(trace_branch(DispersionModel::whitham(), cfg), BranchStartError);
}

TEST(ParamModeText, Roundtrip) {
    EXPECT_EQ(parse_param_mode(to_string(ParamMode::Speed)), ParamMode::Speed);
    EXPECT_EQ(parse_param_mode(to_string(ParamMode::Height)), ParamMode::Height);
    EXPECT_THROW(parse_param_mode("arclength"), ParseError);
    EXPECT_EQ(to_string(Termination::RefinementFailure), "refinement_failure");
}
