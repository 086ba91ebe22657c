#include "nematic/validation.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nematic;

TEST(Validation, LogLogSlopeOfPowerLaw) {
    const std::vector<double> x = {1.0, 2.0, 4.0, 8.0};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
    EXPECT_NEAR(loglog_slope(x, y), 2.5, 1e-13);
}

TEST(Validation, HomogeneousDensityHasNoAveragingError) {
    PhaseSpaceDensity f;
    f.kappa = 2.0;
    f.rho = [](const Vec&) { return 1.3; };
    f.u = [](const Vec&) {
        Vec v(2);
        v << 0.6, 0.8;
        return v;
    };
    const ScalingReport r = eps_expansion_study(f, {0.2, 0.1, 0.05});
    for (double e : r.errors) EXPECT_LT(e, 1e-13);
}

TEST(Validation, ScalingSlopeIsQuadraticForSymmetricKernel) {
    const ScalingReport r = eps_expansion_study(default_phase_space_density(), {0.2, 0.1, 0.05});
    EXPECT_NEAR(r.slope, 2.0, 0.1);
}

TEST(Validation, EquilibriumIsOrthogonalToGci) {
    const RadialBundle b = solve_bundle(3.0, 3, 128);
    ExpQuadraticDensity f;
    f.A = 3.0 * Direction::axis(3, 1).vec() * Direction::axis(3, 1).vec().transpose();
    f.b = Vec::Zero(3);
    const GciReport r = gci_orthogonality_check(f, b.h, 1.0, 40, 40);
    EXPECT_LT(r.orthogonality_norm, 1e-10);
    EXPECT_LT(std::abs(r.mass_integral), 1e-10);
}

TEST(Validation, RandomDensitiesAreDeterministic) {
    const ExpQuadraticDensity a = random_test_density(3, 11, 2);
    const ExpQuadraticDensity b = random_test_density(3, 11, 2);
    const ExpQuadraticDensity c = random_test_density(3, 11, 3);
    EXPECT_EQ(a.A, b.A);
    EXPECT_EQ(a.b, b.b);
    EXPECT_NE(a.A, c.A);
    EXPECT_LT((a.A - a.A.transpose()).norm(), 1e-15);
}

TEST(Validation, CorrectorChannelsSolveTheirEquations) {
    const RadialBundle b = solve_bundle(2.0, 3, 256);
    for (int ch = 0; ch < 5; ++ch) {
        const CorrectorResidualReport r = corrector_residual(channel_inputs(ch, 3), b, 24, 24);
        EXPECT_LT(r.total, 1e-6) << "channel " << ch;
    }
}

TEST(Validation, MarginalCdfIsACdf) {
    EXPECT_NEAR(equilibrium_marginal_cdf(-1.0, 4.0, 2), 0.0, 1e-14);
    EXPECT_NEAR(equilibrium_marginal_cdf(1.0, 4.0, 2), 1.0, 1e-14);
    EXPECT_NEAR(equilibrium_marginal_cdf(0.0, 4.0, 3), 0.5, 1e-14);
    EXPECT_NEAR(equilibrium_marginal_cdf(0.3, 0.0, 3), 0.65, 1e-13);
}

TEST(Validation, KsStatisticOfExactQuantiles) {
    std::vector<double> s;
    for (int i = 0; i < 100; ++i) s.push_back((i + 0.5) / 100.0);
    EXPECT_NEAR(ks_statistic(s, [](double x) { return x; }), 0.005, 1e-12);
}

TEST(Validation, SmallEnsembleIsFlaggedUnderpowered) {
    IbmConfig cfg;
    cfg.N = 200;
    cfg.d = 2;
    cfg.nu = 4.0;
    cfg.D = 1.0;
    cfg.dt = 0.01;
    cfg.seed = 3;
    const EquilibriumStatsReport r = ibm_equilibrium_statistics(cfg, 0.5);
    EXPECT_TRUE(r.underpowered);
    EXPECT_NEAR(r.threshold, 0.03 * std::sqrt(1e4 / 200.0), 1e-14);
}

TEST(Validation, IsotropicEnsembleMatchesUniformMarginal) {
    IbmConfig cfg;
    cfg.N = 10000;
    cfg.d = 2;
    cfg.nu = 0.0;
    cfg.D = 1.0;
    cfg.dt = 0.01;
    cfg.seed = 5;
    const EquilibriumStatsReport r = ibm_equilibrium_statistics(cfg, 0.1);
    EXPECT_FALSE(r.underpowered);
    EXPECT_LT(r.ks, 0.02);
}
