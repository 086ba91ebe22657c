#include "nematic/kinetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace nematic;

TEST(Kinetic, CellMeasuresSumToOne) {
    for (int d : {2, 3, 4}) {
        const auto V = cell_measures(64, d);
        EXPECT_NEAR(std::accumulate(V.begin(), V.end(), 0.0), 1.0, 1e-14);
    }
    EXPECT_THROW(cell_measures(2, 3), std::invalid_argument);
}

TEST(Kinetic, DensitiesAreNormalized) {
    EXPECT_NEAR(uniform_density(50, 3).mass(), 1.0, 1e-14);
    EXPECT_NEAR(bump_density(50, 3, 1.0, 0.3).mass(), 1.0, 1e-13);
    EXPECT_NEAR(equilibrium_density(50, 2, 4.0, true).mass(), 1.0, 1e-13);
    EXPECT_THROW(bump_density(50, 3, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(equilibrium_density(50, 3, 4.0, true), std::invalid_argument);
}

TEST(Kinetic, EquilibriumIsStationary) {
    const AngularDensity f = equilibrium_density(100, 3, 4.0);
    for (double g : gamma_apply(f, 4.0, 1.0, AxisPolicy::fixed)) EXPECT_NEAR(g, 0.0, 1e-12);
    EXPECT_NEAR(entropy_dissipation(f, 4.0, 1.0), 0.0, 1e-14);
}

TEST(Kinetic, OperatorConservesMassAndDissipates) {
    const AngularDensity f = bump_density(120, 3, 0.9, 0.25);
    const auto g = gamma_apply(f, 2.0, 1.5, AxisPolicy::fixed);
    const auto V = cell_measures(120, 3);
    double m = 0.0;
    for (int j = 0; j < 120; ++j) m += g[j] * V[j];
    EXPECT_NEAR(m, 0.0, 1e-12);
    const double diss = entropy_dissipation(f, 2.0, 1.5);
    EXPECT_LT(diss, 0.0);
    EXPECT_NEAR(entropy_dissipation_direct(f, 2.0, 1.5), diss, 1e-2 * std::abs(diss));
}

TEST(Kinetic, SelfConsistentAxis) {
    EXPECT_FALSE(choose_axis(bump_density(80, 3, 0.2, 0.2), AxisPolicy::self_consistent).transverse);
    EXPECT_TRUE(choose_axis(bump_density(80, 2, 1.5708, 0.2), AxisPolicy::self_consistent).transverse);
    EXPECT_THROW(choose_axis(bump_density(80, 3, 1.5708, 0.2), AxisPolicy::self_consistent),
                 DegenerateLeadingEigenvalue);
    try {
        choose_axis(uniform_density(80, 3), AxisPolicy::self_consistent);
        FAIL() << "uniform density must be degenerate";
    } catch (const DegenerateLeadingEigenvalue& e) {
        EXPECT_EQ(e.code(), ExitCode::degenerate);
    }
}

TEST(Kinetic, EvolutionRelaxesMonotonically) {
    const AngularDensity f0 = bump_density(100, 3, 0.6, 0.3);
    const KineticResult r = evolve(f0, 4.0, 1.0, 1e-2, 6.0, AxisPolicy::self_consistent, 20);
    ASSERT_GE(r.samples.size(), 3u);
    for (std::size_t i = 1; i < r.samples.size(); ++i) {
        EXPECT_LE(r.samples[i].entropy, r.samples[i - 1].entropy + 1e-14);
        EXPECT_LE(r.samples[i].dissipation, 0.0);
    }
    EXPECT_LT(r.samples.back().l1_to_equilibrium, 1e-2);
    EXPECT_LT(r.max_mass_drift_per_step, 1e-12);
    for (double v : r.f.f) EXPECT_GE(v, 0.0);
    EXPECT_THROW(evolve(f0, 4.0, 1.0, 0.0, 1.0, AxisPolicy::fixed), std::invalid_argument);
}

TEST(Kinetic, UniformStateIsIsotropicFixedPoint) {
    const AngularDensity f0 = uniform_density(64, 3);
    const KineticResult r = evolve(f0, 4.0, 1.0, 1e-2, 0.1, AxisPolicy::self_consistent);
    EXPECT_EQ(r.degenerate_steps, 10);
    EXPECT_EQ(r.f.f, f0.f);
}

TEST(Kinetic, DiscreteDissipationFormsConverge) {
    double prev = 0.0;
    for (int n : {50, 100, 200}) {
        const AngularDensity f = bump_density(n, 3, 0.9, 0.25);
        const double gap = std::abs(entropy_dissipation(f, 2.0, 1.0) - entropy_dissipation_direct(f, 2.0, 1.0));
        if (n > 50) {
            EXPECT_LT(gap, 0.35 * prev) << "n=" << n;
        }
        prev = gap;
    }
}
