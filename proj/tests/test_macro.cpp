#include "nematic/macro.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nematic;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const CoefficientSet& coeffs2() {
    static const CoefficientSet c = compute_coefficients(solve_bundle(2.0, 2, 128));
    return c;
}

MacroField wave(int n) {
    return sample_field(
        2, n, 1.0, [](const Vec& x) { return 1.0 + 0.2 * std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]); },
        [](const Vec& x) {
            const double a = 0.4 * std::sin(kTwoPi * x[0]) + 0.3 * std::cos(kTwoPi * x[1]);
            Vec v(2);
            v << std::cos(a), std::sin(a);
            return v;
        });
}

MacroConfig config_for(const MacroField& f) {
    MacroConfig cfg;
    cfg.coeffs = coeffs2();
    cfg.dt = max_stable_dt(cfg.coeffs, f.dx, cfg.safety);
    return cfg;
}

}  // namespace

TEST(Macro, FieldIndexingRoundTrips) {
    const MacroField f = wave(8);
    EXPECT_EQ(f.nodes(), 64u);
    for (std::size_t p = 0; p < f.nodes(); ++p) EXPECT_EQ(f.index(f.coords(p)), p);
    EXPECT_EQ(f.index({-1, 0, 0}), f.index({7, 0, 0}));
}

TEST(Macro, UniformStateIsStationary) {
    const MacroField f = sample_field(
        2, 16, 1.0, [](const Vec&) { return 1.0; },
        [](const Vec&) {
            Vec v(2);
            v << 0.6, 0.8;
            return v;
        });
    const MacroField g = step(f, config_for(f));
    EXPECT_LT(field_max_difference(f, g), 1e-15);
}

TEST(Macro, MassAndUnitNormPreserved) {
    MacroField f = wave(32);
    const MacroConfig cfg = config_for(f);
    const double m0 = f.mass();
    for (int i = 0; i < 50; ++i) f = step(f, cfg);
    EXPECT_NEAR(f.mass(), m0, 1e-12 * m0);
    for (std::size_t p = 0; p < f.nodes(); ++p) EXPECT_NEAR(std::hypot(f.u[2 * p], f.u[2 * p + 1]), 1.0, 1e-14);
}

TEST(Macro, NematicSymmetry) {
    const MacroField f = wave(24);
    const MacroConfig cfg = config_for(f);
    const MacroField a = negate_direction(step(f, cfg));
    const MacroField b = step(negate_direction(f), cfg);
    EXPECT_LE(field_max_difference(a, b), 1e-14);
}

TEST(Macro, RotationCovariance) {
    const MacroField f = wave(24);
    const MacroConfig cfg = config_for(f);
    const MacroField a = rotate90(step(f, cfg));
    const MacroField b = step(rotate90(f), cfg);
    EXPECT_LE(field_max_difference(a, b), 1e-12);
}

TEST(Macro, CflViolationIsConfigError) {
    const MacroField f = wave(16);
    MacroConfig cfg = config_for(f);
    cfg.dt *= 1.5;
    try {
        step(f, cfg);
        FAIL() << "expected a CFL error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ExitCode::config);
    }
}

TEST(Macro, NegativeDensityIsNumericalFailure) {
    MacroField f = wave(16);
    f.rho[5] = -0.5;
    EXPECT_THROW(step(f, config_for(f)), NumericalFailure);
}

TEST(Macro, DimensionMismatchRejected) {
    const MacroField f = wave(16);
    MacroConfig cfg = config_for(f);
    cfg.coeffs = compute_coefficients(solve_bundle(2.0, 3, 64));
    EXPECT_THROW(step(f, cfg), DimensionMismatch);
}

TEST(Macro, IdentityResidualShrinksWithResolution) {
    double prev = 0.0;
    for (int n : {32, 64}) {
        double worst = 0.0;
        for (double r : appendix_identity_residual(wave(n))) worst = std::max(worst, r);
        if (n == 64) {
            EXPECT_LT(worst, 0.4 * prev);
        }
        prev = worst;
    }
    const AuxiliaryReport a = auxiliary_operator_checks(wave(32));
    const AuxiliaryReport b = auxiliary_operator_checks(wave(64));
    EXPECT_LT(b.div_trace, 0.4 * a.div_trace);
    EXPECT_LT(b.tangency, 0.4 * a.tangency);
    EXPECT_LT(b.sigma_hessian, 0.4 * a.sigma_hessian);
}
