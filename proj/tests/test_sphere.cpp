#include "nematic/quadrature.hpp"
#include "nematic/sphere.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nematic;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

}  // namespace

TEST(Direction, NormalizesAndRejectsZero) {
    const Direction w = Direction::normalized(v3(3, 0, 4));
    EXPECT_NEAR(w.vec().norm(), 1.0, 1e-15);
    EXPECT_NEAR(w[2], 0.8, 1e-15);
    EXPECT_THROW(Direction::normalized(Vec::Zero(3)), std::invalid_argument);
    EXPECT_THROW(Direction::from_unit(v3(1, 1, 0)), std::invalid_argument);
    EXPECT_THROW(Direction::normalized(Vec::Ones(1)), DimensionMismatch);
}

TEST(Direction, PolarDecompositionAndProjection) {
    const Direction u = Direction::axis(3, 2);
    const Direction w = Direction::normalized(v3(1, 2, 2));
    const PolarParts pp = polar_decompose(w, u);
    EXPECT_NEAR(pp.cos_theta, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(pp.perp.dot(u.vec()), 0.0, 1e-15);
    EXPECT_NEAR((pp.cos_theta * u.vec() + pp.perp - w.vec()).norm(), 0.0, 1e-15);
    const Mat P = tangent_projector(u);
    EXPECT_NEAR((P * P - P).norm(), 0.0, 1e-15);
    const Mat B = orthonormal_complement(Direction::normalized(v3(0.3, -0.5, 0.8)));
    EXPECT_NEAR((B.transpose() * B - Mat::Identity(2, 2)).norm(), 0.0, 1e-14);
}

TEST(Quadrature, GaussLegendreExactness) {
    const Rule1D r = gauss_legendre(8, 0.0, 2.0);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * std::pow(r.x[i], 15);
    EXPECT_NEAR(s, std::pow(2.0, 16) / 16.0, 1e-9);
}

TEST(Quadrature, GegenbauerWeight) {
    // int (1 - x^2)^{1/2} x^2 dx = pi / 8
    const Rule1D r = gauss_gegenbauer(6, 0.5);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * r.x[i] * r.x[i];
    EXPECT_NEAR(s, std::acos(-1.0) / 8.0, 1e-13);
}

TEST(Quadrature, SphereMomentsExact) {
    for (int d : {2, 3, 4}) {
        const SphereQuadrature q = build_quadrature(d, Direction::axis(d, d - 1), 12, 12);
        EXPECT_NEAR(q.integrate([](const Vec&) { return 1.0; }), 1.0, 1e-14);
        EXPECT_NEAR(q.integrate([](const Vec& w) { return w[0] * w[0]; }), 1.0 / d, 1e-14);
        EXPECT_NEAR(q.integrate([](const Vec& w) { return w[0] * w[1]; }), 0.0, 1e-14);
        EXPECT_NEAR(q.integrate([](const Vec& w) { return std::pow(w[0], 4); }), 3.0 / (d * (d + 2.0)), 1e-14);
    }
}

TEST(Sphere, SigmaIsFullySymmetric) {
    const Tensor4 s = sigma_tensor(Direction::normalized(v3(0.2, -0.4, 0.9)));
    EXPECT_LT(s.max_asymmetry(), 1e-15);
}

TEST(Sphere, MomentsMatchPrefactors) {
    const Direction u = Direction::normalized(v3(0.1, 0.7, -0.3));
    const SphereQuadrature q = build_quadrature(3, u, 24, 24);
    const RadialProfile a = [](double r) { return std::exp(r * r) * (1.0 + r); };
    const Mat m2 = angular_moment2(a, u, q);
    EXPECT_NEAR((m2 - moment_prefactor(a, 2, 3) * tangent_projector(u)).norm(), 0.0, 1e-12);
    const Tensor4 m4 = angular_moment4(a, u, q);
    const Tensor4 sig = sigma_tensor(u);
    const double c4 = moment_prefactor(a, 4, 3);
    double worst = 0.0;
    for (std::size_t i = 0; i < m4.data().size(); ++i) worst = std::max(worst, std::abs(m4.data()[i] - c4 * sig.data()[i]));
    EXPECT_LT(worst, 1e-12);
    EXPECT_LT(angular_moment1([](double r) { return r * r; }, u, q).norm(), 1e-14);
}
