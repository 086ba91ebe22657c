#include "nematic/gci.hpp"
#include "nematic/qtensor.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace nematic;

TEST(QTensor, SharedOrientationGivesThatAxis) {
    Vec w(3);
    w << 0.6, 0.0, 0.8;
    const QTensor q = qtensor_from_orientations({w, -w, w}, {1.0, 2.0, 0.5});
    const SpectralInfo si = leading_direction(q);
    EXPECT_NEAR(std::abs(si.direction.dot(w)), 1.0, 1e-14);
    EXPECT_NEAR(q.m.trace(), 0.0, 1e-15);
}

TEST(QTensor, DegenerateLeadingEigenvalueThrows) {
    const QTensor q = qtensor_from_orientations({Direction::axis(2, 0).vec(), Direction::axis(2, 1).vec()}, {1.0, 1.0});
    EXPECT_THROW(leading_direction(q), DegenerateLeadingEigenvalue);
    try {
        leading_direction(q);
    } catch (const DegenerateLeadingEigenvalue& e) {
        EXPECT_EQ(e.code(), ExitCode::degenerate);
    }
}

TEST(QTensor, SignFollowsPrevious) {
    Vec w(2);
    w << 0.0, 1.0;
    const QTensor q = qtensor_from_orientations({w}, {1.0});
    const Direction prev = Direction::axis(2, 1);
    EXPECT_NEAR(leading_direction(q, -prev).direction.dot(prev), -1.0, 1e-15);
    EXPECT_NEAR(leading_direction(q, prev).direction.dot(prev), 1.0, 1e-15);
}

TEST(QTensor, JacobiMatchesReference) {
    Mat a(4, 4);
    a << 4, 1, -2, 0.5, 1, 3, 0.2, 0.1, -2, 0.2, 1, 0.7, 0.5, 0.1, 0.7, -1;
    const SymmetricEigen es = jacobi_eigen(a);
    Eigen::SelfAdjointEigenSolver<Mat> ref(a);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(es.values[i], ref.eigenvalues()[3 - i], 1e-13);
    EXPECT_NEAR((a * es.vectors - es.vectors * es.values.asDiagonal()).norm(), 0.0, 1e-12);
}

TEST(QTensor, EquilibriumEigenvalues) {
    EXPECT_NEAR(equilibrium_eigenvalues(0.0, 3).parallel, 0.0, 1e-15);
    for (int d : {2, 3, 4}) {
        const auto ev = equilibrium_eigenvalues(5.0, d);
        EXPECT_GT(ev.parallel, 0.0);
        EXPECT_NEAR(ev.parallel + (d - 1) * ev.transverse, 0.0, 1e-15);
    }
    EXPECT_GT(equilibrium_eigenvalues(10.0, 2).parallel, equilibrium_eigenvalues(1.0, 2).parallel);
}

TEST(QTensor, EquilibriumDensityHasAxisAsLeadingEigenvector) {
    Vec uv(3);
    uv << 0.0, 0.6, 0.8;
    const Direction u = Direction::from_unit(uv);
    const SphereQuadrature quad = build_quadrature(3, Direction::axis(3, 0), 40, 40);
    const Equilibrium M = make_equilibrium(2.0, 3);
    std::vector<double> f(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) f[i] = M(u.dot(quad.nodes[i]));
    const QTensor q = qtensor_from_density(quad, f);
    const SpectralInfo si = leading_direction(q);
    const auto ev = equilibrium_eigenvalues(2.0, 3);
    EXPECT_NEAR(std::abs(si.direction.dot(u)), 1.0, 1e-12);
    EXPECT_NEAR(si.leading_eigenvalue, ev.parallel, 1e-12);
    const SymmetricEigen es = jacobi_eigen(q.m);
    EXPECT_NEAR(es.values[2], ev.transverse, 1e-12);
}
