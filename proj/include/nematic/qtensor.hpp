#pragma once

#include "nematic/common.hpp"
#include "nematic/sphere.hpp"

#include <optional>
#include <vector>

namespace nematic {

struct QTensor {
    Mat m;
    int dim() const { return static_cast<int>(m.rows()); }
};

QTensor qtensor_from_orientations(const std::vector<Vec>& orientations, const std::vector<double>& weights);
QTensor qtensor_from_density(const SphereQuadrature& quad, const std::vector<double>& f);

// Eigenpairs of a symmetric matrix, eigenvalues sorted in decreasing order.
struct SymmetricEigen {
    Vec values;
    Mat vectors;  // columns
};

// Cyclic Jacobi rotations with a fixed (p, q) sweep order.
SymmetricEigen jacobi_eigen(const Mat& a, int max_sweeps = 64);

struct SpectralInfo {
    Direction direction;
    double leading_eigenvalue;
    double gap;
};

// Throws DegenerateLeadingEigenvalue when the gap is below gap_floor.
SpectralInfo leading_direction(const QTensor& q, const std::optional<Direction>& prev = std::nullopt,
                               double gap_floor = Tolerances::gap_floor);

struct EquilibriumEigenvalues {
    double parallel;
    double transverse;
};

EquilibriumEigenvalues equilibrium_eigenvalues(double kappa, int d);

}  // namespace nematic
