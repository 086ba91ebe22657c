#pragma once

#include "nematic/common.hpp"

#include <vector>

namespace nematic {

enum class AxisPolicy { fixed, self_consistent };

// Axisymmetric angular density on n uniform cells of [0, pi]; mass uses sin^{d-2}(theta) / W_{d-2}.
struct AngularDensity {
    int d = 3;
    std::vector<double> f;  // cell averages

    int n() const { return static_cast<int>(f.size()); }
    double dtheta() const;
    double center(int j) const;
    double face(int j) const;  // theta_{j - 1/2}, j = 0..n
    double mass() const;
};

// Normalized cell measures of the n cells.
std::vector<double> cell_measures(int n, int d);

AngularDensity uniform_density(int n, int d);
// Gaussian bump exp(-(theta - center)^2 / (2 width^2)), normalized.
AngularDensity bump_density(int n, int d, double center, double width);
// Equilibrium about the axis (transverse = false) or about the perpendicular plane (d = 2 only).
AngularDensity equilibrium_density(int n, int d, double kappa, bool transverse = false);

// Which Q-tensor eigen-direction the equilibrium is centred on.
struct AxisChoice {
    bool transverse = false;
};

// Axial Q component q = int cos^2 - 1/d; axis when q > 0, transverse plane when q < 0 and d = 2,
// DegenerateLeadingEigenvalue otherwise.
AxisChoice choose_axis(const AngularDensity& f, AxisPolicy policy);

// Discrete equilibrium on cell centres and faces, normalized so that sum M_j V_j = 1.
struct DiscreteEquilibrium {
    std::vector<double> center;
    std::vector<double> face;  // n + 1
};
DiscreteEquilibrium discrete_equilibrium(int n, int d, double kappa, bool transverse);

// Conservative finite-volume Gamma(f) = D div(M grad(f/M)).
std::vector<double> gamma_apply(const AngularDensity& f, double kappa, double D, AxisPolicy policy);

struct KineticSample {
    double time;
    double l1_to_equilibrium;
    double entropy;      // 1/2 int f^2 / M
    double dissipation;  // int Gamma(f) f/M (manifestly non-positive form)
    double mass;
};

struct KineticResult {
    AngularDensity f;
    std::vector<KineticSample> samples;
    int degenerate_steps = 0;
    double max_mass_drift_per_step = 0.0;
};

// Backward Euler in g = f/M with the Chang-Cooper flux; unconditionally stable and positivity preserving.
KineticResult evolve(const AngularDensity& f0, double kappa, double D, double dt, double T, AxisPolicy policy,
                     int sample_every = 1);

// -D sum_faces S M (dg/dtheta)^2 dtheta (non-positive).
double entropy_dissipation(const AngularDensity& f, double kappa, double D, AxisPolicy policy = AxisPolicy::fixed);
// sum_j Gamma(f)_j (f_j / M(theta_j)) V_j with M sampled pointwise from its continuous normalization.
double entropy_dissipation_direct(const AngularDensity& f, double kappa, double D,
                                  AxisPolicy policy = AxisPolicy::fixed);

double entropy_functional(const AngularDensity& f, double kappa, AxisPolicy policy = AxisPolicy::fixed);
// sum_j |f_j - m M_j| V_j with m the mass of f.
double l1_distance_to_equilibrium(const AngularDensity& f, double kappa, AxisPolicy policy = AxisPolicy::fixed);

}  // namespace nematic
