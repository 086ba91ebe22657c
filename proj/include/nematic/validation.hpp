#pragma once

#include "nematic/common.hpp"
#include "nematic/gci.hpp"
#include "nematic/ibm.hpp"
#include "nematic/qtensor.hpp"
#include "nematic/spherical_ops.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nematic {

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ------------------------------------------------------------------ BVP residual and order

struct BvpCaseReport {
    RadialKind kind = RadialKind::h;
    double kappa = 0.0;
    int d = 3;
    double residual_fine = 0.0;           // max strong residual at the fine resolution
    std::vector<int> levels;              // coarse resolutions used for the order fit
    std::vector<double> level_residuals;
    double order = 0.0;
};

// Strong residuals of all six profiles at n_fine and the observed order over the coarse levels.
std::vector<BvpCaseReport> bvp_residual_study(const std::vector<double>& kappas, const std::vector<int>& ds,
                                              int n_fine, const std::vector<int>& levels,
                                              int degree = kDefaultBvpDegree);

// ------------------------------------------------------------------ local averaging expansion

struct ScalingReport {
    std::vector<double> eps;     // strictly decreasing
    std::vector<double> errors;  // max over probe points of ||Q_{eps R, f} - Q_f||_F
    double slope = 0.0;
};

// Phase-space density f(x, w) = rho(x) M_{u(x)}(w) on the periodic unit square (d = 2).
struct PhaseSpaceDensity {
    std::function<double(const Vec&)> rho;
    std::function<Vec(const Vec&)> u;  // unit vector field
    double kappa = 2.0;
};

// rho = 1 + sin(2 pi x0) / 2, u rotating slowly in x1.
PhaseSpaceDensity default_phase_space_density(double kappa = 2.0);

struct ScalingOptions {
    double R = 0.1;
    KernelKind kernel = KernelKind::indicator;
    double kernel_shift = 0.0;  // kernel centre offset in units of eps R (nonzero breaks the symmetry)
    int n_radial = 48;
    int n_angular = 96;
    std::vector<Vec> probes;    // defaults to three fixed points when empty
};

// Q_f(x) = int f(x, w) (w w^T - I/d) dw, evaluated analytically for local equilibria.
Mat local_equilibrium_qtensor(const PhaseSpaceDensity& f, const EquilibriumEigenvalues& ev, const Vec& x);

ScalingReport eps_expansion_study(const PhaseSpaceDensity& f, const std::vector<double>& eps,
                                  const ScalingOptions& opt = {});

// ------------------------------------------------------------------ GCI orthogonality

struct GciReport {
    Vec orthogonality;      // int Gamma(f) psi_{u_f} dw
    double orthogonality_norm = 0.0;
    double mass_integral = 0.0;  // int Gamma(f) dw
    Direction u_f = Direction::axis(3, 2);
    std::size_t nodes = 0;
};

// Gamma(f) = D Gamma_bar(f, u_f) with Gamma_bar evaluated pointwise from the analytic jet of f.
GciReport gci_orthogonality_check(const ExpQuadraticDensity& f, const RadialSolution& h, double D,
                                  int n_theta = 100, int n_azimuth = 100);

// Random smooth test density: A symmetric with entries of size `scale`, b of size scale / 2.
ExpQuadraticDensity random_test_density(int d, std::uint64_t seed, int index, double scale = 1.0);

// ------------------------------------------------------------------ first-order corrector

struct CorrectorResidualReport {
    std::array<double, 5> channel{};  // sup over nodes of |Gamma_bar^*(T_i) - S_i|
    double total = 0.0;               // sup over nodes of the summed residual
};

// Gamma_bar^* applied to each ansatz channel through analytic ambient jets, compared with its source term.
CorrectorResidualReport corrector_residual(const CorrectorInputs& in, const RadialBundle& bundle, int n_theta = 48,
                                           int n_azimuth = 48);

// Inputs with exactly one nonzero channel: 0 transverse grad rho, 1 convective (u.grad)u, 2 parallel grad rho,
// 3 off-diagonal transverse gradient of u, 4 divergence.
CorrectorInputs channel_inputs(int channel, int d);

// ------------------------------------------------------------------ IBM equilibrium statistics

struct EquilibriumStatsReport {
    int N = 0;
    double kappa = 0.0;
    double ks = 0.0;
    double threshold = 0.0;  // 0.03 scaled by sqrt(1e4 / N)
    bool underpowered = false;
    bool pass = false;
    Direction mean_direction = Direction::axis(2, 0);
};

// CDF of r = w.u under M_u: int_{arccos r}^{pi} e^{kappa cos^2/2} sin^{d-2} / total.
double equilibrium_marginal_cdf(double r, double kappa, int d);

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Global-kernel run for time T; kappa = nu / D.
EquilibriumStatsReport ibm_equilibrium_statistics(IbmConfig cfg, double T, ParticleState* final_state = nullptr);

// ------------------------------------------------------------------ particle versus macro

struct CrossScaleOptions {
    int N = 100000;
    double eps = 0.1;
    double kappa = 4.0;
    double D = 1.0;
    double R = 0.1;         // microscopic sensing radius
    double dt = 0.02;       // microscopic time step
    double T_macro = 0.1;
    double amplitude = 0.5;
    bool u_across_gradient = true;  // u = e1 (across the density gradient) or e0 (along it)
    int bins = 32;
    int macro_n = 64;
    int bvp_n = 256;
    std::uint64_t seed = 7;
};

struct CrossScaleReport {
    double eps = 0.0;
    int N = 0;
    double T_macro = 0.0;
    double density_distance = 0.0;     // ||rho_ibm - rho_macro|| / ||rho_macro||
    double perturbation_distance = 0.0; // ||rho_ibm - rho_macro|| / ||rho_macro - 1||
    double frozen_distance = 0.0;      // ||rho_0 - rho_macro|| / ||rho_macro - 1||
    double direction_distance = 0.0;   // mean arccos|u_ibm . u_macro| over unmasked cells
    std::vector<double> rho_ibm;       // bin profiles along x0
    std::vector<double> rho_macro;
    double seconds = 0.0;
};

// IBM in a box of side 1/eps started from local equilibrium, compared with the macro system on the unit box.
CrossScaleReport particle_vs_macro(const CrossScaleOptions& opt);

}  // namespace nematic
