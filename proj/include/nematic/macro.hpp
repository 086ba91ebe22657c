#pragma once

#include "nematic/common.hpp"
#include "nematic/gci.hpp"

#include <array>
#include <functional>
#include <vector>

namespace nematic {

// Periodic lattice of n^dim nodes with spacing dx; u stored node-major (u[node*dim + k]).
struct MacroField {
    int dim = 2;
    int n = 0;
    double dx = 1.0;
    double time = 0.0;
    std::vector<double> rho;
    std::vector<double> u;

    std::size_t nodes() const { return rho.size(); }
    double mass() const;
    // Node index from lattice coordinates (wrapped periodically).
    std::size_t index(const std::array<int, 3>& c) const;
    std::array<int, 3> coords(std::size_t idx) const;
};

// Fields sampled from analytic profiles at x = c * dx; u is normalized.
MacroField sample_field(int dim, int n, double L, const std::function<double(const Vec&)>& rho,
                        const std::function<Vec(const Vec&)>& u);

struct MacroConfig {
    CoefficientSet coeffs;
    double dt = 0.0;
    double safety = 0.2;
};

// safety * dx^2 / max |C1..C4, E1, F1..F3|.
double max_stable_dt(const CoefficientSet& c, double dx, double safety);

// Component k of the density flux on the face between node p and p + e_k, for every p: out[k][p].
std::vector<std::vector<double>> density_flux(const MacroField& f, const CoefficientSet& c);

// -div J by flux differences.
std::vector<double> density_rhs(const MacroField& f, const CoefficientSet& c);

// d u / d t = -(1/rho) P (sum of all direction terms), node-major like MacroField::u.
std::vector<double> direction_rhs(const MacroField& f, const CoefficientSet& c);

struct StepDiagnostics {
    double predictor_norm_drift = 0.0;  // max ||u| - 1| before the stage-1 renormalization
    double final_norm_drift = 0.0;      // max ||u| - 1| before the final renormalization
    double pre_projection_norm_drift = 0.0;  // max of the two
};

// RK2 (Heun) with renormalization of u after each stage. Throws NumericalFailure on rho below the floor,
// non-finite values or blow-up; throws Error(config) when dt violates the diffusive CFL bound.
MacroField step(const MacroField& f, const MacroConfig& cfg, StepDiagnostics* diag = nullptr);

MacroField negate_direction(const MacroField& f);
// Rotation by +90 degrees in the (x0, x1) plane applied to positions and to u.
MacroField rotate90(const MacroField& f);

// Max over nodes of the difference of two fields (rho and u).
double field_max_difference(const MacroField& a, const MacroField& b);

// |I - Tr12 + (((u.grad)u).grad)u - u (PGu:PGu)| nodewise, I = P div(P grad u) in divergence form.
std::vector<double> appendix_identity_residual(const MacroField& f);

struct AuxiliaryReport {
    double div_trace = 0.0;       // max |div u - Tr(P grad u)|
    double tangency = 0.0;        // max |(grad u) u|
    double sigma_hessian = 0.0;   // Sigma : grad^2 u identity
    double sigma_rho = 0.0;       // Sigma : (grad u (x) grad rho) identity
    double sigma_convect = 0.0;   // Sigma : (grad u (x) (u.grad)u) identity
};

AuxiliaryReport auxiliary_operator_checks(const MacroField& f);

}  // namespace nematic
