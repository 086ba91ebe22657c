#pragma once

#include "nematic/common.hpp"
#include "nematic/sphere.hpp"

#include <array>
#include <string>
#include <vector>

namespace nematic {

struct Equilibrium {
    double kappa = 0.0;
    int d = 3;
    double Z = 1.0;

    // M_u as a function of cos(theta) = w.u.
    double operator()(double cos_theta) const;
};

Equilibrium make_equilibrium(double kappa, int d);

enum class RadialKind { h, a, b, c, e, k };
enum class Parity { even, odd };
// Weighted spaces: H_{(d-1)/2,(d+1)/2}, H_{(d+1)/2,(d+3)/2} and the zero-mean space Hdot_{0,(d-1)/2}.
enum class SpaceTag { H_dm1_dp1, H_dp1_dp3, Hdot_0_dm1 };

const char* to_string(RadialKind k);
RadialKind radial_kind_from_string(const std::string& s);
Parity parity_of(RadialKind k);
SpaceTag space_tag_of(RadialKind k);

// Lagrange basis on fixed reference nodes in [-1, 1].
class LagrangeBasis {
public:
    LagrangeBasis() = default;
    explicit LagrangeBasis(std::vector<double> nodes);
    int size() const { return static_cast<int>(xi_.size()); }
    const std::vector<double>& nodes() const { return xi_; }
    // Values, first and second derivatives of all basis functions at x (any pointer may be null).
    void eval(double x, double* v, double* dv, double* d2v) const;

private:
    std::vector<double> xi_;
    std::vector<double> denom_;
};

// Continuous piecewise-polynomial solution of one of the six radial problems on r in [-1, 1].
// Elements are uniform in theta = arccos(r); element j spans [-cos(pi j/n), -cos(pi (j+1)/n)].
class RadialSolution {
public:
    RadialKind kind = RadialKind::h;
    double kappa = 0.0;
    int d = 3;
    int n_elements = 0;
    int degree = 0;
    std::vector<double> vertices;           // n_elements + 1
    std::vector<double> nodes;              // n_elements * degree + 1 dof positions
    std::vector<double> values;             // dof values
    std::vector<double> derivative_values;  // L2 projection of the piecewise derivative

    double value(double r) const;
    double derivative(double r) const;               // projected derivative
    double local_derivative(double r) const;         // derivative of the element polynomial
    double local_second_derivative(double r) const;  // second derivative of the element polynomial

    Parity parity() const { return parity_of(kind); }
    SpaceTag space_tag() const { return space_tag_of(kind); }
    // The two weighted integrals defining the space tag: {int w0 u^2 dr, int w1 u'^2 dr}.
    std::array<double, 2> space_integrals() const;
    int element_of(double r) const;

    const LagrangeBasis& basis() const { return basis_; }
    void set_basis(LagrangeBasis b) { basis_ = std::move(b); }

private:
    double eval_field(const std::vector<double>& dofs, double r, int order) const;
    LagrangeBasis basis_;
};

inline constexpr int kDefaultBvpDegree = 4;

// kind in {h, a, b, e}: coercive weighted problems, natural endpoint conditions.
RadialSolution solve_dirichlet_type_bvp(RadialKind kind, double kappa, int d, int n, int degree = kDefaultBvpDegree);

// kind in {c, k}: pure-stiffness problems, solved with the r = 0 node pinned then made zero-mean.
RadialSolution solve_neumann_type_bvp(RadialKind kind, double kappa, int d, int n, const RadialSolution* e_sol,
                                      int degree = kDefaultBvpDegree);

// Residual of the ODE in non-divergence form at r (leading coefficient 1 - r^2).
double strong_residual(const RadialSolution& s, double r, const RadialSolution* e_sol = nullptr);

// Maximum strong residual over interior sample points of every element.
double max_strong_residual(const RadialSolution& s, const RadialSolution* e_sol = nullptr, int samples = 4);

struct RadialBundle {
    RadialSolution h, a, b, c, e, k;
    double kappa() const { return h.kappa; }
    int d() const { return h.d; }
};

RadialBundle solve_bundle(double kappa, int d, int n, int degree = kDefaultBvpDegree);

// psi_u(w) = P_{u perp} w h(w.u).
Vec gci_vector(const RadialSolution& h, const Direction& u, const Direction& omega);

struct CorrectorInputs {
    double rho = 1.0;
    Vec grad_rho;
    Direction u = Direction::axis(3, 2);
    Mat grad_u;  // (grad u)_{ij} = d_i u_j

    void validate() const;
};

// T1..T5 of the first-order corrector: f10 = rho M (T1 + ... + T5).
std::array<double, 5> corrector_channels(const CorrectorInputs& in, const RadialBundle& bundle, const Direction& omega);
double corrector_f1(const CorrectorInputs& in, const RadialBundle& bundle, const Equilibrium& eq,
                    const Direction& omega);

enum class Provenance { theorem_form, derivation_form };

struct CoefficientSet {
    double C1 = 0, C2 = 0, C3 = 0, C4 = 0;
    double E1 = 0;
    double F1 = 0, F2 = 0, F3 = 0;
    double G1 = 0, G2 = 0, G3 = 0, G4 = 0;
    double H1 = 0, H2 = 0, H3 = 0, H4 = 0;
    double C0 = 0;
    double kappa = 0;
    int d = 3;
    Provenance provenance = Provenance::theorem_form;

    static const std::array<const char*, 16>& names();
    std::array<double, 16> values() const;
    void set_values(const std::array<double, 16>& v);
    // All sixteen transport coefficients multiplied by factor (1/D for angular diffusion D).
    CoefficientSet scaled(double factor) const;
};

CoefficientSet compute_coefficients(const RadialBundle& bundle, int n_quad = 256);
CoefficientSet compute_coefficients_derivation(const RadialBundle& bundle, int n_theta = 256, int n_azimuth = 4);

// H1-E1, F3-2F2-<k/cos>_s, G2-G3+2<a/kappa>_s, G4-G3-F3+2F2, H3-H2-F1+F2, H4-H3-<(kappa k+e)cos+k'>_s.
std::array<double, 6> theorem_identities(const RadialBundle& bundle, const CoefficientSet& c, int n_quad = 256);

}  // namespace nematic
