#pragma once

#include "nematic/common.hpp"
#include "nematic/sphere.hpp"

#include <array>

namespace nematic {

// Value, gradient and Hessian of a smooth ambient extension F: R^d -> R evaluated at a point of the sphere.
struct AmbientJet {
    double value = 0.0;
    Vec grad;
    Mat hess;
};

// Tangential gradient P_w grad F.
Vec surface_gradient(const Direction& omega, const AmbientJet& f);

// Laplace-Beltrami operator: tr H - w^T H w - (d-1) w.grad F.
double laplace_beltrami(const Direction& omega, const AmbientJet& f);

// Adjoint collision operator at fixed u (D = 1): Lap_w psi + kappa (w.u) (P_w u).grad_w psi.
double gamma_bar_adjoint(const Direction& omega, const Direction& u, double kappa, const AmbientJet& psi);

// Collision operator at fixed u (D = 1): Lap_w f - kappa div_w((w.u) P_w u f).
double gamma_bar(const Direction& omega, const Direction& u, double kappa, const AmbientJet& f);

// Smooth positive test density f(w) = exp(w^T A w / 2 + b.w), A symmetric.
struct ExpQuadraticDensity {
    Mat A;
    Vec b;

    double value(const Vec& w) const;
    AmbientJet jet(const Vec& w) const;
};

// Jet of x -> phi(x.u) L(x) from the 1D values phi, phi', phi'' and the jet of L.
AmbientJet radial_times(const Direction& u, double phi, double dphi, double d2phi, const AmbientJet& l);

// Linear function x -> x.v.
AmbientJet linear_jet(const Vec& x, const Vec& v);

// Quadratic form x -> x^T S x with S symmetric.
AmbientJet quadratic_jet(const Vec& x, const Mat& s);

}  // namespace nematic
