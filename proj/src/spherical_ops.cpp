#include "nematic/spherical_ops.hpp"

#include <cmath>

namespace nematic {

Vec surface_gradient(const Direction& omega, const AmbientJet& f) { return project_tangent(omega, f.grad); }

double laplace_beltrami(const Direction& omega, const AmbientJet& f) {
    const Vec& w = omega.vec();
    const int d = omega.dim();
    return f.hess.trace() - w.dot(f.hess * w) - (d - 1) * w.dot(f.grad);
}

double gamma_bar_adjoint(const Direction& omega, const Direction& u, double kappa, const AmbientJet& psi) {
    require_same_dim(omega.dim(), u.dim(), "gamma_bar_adjoint");
    const double r = omega.dot(u);
    const Vec pu = project_tangent(omega, u.vec());
    return laplace_beltrami(omega, psi) + kappa * r * pu.dot(surface_gradient(omega, psi));
}

double gamma_bar(const Direction& omega, const Direction& u, double kappa, const AmbientJet& f) {
    require_same_dim(omega.dim(), u.dim(), "gamma_bar");
    const int d = omega.dim();
    const double r = omega.dot(u);
    const Vec pu = project_tangent(omega, u.vec());
    // div_w(phi P_w u) = grad_w phi . P_w u - (d-1) r phi with phi = r f.
    const Vec grad_phi = f.value * u.vec() + r * f.grad;
    const double div = pu.dot(grad_phi) - (d - 1) * r * r * f.value;
    return laplace_beltrami(omega, f) - kappa * div;
}

double ExpQuadraticDensity::value(const Vec& w) const { return std::exp(0.5 * w.dot(A * w) + b.dot(w)); }

AmbientJet ExpQuadraticDensity::jet(const Vec& w) const {
    AmbientJet j;
    j.value = value(w);
    const Vec g = A * w + b;
    j.grad = j.value * g;
    j.hess = j.value * (A + g * g.transpose());
    return j;
}

AmbientJet radial_times(const Direction& u, double phi, double dphi, double d2phi, const AmbientJet& l) {
    const Vec& uv = u.vec();
    AmbientJet j;
    j.value = phi * l.value;
    j.grad = dphi * l.value * uv + phi * l.grad;
    j.hess = d2phi * l.value * uv * uv.transpose() + dphi * (uv * l.grad.transpose() + l.grad * uv.transpose()) +
             phi * l.hess;
    return j;
}

AmbientJet linear_jet(const Vec& x, const Vec& v) {
    AmbientJet j;
    j.value = x.dot(v);
    j.grad = v;
    j.hess = Mat::Zero(x.size(), x.size());
    return j;
}

AmbientJet quadratic_jet(const Vec& x, const Mat& s) {
    AmbientJet j;
    j.value = x.dot(s * x);
    j.grad = 2.0 * s * x;
    j.hess = 2.0 * s;
    return j;
}

}  // namespace nematic
