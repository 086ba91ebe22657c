#pragma once

#include "nematic/common.hpp"

#include <array>
#include <functional>
#include <vector>

namespace nematic {

// Unit vector in R^d, d >= 2.
class Direction {
public:
    static Direction normalized(const Vec& v);
    static Direction from_unit(const Vec& v);
    static Direction axis(int d, int i);

    const Vec& vec() const { return v_; }
    int dim() const { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[i]; }
    double dot(const Direction& o) const { return v_.dot(o.v_); }
    double dot(const Vec& o) const { return v_.dot(o); }
    Direction operator-() const { return Direction(-v_); }

private:
    explicit Direction(Vec v) : v_(std::move(v)) {}
    Vec v_;
};

Vec project_tangent(const Direction& u, const Vec& v);
Mat tangent_projector(const Direction& u);

struct PolarParts {
    double cos_theta;
    Vec perp;
};
PolarParts polar_decompose(const Direction& omega, const Direction& u);

// Orthonormal basis of the complement of u, as the columns of a d x (d-1) matrix.
Mat orthonormal_complement(const Direction& u);

struct SphereQuadrature {
    int d = 0;
    Vec axis;
    std::vector<Vec> nodes;
    std::vector<double> weights;
    int degree = 0;  // exact for polynomials in w up to this degree

    std::size_t size() const { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t q = 0; q < nodes.size(); ++q) s += weights[q] * f(nodes[q]);
        return s;
    }
};

// Gauss rule in r = cos(theta) for the weight (1-r^2)^{(d-3)/2} (Gauss-Legendre when d = 3)
// times a product rule on the (d-2)-sphere orthogonal to the axis.
SphereQuadrature build_quadrature(int d, const Direction& axis, int n_theta, int n_azimuth);

// Rank-4 tensor over R^d, dense storage.
class Tensor4 {
public:
    explicit Tensor4(int d) : d_(d), c_(static_cast<std::size_t>(d) * d * d * d, 0.0) {}
    int dim() const { return d_; }
    double& operator()(int i, int j, int k, int l) { return c_[idx(i, j, k, l)]; }
    double operator()(int i, int j, int k, int l) const { return c_[idx(i, j, k, l)]; }
    const std::vector<double>& data() const { return c_; }
    double max_asymmetry() const;  // max deviation over all 24 index permutations

private:
    std::size_t idx(int i, int j, int k, int l) const {
        return ((static_cast<std::size_t>(i) * d_ + j) * d_ + k) * d_ + l;
    }
    int d_;
    std::vector<double> c_;
};

Tensor4 sigma_tensor(const Direction& u);

using RadialProfile = std::function<double(double)>;

// Moments of a(w.u) w_perp^{(x)k} computed node by node on the quadrature.
Vec angular_moment1(const RadialProfile& a, const Direction& u, const SphereQuadrature& q);
Mat angular_moment2(const RadialProfile& a, const Direction& u, const SphereQuadrature& q);
Tensor4 angular_moment4(const RadialProfile& a, const Direction& u, const SphereQuadrature& q);

// Flattened row-major moment of order 1, 2 or 4.
std::vector<double> angular_moment(const RadialProfile& a, const Direction& u, int order,
                                   const SphereQuadrature& q);

// Scalar prefactor of the order-2 (times P) or order-4 (times Sigma) moment, from 1D integrals.
double moment_prefactor(const RadialProfile& a, int order, int d, int n = 200);

}  // namespace nematic
