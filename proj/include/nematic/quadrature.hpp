#pragma once

#include <vector>

namespace nematic {

struct Rule1D {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

// Gauss-Legendre rule on [a, b].
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Gauss rule for the weight (1 - x^2)^alpha on [-1, 1], alpha > -1 (Golub-Welsch).
Rule1D gauss_gegenbauer(int n, double alpha);

// Gauss-Lobatto-Legendre points on [-1, 1] (n >= 2 points, endpoints included).
std::vector<double> gauss_lobatto_points(int n);

// W_m = int_0^pi sin^m(theta) dtheta.
double sphere_wedge(int m);

// Average of g(w.u) over S^{d-1} with the normalized measure, as a 1D integral in theta.
template <class F>
double zonal_average(F&& g, int d, int n = 200);

}  // namespace nematic

#include <cmath>
#include <numbers>

namespace nematic {

template <class F>
double zonal_average(F&& g, int d, int n) {
    const Rule1D rule = gauss_legendre(n, 0.0, std::numbers::pi);
    double num = 0.0, den = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double wt = rule.w[q] * std::pow(std::sin(rule.x[q]), d - 2);
        num += wt * g(std::cos(rule.x[q]));
        den += wt;
    }
    return num / den;
}

}  // namespace nematic
