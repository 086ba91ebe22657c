#include "nematic/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nematic {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre_eval(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

Rule1D gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p = 0.0, dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            legendre_eval(n, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        legendre_eval(n, x, p, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        r.x[i] = mid + half * r.x[i];
        r.w[i] *= half;
    }
    return r;
}

Rule1D gauss_gegenbauer(int n, double alpha) {
    if (n < 1) throw std::invalid_argument("gauss_gegenbauer: n < 1");
    if (!(alpha > -1.0)) throw std::invalid_argument("gauss_gegenbauer: alpha <= -1");
    if (alpha == 0.0) return gauss_legendre(n);
    // Monic Jacobi recurrence with alpha = beta: diagonal is zero.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(std::max(n - 1, 0));
    const double ab = 2.0 * alpha;
    for (int k = 1; k < n; ++k) {
        double beta;
        if (k == 1) {
            beta = 4.0 * (1.0 + alpha) * (1.0 + alpha) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            const double s = 2.0 * k + ab;
            beta = 4.0 * k * (k + alpha) * (k + alpha) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
        }
        off[k - 1] = std::sqrt(beta);
    }
    const double mu0 = std::sqrt(std::numbers::pi) * std::tgamma(alpha + 1.0) / std::tgamma(alpha + 1.5);
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    if (n == 1) {
        r.x[0] = 0.0;
        r.w[0] = mu0;
        return r;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v0 * v0;
    }
    // Symmetrize: the rule is exactly symmetric in exact arithmetic.
    for (int i = 0; i < n / 2; ++i) {
        const double x = 0.5 * (r.x[n - 1 - i] - r.x[i]);
        const double w = 0.5 * (r.w[n - 1 - i] + r.w[i]);
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

std::vector<double> gauss_lobatto_points(int n) {
    if (n < 2) throw std::invalid_argument("gauss_lobatto_points: n < 2");
    std::vector<double> x(n);
    x[0] = -1.0;
    x[n - 1] = 1.0;
    // Interior points are the roots of P'_{n-1}; Newton from Chebyshev-Lobatto guesses.
    const int m = n - 1;
    for (int i = 1; i < m; ++i) {
        double t = -std::cos(std::numbers::pi * i / m);
        for (int it = 0; it < 100; ++it) {
            double p = 0.0, dp = 0.0;
            legendre_eval(m, t, p, dp);
            // (1-t^2) P'' = 2 t P' - m(m+1) P
            const double d2p = (2.0 * t * dp - m * (m + 1.0) * p) / (1.0 - t * t);
            const double dt = dp / d2p;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        x[i] = t;
    }
    return x;
}

double sphere_wedge(int m) {
    if (m < 0) throw std::invalid_argument("sphere_wedge: negative exponent");
    if (m == 0) return std::numbers::pi;
    if (m == 1) return 2.0;
    return sphere_wedge(m - 2) * (m - 1.0) / m;
}

}  // namespace nematic
