#include "nematic/sphere.hpp"

#include "nematic/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nematic {

Direction Direction::normalized(const Vec& v) {
    if (v.size() < 2) throw DimensionMismatch("Direction: d < 2");
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("Direction: zero or non-finite vector");
    return Direction(v / n);
}

Direction Direction::from_unit(const Vec& v) {
    if (v.size() < 2) throw DimensionMismatch("Direction: d < 2");
    if (std::abs(v.norm() - 1.0) > Tolerances::unit)
        throw std::invalid_argument("Direction: vector is not unit");
    return Direction(v);
}

Direction Direction::axis(int d, int i) {
    Vec v = Vec::Zero(d);
    v[i] = 1.0;
    return from_unit(v);
}

Vec project_tangent(const Direction& u, const Vec& v) {
    require_same_dim(u.dim(), v.size(), "project_tangent");
    return v - u.dot(v) * u.vec();
}

Mat tangent_projector(const Direction& u) {
    const int d = u.dim();
    return Mat::Identity(d, d) - u.vec() * u.vec().transpose();
}

PolarParts polar_decompose(const Direction& omega, const Direction& u) {
    require_same_dim(omega.dim(), u.dim(), "polar_decompose");
    const double c = std::clamp(omega.dot(u), -1.0, 1.0);
    return {c, omega.vec() - c * u.vec()};
}

Mat orthonormal_complement(const Direction& u) {
    const int d = u.dim();
    Mat basis(d, d - 1);
    int found = 0;
    // Gram-Schmidt on the canonical axes, least aligned with u first.
    std::vector<int> order(d);
    for (int i = 0; i < d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(u[a]) < std::abs(u[b]); });
    for (int i : order) {
        if (found == d - 1) break;
        Vec v = Vec::Zero(d);
        v[i] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            v -= u.dot(v) * u.vec();
            for (int j = 0; j < found; ++j) v -= basis.col(j).dot(v) * basis.col(j);
        }
        const double n = v.norm();
        if (n < 1e-8) continue;
        basis.col(found++) = v / n;
    }
    return basis;
}

namespace {

// Nodes on S^{m-1} (unit vectors in R^m) with normalized weights.
void subsphere_rule(int m, int n_theta, int n_azimuth, std::vector<Vec>& nodes, std::vector<double>& w,
                    int& degree) {
    nodes.clear();
    w.clear();
    if (m == 1) {
        // S^0: two points, half the counting measure each.
        nodes.push_back(Vec::Constant(1, 1.0));
        nodes.push_back(Vec::Constant(1, -1.0));
        w = {0.5, 0.5};
        degree = 1 << 20;
        return;
    }
    if (m == 2) {
        for (int k = 0; k < n_azimuth; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / n_azimuth;
            Vec v(2);
            v << std::cos(phi), std::sin(phi);
            nodes.push_back(v);
            w.push_back(1.0 / n_azimuth);
        }
        degree = n_azimuth - 1;
        return;
    }
    const SphereQuadrature q = build_quadrature(m, Direction::axis(m, m - 1), n_theta, n_azimuth);
    nodes = q.nodes;
    w = q.weights;
    degree = q.degree;
}

}  // namespace

SphereQuadrature build_quadrature(int d, const Direction& axis, int n_theta, int n_azimuth) {
    if (d < 2) throw std::invalid_argument("build_quadrature: unsupported d < 2");
    require_same_dim(d, axis.dim(), "build_quadrature");
    if (n_theta < 2) throw std::invalid_argument("build_quadrature: n_theta < 2");
    if (d >= 3 && n_azimuth < 1) throw std::invalid_argument("build_quadrature: n_azimuth < 1");

    const Rule1D rr = gauss_gegenbauer(n_theta, 0.5 * (d - 3));
    std::vector<Vec> sub;
    std::vector<double> subw;
    int subdeg = 0;
    subsphere_rule(d - 1, n_theta, n_azimuth, sub, subw, subdeg);
    const Mat basis = orthonormal_complement(axis);

    SphereQuadrature q;
    q.d = d;
    q.axis = axis.vec();
    q.degree = std::min(2 * n_theta - 1, subdeg);
    double total = 0.0;
    for (std::size_t a = 0; a < rr.size(); ++a) total += rr.w[a];
    q.nodes.reserve(rr.size() * sub.size());
    q.weights.reserve(rr.size() * sub.size());
    for (std::size_t a = 0; a < rr.size(); ++a) {
        const double r = rr.x[a];
        const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
        for (std::size_t b = 0; b < sub.size(); ++b) {
            Vec w = r * axis.vec() + s * (basis * sub[b]);
            w /= w.norm();
            q.nodes.push_back(std::move(w));
            q.weights.push_back(rr.w[a] / total * subw[b]);
        }
    }
    return q;
}

double Tensor4::max_asymmetry() const {
    double worst = 0.0;
    std::array<int, 4> p{0, 1, 2, 3};
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j)
            for (int k = 0; k < d_; ++k)
                for (int l = 0; l < d_; ++l) {
                    const std::array<int, 4> id{i, j, k, l};
                    const double ref = (*this)(i, j, k, l);
                    std::array<int, 4> perm = p;
                    do {
                        const double v = (*this)(id[perm[0]], id[perm[1]], id[perm[2]], id[perm[3]]);
                        worst = std::max(worst, std::abs(v - ref));
                    } while (std::next_permutation(perm.begin(), perm.end()));
                }
    return worst;
}

Tensor4 sigma_tensor(const Direction& u) {
    const int d = u.dim();
    const Mat P = tangent_projector(u);
    Tensor4 s(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    s(i, j, k, l) = P(i, j) * P(k, l) + P(i, k) * P(j, l) + P(i, l) * P(j, k);
    return s;
}

Vec angular_moment1(const RadialProfile& a, const Direction& u, const SphereQuadrature& q) {
    require_same_dim(u.dim(), q.d, "angular_moment1");
    Vec m = Vec::Zero(q.d);
    for (std::size_t n = 0; n < q.size(); ++n) {
        const double r = u.dot(q.nodes[n]);
        m += q.weights[n] * a(r) * (q.nodes[n] - r * u.vec());
    }
    return m;
}

Mat angular_moment2(const RadialProfile& a, const Direction& u, const SphereQuadrature& q) {
    require_same_dim(u.dim(), q.d, "angular_moment2");
    Mat m = Mat::Zero(q.d, q.d);
    for (std::size_t n = 0; n < q.size(); ++n) {
        const double r = u.dot(q.nodes[n]);
        const Vec p = q.nodes[n] - r * u.vec();
        m += q.weights[n] * a(r) * (p * p.transpose());
    }
    return m;
}

Tensor4 angular_moment4(const RadialProfile& a, const Direction& u, const SphereQuadrature& q) {
    require_same_dim(u.dim(), q.d, "angular_moment4");
    const int d = q.d;
    Tensor4 m(d);
    for (std::size_t n = 0; n < q.size(); ++n) {
        const double r = u.dot(q.nodes[n]);
        const Vec p = q.nodes[n] - r * u.vec();
        const double wa = q.weights[n] * a(r);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l) m(i, j, k, l) += wa * p[i] * p[j] * p[k] * p[l];
    }
    return m;
}

std::vector<double> angular_moment(const RadialProfile& a, const Direction& u, int order,
                                   const SphereQuadrature& q) {
    switch (order) {
        case 1: {
            const Vec m = angular_moment1(a, u, q);
            return {m.data(), m.data() + m.size()};
        }
        case 2: {
            const Mat m = angular_moment2(a, u, q);
            std::vector<double> out(m.size());
            for (int i = 0; i < m.rows(); ++i)
                for (int j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
            return out;
        }
        case 4:
            return angular_moment4(a, u, q).data();
        default:
            throw std::invalid_argument("angular_moment: unsupported order " + std::to_string(order));
    }
}

double moment_prefactor(const RadialProfile& a, int order, int d, int n) {
    if (order == 2)
        return zonal_average([&](double r) { return a(r) * (1.0 - r * r); }, d, n) / (d - 1.0);
    if (order == 4)
        return zonal_average([&](double r) { return a(r) * (1.0 - r * r) * (1.0 - r * r); }, d, n) /
               ((d - 1.0) * (d + 1.0));
    if (order % 2 == 1) return 0.0;
    throw std::invalid_argument("moment_prefactor: unsupported order " + std::to_string(order));
}

}  // namespace nematic
