#include "nematic/qtensor.hpp"

#include "nematic/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nematic {

QTensor qtensor_from_orientations(const std::vector<Vec>& orientations, const std::vector<double>& weights) {
    if (orientations.empty()) throw std::invalid_argument("qtensor_from_orientations: empty list");
    if (weights.size() != orientations.size())
        throw DimensionMismatch("qtensor_from_orientations: weights/orientations size");
    const int d = static_cast<int>(orientations.front().size());
    Mat m = Mat::Zero(d, d);
    double total = 0.0;
    for (std::size_t i = 0; i < orientations.size(); ++i) {
        require_same_dim(orientations[i].size(), d, "qtensor_from_orientations");
        if (weights[i] < 0.0) throw std::invalid_argument("qtensor_from_orientations: negative weight");
        m.noalias() += weights[i] * orientations[i] * orientations[i].transpose();
        total += weights[i];
    }
    if (!(total > 0.0)) throw std::invalid_argument("qtensor_from_orientations: zero total weight");
    m /= total;
    m -= Mat::Identity(d, d) * (m.trace() / d);
    return {0.5 * (m + m.transpose())};
}

QTensor qtensor_from_density(const SphereQuadrature& quad, const std::vector<double>& f) {
    if (f.size() != quad.size()) throw DimensionMismatch("qtensor_from_density: f size");
    std::vector<double> w(f.size());
    bool any = false;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] < 0.0) throw std::invalid_argument("qtensor_from_density: negative density");
        w[i] = quad.weights[i] * f[i];
        any = any || f[i] > 0.0;
    }
    if (!any) throw std::invalid_argument("qtensor_from_density: all-zero density");
    // The density is not normalized here: Q_f carries the mass of f.
    const double mass = std::accumulate(w.begin(), w.end(), 0.0);
    QTensor q = qtensor_from_orientations(quad.nodes, w);
    q.m *= mass;
    return q;
}

SymmetricEigen jacobi_eigen(const Mat& a_in, int max_sweeps) {
    const int n = static_cast<int>(a_in.rows());
    Mat a = 0.5 * (a_in + a_in.transpose());
    Mat v = Mat::Identity(n, n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off <= 1e-300 || off <= 1e-32 * a.squaredNorm()) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i, i) > a(j, j); });
    SymmetricEigen out{Vec(n), Mat(n, n)};
    for (int i = 0; i < n; ++i) {
        out.values[i] = a(idx[i], idx[i]);
        out.vectors.col(i) = v.col(idx[i]);
    }
    return out;
}

SpectralInfo leading_direction(const QTensor& q, const std::optional<Direction>& prev, double gap_floor) {
    const SymmetricEigen es = jacobi_eigen(q.m);
    const double gap = es.values.size() > 1 ? es.values[0] - es.values[1] : es.values[0];
    if (!(gap >= gap_floor)) throw DegenerateLeadingEigenvalue(gap, gap_floor);
    Vec v = es.vectors.col(0);
    if (prev) {
        if (prev->dot(v) < 0.0) v = -v;
    } else {
        for (int i = 0; i < v.size(); ++i) {
            if (std::abs(v[i]) > 1e-14) {
                if (v[i] < 0.0) v = -v;
                break;
            }
        }
    }
    return {Direction::normalized(v), es.values[0], gap};
}

EquilibriumEigenvalues equilibrium_eigenvalues(double kappa, int d) {
    if (kappa < 0.0) throw std::invalid_argument("equilibrium_eigenvalues: kappa < 0");
    // Centre the exponent on its maximum to avoid overflow for large kappa.
    const auto weight = [&](double r) { return std::exp(0.5 * kappa * (r * r - 1.0)); };
    const double z = zonal_average(weight, d, 256);
    const double r2 = zonal_average([&](double r) { return weight(r) * r * r; }, d, 256) / z;
    const double par = r2 - 1.0 / d;
    return {par, -par / (d - 1.0)};
}

}  // namespace nematic
