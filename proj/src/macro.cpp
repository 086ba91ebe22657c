#include "nematic/macro.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nematic {

namespace {

constexpr double kBlowUp = 1e6;

// Periodic lattice navigation.
struct Lattice {
    int dim, n;
    std::array<std::size_t, 3> stride{};

    Lattice(int dim_, int n_) : dim(dim_), n(n_) {
        std::size_t s = 1;
        for (int k = dim - 1; k >= 0; --k) {
            stride[k] = s;
            s *= static_cast<std::size_t>(n);
        }
    }
    int coord(std::size_t p, int k) const { return static_cast<int>((p / stride[k]) % n); }
    std::size_t plus(std::size_t p, int k) const {
        return coord(p, k) == n - 1 ? p - static_cast<std::size_t>(n - 1) * stride[k] : p + stride[k];
    }
    std::size_t minus(std::size_t p, int k) const {
        return coord(p, k) == 0 ? p + static_cast<std::size_t>(n - 1) * stride[k] : p - stride[k];
    }
};

template <int DIM>
struct Derivs {
    std::vector<double> gu;    // node * DIM * DIM, (k, j) = d_k u_j
    std::vector<double> grho;  // node * DIM
};

template <int DIM>
Derivs<DIM> first_derivatives(const MacroField& f, const Lattice& lat) {
    const std::size_t N = f.nodes();
    const double inv2 = 0.5 / f.dx;
    Derivs<DIM> d;
    d.gu.resize(N * DIM * DIM);
    d.grho.resize(N * DIM);
    for (std::size_t p = 0; p < N; ++p) {
        for (int k = 0; k < DIM; ++k) {
            const std::size_t a = lat.plus(p, k), b = lat.minus(p, k);
            d.grho[p * DIM + k] = (f.rho[a] - f.rho[b]) * inv2;
            for (int j = 0; j < DIM; ++j) d.gu[(p * DIM + k) * DIM + j] = (f.u[a * DIM + j] - f.u[b * DIM + j]) * inv2;
        }
    }
    return d;
}

template <int DIM>
double second_derivative(const std::vector<double>& v, int stride_v, int comp, std::size_t p, int k, int l,
                         const Lattice& lat, double dx) {
    auto at = [&](std::size_t q) { return v[q * stride_v + comp]; };
    if (k == l) {
        return (at(lat.plus(p, k)) - 2.0 * at(p) + at(lat.minus(p, k))) / (dx * dx);
    }
    const std::size_t pk = lat.plus(p, k), mk = lat.minus(p, k);
    return (at(lat.plus(pk, l)) - at(lat.minus(pk, l)) - at(lat.plus(mk, l)) + at(lat.minus(mk, l))) / (4.0 * dx * dx);
}

template <int DIM>
std::vector<std::vector<double>> density_flux_impl(const MacroField& f, const CoefficientSet& c) {
    const Lattice lat(DIM, f.n);
    const Derivs<DIM> dv = first_derivatives<DIM>(f, lat);
    const std::size_t N = f.nodes();
    std::vector<std::vector<double>> J(DIM, std::vector<double>(N));
    for (int k = 0; k < DIM; ++k) {
        for (std::size_t p = 0; p < N; ++p) {
            const std::size_t q = lat.plus(p, k);
            double ub[DIM], gr[DIM], gu[DIM][DIM];
            double nrm = 0.0;
            for (int j = 0; j < DIM; ++j) {
                ub[j] = 0.5 * (f.u[p * DIM + j] + f.u[q * DIM + j]);
                nrm += ub[j] * ub[j];
            }
            nrm = std::sqrt(nrm);
            for (int j = 0; j < DIM; ++j) ub[j] /= nrm;
            const double rb = 0.5 * (f.rho[p] + f.rho[q]);
            for (int m = 0; m < DIM; ++m) {
                if (m == k) {
                    gr[m] = (f.rho[q] - f.rho[p]) / f.dx;
                    for (int j = 0; j < DIM; ++j) gu[m][j] = (f.u[q * DIM + j] - f.u[p * DIM + j]) / f.dx;
                } else {
                    gr[m] = 0.5 * (dv.grho[p * DIM + m] + dv.grho[q * DIM + m]);
                    for (int j = 0; j < DIM; ++j)
                        gu[m][j] = 0.5 * (dv.gu[(p * DIM + m) * DIM + j] + dv.gu[(q * DIM + m) * DIM + j]);
                }
            }
            double udr = 0.0, divu = 0.0, conv_k = 0.0;
            for (int m = 0; m < DIM; ++m) {
                udr += ub[m] * gr[m];
                divu += gu[m][m];
                conv_k += ub[m] * gu[m][k];
            }
            J[k][p] = c.C1 * udr * ub[k] + c.C2 * (gr[k] - ub[k] * udr) + c.C3 * rb * conv_k + c.C4 * divu * rb * ub[k];
        }
    }
    return J;
}

template <int DIM>
std::vector<double> density_rhs_impl(const MacroField& f, const CoefficientSet& c) {
    const Lattice lat(DIM, f.n);
    const auto J = density_flux_impl<DIM>(f, c);
    std::vector<double> out(f.nodes());
    for (std::size_t p = 0; p < f.nodes(); ++p) {
        double s = 0.0;
        for (int k = 0; k < DIM; ++k) s += J[k][p] - J[k][lat.minus(p, k)];
        out[p] = -s / f.dx;
    }
    return out;
}

template <int DIM>
std::vector<double> direction_rhs_impl(const MacroField& f, const CoefficientSet& c) {
    const Lattice lat(DIM, f.n);
    const Derivs<DIM> dv = first_derivatives<DIM>(f, lat);
    const std::size_t N = f.nodes();
    std::vector<double> out(N * DIM);
    for (std::size_t p = 0; p < N; ++p) {
        const double rho = f.rho[p];
        if (!(rho >= Tolerances::rho_floor))
            throw NumericalFailure("macro: density " + format_g(rho) + " below the positivity floor at node " +
                                   std::to_string(p));
        double u[DIM], gr[DIM], G[DIM][DIM], Hr[DIM][DIM], T[DIM][DIM][DIM];
        for (int j = 0; j < DIM; ++j) u[j] = f.u[p * DIM + j];
        for (int k = 0; k < DIM; ++k) {
            gr[k] = dv.grho[p * DIM + k];
            for (int j = 0; j < DIM; ++j) G[k][j] = dv.gu[(p * DIM + k) * DIM + j];
        }
        for (int k = 0; k < DIM; ++k)
            for (int l = k; l < DIM; ++l) {
                Hr[k][l] = Hr[l][k] = second_derivative<DIM>(f.rho, 1, 0, p, k, l, lat, f.dx);
                for (int j = 0; j < DIM; ++j)
                    T[k][l][j] = T[l][k][j] = second_derivative<DIM>(f.u, DIM, j, p, k, l, lat, f.dx);
            }

        auto proj = [&](const double* v, double* o) {
            double s = 0.0;
            for (int j = 0; j < DIM; ++j) s += u[j] * v[j];
            for (int j = 0; j < DIM; ++j) o[j] = v[j] - u[j] * s;
        };

        double w[DIM], divu = 0.0, udr = 0.0;
        for (int j = 0; j < DIM; ++j) {
            w[j] = 0.0;
            for (int k = 0; k < DIM; ++k) w[j] += u[k] * G[k][j];
        }
        for (int k = 0; k < DIM; ++k) {
            divu += G[k][k];
            udr += u[k] * gr[k];
        }
        double pgr[DIM], pw[DIM];
        proj(gr, pgr);
        proj(w, pw);

        // u_i G_ik G_kj and u_i u_k T_ikj
        double uGG[DIM], uuT[DIM], lap[DIM], graddiv[DIM], e1v[DIM];
        for (int j = 0; j < DIM; ++j) {
            double a = 0.0, b = 0.0, l = 0.0, g = 0.0, e = 0.0;
            for (int k = 0; k < DIM; ++k) {
                a += w[k] * G[k][j];
                l += T[k][k][j];
                g += T[j][k][k];
                e += G[j][k] * gr[k] + u[k] * Hr[j][k];
                for (int i = 0; i < DIM; ++i) b += u[i] * u[k] * T[i][k][j];
            }
            uGG[j] = a;
            uuT[j] = b;
            lap[j] = l;
            graddiv[j] = g;
            e1v[j] = e;
        }

        double sum[DIM];
        for (int j = 0; j < DIM; ++j) {
            const double f1 = uGG[j] + uuT[j];
            const double f2 = lap[j] - divu * w[j] - uGG[j] - uuT[j];
            double g2 = 0.0, g3 = 0.0, h2 = 0.0, h3 = 0.0;
            for (int k = 0; k < DIM; ++k) {
                g2 += G[j][k] * pgr[k];
                g3 += pgr[k] * G[k][j];
                h2 += G[j][k] * w[k];
                h3 += pw[k] * G[k][j];
            }
            sum[j] = c.E1 * e1v[j] + c.F1 * rho * f1 + c.F2 * rho * f2 + c.F3 * rho * graddiv[j] + c.G1 * udr * w[j] +
                     c.G2 * g2 + c.G3 * g3 + c.G4 * divu * pgr[j] + c.H1 * (udr / rho) * pgr[j] + c.H2 * rho * h2 +
                     c.H3 * rho * h3 + c.H4 * rho * divu * w[j];
        }
        // The outer projection also covers the inner P of the E1, F, G2 and H2 terms.
        double ps[DIM];
        proj(sum, ps);
        for (int j = 0; j < DIM; ++j) out[p * DIM + j] = -ps[j] / rho;
    }
    return out;
}

void check_dim(const MacroField& f) {
    if (f.dim != 2 && f.dim != 3) throw std::invalid_argument("macro: spatial dimension must be 2 or 3");
    if (f.n < 3) throw std::invalid_argument("macro: need at least 3 nodes per side");
    std::size_t N = 1;
    for (int k = 0; k < f.dim; ++k) N *= static_cast<std::size_t>(f.n);
    if (f.rho.size() != N || f.u.size() != N * f.dim) throw std::invalid_argument("macro: field sizes inconsistent");
}

void check_coeff_dim(const MacroField& f, const CoefficientSet& c) {
    if (c.d != f.dim)
        throw DimensionMismatch("macro: coefficient set has d = " + std::to_string(c.d) + " but the field has dim " +
                                std::to_string(f.dim));
}

void normalize_nodes(std::vector<double>& u, int dim) {
    for (std::size_t p = 0; p < u.size() / dim; ++p) {
        double n = 0.0;
        for (int j = 0; j < dim; ++j) n += u[p * dim + j] * u[p * dim + j];
        n = std::sqrt(n);
        for (int j = 0; j < dim; ++j) u[p * dim + j] /= n;
    }
}

double max_norm_drift(const std::vector<double>& u, int dim) {
    double worst = 0.0;
    for (std::size_t p = 0; p < u.size() / dim; ++p) {
        double n2 = 0.0;
        for (int j = 0; j < dim; ++j) n2 += u[p * dim + j] * u[p * dim + j];
        worst = std::max(worst, std::abs(std::sqrt(n2) - 1.0));
    }
    return worst;
}

void check_finite(const MacroField& f) {
    for (double r : f.rho)
        if (!std::isfinite(r) || std::abs(r) > kBlowUp) throw NumericalFailure("macro: density blow-up or non-finite value");
    for (double x : f.u)
        if (!std::isfinite(x)) throw NumericalFailure("macro: direction field became non-finite");
    for (double r : f.rho)
        if (r < Tolerances::rho_floor) throw NumericalFailure("macro: density fell below the positivity floor");
}

}  // namespace

double MacroField::mass() const {
    // Neumaier compensated summation.
    double s = 0.0, comp = 0.0;
    for (double r : rho) {
        const double t = s + r;
        comp += std::abs(s) >= std::abs(r) ? (s - t) + r : (r - t) + s;
        s = t;
    }
    return (s + comp) * std::pow(dx, dim);
}

std::size_t MacroField::index(const std::array<int, 3>& c) const {
    std::size_t idx = 0;
    for (int k = 0; k < dim; ++k) idx = idx * n + static_cast<std::size_t>(((c[k] % n) + n) % n);
    return idx;
}

std::array<int, 3> MacroField::coords(std::size_t idx) const {
    std::array<int, 3> c{0, 0, 0};
    for (int k = dim - 1; k >= 0; --k) {
        c[k] = static_cast<int>(idx % n);
        idx /= n;
    }
    return c;
}

MacroField sample_field(int dim, int n, double L, const std::function<double(const Vec&)>& rho,
                        const std::function<Vec(const Vec&)>& u) {
    MacroField f;
    f.dim = dim;
    f.n = n;
    f.dx = L / n;
    std::size_t N = 1;
    for (int k = 0; k < dim; ++k) N *= static_cast<std::size_t>(n);
    f.rho.resize(N);
    f.u.resize(N * dim);
    Vec x(dim);
    for (std::size_t p = 0; p < N; ++p) {
        const auto c = f.coords(p);
        for (int k = 0; k < dim; ++k) x[k] = c[k] * f.dx;
        f.rho[p] = rho(x);
        const Vec v = u(x);
        require_same_dim(v.size(), dim, "sample_field");
        const double nv = v.norm();
        for (int j = 0; j < dim; ++j) f.u[p * dim + j] = v[j] / nv;
    }
    check_dim(f);
    return f;
}

double max_stable_dt(const CoefficientSet& c, double dx, double safety) {
    const double vals[] = {c.C1, c.C2, c.C3, c.C4, c.E1, c.F1, c.F2, c.F3};
    double m = 0.0;
    for (double v : vals) {
        if (!std::isfinite(v)) throw NumericalFailure("macro: coefficient set contains non-finite values");
        m = std::max(m, std::abs(v));
    }
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return safety * dx * dx / m;
}

std::vector<std::vector<double>> density_flux(const MacroField& f, const CoefficientSet& c) {
    check_dim(f);
    check_coeff_dim(f, c);
    return f.dim == 2 ? density_flux_impl<2>(f, c) : density_flux_impl<3>(f, c);
}

std::vector<double> density_rhs(const MacroField& f, const CoefficientSet& c) {
    check_dim(f);
    check_coeff_dim(f, c);
    return f.dim == 2 ? density_rhs_impl<2>(f, c) : density_rhs_impl<3>(f, c);
}

std::vector<double> direction_rhs(const MacroField& f, const CoefficientSet& c) {
    check_dim(f);
    check_coeff_dim(f, c);
    return f.dim == 2 ? direction_rhs_impl<2>(f, c) : direction_rhs_impl<3>(f, c);
}

MacroField step(const MacroField& f, const MacroConfig& cfg, StepDiagnostics* diag) {
    check_dim(f);
    const double limit = max_stable_dt(cfg.coeffs, f.dx, cfg.safety);
    if (!(cfg.dt > 0.0) || cfg.dt > limit)
        throw Error(ExitCode::config, "macro: dt = " + format_g(cfg.dt) + " violates the diffusive CFL bound " +
                                          format_g(limit));
    const double dt = cfg.dt;
    const std::size_t N = f.nodes();
    const int dim = f.dim;

    const auto r0 = density_rhs(f, cfg.coeffs);
    const auto v0 = direction_rhs(f, cfg.coeffs);
    MacroField s1 = f;
    for (std::size_t p = 0; p < N; ++p) s1.rho[p] = f.rho[p] + dt * r0[p];
    for (std::size_t i = 0; i < N * dim; ++i) s1.u[i] = f.u[i] + dt * v0[i];
    if (diag) diag->predictor_norm_drift = max_norm_drift(s1.u, dim);
    normalize_nodes(s1.u, dim);
    check_finite(s1);

    const auto r1 = density_rhs(s1, cfg.coeffs);
    const auto v1 = direction_rhs(s1, cfg.coeffs);
    MacroField out = f;
    for (std::size_t p = 0; p < N; ++p) out.rho[p] = f.rho[p] + 0.5 * dt * (r0[p] + r1[p]);
    for (std::size_t i = 0; i < N * dim; ++i) out.u[i] = f.u[i] + 0.5 * dt * (v0[i] + v1[i]);
    if (diag) {
        diag->final_norm_drift = max_norm_drift(out.u, dim);
        diag->pre_projection_norm_drift = std::max(diag->predictor_norm_drift, diag->final_norm_drift);
    }
    normalize_nodes(out.u, dim);
    out.time = f.time + dt;
    check_finite(out);
    return out;
}

MacroField negate_direction(const MacroField& f) {
    MacroField g = f;
    for (double& x : g.u) x = -x;
    return g;
}

MacroField rotate90(const MacroField& f) {
    check_dim(f);
    MacroField g = f;
    const int dim = f.dim;
    for (std::size_t p = 0; p < f.nodes(); ++p) {
        auto c = f.coords(p);
        // (x0, x1) -> (-x1, x0)
        std::array<int, 3> t = c;
        t[0] = -c[1];
        t[1] = c[0];
        const std::size_t q = g.index(t);
        g.rho[q] = f.rho[p];
        g.u[q * dim + 0] = -f.u[p * dim + 1];
        g.u[q * dim + 1] = f.u[p * dim + 0];
        for (int j = 2; j < dim; ++j) g.u[q * dim + j] = f.u[p * dim + j];
    }
    return g;
}

double field_max_difference(const MacroField& a, const MacroField& b) {
    if (a.rho.size() != b.rho.size() || a.u.size() != b.u.size())
        throw std::invalid_argument("field_max_difference: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rho.size(); ++i) m = std::max(m, std::abs(a.rho[i] - b.rho[i]));
    for (std::size_t i = 0; i < a.u.size(); ++i) m = std::max(m, std::abs(a.u[i] - b.u[i]));
    return m;
}

// ------------------------------------------------------------------ identity checks

namespace {

// Generic-dimension nodal derivative helpers for the identity checks.
struct NodalCalculus {
    const MacroField& f;
    Lattice lat;
    explicit NodalCalculus(const MacroField& fld) : f(fld), lat(fld.dim, fld.n) {}

    // Centered derivative along k of a field with `ncomp` components per node.
    std::vector<double> d(const std::vector<double>& v, int ncomp, int k) const {
        std::vector<double> out(v.size());
        for (std::size_t p = 0; p < f.nodes(); ++p) {
            const std::size_t a = lat.plus(p, k), b = lat.minus(p, k);
            for (int c = 0; c < ncomp; ++c) out[p * ncomp + c] = (v[a * ncomp + c] - v[b * ncomp + c]) / (2.0 * f.dx);
        }
        return out;
    }
};

struct NodeData {
    Vec u;
    Mat G;                 // G(k, j) = d_k u_j
    std::vector<Mat> T;    // T[k](l, j) = d_k d_l u_j
    Vec gr;
    Mat P;
};

}  // namespace

std::vector<double> appendix_identity_residual(const MacroField& f) {
    check_dim(f);
    const int dim = f.dim;
    const std::size_t N = f.nodes();
    const NodalCalculus calc(f);
    std::vector<std::vector<double>> du(dim);
    for (int k = 0; k < dim; ++k) du[k] = calc.d(f.u, dim, k);

    // A(i, j) = P_ik d_k u_j stored node-major as dim*dim.
    std::vector<double> A(N * dim * dim);
    for (std::size_t p = 0; p < N; ++p) {
        const Eigen::Map<const Vec> u(&f.u[p * dim], dim);
        const Mat P = Mat::Identity(dim, dim) - u * u.transpose();
        Mat G(dim, dim);
        for (int k = 0; k < dim; ++k)
            for (int j = 0; j < dim; ++j) G(k, j) = du[k][p * dim + j];
        const Mat a = P * G;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) A[(p * dim + i) * dim + j] = a(i, j);
    }
    std::vector<std::vector<double>> dA(dim);
    for (int k = 0; k < dim; ++k) dA[k] = calc.d(A, dim * dim, k);

    std::vector<double> res(N);
    for (std::size_t p = 0; p < N; ++p) {
        const Eigen::Map<const Vec> u(&f.u[p * dim], dim);
        const Mat P = Mat::Identity(dim, dim) - u * u.transpose();
        Mat G(dim, dim), a(dim, dim);
        for (int k = 0; k < dim; ++k)
            for (int j = 0; j < dim; ++j) {
                G(k, j) = du[k][p * dim + j];
                a(k, j) = A[(p * dim + k) * dim + j];
            }
        // I = P (d_i A_ij), II_i = P_jp d_p A_ji.
        Vec divA = Vec::Zero(dim), II = Vec::Zero(dim);
        for (int j = 0; j < dim; ++j)
            for (int i = 0; i < dim; ++i) divA[j] += dA[i][(p * dim + i) * dim + j];
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                for (int q = 0; q < dim; ++q) II[i] += P(j, q) * dA[q][(p * dim + j) * dim + i];
        const Vec I = P * divA;
        const Vec w = G.transpose() * u;
        const Vec wgrad = G.transpose() * w;  // ((w.grad) u)_j = w_k d_k u_j
        const double aa = (a.array() * a.array()).sum();
        res[p] = (I - II + wgrad - u * aa).norm();
    }
    return res;
}

AuxiliaryReport auxiliary_operator_checks(const MacroField& f) {
    check_dim(f);
    const int dim = f.dim;
    const std::size_t N = f.nodes();
    const NodalCalculus calc(f);
    const Lattice& lat = calc.lat;
    std::vector<std::vector<double>> du(dim);
    for (int k = 0; k < dim; ++k) du[k] = calc.d(f.u, dim, k);
    std::vector<std::vector<double>> drho(dim);
    for (int k = 0; k < dim; ++k) drho[k] = calc.d(f.rho, 1, k);

    std::vector<double> A(N * dim * dim);
    for (std::size_t p = 0; p < N; ++p) {
        const Eigen::Map<const Vec> u(&f.u[p * dim], dim);
        const Mat P = Mat::Identity(dim, dim) - u * u.transpose();
        Mat G(dim, dim);
        for (int k = 0; k < dim; ++k)
            for (int j = 0; j < dim; ++j) G(k, j) = du[k][p * dim + j];
        const Mat a = P * G;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) A[(p * dim + i) * dim + j] = a(i, j);
    }
    std::vector<std::vector<double>> dA(dim);
    for (int k = 0; k < dim; ++k) dA[k] = calc.d(A, dim * dim, k);

    AuxiliaryReport rep;
    for (std::size_t p = 0; p < N; ++p) {
        const Eigen::Map<const Vec> u(&f.u[p * dim], dim);
        const Mat P = Mat::Identity(dim, dim) - u * u.transpose();
        Mat G(dim, dim);
        Vec gr(dim);
        for (int k = 0; k < dim; ++k) {
            gr[k] = drho[k][p];
            for (int j = 0; j < dim; ++j) G(k, j) = du[k][p * dim + j];
        }
        // Second derivatives of u by the compact stencils.
        std::vector<Mat> T(dim, Mat(dim, dim));
        for (int k = 0; k < dim; ++k)
            for (int l = 0; l < dim; ++l)
                for (int j = 0; j < dim; ++j)
                    T[k](l, j) = second_derivative<3>(f.u, dim, j, p, k, l, lat, f.dx);

        const double divu = G.trace();
        rep.div_trace = std::max(rep.div_trace, std::abs(divu - (P * G).trace()));
        rep.tangency = std::max(rep.tangency, (G * u).norm());

        const Vec w = G.transpose() * u;
        const Vec pgr = P * gr;
        const Mat PG = P * G;

        // Sigma_{ijkl} = P_ij P_kl + P_ik P_jl + P_il P_jk.
        auto sigma = [&](int i, int j, int k, int l) { return P(i, j) * P(k, l) + P(i, k) * P(j, l) + P(i, l) * P(j, k); };

        Vec lhs_h = Vec::Zero(dim), lhs_r = Vec::Zero(dim), lhs_c = Vec::Zero(dim);
        for (int l = 0; l < dim; ++l)
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    for (int k = 0; k < dim; ++k) {
                        const double s = sigma(i, j, k, l);
                        lhs_h[l] += s * T[i](j, k);
                        lhs_r[l] += s * G(i, k) * gr[j];
                        lhs_c[l] += s * G(i, k) * w[j];
                    }

        Vec divA = Vec::Zero(dim);
        for (int j = 0; j < dim; ++j)
            for (int i = 0; i < dim; ++i) divA[j] += dA[i][(p * dim + i) * dim + j];
        Vec graddiv = Vec::Zero(dim);
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k) graddiv[j] += T[j](k, k);

        const Vec rhs_h = P * divA + divu * w + G.transpose() * (P * w) + 2.0 * P * graddiv + 2.0 * PG * w;
        const Vec rhs_r = divu * pgr + PG * pgr + G.transpose() * pgr;
        const Vec rhs_c = divu * w + PG * w + G.transpose() * (P * w);
        rep.sigma_hessian = std::max(rep.sigma_hessian, (lhs_h - rhs_h).norm());
        rep.sigma_rho = std::max(rep.sigma_rho, (lhs_r - rhs_r).norm());
        rep.sigma_convect = std::max(rep.sigma_convect, (lhs_c - rhs_c).norm());
    }
    return rep;
}

}  // namespace nematic
