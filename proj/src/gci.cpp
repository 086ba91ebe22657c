#include "nematic/gci.hpp"

#include "nematic/quadrature.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nematic {

namespace {

constexpr double kPi = std::numbers::pi;

// exp(kappa (r^2 - 1) / 2); the constant factor relative to exp(kappa r^2 / 2) cancels in every use.
double weight_exp(double kappa, double r) { return std::exp(0.5 * kappa * (r * r - 1.0)); }

bool is_neumann(RadialKind k) { return k == RadialKind::c || k == RadialKind::k; }

}  // namespace

double Equilibrium::operator()(double cos_theta) const {
    return std::exp(0.5 * kappa * (cos_theta * cos_theta - 1.0)) / Z;
}

Equilibrium make_equilibrium(double kappa, int d) {
    if (kappa < 0.0) throw std::invalid_argument("make_equilibrium: kappa must be >= 0");
    if (d < 2) throw std::invalid_argument("make_equilibrium: d must be >= 2");
    Equilibrium eq;
    eq.kappa = kappa;
    eq.d = d;
    eq.Z = zonal_average([&](double r) { return weight_exp(kappa, r); }, d, 256);
    return eq;
}

const char* to_string(RadialKind k) {
    switch (k) {
        case RadialKind::h: return "h";
        case RadialKind::a: return "a";
        case RadialKind::b: return "b";
        case RadialKind::c: return "c";
        case RadialKind::e: return "e";
        case RadialKind::k: return "k";
    }
    return "?";
}

RadialKind radial_kind_from_string(const std::string& s) {
    if (s == "h") return RadialKind::h;
    if (s == "a") return RadialKind::a;
    if (s == "b") return RadialKind::b;
    if (s == "c") return RadialKind::c;
    if (s == "e") return RadialKind::e;
    if (s == "k") return RadialKind::k;
    throw std::invalid_argument("unknown radial kind: " + s);
}

Parity parity_of(RadialKind k) {
    return (k == RadialKind::a || k == RadialKind::b) ? Parity::even : Parity::odd;
}

SpaceTag space_tag_of(RadialKind k) {
    switch (k) {
        case RadialKind::e: return SpaceTag::H_dp1_dp3;
        case RadialKind::c:
        case RadialKind::k: return SpaceTag::Hdot_0_dm1;
        default: return SpaceTag::H_dm1_dp1;
    }
}

// ---------------------------------------------------------------- Lagrange basis

LagrangeBasis::LagrangeBasis(std::vector<double> nodes) : xi_(std::move(nodes)), denom_(xi_.size(), 1.0) {
    const int m = size();
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k)
            if (k != i) denom_[i] *= xi_[i] - xi_[k];
}

void LagrangeBasis::eval(double x, double* v, double* dv, double* d2v) const {
    const int m = size();
    std::vector<double> t(m);
    for (int k = 0; k < m; ++k) t[k] = x - xi_[k];
    for (int i = 0; i < m; ++i) {
        double p0 = 1.0, p1 = 0.0, p2 = 0.0;
        // Running product with first and second derivatives.
        for (int k = 0; k < m; ++k) {
            if (k == i) continue;
            p2 = p2 * t[k] + 2.0 * p1;
            p1 = p1 * t[k] + p0;
            p0 = p0 * t[k];
        }
        if (v) v[i] = p0 / denom_[i];
        if (dv) dv[i] = p1 / denom_[i];
        if (d2v) d2v[i] = p2 / denom_[i];
    }
}

// ---------------------------------------------------------------- RadialSolution

int RadialSolution::element_of(double r) const {
    const double rc = std::clamp(r, -1.0, 1.0);
    const double theta = std::acos(rc);
    int e = static_cast<int>(std::floor(n_elements * (1.0 - theta / kPi)));
    e = std::clamp(e, 0, n_elements - 1);
    while (e > 0 && rc < vertices[e]) --e;
    while (e < n_elements - 1 && rc > vertices[e + 1]) ++e;
    return e;
}

double RadialSolution::eval_field(const std::vector<double>& dofs, double r, int order) const {
    const int e = element_of(r);
    const double lo = vertices[e], hi = vertices[e + 1];
    const double jac = 2.0 / (hi - lo);
    const double xi = jac * (r - lo) - 1.0;
    const int m = degree + 1;
    std::vector<double> phi(m);
    if (order == 0)
        basis_.eval(xi, phi.data(), nullptr, nullptr);
    else if (order == 1)
        basis_.eval(xi, nullptr, phi.data(), nullptr);
    else
        basis_.eval(xi, nullptr, nullptr, phi.data());
    const double scale = std::pow(jac, order);
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += dofs[static_cast<std::size_t>(e) * degree + i] * phi[i];
    return s * scale;
}

double RadialSolution::value(double r) const { return eval_field(values, r, 0); }
double RadialSolution::derivative(double r) const { return eval_field(derivative_values, r, 0); }
double RadialSolution::local_derivative(double r) const { return eval_field(values, r, 1); }
double RadialSolution::local_second_derivative(double r) const { return eval_field(values, r, 2); }

std::array<double, 2> RadialSolution::space_integrals() const {
    double mu0 = 0.0, mu1 = 0.0;
    switch (space_tag()) {
        case SpaceTag::H_dm1_dp1: mu0 = 0.5 * (d - 1); mu1 = 0.5 * (d + 1); break;
        case SpaceTag::H_dp1_dp3: mu0 = 0.5 * (d + 1); mu1 = 0.5 * (d + 3); break;
        case SpaceTag::Hdot_0_dm1: mu0 = 0.0; mu1 = 0.5 * (d - 1); break;
    }
    const Rule1D g = gauss_legendre(2 * degree + 6);
    double i0 = 0.0, i1 = 0.0;
    for (int e = 0; e < n_elements; ++e) {
        const double th_hi = kPi * (1.0 - static_cast<double>(e) / n_elements);
        const double th_lo = kPi * (1.0 - static_cast<double>(e + 1) / n_elements);
        for (std::size_t q = 0; q < g.size(); ++q) {
            const double th = th_lo + 0.5 * (g.x[q] + 1.0) * (th_hi - th_lo);
            const double w = 0.5 * g.w[q] * (th_hi - th_lo) * std::sin(th);
            const double r = std::cos(th), s2 = 1.0 - r * r;
            const double u = value(r), du = local_derivative(r);
            i0 += w * std::pow(s2, mu0) * u * u;
            i1 += w * std::pow(s2, mu1) * du * du;
        }
    }
    return {i0, i1};
}

// ---------------------------------------------------------------- Galerkin assembly

namespace {

struct Coeffs {
    double P, Q, F;
};

Coeffs bvp_coeffs(RadialKind kind, double kappa, int d, double r, double e_val) {
    const double s2 = std::max(1.0 - r * r, 0.0);
    const double E = weight_exp(kappa, r);
    const auto pw = [&](double mu) { return std::pow(s2, mu); };
    switch (kind) {
        case RadialKind::h:
        case RadialKind::a:
        case RadialKind::b: {
            const double base = pw(0.5 * (d - 1)) * E;
            const double f = kind == RadialKind::h ? r : (kind == RadialKind::a ? 1.0 : r * r);
            return {pw(0.5 * (d + 1)) * E, base * (kappa * r * r + d - 1), f * base};
        }
        case RadialKind::e: {
            const double base = pw(0.5 * (d + 1)) * E;
            return {pw(0.5 * (d + 3)) * E, 2.0 * base * (kappa * r * r + d), r * base};
        }
        case RadialKind::c:
        case RadialKind::k: {
            const double f = kind == RadialKind::c ? r : -2.0 * e_val;
            // (1-r^2)^{(d-3)/2} enters only multiplied by the sin(theta) line element.
            return {pw(0.5 * (d - 1)) * E, 0.0, f * E};
        }
    }
    return {0, 0, 0};
}

// Exponent of sin(theta) in the load's line element: the load carries (1-r^2)^{(d-3)/2} for c, k.
double load_sin_power(RadialKind kind, int d) { return is_neumann(kind) ? d - 2.0 : 1.0; }

RadialSolution make_grid(RadialKind kind, double kappa, int d, int n, int degree) {
    if (n < 2) throw std::invalid_argument("radial BVP: need at least 2 elements");
    if (degree < 1) throw std::invalid_argument("radial BVP: degree must be >= 1");
    if (d < 2) throw std::invalid_argument("radial BVP: d must be >= 2");
    if (kappa < 0.0) throw std::invalid_argument("radial BVP: kappa must be >= 0");
    RadialSolution s;
    s.kind = kind;
    s.kappa = kappa;
    s.d = d;
    s.n_elements = n;
    s.degree = degree;
    s.set_basis(LagrangeBasis(gauss_lobatto_points(degree + 1)));
    s.vertices.resize(n + 1);
    for (int j = 0; j <= n; ++j) s.vertices[j] = -std::cos(kPi * j / n);
    s.vertices[0] = -1.0;
    s.vertices[n] = 1.0;
    if (n % 2 == 0) s.vertices[n / 2] = 0.0;
    const auto& xi = s.basis().nodes();
    s.nodes.resize(static_cast<std::size_t>(n) * degree + 1);
    for (int e = 0; e < n; ++e) {
        const double lo = s.vertices[e], hi = s.vertices[e + 1];
        for (int i = 0; i < degree; ++i) s.nodes[static_cast<std::size_t>(e) * degree + i] = lo + 0.5 * (xi[i] + 1.0) * (hi - lo);
    }
    s.nodes.back() = 1.0;
    return s;
}

using SpMat = Eigen::SparseMatrix<double>;

void project_derivative(RadialSolution& s) {
    const int n = s.n_elements, p = s.degree, m = p + 1;
    const std::size_t ndof = s.nodes.size();
    const Rule1D g = gauss_legendre(p + 2);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * m * m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ndof));
    std::vector<double> phi(m), dphi(m);
    for (int e = 0; e < n; ++e) {
        const double lo = s.vertices[e], hi = s.vertices[e + 1], half = 0.5 * (hi - lo);
        const std::size_t off = static_cast<std::size_t>(e) * p;
        for (std::size_t q = 0; q < g.size(); ++q) {
            s.basis().eval(g.x[q], phi.data(), dphi.data(), nullptr);
            double du = 0.0;
            for (int j = 0; j < m; ++j) du += s.values[off + j] * dphi[j] / half;
            const double w = g.w[q] * half;
            for (int i = 0; i < m; ++i) {
                rhs[static_cast<Eigen::Index>(off + i)] += w * du * phi[i];
                for (int j = 0; j < m; ++j)
                    trip.emplace_back(static_cast<int>(off + i), static_cast<int>(off + j), w * phi[i] * phi[j]);
            }
        }
    }
    SpMat mass(static_cast<Eigen::Index>(ndof), static_cast<Eigen::Index>(ndof));
    mass.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SpMat> solver(mass);
    if (solver.info() != Eigen::Success) throw NumericalFailure("radial BVP: mass matrix factorization failed");
    const Eigen::VectorXd dv = solver.solve(rhs);
    s.derivative_values.assign(dv.data(), dv.data() + dv.size());
}

RadialSolution solve_radial(RadialKind kind, double kappa, int d, int n, int degree, const RadialSolution* e_sol) {
    RadialSolution s = make_grid(kind, kappa, d, n, degree);
    const int p = degree, m = p + 1;
    const std::size_t ndof = s.nodes.size();
    const Rule1D g = gauss_legendre(2 * p + 6);
    const double load_pow = load_sin_power(kind, d);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * m * m);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ndof));
    double load_abs = 0.0;
    std::vector<double> phi(m), dphi(m);
    std::vector<double> ke(static_cast<std::size_t>(m) * m);
    std::vector<double> fe(m);

    for (int e = 0; e < n; ++e) {
        const double lo = s.vertices[e], hi = s.vertices[e + 1], jac = 2.0 / (hi - lo);
        const double th_hi = kPi * (1.0 - static_cast<double>(e) / n);
        const double th_lo = kPi * (1.0 - static_cast<double>(e + 1) / n);
        std::fill(ke.begin(), ke.end(), 0.0);
        std::fill(fe.begin(), fe.end(), 0.0);
        for (std::size_t q = 0; q < g.size(); ++q) {
            const double th = th_lo + 0.5 * (g.x[q] + 1.0) * (th_hi - th_lo);
            const double sn = std::sin(th);
            const double wt = 0.5 * g.w[q] * (th_hi - th_lo);
            const double r = std::cos(th);
            const double xi = std::clamp(jac * (r - lo) - 1.0, -1.0, 1.0);
            s.basis().eval(xi, phi.data(), dphi.data(), nullptr);
            const double ev = kind == RadialKind::k ? e_sol->value(r) : 0.0;
            const Coeffs c = bvp_coeffs(kind, kappa, d, r, ev);
            const double wa = wt * sn;
            const double wf = wt * std::pow(sn, load_pow);
            for (int i = 0; i < m; ++i) {
                fe[i] -= wf * c.F * phi[i];
                for (int j = 0; j < m; ++j)
                    ke[static_cast<std::size_t>(i) * m + j] +=
                        wa * (c.P * dphi[i] * dphi[j] * jac * jac + c.Q * phi[i] * phi[j]);
            }
        }
        const std::size_t off = static_cast<std::size_t>(e) * p;
        for (int i = 0; i < m; ++i) {
            load[static_cast<Eigen::Index>(off + i)] += fe[i];
            load_abs += std::abs(fe[i]);
            for (int j = 0; j < m; ++j)
                trip.emplace_back(static_cast<int>(off + i), static_cast<int>(off + j), ke[static_cast<std::size_t>(i) * m + j]);
        }
    }

    SpMat a(static_cast<Eigen::Index>(ndof), static_cast<Eigen::Index>(ndof));
    a.setFromTriplets(trip.begin(), trip.end());

    if (is_neumann(kind)) {
        const double total = load.sum();
        if (std::abs(total) > 1e-10 * std::max(load_abs, 1e-300))
            throw NumericalFailure(std::string("radial BVP (") + to_string(kind) +
                                   "): load violates the discrete compatibility condition");
        std::size_t pin = 0;
        for (std::size_t i = 1; i < ndof; ++i)
            if (std::abs(s.nodes[i]) < std::abs(s.nodes[pin])) pin = i;
        const int ip = static_cast<int>(pin);
        for (int col = 0; col < a.outerSize(); ++col)
            for (SpMat::InnerIterator it(a, col); it; ++it)
                if (it.row() == ip || it.col() == ip) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
        load[ip] = 0.0;
    }

    Eigen::SimplicialLDLT<SpMat> solver(a);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure(std::string("radial BVP (") + to_string(kind) + "): stiffness factorization failed");
    const Eigen::VectorXd x = solver.solve(load);
    if (solver.info() != Eigen::Success || !x.allFinite())
        throw NumericalFailure(std::string("radial BVP (") + to_string(kind) + "): solve failed");
    s.values.assign(x.data(), x.data() + x.size());

    if (is_neumann(kind)) {
        // Exact integral of the piecewise polynomial over [-1, 1].
        const Rule1D gm = gauss_legendre(p + 1);
        std::vector<double> ph(m);
        double integral = 0.0;
        for (int e = 0; e < n; ++e) {
            const double half = 0.5 * (s.vertices[e + 1] - s.vertices[e]);
            const std::size_t off = static_cast<std::size_t>(e) * p;
            for (std::size_t q = 0; q < gm.size(); ++q) {
                s.basis().eval(gm.x[q], ph.data(), nullptr, nullptr);
                for (int j = 0; j < m; ++j) integral += gm.w[q] * half * s.values[off + j] * ph[j];
            }
        }
        const double mean = 0.5 * integral;
        for (double& v : s.values) v -= mean;
    }

    project_derivative(s);
    return s;
}

}  // namespace

RadialSolution solve_dirichlet_type_bvp(RadialKind kind, double kappa, int d, int n, int degree) {
    if (is_neumann(kind)) throw std::invalid_argument("solve_dirichlet_type_bvp: kind must be h, a, b or e");
    return solve_radial(kind, kappa, d, n, degree, nullptr);
}

RadialSolution solve_neumann_type_bvp(RadialKind kind, double kappa, int d, int n, const RadialSolution* e_sol,
                                      int degree) {
    if (!is_neumann(kind)) throw std::invalid_argument("solve_neumann_type_bvp: kind must be c or k");
    if (kind == RadialKind::k) {
        if (!e_sol || e_sol->kind != RadialKind::e || e_sol->kappa != kappa || e_sol->d != d)
            throw std::invalid_argument("solve_neumann_type_bvp: k requires the e solution with matching (kappa, d)");
    }
    return solve_radial(kind, kappa, d, n, degree, e_sol);
}

double strong_residual(const RadialSolution& s, double r, const RadialSolution* e_sol) {
    const double k = s.kappa;
    const double d = s.d;
    const double t = 1.0 - r * r;
    const double u = s.value(r), du = s.local_derivative(r), d2u = s.local_second_derivative(r);
    switch (s.kind) {
        case RadialKind::h:
        case RadialKind::a:
        case RadialKind::b: {
            const double f = s.kind == RadialKind::h ? r : (s.kind == RadialKind::a ? 1.0 : r * r);
            return t * d2u + (k * t - (d + 1)) * r * du - (k * r * r + d - 1) * u - f;
        }
        case RadialKind::e:
            return t * d2u + (k * t - (d + 3)) * r * du - (2 * k * r * r + 2 * d) * u - r;
        case RadialKind::c:
            return t * d2u + (k * t - (d - 1)) * r * du - r;
        case RadialKind::k: {
            if (!e_sol) throw std::invalid_argument("strong_residual: k requires the e solution");
            return t * d2u + (k * t - (d - 1)) * r * du + 2.0 * e_sol->value(r);
        }
    }
    return 0.0;
}

double max_strong_residual(const RadialSolution& s, const RadialSolution* e_sol, int samples) {
    double worst = 0.0;
    for (int e = 0; e < s.n_elements; ++e) {
        const double lo = s.vertices[e], hi = s.vertices[e + 1];
        for (int j = 0; j < samples; ++j) {
            const double r = lo + (hi - lo) * (j + 0.5) / samples;
            worst = std::max(worst, std::abs(strong_residual(s, r, e_sol)));
        }
    }
    return worst;
}

RadialBundle solve_bundle(double kappa, int d, int n, int degree) {
    RadialBundle b;
    b.h = solve_dirichlet_type_bvp(RadialKind::h, kappa, d, n, degree);
    b.a = solve_dirichlet_type_bvp(RadialKind::a, kappa, d, n, degree);
    b.b = solve_dirichlet_type_bvp(RadialKind::b, kappa, d, n, degree);
    b.e = solve_dirichlet_type_bvp(RadialKind::e, kappa, d, n, degree);
    b.c = solve_neumann_type_bvp(RadialKind::c, kappa, d, n, nullptr, degree);
    b.k = solve_neumann_type_bvp(RadialKind::k, kappa, d, n, &b.e, degree);
    return b;
}

// ---------------------------------------------------------------- GCI and corrector

Vec gci_vector(const RadialSolution& h, const Direction& u, const Direction& omega) {
    if (h.kind != RadialKind::h) throw std::invalid_argument("gci_vector: profile must be of kind h");
    require_same_dim(u.dim(), omega.dim(), "gci_vector");
    const PolarParts pp = polar_decompose(omega, u);
    return pp.perp * h.value(pp.cos_theta);
}

void CorrectorInputs::validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("CorrectorInputs: rho must be > 0");
    const int d = u.dim();
    require_same_dim(grad_rho.size(), d, "CorrectorInputs grad_rho");
    require_same_dim(grad_u.rows(), d, "CorrectorInputs grad_u rows");
    require_same_dim(grad_u.cols(), d, "CorrectorInputs grad_u cols");
    if ((grad_u * u.vec()).norm() > Tolerances::tangency)
        throw std::invalid_argument("CorrectorInputs: (grad u) u must vanish");
}

std::array<double, 5> corrector_channels(const CorrectorInputs& in, const RadialBundle& bundle, const Direction& omega) {
    in.validate();
    require_same_dim(omega.dim(), in.u.dim(), "corrector_channels");
    const double kappa = bundle.kappa();
    const PolarParts pp = polar_decompose(omega, in.u);
    const double r = pp.cos_theta;
    const Vec glog = in.grad_rho / in.rho;
    const Vec convect = in.grad_u.transpose() * in.u.vec();  // ((u.grad)u)_j = u_i d_i u_j
    const double div_u = in.grad_u.trace();
    return {
        bundle.a.value(r) * pp.perp.dot(glog),
        kappa * bundle.b.value(r) * pp.perp.dot(convect),
        bundle.c.value(r) * in.u.vec().dot(glog),
        kappa * bundle.e.value(r) * pp.perp.dot(in.grad_u * pp.perp),
        kappa * bundle.k.value(r) * div_u,
    };
}

double corrector_f1(const CorrectorInputs& in, const RadialBundle& bundle, const Equilibrium& eq, const Direction& omega) {
    const auto t = corrector_channels(in, bundle, omega);
    const double sum = t[0] + t[1] + t[2] + t[3] + t[4];
    return in.rho * eq(omega.dot(in.u)) * sum;
}

// ---------------------------------------------------------------- coefficients

const std::array<const char*, 16>& CoefficientSet::names() {
    static const std::array<const char*, 16> n = {"C1", "C2", "C3", "C4", "E1", "F1", "F2", "F3",
                                                  "G1", "G2", "G3", "G4", "H1", "H2", "H3", "H4"};
    return n;
}

std::array<double, 16> CoefficientSet::values() const {
    return {C1, C2, C3, C4, E1, F1, F2, F3, G1, G2, G3, G4, H1, H2, H3, H4};
}

void CoefficientSet::set_values(const std::array<double, 16>& v) {
    C1 = v[0]; C2 = v[1]; C3 = v[2]; C4 = v[3]; E1 = v[4]; F1 = v[5]; F2 = v[6]; F3 = v[7];
    G1 = v[8]; G2 = v[9]; G3 = v[10]; G4 = v[11]; H1 = v[12]; H2 = v[13]; H3 = v[14]; H4 = v[15];
}

CoefficientSet CoefficientSet::scaled(double factor) const {
    CoefficientSet out = *this;
    auto v = values();
    for (double& x : v) x *= factor;
    out.set_values(v);
    return out;
}

namespace {

void check_bundle(const RadialBundle& b) {
    const RadialSolution* all[] = {&b.h, &b.a, &b.b, &b.c, &b.e, &b.k};
    const RadialKind kinds[] = {RadialKind::h, RadialKind::a, RadialKind::b, RadialKind::c, RadialKind::e, RadialKind::k};
    for (int i = 0; i < 6; ++i) {
        if (all[i]->kind != kinds[i] || all[i]->values.empty())
            throw std::invalid_argument("coefficient bundle: missing or misplaced profile");
        if (all[i]->kappa != b.h.kappa || all[i]->d != b.h.d)
            throw std::invalid_argument("coefficient bundle: profiles do not share (kappa, d)");
    }
}

struct Node {
    double r, sn, E;   // cos, sin, exp weight
    double h, a, b, c, e, k;
    double da, db, dc, de, dk;
};

// Nodes of a Gauss-Legendre rule in theta on (0, pi) with line-element weights.
template <class F>
void for_theta_nodes(const RadialBundle& bd, int n_quad, F&& f) {
    const Rule1D g = gauss_legendre(n_quad, 0.0, kPi);
    for (std::size_t q = 0; q < g.size(); ++q) {
        Node nd;
        nd.r = std::cos(g.x[q]);
        nd.sn = std::sin(g.x[q]);
        nd.E = weight_exp(bd.kappa(), nd.r);
        nd.h = bd.h.value(nd.r); nd.a = bd.a.value(nd.r); nd.b = bd.b.value(nd.r);
        nd.c = bd.c.value(nd.r); nd.e = bd.e.value(nd.r); nd.k = bd.k.value(nd.r);
        nd.da = bd.a.derivative(nd.r); nd.db = bd.b.derivative(nd.r); nd.dc = bd.c.derivative(nd.r);
        nd.de = bd.e.derivative(nd.r); nd.dk = bd.k.derivative(nd.r);
        f(g.w[q], nd);
    }
}

// Accumulated 1D integrals of the theorem form.
struct TheoremSums {
    double Sq = 0, Ss = 0;
    double C0 = 0, C1 = 0, C2 = 0, C3 = 0, C4 = 0;
    double E1 = 0, F1 = 0, F2 = 0, F3 = 0, G1 = 0, G2 = 0, G3 = 0, G4 = 0, H2 = 0, H3 = 0, H4 = 0;
    double k_div = 0, a_over_kappa = 0, last = 0;
};

TheoremSums theorem_sums(const RadialBundle& bd, int n_quad) {
    const double kappa = bd.kappa();
    const int d = bd.d();
    const double dm1 = d - 1.0, dp1 = d + 1.0;
    TheoremSums t;
    for_theta_nodes(bd, n_quad, [&](double w, const Node& x) {
        const double s2 = x.sn * x.sn;
        const double q = w * x.E * std::pow(x.sn, d - 2);
        // s = exp * |h cos| * sin^d = -exp h cos sin^d; sd = s / cos with cos cancelled.
        const double sd = -w * x.E * x.h * std::pow(x.sn, d);
        const double s = sd * x.r;
        t.Sq += q;
        t.Ss += s;
        t.C0 += q * kappa / dm1 * x.h * x.r * s2;
        t.C1 += q * x.c * x.r;
        t.C2 += q * x.a * s2 / dm1;
        t.C3 += q * kappa * x.b * s2 / dm1;
        t.C4 += q * kappa * x.r * (x.e * s2 / dm1 + x.k);
        if (kappa > 0.0) {
            t.E1 += (s * x.a + sd * x.c) / kappa;
            t.G1 += s * (x.c * x.r + x.b + (x.dc - x.a) / kappa);
            const double ga = x.e + x.da / kappa;
            t.G2 += s * (-2.0 * x.a / kappa + s2 / dp1 * x.a) + sd * s2 / dp1 * ga;
            t.G3 += sd * s2 / dp1 * ga + s * s2 / dp1 * x.a;
            t.G4 += sd * (x.k + s2 / dp1 * ga) + s * s2 / dp1 * x.a;
            t.a_over_kappa += s * x.a / kappa;
        }
        t.F1 += s * x.b;
        t.F2 += sd * x.e * s2 / dp1;
        t.F3 += sd * (2.0 * x.e * s2 / dp1 + x.k);
        const double hb = kappa * x.e * x.r + kappa * x.b + x.de;
        t.H2 += s * (-x.b - x.e * x.r + s2 / dp1 * hb) + sd * s2 / dp1 * (x.db + x.e);
        t.H3 += s * (-x.e * x.r + s2 / dp1 * hb) + sd * s2 / dp1 * x.db;
        t.H4 += s * (kappa * x.k * x.r + x.dk + s2 / dp1 * hb) + sd * s2 / dp1 * x.db;
        t.k_div += sd * x.k;
        t.last += s * ((kappa * x.k + x.e) * x.r + x.dk);
    });
    return t;
}

}  // namespace

CoefficientSet compute_coefficients(const RadialBundle& bundle, int n_quad) {
    check_bundle(bundle);
    const TheoremSums t = theorem_sums(bundle, n_quad);
    CoefficientSet c;
    c.kappa = bundle.kappa();
    c.d = bundle.d();
    c.provenance = Provenance::theorem_form;
    c.C0 = t.C0 / t.Sq;
    c.C1 = t.C1 / t.Sq;
    c.C2 = t.C2 / t.Sq;
    c.C3 = t.C3 / t.Sq;
    c.C4 = t.C4 / t.Sq;
    if (c.kappa > 0.0) {
        c.E1 = t.E1 / t.Ss;
        c.G1 = t.G1 / t.Ss;
        c.G2 = t.G2 / t.Ss;
        c.G3 = t.G3 / t.Ss;
        c.G4 = t.G4 / t.Ss;
        c.F1 = t.F1 / t.Ss;
        c.F2 = t.F2 / t.Ss;
        c.F3 = t.F3 / t.Ss;
        c.H2 = t.H2 / t.Ss;
        c.H3 = t.H3 / t.Ss;
        c.H4 = t.H4 / t.Ss;
    } else {
        // h vanishes identically, so the weight s does and the direction equation is undefined.
        const double nan = std::numeric_limits<double>::quiet_NaN();
        c.E1 = c.F1 = c.F2 = c.F3 = c.G1 = c.G2 = c.G3 = c.G4 = c.H2 = c.H3 = c.H4 = nan;
    }
    c.H1 = c.E1;
    return c;
}

std::array<double, 6> theorem_identities(const RadialBundle& bundle, const CoefficientSet& c, int n_quad) {
    check_bundle(bundle);
    const TheoremSums t = theorem_sums(bundle, n_quad);
    const double k_div = t.k_div / t.Ss;
    const double a_k = t.a_over_kappa / t.Ss;
    const double last = t.last / t.Ss;
    return {
        c.H1 - c.E1,
        c.F3 - 2.0 * c.F2 - k_div,
        c.G2 - c.G3 + 2.0 * a_k,
        c.G4 - c.G3 - c.F3 + 2.0 * c.F2,
        c.H3 - c.H2 - c.F1 + c.F2,
        c.H4 - c.H3 - last,
    };
}

CoefficientSet compute_coefficients_derivation(const RadialBundle& bundle, int n_theta, int n_azimuth) {
    check_bundle(bundle);
    const double kappa = bundle.kappa();
    const int d = bundle.d();
    const Equilibrium eq = make_equilibrium(kappa, d);
    const Direction u = Direction::axis(d, d - 1);
    const SphereQuadrature quad = build_quadrature(d, u, n_theta, n_azimuth);
    const double dm1 = d - 1.0, dp1 = d + 1.0;

    double C0 = 0, B32 = 0, B42 = 0, B52 = 0, B12 = 0, B22 = 0, B11 = 0, B21 = 0, B31 = 0, B41 = 0, B43 = 0, B51 = 0;
    double A11 = 0, A12 = 0, A13 = 0, A21 = 0, A22 = 0;
    double C1 = 0, C2 = 0, C3 = 0, C4 = 0;
    for (std::size_t q = 0; q < quad.size(); ++q) {
        const double r = quad.nodes[q].dot(u.vec());
        const double t = 1.0 - r * r;
        const double w = quad.weights[q] * eq(r);
        const double h = bundle.h.value(r), a = bundle.a.value(r), b = bundle.b.value(r);
        const double c = bundle.c.value(r), e = bundle.e.value(r), k = bundle.k.value(r);
        const double da = bundle.a.derivative(r), db = bundle.b.derivative(r), dc = bundle.c.derivative(r);
        const double de = bundle.e.derivative(r), dk = bundle.k.derivative(r);
        C0 += w * kappa / dm1 * h * r * t;
        B32 += w / dm1 * h * c * t;
        B42 += w * kappa / (dm1 * dp1) * h * e * t * t;
        B52 += w * kappa / dm1 * h * k * t;
        B12 += w / dm1 * h * a * r * t;
        B22 += w * kappa / dm1 * h * b * r * t;
        B11 += w / (dm1 * dp1) * h * da * t * t;
        B21 += w * kappa / (dm1 * dp1) * h * db * t * t;
        B31 += w / dm1 * h * dc * r * t;
        B41 += w * kappa / (dm1 * dp1) * h * de * r * t * t;
        B43 += w * kappa / dm1 * h * e * r * r * t;
        B51 += w * kappa / dm1 * h * dk * r * t;
        A11 += w * kappa / dm1 * h * c * r * r * t;
        A12 += w * kappa * kappa / (dm1 * dp1) * h * e * r * r * t * t;
        A13 += w * kappa * kappa / dm1 * h * k * r * r * t;
        A21 += w * kappa / (dm1 * dp1) * h * a * r * t * t;
        A22 += w * kappa * kappa / (dm1 * dp1) * h * b * r * t * t;
        C1 += w * c * r;
        C2 += w * a * t / dm1;
        C3 += w * kappa * b * t / dm1;
        C4 += w * kappa * r * (e * t / dm1 + k);
    }
    if (std::abs(C0) < 1e-14)
        throw NumericalFailure("compute_coefficients_derivation: |C0| below 1e-14 (h vanishes)");

    CoefficientSet out;
    out.kappa = kappa;
    out.d = d;
    out.provenance = Provenance::derivation_form;
    out.C0 = C0;
    out.C1 = C1;
    out.C2 = C2;
    out.C3 = C3;
    out.C4 = C4;
    out.E1 = (B12 + B32) / C0;
    out.F1 = B22 / C0;
    out.F2 = B42 / C0;
    out.F3 = (2.0 * B42 + B52) / C0;
    out.G1 = (A11 + B22 + B31 - B12) / C0;
    out.G2 = (B42 + A21 + B11 - 2.0 * B12) / C0;
    out.G3 = (B42 + A21 + B11) / C0;
    out.G4 = (B42 + A21 + B11 + B52) / C0;
    out.H1 = (B12 + B32) / C0;
    out.H2 = (A12 + A22 + B41 + B21 + B42 - B22 - B43) / C0;
    out.H3 = (A12 + A22 + B41 + B21 - B43) / C0;
    out.H4 = (A12 + A22 + B41 + B21 + A13 + B51) / C0;
    return out;
}

}  // namespace nematic
