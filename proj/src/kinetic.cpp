#include "nematic/kinetic.hpp"

#include "nematic/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace nematic {

namespace {

constexpr double kPi = std::numbers::pi;

void check_grid(int n, int d) {
    if (n < 4) throw std::invalid_argument("kinetic: need at least 4 cells");
    if (d < 2) throw std::invalid_argument("kinetic: d must be >= 2");
}

double equilibrium_exponent(double kappa, double theta, bool transverse) {
    const double c = transverse ? std::sin(theta) : std::cos(theta);
    return 0.5 * kappa * (c * c - 1.0);
}

// Face transmissivities D S M_face / dtheta; zero on the boundary faces.
std::vector<double> transmissivities(int n, int d, double D, const DiscreteEquilibrium& m) {
    const double dth = kPi / n;
    const double W = sphere_wedge(d - 2);
    std::vector<double> t(static_cast<std::size_t>(n) + 1, 0.0);
    for (int j = 1; j < n; ++j) {
        const double S = std::pow(std::sin(j * dth), d - 2) / W;
        t[j] = D * S * m.face[j] / dth;
    }
    return t;
}

struct Setup {
    DiscreteEquilibrium m;
    std::vector<double> V;
    std::vector<double> T;
};

Setup make_setup(const AngularDensity& f, double kappa, double D, AxisPolicy policy) {
    const AxisChoice ax = choose_axis(f, policy);
    Setup s;
    s.m = discrete_equilibrium(f.n(), f.d, kappa, ax.transverse);
    s.V = cell_measures(f.n(), f.d);
    s.T = transmissivities(f.n(), f.d, D, s.m);
    return s;
}

std::vector<double> apply_operator(const std::vector<double>& f, const Setup& s) {
    const int n = static_cast<int>(f.size());
    std::vector<double> g(f.size()), out(f.size());
    for (int j = 0; j < n; ++j) g[j] = f[j] / s.m.center[j];
    for (int j = 0; j < n; ++j) {
        const double right = j + 1 < n ? s.T[j + 1] * (g[j + 1] - g[j]) : 0.0;
        const double left = j > 0 ? s.T[j] * (g[j] - g[j - 1]) : 0.0;
        out[j] = (right - left) / s.V[j];
    }
    return out;
}

}  // namespace

double AngularDensity::dtheta() const { return kPi / n(); }
double AngularDensity::center(int j) const { return (j + 0.5) * dtheta(); }
double AngularDensity::face(int j) const { return j * dtheta(); }

double AngularDensity::mass() const {
    const auto V = cell_measures(n(), d);
    double m = 0.0;
    for (int j = 0; j < n(); ++j) m += f[j] * V[j];
    return m;
}

namespace {

// Cell integrals of cos^power(theta) against sin^{d-2}, normalized by the total measure.
std::vector<double> cell_moments_uncached(int n, int d, int power) {
    const double dth = kPi / n;
    const Rule1D g = gauss_legendre(16);
    std::vector<double> v(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        double s = 0.0, m = 0.0;
        for (std::size_t q = 0; q < g.size(); ++q) {
            const double th = (j + 0.5 + 0.5 * g.x[q]) * dth;
            const double w = g.w[q] * std::pow(std::sin(th), d - 2);
            s += w;
            m += w * std::pow(std::cos(th), power);
        }
        v[j] = 0.5 * dth * m;
        total += 0.5 * dth * s;
    }
    for (double& x : v) x /= total;
    return v;
}

std::vector<double> cell_measures_uncached(int n, int d) { return cell_moments_uncached(n, d, 0); }

std::vector<double> cell_cos2_moments(int n, int d) {
    thread_local int cn = -1, cd = -1;
    thread_local std::vector<double> cache;
    if (n != cn || d != cd) {
        cache = cell_moments_uncached(n, d, 2);
        cn = n;
        cd = d;
    }
    return cache;
}

}  // namespace

std::vector<double> cell_measures(int n, int d) {
    check_grid(n, d);
    thread_local int cn = -1, cd = -1;
    thread_local std::vector<double> cache;
    if (n != cn || d != cd) {
        cache = cell_measures_uncached(n, d);
        cn = n;
        cd = d;
    }
    return cache;
}

AngularDensity uniform_density(int n, int d) {
    check_grid(n, d);
    return {d, std::vector<double>(static_cast<std::size_t>(n), 1.0)};
}

AngularDensity bump_density(int n, int d, double center, double width) {
    check_grid(n, d);
    if (!(width > 0.0)) throw std::invalid_argument("bump_density: width must be > 0");
    AngularDensity a{d, std::vector<double>(static_cast<std::size_t>(n))};
    for (int j = 0; j < n; ++j) {
        const double x = (a.center(j) - center) / width;
        a.f[j] = std::exp(-0.5 * x * x);
    }
    const double m = a.mass();
    for (double& x : a.f) x /= m;
    return a;
}

AngularDensity equilibrium_density(int n, int d, double kappa, bool transverse) {
    return {d, discrete_equilibrium(n, d, kappa, transverse).center};
}

DiscreteEquilibrium discrete_equilibrium(int n, int d, double kappa, bool transverse) {
    check_grid(n, d);
    if (transverse && d != 2) throw std::invalid_argument("discrete_equilibrium: transverse axis needs d = 2");
    const double dth = kPi / n;
    const auto V = cell_measures(n, d);
    DiscreteEquilibrium m;
    m.center.resize(static_cast<std::size_t>(n));
    m.face.resize(static_cast<std::size_t>(n) + 1);
    double mass = 0.0;
    for (int j = 0; j < n; ++j) {
        m.center[j] = std::exp(equilibrium_exponent(kappa, (j + 0.5) * dth, transverse));
        mass += m.center[j] * V[j];
    }
    for (int j = 0; j <= n; ++j) m.face[j] = std::exp(equilibrium_exponent(kappa, j * dth, transverse)) / mass;
    for (double& x : m.center) x /= mass;
    return m;
}

AxisChoice choose_axis(const AngularDensity& f, AxisPolicy policy) {
    if (policy == AxisPolicy::fixed) return {false};
    const auto V = cell_measures(f.n(), f.d);
    const auto C2 = cell_cos2_moments(f.n(), f.d);
    double m = 0.0, c2 = 0.0;
    for (int j = 0; j < f.n(); ++j) {
        m += f.f[j] * V[j];
        c2 += f.f[j] * C2[j];
    }
    if (!(m > 0.0)) throw std::invalid_argument("choose_axis: density has no mass");
    // Axial eigenvalue q, transverse eigenvalues -q/(d-1).
    const double q = c2 / m - 1.0 / f.d;
    const double gap = std::abs(q) * f.d / (f.d - 1.0);
    if (gap < Tolerances::gap_floor) throw DegenerateLeadingEigenvalue(gap, Tolerances::gap_floor);
    if (q > 0.0) return {false};
    if (f.d == 2) return {true};
    throw DegenerateLeadingEigenvalue(0.0, Tolerances::gap_floor);
}

std::vector<double> gamma_apply(const AngularDensity& f, double kappa, double D, AxisPolicy policy) {
    const Setup s = make_setup(f, kappa, D, policy);
    return apply_operator(f.f, s);
}

double entropy_dissipation(const AngularDensity& f, double kappa, double D, AxisPolicy policy) {
    const Setup s = make_setup(f, kappa, D, policy);
    const int n = f.n();
    double h = 0.0;
    for (int j = 1; j < n; ++j) {
        const double dg = f.f[j] / s.m.center[j] - f.f[j - 1] / s.m.center[j - 1];
        h -= s.T[j] * dg * dg;
    }
    return h;
}

double entropy_dissipation_direct(const AngularDensity& f, double kappa, double D, AxisPolicy policy) {
    const Setup s = make_setup(f, kappa, D, policy);
    const AxisChoice ax = choose_axis(f, policy);
    const auto g = apply_operator(f.f, s);
    const double Z = zonal_average([&](double r) {
        const double c2 = ax.transverse ? 1.0 - r * r : r * r;
        return std::exp(0.5 * kappa * (c2 - 1.0));
    }, f.d, 256);
    double h = 0.0;
    for (int j = 0; j < f.n(); ++j) {
        const double M = std::exp(equilibrium_exponent(kappa, f.center(j), ax.transverse)) / Z;
        h += g[j] * f.f[j] / M * s.V[j];
    }
    return h;
}

double entropy_functional(const AngularDensity& f, double kappa, AxisPolicy policy) {
    const AxisChoice ax = choose_axis(f, policy);
    const auto m = discrete_equilibrium(f.n(), f.d, kappa, ax.transverse);
    const auto V = cell_measures(f.n(), f.d);
    double e = 0.0;
    for (int j = 0; j < f.n(); ++j) e += 0.5 * f.f[j] * f.f[j] / m.center[j] * V[j];
    return e;
}

double l1_distance_to_equilibrium(const AngularDensity& f, double kappa, AxisPolicy policy) {
    const AxisChoice ax = choose_axis(f, policy);
    const auto m = discrete_equilibrium(f.n(), f.d, kappa, ax.transverse);
    const auto V = cell_measures(f.n(), f.d);
    const double mass = f.mass();
    double l1 = 0.0;
    for (int j = 0; j < f.n(); ++j) l1 += std::abs(f.f[j] - mass * m.center[j]) * V[j];
    return l1;
}

KineticResult evolve(const AngularDensity& f0, double kappa, double D, double dt, double T, AxisPolicy policy,
                     int sample_every) {
    if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("evolve: need dt > 0 and T >= 0");
    if (sample_every < 1) throw std::invalid_argument("evolve: sample_every must be >= 1");
    const int n = f0.n();
    check_grid(n, f0.d);
    KineticResult res;
    res.f = f0;
    const auto V = cell_measures(n, f0.d);
    const long steps = std::lround(T / dt);

    auto sample = [&](double t) {
        KineticSample s{t, 0, 0, 0, res.f.mass()};
        try {
            s.l1_to_equilibrium = l1_distance_to_equilibrium(res.f, kappa, policy);
            s.entropy = entropy_functional(res.f, kappa, policy);
            s.dissipation = entropy_dissipation(res.f, kappa, D, policy);
        } catch (const DegenerateLeadingEigenvalue&) {
            s.l1_to_equilibrium = s.entropy = s.dissipation = std::numeric_limits<double>::quiet_NaN();
        }
        res.samples.push_back(s);
    };
    sample(0.0);

    std::vector<double> lo(static_cast<std::size_t>(n)), di(lo.size()), up(lo.size()), rhs(lo.size()), g(lo.size());
    Setup s;
    int current = -1;  // -1 none, 0 axis, 1 transverse
    for (long k = 0; k < steps; ++k) {
        AxisChoice ax;
        try {
            ax = choose_axis(res.f, policy);
        } catch (const DegenerateLeadingEigenvalue&) {
            ++res.degenerate_steps;
            if ((k + 1) % sample_every == 0 || k + 1 == steps) sample((k + 1) * dt);
            continue;
        }
        if (current != static_cast<int>(ax.transverse)) {
            s.m = discrete_equilibrium(n, f0.d, kappa, ax.transverse);
            s.V = V;
            s.T = transmissivities(n, f0.d, D, s.m);
            current = static_cast<int>(ax.transverse);
        }
        const double before = res.f.mass();
        for (int j = 0; j < n; ++j) {
            const double a = s.V[j] * s.m.center[j] / dt;
            lo[j] = -s.T[j];
            up[j] = -s.T[j + 1];
            di[j] = a + s.T[j] + s.T[j + 1];
            rhs[j] = s.V[j] * res.f.f[j] / dt;
        }
        // Thomas algorithm.
        for (int j = 1; j < n; ++j) {
            const double w = lo[j] / di[j - 1];
            di[j] -= w * up[j - 1];
            rhs[j] -= w * rhs[j - 1];
        }
        g[n - 1] = rhs[n - 1] / di[n - 1];
        for (int j = n - 2; j >= 0; --j) g[j] = (rhs[j] - up[j] * g[j + 1]) / di[j];
        for (int j = 0; j < n; ++j) res.f.f[j] = s.m.center[j] * g[j];
        const double after = res.f.mass();
        res.max_mass_drift_per_step = std::max(res.max_mass_drift_per_step, std::abs(after - before) / before);
        if ((k + 1) % sample_every == 0 || k + 1 == steps) sample((k + 1) * dt);
    }
    return res;
}

}  // namespace nematic
