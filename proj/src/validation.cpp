#include "nematic/validation.hpp"

#include "nematic/macro.hpp"
#include "nematic/philox.hpp"
#include "nematic/qtensor.hpp"
#include "nematic/quadrature.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nematic {

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ------------------------------------------------------------------ BVP residual and order

std::vector<BvpCaseReport> bvp_residual_study(const std::vector<double>& kappas, const std::vector<int>& ds,
                                              int n_fine, const std::vector<int>& levels, int degree) {
    std::vector<BvpCaseReport> out;
    for (double kappa : kappas) {
        for (int d : ds) {
            const RadialBundle fine = solve_bundle(kappa, d, n_fine, degree);
            std::vector<RadialBundle> coarse;
            for (int n : levels) coarse.push_back(solve_bundle(kappa, d, n, degree));
            const RadialKind kinds[] = {RadialKind::h, RadialKind::a, RadialKind::b,
                                        RadialKind::c, RadialKind::e, RadialKind::k};
            for (RadialKind kind : kinds) {
                auto pick = [kind](const RadialBundle& b) -> const RadialSolution& {
                    switch (kind) {
                        case RadialKind::h: return b.h;
                        case RadialKind::a: return b.a;
                        case RadialKind::b: return b.b;
                        case RadialKind::c: return b.c;
                        case RadialKind::e: return b.e;
                        case RadialKind::k: return b.k;
                    }
                    return b.h;
                };
                BvpCaseReport rep;
                rep.kind = kind;
                rep.kappa = kappa;
                rep.d = d;
                const bool needs_e = kind == RadialKind::k;
                rep.residual_fine = max_strong_residual(pick(fine), needs_e ? &fine.e : nullptr);
                std::vector<double> h;
                for (std::size_t l = 0; l < levels.size(); ++l) {
                    rep.levels.push_back(levels[l]);
                    rep.level_residuals.push_back(
                        max_strong_residual(pick(coarse[l]), needs_e ? &coarse[l].e : nullptr));
                    h.push_back(1.0 / levels[l]);
                }
                rep.order = levels.size() >= 2 ? loglog_slope(h, rep.level_residuals) : 0.0;
                out.push_back(std::move(rep));
            }
        }
    }
    return out;
}

// ------------------------------------------------------------------ local averaging expansion

PhaseSpaceDensity default_phase_space_density(double kappa) {
    PhaseSpaceDensity f;
    f.kappa = kappa;
    f.rho = [](const Vec& x) { return 1.0 + 0.5 * std::sin(2.0 * kPi * x[0]); };
    f.u = [](const Vec& x) {
        const double phi = 0.3 + 0.4 * std::sin(2.0 * kPi * x[1]);
        return vec2(std::cos(phi), std::sin(phi));
    };
    return f;
}

Mat local_equilibrium_qtensor(const PhaseSpaceDensity& f, const EquilibriumEigenvalues& ev, const Vec& x) {
    const int d = static_cast<int>(x.size());
    const Vec u = f.u(x).normalized();
    const Mat uu = u * u.transpose();
    return f.rho(x) * (ev.parallel * uu + ev.transverse * (Mat::Identity(d, d) - uu));
}

ScalingReport eps_expansion_study(const PhaseSpaceDensity& f, const std::vector<double>& eps,
                                  const ScalingOptions& opt) {
    if (eps.size() < 3) throw std::invalid_argument("eps_expansion_study: need at least three eps values");
    for (std::size_t i = 1; i < eps.size(); ++i)
        if (!(eps[i] < eps[i - 1])) throw std::invalid_argument("eps_expansion_study: eps must be strictly decreasing");
    if (opt.kernel == KernelKind::global) throw std::invalid_argument("eps_expansion_study: kernel must be local");

    std::vector<Vec> probes = opt.probes;
    if (probes.empty()) probes = {vec2(0.13, 0.37), vec2(0.61, 0.82), vec2(0.4, 0.05)};

    const Rule1D rs = gauss_legendre(opt.n_radial, 0.0, 1.0);
    std::vector<double> ws(rs.size());
    double wsum = 0.0;
    for (std::size_t q = 0; q < rs.size(); ++q) {
        ws[q] = rs.w[q] * rs.x[q] * kernel_profile(opt.kernel, rs.x[q], 2);
        wsum += ws[q] * 2.0 * kPi;
    }

    const EquilibriumEigenvalues ev = equilibrium_eigenvalues(f.kappa, 2);
    ScalingReport rep;
    rep.eps = eps;
    for (double e : eps) {
        const double rad = e * opt.R;
        double worst = 0.0;
        for (const Vec& x0 : probes) {
            const Mat q0 = local_equilibrium_qtensor(f, ev, x0);
            Mat avg = Mat::Zero(2, 2);
            const Vec centre = x0 + vec2(opt.kernel_shift * rad, 0.0);
            for (int a = 0; a < opt.n_angular; ++a) {
                const double phi = 2.0 * kPi * a / opt.n_angular;
                const Vec dir = vec2(std::cos(phi), std::sin(phi));
                for (std::size_t q = 0; q < rs.size(); ++q)
                    avg += ws[q] * (2.0 * kPi / opt.n_angular) * local_equilibrium_qtensor(f, ev, centre + rad * rs.x[q] * dir);
            }
            avg /= wsum;
            worst = std::max(worst, (avg - q0).norm());
        }
        rep.errors.push_back(worst);
    }
    const bool all_positive = std::all_of(rep.errors.begin(), rep.errors.end(), [](double v) { return v > 0.0; });
    rep.slope = all_positive ? loglog_slope(rep.eps, rep.errors) : 0.0;
    return rep;
}

// ------------------------------------------------------------------ GCI orthogonality

GciReport gci_orthogonality_check(const ExpQuadraticDensity& f, const RadialSolution& h, double D, int n_theta,
                                  int n_azimuth) {
    if (h.kind != RadialKind::h) throw std::invalid_argument("gci_orthogonality_check: profile must be h");
    const int d = h.d;
    require_same_dim(f.A.rows(), d, "gci_orthogonality_check");
    const double kappa = h.kappa;

    const SphereQuadrature q0 = build_quadrature(d, Direction::axis(d, d - 1), n_theta, n_azimuth);
    std::vector<double> fv(q0.size());
    for (std::size_t i = 0; i < q0.size(); ++i) fv[i] = f.value(q0.nodes[i]);
    const SpectralInfo si = leading_direction(qtensor_from_density(q0, fv));
    const Direction u = si.direction;

    const SphereQuadrature quad = build_quadrature(d, u, n_theta, n_azimuth);
    GciReport rep;
    rep.u_f = u;
    rep.nodes = quad.size();
    rep.orthogonality = Vec::Zero(d);
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const Direction w = Direction::from_unit(quad.nodes[i]);
        const double g = D * gamma_bar(w, u, kappa, f.jet(quad.nodes[i]));
        rep.orthogonality += quad.weights[i] * g * gci_vector(h, u, w);
        rep.mass_integral += quad.weights[i] * g;
    }
    rep.orthogonality_norm = rep.orthogonality.norm();
    return rep;
}

ExpQuadraticDensity random_test_density(int d, std::uint64_t seed, int index, double scale) {
    const Philox4x32 gen(seed);
    std::vector<double> z;
    for (std::uint32_t b = 0; z.size() < static_cast<std::size_t>(d * d + d); ++b) {
        const auto blk = normal_block(gen, {static_cast<std::uint32_t>(index), b, 0x6e656d61u, 0u});
        z.insert(z.end(), blk.begin(), blk.end());
    }
    ExpQuadraticDensity f;
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = z[static_cast<std::size_t>(i * d + j)];
    f.A = 0.5 * scale * (g + g.transpose());
    f.b = Vec(d);
    for (int i = 0; i < d; ++i) f.b[i] = 0.5 * scale * z[static_cast<std::size_t>(d * d + i)];
    return f;
}

// ------------------------------------------------------------------ first-order corrector

namespace {

AmbientJet constant_jet(int d, double v) {
    AmbientJet j;
    j.value = v;
    j.grad = Vec::Zero(d);
    j.hess = Mat::Zero(d, d);
    return j;
}

AmbientJet scaled(AmbientJet j, double s) {
    j.value *= s;
    j.grad *= s;
    j.hess *= s;
    return j;
}

AmbientJet profile_times(const RadialSolution& s, const Direction& u, double r, const AmbientJet& l) {
    return radial_times(u, s.value(r), s.local_derivative(r), s.local_second_derivative(r), l);
}

}  // namespace

CorrectorResidualReport corrector_residual(const CorrectorInputs& in, const RadialBundle& bundle, int n_theta,
                                           int n_azimuth) {
    in.validate();
    const int d = in.u.dim();
    if (bundle.d() != d) throw DimensionMismatch("corrector_residual: bundle dimension");
    const double kappa = bundle.kappa();
    const Direction& u = in.u;
    const Mat P = tangent_projector(u);
    const Vec glog = in.grad_rho / in.rho;
    const Vec glog_perp = P * glog;
    const double glog_par = u.vec().dot(glog);
    const Vec convect = in.grad_u.transpose() * u.vec();
    const Mat G = in.grad_u;
    const Mat S = P * (0.5 * (G + G.transpose())) * P;
    const double div_u = G.trace();

    const SphereQuadrature quad = build_quadrature(d, u, n_theta, n_azimuth);
    CorrectorResidualReport rep;
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const Vec& x = quad.nodes[i];
        const Direction w = Direction::from_unit(x);
        const PolarParts pp = polar_decompose(w, u);
        const double r = pp.cos_theta;
        const double e = bundle.e.value(r);

        const AmbientJet j1 = profile_times(bundle.a, u, r, linear_jet(x, glog_perp));
        const AmbientJet j2 = scaled(profile_times(bundle.b, u, r, linear_jet(x, P * convect)), kappa);
        const AmbientJet j3 = profile_times(bundle.c, u, r, constant_jet(d, glog_par));
        const AmbientJet j4 = scaled(profile_times(bundle.e, u, r, quadratic_jet(x, S)), kappa);
        const AmbientJet j5 = scaled(profile_times(bundle.k, u, r, constant_jet(d, 1.0)), kappa * div_u);

        const double s1 = pp.perp.dot(glog);
        const double s2 = kappa * r * r * pp.perp.dot(convect);
        const double s3 = r * glog_par;
        const double quad_form = pp.perp.dot(G * pp.perp);
        const double s4 = kappa * r * quad_form + 2.0 * kappa * e * div_u;
        const double s5 = -2.0 * kappa * e * div_u;

        const std::array<double, 5> res = {
            gamma_bar_adjoint(w, u, kappa, j1) - s1, gamma_bar_adjoint(w, u, kappa, j2) - s2,
            gamma_bar_adjoint(w, u, kappa, j3) - s3, gamma_bar_adjoint(w, u, kappa, j4) - s4,
            gamma_bar_adjoint(w, u, kappa, j5) - s5};
        double total = 0.0;
        for (int c = 0; c < 5; ++c) {
            rep.channel[c] = std::max(rep.channel[c], std::abs(res[c]));
            total += res[c];
        }
        rep.total = std::max(rep.total, std::abs(total));
    }
    return rep;
}

CorrectorInputs channel_inputs(int channel, int d) {
    if (d < 3) throw std::invalid_argument("channel_inputs: needs d >= 3");
    CorrectorInputs in;
    in.rho = 1.3;
    in.u = Direction::axis(d, d - 1);
    in.grad_rho = Vec::Zero(d);
    in.grad_u = Mat::Zero(d, d);
    const int last = d - 1;
    switch (channel) {
        case 0: in.grad_rho[0] = 0.7; break;
        case 1: in.grad_u(last, 0) = 0.9; break;
        case 2: in.grad_rho[last] = -0.6; break;
        case 3: in.grad_u(0, 1) = 0.8; break;
        case 4:
            for (int k = 0; k < last; ++k) in.grad_u(k, k) = 0.5;
            break;
        default: throw std::invalid_argument("channel_inputs: channel must be in 0..4");
    }
    return in;
}

// ------------------------------------------------------------------ IBM equilibrium statistics

double equilibrium_marginal_cdf(double r, double kappa, int d) {
    if (r <= -1.0) return 0.0;
    if (r >= 1.0) return 1.0;
    static const Rule1D ref = gauss_legendre(64);
    auto integral = [&](double a, double b) {
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        double s = 0.0;
        for (std::size_t q = 0; q < ref.size(); ++q) {
            const double th = mid + half * ref.x[q];
            const double c = std::cos(th);
            s += ref.w[q] * std::exp(0.5 * kappa * (c * c - 1.0)) * std::pow(std::sin(th), d - 2);
        }
        return half * s;
    };
    const double th = std::acos(r);
    const double total = integral(0.0, 0.5 * kPi) + integral(0.5 * kPi, kPi);
    const double part = th < 0.5 * kPi ? integral(th, 0.5 * kPi) + integral(0.5 * kPi, kPi) : integral(th, kPi);
    return part / total;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        dmax = std::max({dmax, F - i / n, (i + 1) / n - F});
    }
    return dmax;
}

EquilibriumStatsReport ibm_equilibrium_statistics(IbmConfig cfg, double T, ParticleState* final_state) {
    cfg.kernel = KernelKind::global;
    cfg.validate();
    if (!(cfg.D > 0.0)) throw std::invalid_argument("ibm_equilibrium_statistics: D must be positive");
    const RunResult res = run(cfg, T, INT_MAX);
    const ParticleState& s = res.final_state;
    const SpectralInfo si = leading_direction(global_qtensor(s));

    EquilibriumStatsReport rep;
    rep.N = cfg.N;
    rep.kappa = cfg.nu / cfg.D;
    rep.mean_direction = si.direction;
    std::vector<double> r(static_cast<std::size_t>(s.N));
    for (int i = 0; i < s.N; ++i) r[static_cast<std::size_t>(i)] = std::clamp(si.direction.dot(s.orientation(i)), -1.0, 1.0);
    const double kappa = rep.kappa;
    const int d = cfg.d;
    rep.ks = ks_statistic(std::move(r), [kappa, d](double x) { return equilibrium_marginal_cdf(x, kappa, d); });
    rep.threshold = 0.03 * std::sqrt(1e4 / cfg.N);
    rep.underpowered = cfg.N < 10000;
    rep.pass = rep.ks < rep.threshold;
    if (final_state) *final_state = s;
    return rep;
}

// ------------------------------------------------------------------ particle versus macro

CrossScaleReport particle_vs_macro(const CrossScaleOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(opt.eps > 0.0) || opt.N < 1 || opt.bins < 2) throw std::invalid_argument("particle_vs_macro: bad options");
    const int d = 2;
    IbmConfig cfg;
    cfg.N = opt.N;
    cfg.d = d;
    cfg.D = opt.D;
    cfg.nu = opt.kappa * opt.D;
    cfg.R = opt.R;
    cfg.kernel = KernelKind::indicator;
    cfg.L = 1.0 / opt.eps;
    cfg.dt = opt.dt;
    cfg.seed = opt.seed;
    cfg.validate();

    const double a = opt.amplitude;
    const double two_pi = 2.0 * kPi;
    const Philox4x32 gen(opt.seed ^ 0x9e3779b97f4a7c15ull);
    ParticleState s;
    s.N = cfg.N;
    s.d = d;
    s.positions.resize(static_cast<std::size_t>(cfg.N) * d);
    s.orientations.resize(static_cast<std::size_t>(cfg.N) * d);
    for (int i = 0; i < cfg.N; ++i) {
        bool pos_done = false, ori_done = false;
        for (std::uint32_t t = 0; !(pos_done && ori_done); ++t) {
            const auto c = gen({static_cast<std::uint32_t>(i), t, 0x63726f73u, 0u});
            const auto c2 = gen({static_cast<std::uint32_t>(i), t, 0x63726f73u, 1u});
            if (!pos_done) {
                const double x0 = uniform_open(c[0], c[1]) * cfg.L;
                const double acc = uniform_open(c[2], c[3]);
                if (acc * (1.0 + a) < 1.0 + a * std::sin(two_pi * opt.eps * x0)) {
                    s.positions[static_cast<std::size_t>(i) * d] = x0;
                    s.positions[static_cast<std::size_t>(i) * d + 1] = uniform_open(c2[0], c2[1]) * cfg.L;
                    pos_done = true;
                }
            }
            if (!ori_done) {
                const double th = two_pi * uniform_open(c2[2], 0u);
                const double acc = uniform_open(c2[3], 0u);
                const double ct = std::cos(th), st = std::sin(th);
                const double r = opt.u_across_gradient ? st : ct;
                if (acc < std::exp(0.5 * opt.kappa * (r * r - 1.0))) {
                    s.orientations[static_cast<std::size_t>(i) * d] = ct;
                    s.orientations[static_cast<std::size_t>(i) * d + 1] = st;
                    ori_done = true;
                }
            }
        }
    }

    const double T_micro = opt.T_macro / (opt.eps * opt.eps);
    const auto steps = static_cast<std::uint64_t>(std::llround(T_micro / cfg.dt));
    const Philox4x32 rng(cfg.seed);
    for (std::uint64_t k = 0; k < steps; ++k) s = step(s, cfg, rng);

    // Macro system on the unit box from the same analytic profile.
    const RadialBundle bundle = solve_bundle(opt.kappa, d, opt.bvp_n);
    MacroConfig mc;
    mc.coeffs = compute_coefficients(bundle).scaled(1.0 / opt.D);
    MacroField mf = sample_field(
        d, opt.macro_n, 1.0, [a, two_pi](const Vec& x) { return 1.0 + a * std::sin(two_pi * x[0]); },
        [&opt](const Vec&) { return opt.u_across_gradient ? vec2(0.0, 1.0) : vec2(1.0, 0.0); });
    const double dx = mf.dx;
    const double T_reached = static_cast<double>(steps) * cfg.dt * opt.eps * opt.eps;
    const double dt_max = max_stable_dt(mc.coeffs, dx, mc.safety);
    const auto msteps = static_cast<long long>(std::ceil(T_reached / dt_max));
    mc.dt = msteps > 0 ? T_reached / static_cast<double>(msteps) : dt_max;
    for (long long k = 0; k < msteps; ++k) mf = step(mf, mc);

    // Profiles along x0: IBM histogram and row-averaged macro density.
    CrossScaleReport rep;
    rep.eps = opt.eps;
    rep.N = opt.N;
    rep.T_macro = T_reached;
    rep.rho_ibm.assign(static_cast<std::size_t>(opt.bins), 0.0);
    std::vector<Mat> qb(static_cast<std::size_t>(opt.bins), Mat::Zero(d, d));
    for (int i = 0; i < s.N; ++i) {
        const double x0 = s.positions[static_cast<std::size_t>(i) * d] * opt.eps;
        const int b = std::min(static_cast<int>(x0 * opt.bins), opt.bins - 1);
        rep.rho_ibm[static_cast<std::size_t>(b)] += static_cast<double>(opt.bins) / s.N;
        const Vec w = s.orientation(i);
        qb[static_cast<std::size_t>(b)] += w * w.transpose();
    }
    std::vector<double> row(static_cast<std::size_t>(mf.n), 0.0);
    std::vector<Vec> urow(static_cast<std::size_t>(mf.n), Vec::Zero(d));
    for (std::size_t p = 0; p < mf.nodes(); ++p) {
        const auto c = mf.coords(p);
        row[static_cast<std::size_t>(c[0])] += mf.rho[p] / mf.n;
        urow[static_cast<std::size_t>(c[0])] += vec2(mf.u[p * d], mf.u[p * d + 1]);
    }
    double num = 0, den = 0, pden = 0, fnum = 0, angle = 0;
    int counted = 0;
    for (int b = 0; b < opt.bins; ++b) {
        const double xc = (b + 0.5) / opt.bins;
        const double pos = xc * mf.n;
        const int i0 = static_cast<int>(std::floor(pos)) % mf.n;
        const int i1 = (i0 + 1) % mf.n;
        const double t = pos - std::floor(pos);
        const double rm = (1.0 - t) * row[static_cast<std::size_t>(i0)] + t * row[static_cast<std::size_t>(i1)];
        rep.rho_macro.push_back(rm);
        const double ri = rep.rho_ibm[static_cast<std::size_t>(b)];
        const double r0 = 1.0 + a * std::sin(two_pi * xc);
        num += (ri - rm) * (ri - rm);
        den += rm * rm;
        pden += (rm - 1.0) * (rm - 1.0);
        fnum += (r0 - rm) * (r0 - rm);
        const Vec um = ((1.0 - t) * urow[static_cast<std::size_t>(i0)] + t * urow[static_cast<std::size_t>(i1)]).normalized();
        const SymmetricEigen es = jacobi_eigen(qb[static_cast<std::size_t>(b)]);
        if (es.values[0] - es.values[1] > Tolerances::gap_floor) {
            angle += std::acos(std::min(1.0, std::abs(um.dot(es.vectors.col(0)))));
            ++counted;
        }
    }
    rep.density_distance = std::sqrt(num / den);
    rep.perturbation_distance = pden > 0.0 ? std::sqrt(num / pden) : std::sqrt(num);
    rep.frozen_distance = pden > 0.0 ? std::sqrt(fnum / pden) : std::sqrt(fnum);
    rep.direction_distance = counted > 0 ? angle / counted : 0.0;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace nematic
