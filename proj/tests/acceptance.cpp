#include "nematic/gci.hpp"
#include "nematic/ibm.hpp"
#include "nematic/kinetic.hpp"
#include "nematic/macro.hpp"
#include "nematic/qtensor.hpp"
#include "nematic/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace nematic;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::vector<double> kKappaGrid = {0.5, 2.0, 8.0};
const std::vector<int> kDimGrid = {2, 3, 4};

class Clock {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// One line per check inside a criterion; the criterion passes when every gated check passes.
class Criterion {
public:
    Criterion(int id, std::string name) : id_(id), name_(std::move(name)) {}

    void check(const std::string& what, bool ok, const std::string& detail) {
        all_ &= ok;
        std::printf("  [%s] %s: %s\n", ok ? "ok" : "FAIL", what.c_str(), detail.c_str());
    }
    void note(const std::string& what, const std::string& detail) {
        std::printf("  [info] %s: %s\n", what.c_str(), detail.c_str());
    }
    int finish(bool gated = true) const {
        std::printf("criterion %d (%s): %s%s\n", id_, name_.c_str(), all_ ? "PASS" : "FAIL",
                    gated ? "" : " (soft, reported not gated)");
        return (all_ || !gated) ? 0 : 1;
    }

private:
    int id_;
    std::string name_;
    bool all_ = true;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string case_name(RadialKind k, double kappa, int d) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s kappa=%g d=%d", to_string(k), kappa, d);
    return buf;
}

// ------------------------------------------------------------------ 1
int bvp_correctness() {
    constexpr double kResidualTol = 1e-6;
    constexpr double kMinOrder = 1.8;
    constexpr double kRuntime = 5.0;
    constexpr int kFine = 1024;
    // Coarse levels sit above the roundoff plateau of the strong residual.
    const std::vector<int> levels = {32, 64, 128};
    Criterion c(1, "BVP residual and order");
    const Clock clock;
    const auto reports = bvp_residual_study(kKappaGrid, kDimGrid, kFine, levels);
    const double t = clock.seconds();
    double worst_res = 0.0, worst_order = 1e300;
    for (const auto& r : reports) {
        const bool ok = r.residual_fine < kResidualTol && r.order >= kMinOrder;
        if (!ok)
            c.check(case_name(r.kind, r.kappa, r.d), false,
                    fmt("residual %.3e, order %.3f", r.residual_fine, r.order));
        worst_res = std::max(worst_res, r.residual_fine);
        worst_order = std::min(worst_order, r.order);
    }
    c.check("max strong residual at n=1024 over 54 cases", worst_res < kResidualTol,
            fmt("%.3e < %.0e", worst_res, kResidualTol));
    c.check("min observed order over n=32,64,128", worst_order >= kMinOrder, fmt("%.3f >= %.1f", worst_order, kMinOrder));
    c.check("runtime", t < kRuntime, fmt("%.2f s < %.0f s", t, kRuntime));
    return c.finish();
}

// ------------------------------------------------------------------ 2
int coefficient_identities() {
    constexpr double kTol = 1e-8;
    constexpr double kRuntime = 10.0;
    constexpr int kN = 1024;
    Criterion c(2, "coefficient identities");
    const Clock clock;
    double worst_id = 0.0, worst_pair = 0.0;
    for (double kappa : kKappaGrid)
        for (int d : kDimGrid) {
            const RadialBundle b = solve_bundle(kappa, d, kN);
            const CoefficientSet t = compute_coefficients(b);
            const CoefficientSet s = compute_coefficients_derivation(b);
            const auto id = theorem_identities(b, t);
            for (double v : id) worst_id = std::max(worst_id, std::abs(v));
            const auto tv = t.values(), sv = s.values();
            for (std::size_t i = 0; i < tv.size(); ++i) worst_pair = std::max(worst_pair, std::abs(tv[i] - sv[i]));
        }
    const double t = clock.seconds();
    c.check("max |identity| over 6 identities x 9 cases", worst_id < kTol, fmt("%.3e < %.0e", worst_id, kTol));
    c.check("max |theorem - derivation| over 16 coefficients x 9 cases", worst_pair < kTol,
            fmt("%.3e < %.0e", worst_pair, kTol));
    c.check("runtime", t < kRuntime, fmt("%.2f s < %.0f s", t, kRuntime));
    return c.finish();
}

// ------------------------------------------------------------------ 3
int signs() {
    constexpr double kProfileTol = 1e-10;
    constexpr int kN = 1024;
    constexpr int kSamples = 2001;
    Criterion c(3, "coefficient and profile signs");
    int positive = 0, total = 0;
    double worst_odd = -1e300, worst_even = -1e300;
    for (double kappa : kKappaGrid)
        for (int d : kDimGrid) {
            const RadialBundle b = solve_bundle(kappa, d, kN);
            const CoefficientSet s = compute_coefficients(b);
            const double cef[] = {s.C1, s.C2, s.C3, s.C4, s.E1, s.F1, s.F2, s.F3};
            const char* names[] = {"C1", "C2", "C3", "C4", "E1", "F1", "F2", "F3"};
            std::string line;
            for (int i = 0; i < 8; ++i) {
                ++total;
                if (cef[i] > 0.0) ++positive;
                char buf[48];
                std::snprintf(buf, sizeof buf, "%s%s=%.4g", i ? " " : "", names[i], cef[i]);
                line += buf;
            }
            char head[48];
            std::snprintf(head, sizeof head, "kappa=%g d=%d", kappa, d);
            c.note(head, line);
            for (int i = 0; i < kSamples; ++i) {
                const double r = static_cast<double>(i) / (kSamples - 1);
                for (const RadialSolution* p : {&b.h, &b.c, &b.e, &b.k}) worst_odd = std::max(worst_odd, p->value(r));
                for (const RadialSolution* p : {&b.a, &b.b})
                    worst_even = std::max({worst_even, p->value(r), p->value(-r)});
            }
        }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d of %d values > 0", positive, total);
    c.check("C1..C4, E1, F1..F3 > 0 over 9 cases", positive == total, buf);
    c.check("max of h, c, e, k on [0, 1]", worst_odd <= kProfileTol, fmt("%.3e <= %.0e", worst_odd, kProfileTol));
    c.check("max of a, b on [-1, 1]", worst_even <= kProfileTol, fmt("%.3e <= %.0e", worst_even, kProfileTol));
    return c.finish();
}

// ------------------------------------------------------------------ 4
int gci_orthogonality() {
    constexpr double kOrthTol = 1e-6;
    constexpr double kMassTol = 1e-10;
    constexpr double kRuntime = 30.0;
    constexpr int kDensities = 5;
    constexpr std::uint64_t kSeed = 11;
    Criterion c(4, "GCI orthogonality");
    const Clock clock;
    const RadialBundle b = solve_bundle(2.0, 3, 1024);
    double worst_o = 0.0, worst_m = 0.0;
    std::size_t nodes = 0;
    for (int i = 0; i < kDensities; ++i) {
        const GciReport r = gci_orthogonality_check(random_test_density(3, kSeed, i), b.h, 1.0);
        worst_o = std::max(worst_o, r.orthogonality_norm);
        worst_m = std::max(worst_m, std::abs(r.mass_integral));
        nodes = r.nodes;
    }
    const double t = clock.seconds();
    c.note("quadrature nodes", std::to_string(nodes));
    c.check("max |int Gamma(f) psi|", worst_o < kOrthTol, fmt("%.3e < %.0e", worst_o, kOrthTol));
    c.check("max |int Gamma(f)|", worst_m < kMassTol, fmt("%.3e < %.0e", worst_m, kMassTol));
    c.check("quadrature size", nodes >= 10000, std::to_string(nodes) + " >= 10000");
    c.check("runtime", t < kRuntime, fmt("%.2f s < %.0f s", t, kRuntime));
    return c.finish();
}

// ------------------------------------------------------------------ 5
int corrector() {
    constexpr double kTol = 1e-5;
    constexpr int kDefaultN = 1024;
    // Strong residuals of degree-p elements converge at order p - 1.
    constexpr double kSchemeOrder = kDefaultBvpDegree - 1;
    constexpr double kOrderSlack = 0.2;
    const std::vector<int> levels = {32, 64, 128};
    Criterion c(5, "first-order corrector");
    const RadialBundle fine = solve_bundle(2.0, 3, kDefaultN);
    for (int ch = 0; ch < 5; ++ch) {
        const CorrectorResidualReport r = corrector_residual(channel_inputs(ch, 3), fine);
        double worst = 0.0;
        for (double v : r.channel) worst = std::max(worst, v);
        c.check("channel T" + std::to_string(ch + 1) + " at n=1024", worst < kTol, fmt("%.3e < %.0e", worst, kTol));
    }
    CorrectorInputs in;
    in.rho = 1.1;
    in.u = Direction::axis(3, 2);
    in.grad_rho = Vec(3);
    in.grad_rho << 0.3, -0.2, 0.5;
    in.grad_u = Mat::Zero(3, 3);
    in.grad_u(0, 0) = 0.4;
    in.grad_u(0, 1) = 0.2;
    in.grad_u(1, 0) = -0.3;
    in.grad_u(2, 1) = 0.7;
    in.grad_u(1, 1) = -0.1;
    std::vector<double> h, res;
    for (int n : levels) {
        const CorrectorResidualReport r = corrector_residual(in, solve_bundle(2.0, 3, n));
        h.push_back(1.0 / n);
        res.push_back(r.total);
    }
    std::string seq;
    for (std::size_t i = 0; i < res.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%sn=%d: %.3e", i ? ", " : "", levels[i], res[i]);
        seq += buf;
    }
    c.note("mixed-input residual", seq);
    bool decreasing = true;
    for (std::size_t i = 1; i < res.size(); ++i) decreasing &= res[i] < res[i - 1];
    const double order = loglog_slope(h, res);
    c.check("monotone decrease under refinement", decreasing, decreasing ? "yes" : "no");
    c.check("observed order", order >= kSchemeOrder - kOrderSlack,
            fmt("%.3f >= %.1f", order, kSchemeOrder - kOrderSlack));
    return c.finish();
}

// ------------------------------------------------------------------ 6
int kinetic_relaxation() {
    constexpr double kL1Tol = 1e-3;
    constexpr double kMassTol = 1e-12;
    constexpr double kRuntime = 60.0;
    constexpr double kD = 1.0;
    Criterion c(6, "kinetic relaxation");
    const Clock clock;
    const AngularDensity f0 = bump_density(400, 3, 0.3, 0.2);
    const KineticResult r = evolve(f0, 4.0, kD, 1e-3 / kD, 20.0 / kD, AxisPolicy::self_consistent, 100);
    const double t = clock.seconds();
    double worst_rise = -1e300;
    for (std::size_t i = 1; i < r.samples.size(); ++i)
        worst_rise = std::max(worst_rise, r.samples[i].entropy - r.samples[i - 1].entropy);
    const double l1 = r.samples.back().l1_to_equilibrium;
    c.note("samples", std::to_string(r.samples.size()));
    c.check("L1 distance to M_u at T=20", l1 < kL1Tol, fmt("%.3e < %.0e", l1, kL1Tol));
    c.check("entropy non-increasing", worst_rise <= 0.0, fmt("max increment %.3e <= 0", worst_rise));
    c.check("mass drift per step", r.max_mass_drift_per_step < kMassTol,
            fmt("%.3e < %.0e", r.max_mass_drift_per_step, kMassTol));
    c.check("runtime", t < kRuntime, fmt("%.2f s < %.0f s", t, kRuntime));
    return c.finish();
}

// ------------------------------------------------------------------ 7
int lambda_positivity() {
    constexpr double kTol = 1e-12;
    Criterion c(7, "equilibrium eigenvalues");
    double min_par = 1e300, worst_trace = 0.0;
    for (double kappa : {0.1, 1.0, 10.0})
        for (int d : kDimGrid) {
            const EquilibriumEigenvalues ev = equilibrium_eigenvalues(kappa, d);
            min_par = std::min(min_par, ev.parallel);
            worst_trace = std::max(worst_trace, std::abs(ev.transverse + ev.parallel / (d - 1)));
        }
    c.check("min lambda_par", min_par > 0.0, fmt("%.4e > 0", min_par));
    c.check("max |lambda_perp + lambda_par/(d-1)|", worst_trace < kTol, fmt("%.3e < %.0e", worst_trace, kTol));
    return c.finish();
}

// ------------------------------------------------------------------ 8
int averaging_scaling() {
    constexpr double kLo = 1.8, kHi = 2.2;
    constexpr double kRuntime = 60.0;
    Criterion c(8, "local averaging scaling");
    const Clock clock;
    const ScalingReport r = eps_expansion_study(default_phase_space_density(), {0.2, 0.1, 0.05, 0.025});
    const double t = clock.seconds();
    std::string seq;
    for (std::size_t i = 0; i < r.eps.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%seps=%g: %.3e", i ? ", " : "", r.eps[i], r.errors[i]);
        seq += buf;
    }
    c.note("errors", seq);
    c.check("fitted slope", r.slope >= kLo && r.slope <= kHi, fmt("%.4f in [1.8, 2.2]", r.slope));
    c.check("runtime", t < kRuntime, fmt("%.2f s < %.0f s", t, kRuntime));
    return c.finish();
}

// ------------------------------------------------------------------ 9 and 10 fields
MacroField wave_field_2d(int n, double amp) {
    return sample_field(
        2, n, 1.0, [=](const Vec& x) { return 1.0 + amp * std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]); },
        [=](const Vec& x) {
            const double a = 2.0 * amp * std::sin(kTwoPi * x[0]) + 1.5 * amp * std::cos(kTwoPi * x[1]);
            Vec v(2);
            v << std::cos(a), std::sin(a);
            return v;
        });
}

MacroField wave_field_3d(int n) {
    return sample_field(
        3, n, 1.0,
        [](const Vec& x) { return 1.0 + 0.2 * std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[2]); },
        [](const Vec& x) {
            const double a = 0.5 * std::sin(kTwoPi * x[0]) + 0.3 * std::cos(kTwoPi * x[1]);
            const double b = 0.4 * std::sin(kTwoPi * (x[1] + x[2]));
            Vec v(3);
            v << std::cos(a) * std::cos(b), std::sin(a) * std::cos(b), std::sin(b);
            return v;
        });
}

double max_unit_defect(const MacroField& f) {
    double worst = 0.0;
    for (std::size_t p = 0; p < f.nodes(); ++p) {
        double s = 0.0;
        for (int k = 0; k < f.dim; ++k) s += f.u[p * f.dim + k] * f.u[p * f.dim + k];
        worst = std::max(worst, std::abs(std::sqrt(s) - 1.0));
    }
    return worst;
}

// ------------------------------------------------------------------ 9
int macro_structure() {
    constexpr int kN = 128;
    constexpr int kSteps = 10000;
    constexpr int kCheckEvery = 1000;
    constexpr double kMassTol = 1e-12;
    // Renormalized vectors carry a few ulps of rounding.
    constexpr double kUnitTol = 1e-15;
    constexpr double kSymTol = 1e-14;
    constexpr double kRotTol = 1e-12;
    constexpr double kDriftOrder = 2.0, kDriftSlack = 0.3;
    constexpr double kRuntime = 120.0;
    Criterion c(9, "macro PDE structure");
    const Clock clock;
    MacroConfig cfg;
    cfg.coeffs = compute_coefficients(solve_bundle(2.0, 2, 512));
    MacroField f = wave_field_2d(kN, 0.1);
    cfg.dt = max_stable_dt(cfg.coeffs, f.dx, cfg.safety);
    const double m0 = f.mass();
    double worst_mass = 0.0, worst_unit = 0.0, worst_sym = 0.0, worst_rot = 0.0;
    for (int s = 0; s < kSteps; ++s) {
        if (s % kCheckEvery == 0) {
            worst_sym = std::max(worst_sym, field_max_difference(step(negate_direction(f), cfg),
                                                                 negate_direction(step(f, cfg))));
            worst_rot = std::max(worst_rot, field_max_difference(step(rotate90(f), cfg), rotate90(step(f, cfg))));
        }
        f = step(f, cfg);
        worst_mass = std::max(worst_mass, std::abs(f.mass() - m0) / m0);
        worst_unit = std::max(worst_unit, max_unit_defect(f));
    }
    const double t = clock.seconds();

    MacroField g = wave_field_2d(kN, 0.1);
    std::vector<double> dts, drifts;
    for (int k = 0; k < 4; ++k) {
        MacroConfig cc = cfg;
        cc.dt = cfg.dt / std::pow(2.0, k);
        StepDiagnostics diag;
        step(g, cc, &diag);
        dts.push_back(cc.dt);
        drifts.push_back(diag.predictor_norm_drift);
    }
    const double order = loglog_slope(dts, drifts);
    c.note("dt", fmt("%.4e (%.0f steps)", cfg.dt, kSteps));
    c.check("relative mass drift", worst_mass < kMassTol, fmt("%.3e < %.0e", worst_mass, kMassTol));
    c.check("max ||u| - 1| after projection", worst_unit <= kUnitTol, fmt("%.3e <= %.0e", worst_unit, kUnitTol));
    c.check("pre-projection drift order", std::abs(order - kDriftOrder) <= kDriftSlack,
            fmt("%.3f in [1.7, 2.3], drift at dt %.3e", order, drifts.front()));
    c.check("nematic symmetry", worst_sym <= kSymTol, fmt("%.3e <= %.0e", worst_sym, kSymTol));
    c.check("rotation equivariance", worst_rot <= kRotTol, fmt("%.3e <= %.0e", worst_rot, kRotTol));
    c.check("runtime", t < kRuntime, fmt("%.2f s < %.0f s", t, kRuntime));
    return c.finish();
}

// ------------------------------------------------------------------ 10
int identity_convergence() {
    constexpr double kOrder = 2.0, kSlack = 0.2;
    Criterion c(10, "identity residual convergence");
    struct Series {
        std::string name;
        std::vector<double> h, v;
    };
    auto run = [&](const std::string& tag, const std::vector<int>& ns, const std::function<MacroField(int)>& make) {
        std::vector<Series> s = {{tag + " appendix identity", {}, {}}, {tag + " div u = tr(P grad u)", {}, {}},
                                 {tag + " sigma : hessian", {}, {}},   {tag + " sigma : grad u grad rho", {}, {}},
                                 {tag + " sigma : grad u (u.grad)u", {}, {}}};
        for (int n : ns) {
            const MacroField f = make(n);
            const auto r = appendix_identity_residual(f);
            const AuxiliaryReport a = auxiliary_operator_checks(f);
            const double vals[] = {*std::max_element(r.begin(), r.end()), a.div_trace, a.sigma_hessian, a.sigma_rho,
                                   a.sigma_convect};
            for (int i = 0; i < 5; ++i) {
                s[i].h.push_back(1.0 / n);
                s[i].v.push_back(vals[i]);
            }
        }
        for (const Series& x : s) {
            const double order = loglog_slope(x.h, x.v);
            c.check(x.name, std::abs(order - kOrder) <= kSlack,
                    fmt("order %.3f in [1.8, 2.2], coarsest %.3e", order, x.v.front()));
        }
    };
    run("2d", {32, 64, 128}, [](int n) { return wave_field_2d(n, 0.2); });
    run("3d", {24, 48, 96}, [](int n) { return wave_field_3d(n); });
    return c.finish();
}

// ------------------------------------------------------------------ 11
int ibm_equilibrium() {
    constexpr double kKs = 0.03;
    constexpr double kRuntime = 120.0;
    Criterion c(11, "IBM equilibrium statistics");
    const Clock clock;
    IbmConfig cfg;
    cfg.N = 10000;
    cfg.d = 2;
    cfg.nu = 4.0;
    cfg.D = 1.0;
    cfg.dt = 0.01;
    cfg.seed = 42;
    ParticleState a, b;
    const EquilibriumStatsReport r = ibm_equilibrium_statistics(cfg, 20.0 / cfg.D, &a);
    ibm_equilibrium_statistics(cfg, 20.0 / cfg.D, &b);
    const double t = clock.seconds();
    std::vector<unsigned char> ba = encode_binary_header(cfg), bb = ba;
    append_binary_frame(ba, a);
    append_binary_frame(bb, b);
    c.check("KS distance of w.u marginal", r.ks < kKs, fmt("%.4f < %.2f", r.ks, kKs));
    c.check("seeded rerun byte-identical", ba == bb, std::to_string(ba.size()) + " bytes compared");
    c.check("runtime (two runs)", t < kRuntime, fmt("%.2f s < %.0f s", t, kRuntime));
    return c.finish();
}

// ------------------------------------------------------------------ 12
int cross_scale() {
    constexpr double kTol = 0.2;
    Criterion c(12, "particle versus macro");
    CrossScaleOptions opt;
    opt.N = 100000;
    opt.eps = 0.1;
    const CrossScaleReport r = particle_vs_macro(opt);
    c.note("setup", fmt("kappa=%g, T_macro=%g", opt.kappa, r.T_macro) +
                        (opt.u_across_gradient ? ", u across the gradient" : ", u along the gradient"));
    c.note("perturbation distance", fmt("%.4f (frozen initial profile: %.4f)", r.perturbation_distance,
                                        r.frozen_distance));
    c.note("mean direction angle", fmt("%.4f rad", r.direction_distance));
    c.note("runtime", fmt("%.1f s", r.seconds));
    c.check("relative L2 density distance", r.density_distance < kTol, fmt("%.4f < %.1f", r.density_distance, kTol));
    return c.finish(false);
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<int()>> criteria = {bvp_correctness,    coefficient_identities, signs,
                                                         gci_orthogonality,  corrector,              kinetic_relaxation,
                                                         lambda_positivity,  averaging_scaling,      macro_structure,
                                                         identity_convergence, ibm_equilibrium,      cross_scale};
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <criterion 1..%zu | all>\n", argv[0], criteria.size());
        return 2;
    }
    const std::string arg = argv[1];
    try {
        if (arg == "all") {
            int failed = 0;
            for (const auto& f : criteria) failed += f() != 0;
            return failed ? 1 : 0;
        }
        const int id = std::atoi(arg.c_str());
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "unknown criterion %s\n", arg.c_str());
            return 2;
        }
        return criteria[static_cast<std::size_t>(id - 1)]();
    } catch (const std::exception& e) {
        std::printf("criterion %s: FAIL (exception: %s)\n", arg.c_str(), e.what());
        return 1;
    }
}
