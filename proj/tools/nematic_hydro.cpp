#include "nematic/gci.hpp"
#include "nematic/ibm.hpp"
#include "nematic/io.hpp"
#include "nematic/kinetic.hpp"
#include "nematic/macro.hpp"
#include "nematic/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace nematic;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::string coeffs;
    std::string suite;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ExitCode::config, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string out_path(const Options& o, const std::string& name) { return (fs::path(o.out) / name).string(); }

std::string num(double x) { return format_real(x); }

// ------------------------------------------------------------------ coeffs

void run_coeffs(const RunConfig& cfg, const Options& o) {
    const auto kappas = cfg.get_real_list("kappa");
    const auto ds = cfg.get_int_list("d");
    for (double k : kappas)
        if (k < 0.0) throw ConfigError(ConfigErrorKind::invalid_value, 0, "kappa must be >= 0");
    for (auto d : ds)
        if (d < 2) throw ConfigError(ConfigErrorKind::invalid_value, 0, "d must be >= 2");
    const int n = static_cast<int>(cfg.get_int("n", 1024));
    const int degree = static_cast<int>(cfg.get_int("degree", kDefaultBvpDegree));
    const int n_quad = static_cast<int>(cfg.get_int("n_quad", 256));
    const double D = cfg.get_real("D", 1.0);
    const bool profiles = cfg.get_bool("profiles", false);

    std::vector<CoefficientRow> rows;
    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    for (double k : kappas) {
        for (auto d : ds) {
            CoefficientRow row = coefficient_row(k, static_cast<int>(d), n, degree, n_quad);
            if (D != 1.0) {
                row.theorem = row.theorem.scaled(1.0 / D);
                if (row.derivation) row.derivation = row.derivation->scaled(1.0 / D);
                if (std::isfinite(row.max_discrepancy)) row.max_discrepancy /= D;
            }
            all.push_back(nlohmann::ordered_json::parse(coefficient_json(row)));
            if (profiles && k > 0.0) {
                const RadialBundle b = solve_bundle(k, static_cast<int>(d), n, degree);
                const RadialSolution* s[] = {&b.h, &b.a, &b.b, &b.c, &b.e, &b.k};
                for (const RadialSolution* p : s) {
                    const std::string name = std::string("profile_") + to_string(p->kind) + "_kappa" + num(k) +
                                             "_d" + std::to_string(d) + ".csv";
                    write_text_with_sidecar(out_path(o, name), radial_solution_table(*p).str(), cfg);
                }
            }
            rows.push_back(std::move(row));
        }
    }
    write_text_with_sidecar(out_path(o, "coefficients.csv"), coefficient_table(rows).str(), cfg);
    write_text_with_sidecar(out_path(o, "coefficients_report.json"), all.dump(2) + "\n", cfg);
    for (const auto& r : rows)
        std::printf("kappa=%g d=%d status=%s max_discrepancy=%.3e\n", r.kappa, r.d, r.status.c_str(), r.max_discrepancy);
}

// ------------------------------------------------------------------ ibm

CsvTable field_table(const CoarseField& f, double L) {
    std::vector<std::string> header = {"cell"};
    for (int k = 0; k < f.d; ++k) header.push_back("x" + std::to_string(k));
    header.push_back("rho");
    for (int k = 0; k < f.d; ++k) header.push_back("u" + std::to_string(k));
    header.push_back("mask");
    CsvTable t(header);
    const double h = L / f.grid_n;
    for (std::size_t c = 0; c < f.rho.size(); ++c) {
        std::vector<std::string> row = {std::to_string(c)};
        std::size_t rem = c;
        std::vector<int> idx(static_cast<std::size_t>(f.d));
        for (int k = f.d - 1; k >= 0; --k) {
            idx[static_cast<std::size_t>(k)] = static_cast<int>(rem % static_cast<std::size_t>(f.grid_n));
            rem /= static_cast<std::size_t>(f.grid_n);
        }
        for (int k = 0; k < f.d; ++k) row.push_back(num((idx[static_cast<std::size_t>(k)] + 0.5) * h));
        row.push_back(num(f.rho[c]));
        for (int k = 0; k < f.d; ++k) row.push_back(f.mask[c] ? num(f.direction[c][k]) : "nan");
        row.push_back(std::to_string(static_cast<int>(f.mask[c])));
        t.add_row(std::move(row));
    }
    return t;
}

void run_ibm(const RunConfig& cfg, const Options& o) {
    IbmConfig ic;
    ic.N = static_cast<int>(cfg.get_int("N"));
    ic.d = static_cast<int>(cfg.get_int("d"));
    ic.nu = cfg.get_real("nu");
    ic.D = cfg.get_real("D");
    ic.R = cfg.get_real("R", 0.1);
    ic.kernel = kernel_kind_from_string(cfg.get_string("kernel", "indicator"));
    ic.L = cfg.get_real("L", 1.0);
    ic.dt = cfg.get_real("dt");
    ic.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    if (ic.nu < 0.0 || ic.D < 0.0) throw ConfigError(ConfigErrorKind::invalid_value, 0, "nu and D must be >= 0");
    ic.validate();
    const double T = cfg.get_real("T");
    const int observe_every = static_cast<int>(cfg.get_int("observe_every", 10));
    const int coarse = static_cast<int>(cfg.get_int("coarse_grid", 0));
    const double bandwidth = cfg.get_real("bandwidth", 0.0);
    const bool traj = cfg.get_bool("write_trajectory", false);
    const int traj_every = static_cast<int>(cfg.get_int("trajectory_every", 100));

    std::vector<std::string> header = {"time", "order_parameter"};
    for (int i = 0; i < ic.d; ++i)
        for (int j = i; j < ic.d; ++j) header.push_back("Q" + std::to_string(i) + std::to_string(j));
    CsvTable obs(header);

    ParticleState s = random_initial_state(ic);
    const Philox4x32 rng(ic.seed);
    const auto steps = static_cast<std::uint64_t>(std::llround(T / ic.dt));
    std::vector<unsigned char> bin = encode_binary_header(ic);
    auto observe = [&](const ParticleState& st) {
        const QTensor q = global_qtensor(st);
        const SymmetricEigen es = jacobi_eigen(q.m);
        std::vector<std::string> row = {num(st.time), num((es.values[0] - 1.0 / ic.d) * ic.d / (ic.d - 1.0))};
        for (int i = 0; i < ic.d; ++i)
            for (int j = i; j < ic.d; ++j) row.push_back(num(q.m(i, j)));
        obs.add_row(std::move(row));
    };
    observe(s);
    if (traj) append_binary_frame(bin, s);
    for (std::uint64_t k = 1; k <= steps; ++k) {
        s = step(s, ic, rng);
        if (k % static_cast<std::uint64_t>(observe_every) == 0 || k == steps) observe(s);
        if (traj && (k % static_cast<std::uint64_t>(traj_every) == 0 || k == steps)) append_binary_frame(bin, s);
    }
    write_text_with_sidecar(out_path(o, "observations.csv"), obs.str(), cfg, ic.seed);
    if (traj) write_binary_with_sidecar(out_path(o, "trajectory.bin"), bin, cfg, ic.seed);
    if (coarse > 0)
        write_text_with_sidecar(out_path(o, "coarse_field.csv"), field_table(coarse_grain(s, ic.L, coarse, bandwidth), ic.L).str(),
                                cfg, ic.seed);
    std::printf("ibm: %llu steps, final time %.6g\n", static_cast<unsigned long long>(steps), s.time);
}

// ------------------------------------------------------------------ kinetic

void run_kinetic(const RunConfig& cfg, const Options& o) {
    const double kappa = cfg.get_real("kappa");
    const int d = static_cast<int>(cfg.get_int("d"));
    const int n = static_cast<int>(cfg.get_int("n"));
    const double D = cfg.get_real("D", 1.0);
    const double dt = cfg.get_real("dt");
    const double T = cfg.get_real("T");
    const std::string pol = cfg.get_string("policy", "fixed");
    const std::string init = cfg.get_string("init", "bump");
    const int sample_every = static_cast<int>(cfg.get_int("sample_every", 10));
    if (kappa < 0.0 || d < 2) throw ConfigError(ConfigErrorKind::invalid_value, 0, "kappa must be >= 0 and d >= 2");
    AxisPolicy policy;
    if (pol == "fixed") policy = AxisPolicy::fixed;
    else if (pol == "self_consistent") policy = AxisPolicy::self_consistent;
    else throw ConfigError(ConfigErrorKind::invalid_value, 0, "policy must be fixed or self_consistent");

    AngularDensity f0;
    if (init == "bump") f0 = bump_density(n, d, cfg.get_real("bump_center", 0.3), cfg.get_real("bump_width", 0.2));
    else if (init == "uniform") f0 = uniform_density(n, d);
    else if (init == "equilibrium") f0 = equilibrium_density(n, d, kappa);
    else throw ConfigError(ConfigErrorKind::invalid_value, 0, "init must be bump, uniform or equilibrium");

    const KineticResult res = evolve(f0, kappa, D, dt, T, policy, sample_every);
    CsvTable ts({"time", "l1_to_equilibrium", "entropy", "dissipation", "mass"});
    for (const auto& s : res.samples)
        ts.add_row({num(s.time), num(s.l1_to_equilibrium), num(s.entropy), num(s.dissipation), num(s.mass)});
    write_text_with_sidecar(out_path(o, "kinetic_series.csv"), ts.str(), cfg);

    const AxisChoice ax = choose_axis(res.f, policy);
    const DiscreteEquilibrium eq = discrete_equilibrium(n, d, kappa, ax.transverse);
    CsvTable prof({"theta", "f", "equilibrium"});
    for (int j = 0; j < n; ++j)
        prof.add_row({num(res.f.center(j)), num(res.f.f[static_cast<std::size_t>(j)]),
                      num(res.f.mass() * eq.center[static_cast<std::size_t>(j)])});
    write_text_with_sidecar(out_path(o, "kinetic_profile.csv"), prof.str(), cfg);
    std::printf("kinetic: final L1 distance %.3e, max mass drift per step %.3e, degenerate steps %d\n",
                res.samples.empty() ? 0.0 : res.samples.back().l1_to_equilibrium, res.max_mass_drift_per_step,
                res.degenerate_steps);
}

// ------------------------------------------------------------------ macro

std::vector<unsigned char> field_binary(const MacroField& f) {
    std::vector<unsigned char> b;
    auto put = [&b](const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        b.insert(b.end(), c, c + n);
    };
    put("NHMF", 4);
    const std::uint32_t version = 1, dim = static_cast<std::uint32_t>(f.dim), n = static_cast<std::uint32_t>(f.n);
    put(&version, 4);
    put(&dim, 4);
    put(&n, 4);
    put(&f.dx, 8);
    put(&f.time, 8);
    put(f.rho.data(), f.rho.size() * 8);
    put(f.u.data(), f.u.size() * 8);
    return b;
}

CsvTable field_slice(const MacroField& f) {
    std::vector<std::string> header = {"x", "rho"};
    for (int k = 0; k < f.dim; ++k) header.push_back("u" + std::to_string(k + 1));
    CsvTable t(header);
    for (int i = 0; i < f.n; ++i) {
        const std::size_t p = f.index({i, 0, 0});
        std::vector<std::string> row = {num(i * f.dx), num(f.rho[p])};
        for (int k = 0; k < f.dim; ++k) row.push_back(num(f.u[p * f.dim + k]));
        t.add_row(std::move(row));
    }
    return t;
}

void run_macro(const RunConfig& cfg, const Options& o) {
    const int d = static_cast<int>(cfg.get_int("d"));
    const int n = static_cast<int>(cfg.get_int("n"));
    const double L = cfg.get_real("L", 1.0);
    const long long steps = cfg.get_int("steps");
    const double amp = cfg.get_real("amplitude", 0.2);
    const std::string init = cfg.get_string("init", "wave");
    const double D = cfg.get_real("D", 1.0);
    const int observe_every = static_cast<int>(cfg.get_int("observe_every", 100));
    const long long snapshot_every = cfg.get_int("snapshot_every", steps);
    if (d < 2 || d > 3) throw ConfigError(ConfigErrorKind::invalid_value, 0, "macro d must be 2 or 3");

    MacroConfig mc;
    if (!o.coeffs.empty()) {
        std::optional<double> k;
        if (cfg.has("kappa")) k = cfg.get_real("kappa");
        mc.coeffs = read_coefficient_csv(read_file(o.coeffs), k, d);
    } else {
        if (!cfg.has("kappa")) throw ConfigError(ConfigErrorKind::missing_key, 0, "macro needs kappa or --coeffs");
        mc.coeffs = compute_coefficients(solve_bundle(cfg.get_real("kappa"), d, static_cast<int>(cfg.get_int("bvp_n", 512))))
                        .scaled(1.0 / D);
    }
    mc.safety = cfg.get_real("safety", 0.2);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::function<double(const Vec&)> rho_fn;
    std::function<Vec(const Vec&)> u_fn;
    if (init == "wave") {
        rho_fn = [=](const Vec& x) { return 1.0 + amp * std::sin(two_pi * x[0] / L); };
        u_fn = [=](const Vec& x) {
            Vec u = Vec::Zero(d);
            const double phi = amp * std::sin(two_pi * x[1] / L);
            u[0] = std::cos(phi);
            u[1] = std::sin(phi);
            return u;
        };
    } else if (init == "uniform") {
        rho_fn = [](const Vec&) { return 1.0; };
        u_fn = [=](const Vec&) { Vec u = Vec::Zero(d); u[0] = 1.0; return u; };
    } else {
        throw ConfigError(ConfigErrorKind::invalid_value, 0, "init must be wave or uniform");
    }
    MacroField f = sample_field(d, n, L, rho_fn, u_fn);
    mc.dt = cfg.has("dt") ? cfg.get_real("dt") : max_stable_dt(mc.coeffs, f.dx, mc.safety);

    CsvTable diag({"step", "time", "mass", "rho_min", "rho_max", "predictor_norm_drift", "final_norm_drift"});
    const double m0 = f.mass();
    auto snapshot = [&](long long s) {
        const std::string base = "field_" + std::to_string(s);
        write_binary_with_sidecar(out_path(o, base + ".bin"), field_binary(f), cfg);
        write_text_with_sidecar(out_path(o, base + "_slice.csv"), field_slice(f).str(), cfg);
    };
    snapshot(0);
    for (long long s = 1; s <= steps; ++s) {
        StepDiagnostics sd;
        f = step(f, mc, &sd);
        if (s % observe_every == 0 || s == steps) {
            const auto [lo, hi] = std::minmax_element(f.rho.begin(), f.rho.end());
            diag.add_row({std::to_string(s), num(f.time), num(f.mass()), num(*lo), num(*hi), num(sd.predictor_norm_drift),
                          num(sd.final_norm_drift)});
        }
        if (s % snapshot_every == 0 || s == steps) snapshot(s);
    }
    write_text_with_sidecar(out_path(o, "macro_diagnostics.csv"), diag.str(), cfg);
    std::printf("macro: %lld steps, dt %.6g, relative mass drift %.3e\n", steps, mc.dt, std::abs(f.mass() - m0) / m0);
}

// ------------------------------------------------------------------ validate

void run_validate(const RunConfig& cfg, const Options& o) {
    const std::string suite = o.suite.empty() ? cfg.get_string("suite") : o.suite;
    nlohmann::ordered_json rep;
    rep["suite"] = suite;
    if (suite == "scaling") {
        const auto eps = cfg.has("eps") ? cfg.get_real_list("eps") : std::vector<double>{0.2, 0.1, 0.05, 0.025};
        ScalingOptions so;
        so.R = cfg.get_real("R", 0.1);
        const auto f = default_phase_space_density(cfg.get_real("kappa", 2.0));
        const ScalingReport sym = eps_expansion_study(f, eps, so);
        so.kernel_shift = 0.3;
        const ScalingReport neg = eps_expansion_study(f, eps, so);
        CsvTable t({"eps", "error_symmetric", "error_shifted"});
        for (std::size_t i = 0; i < eps.size(); ++i) t.add_row({num(eps[i]), num(sym.errors[i]), num(neg.errors[i])});
        write_text_with_sidecar(out_path(o, "scaling.csv"), t.str(), cfg);
        rep["slope"] = sym.slope;
        rep["negative_control_slope"] = neg.slope;
        rep["pass"] = sym.slope >= 1.8 && sym.slope <= 2.2;
    } else if (suite == "gci") {
        const double kappa = cfg.get_real("kappa", 2.0);
        const int d = static_cast<int>(cfg.get_int("d", 3));
        const int nodes = static_cast<int>(cfg.get_int("nodes", 100));
        const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 11));
        const RadialBundle b = solve_bundle(kappa, d, static_cast<int>(cfg.get_int("n", 1024)));
        CsvTable t({"density", "orthogonality", "mass_integral"});
        double worst_o = 0, worst_m = 0;
        for (int i = 0; i < 5; ++i) {
            const GciReport g = gci_orthogonality_check(random_test_density(d, seed, i), b.h, 1.0, nodes, nodes);
            t.add_row({std::to_string(i), num(g.orthogonality_norm), num(g.mass_integral)});
            worst_o = std::max(worst_o, g.orthogonality_norm);
            worst_m = std::max(worst_m, std::abs(g.mass_integral));
        }
        write_text_with_sidecar(out_path(o, "gci.csv"), t.str(), cfg);
        rep["max_orthogonality"] = worst_o;
        rep["max_mass_integral"] = worst_m;
        rep["pass"] = worst_o < 1e-6 && worst_m < 1e-10;
    } else if (suite == "corrector") {
        const double kappa = cfg.get_real("kappa", 2.0);
        const int d = static_cast<int>(cfg.get_int("d", 3));
        const RadialBundle b = solve_bundle(kappa, d, static_cast<int>(cfg.get_int("n", 1024)));
        CsvTable t({"inputs", "T1", "T2", "T3", "T4", "T5", "total"});
        double worst = 0;
        for (int c = 0; c < 5; ++c) {
            const CorrectorResidualReport r = corrector_residual(channel_inputs(c, d), b);
            std::vector<std::string> row = {std::to_string(c)};
            for (double v : r.channel) row.push_back(num(v));
            row.push_back(num(r.total));
            t.add_row(std::move(row));
            for (double v : r.channel) worst = std::max(worst, v);
        }
        write_text_with_sidecar(out_path(o, "corrector.csv"), t.str(), cfg);
        rep["max_channel_residual"] = worst;
        rep["pass"] = worst < 1e-5;
    } else if (suite == "equilibrium") {
        IbmConfig ic;
        ic.N = static_cast<int>(cfg.get_int("N", 10000));
        ic.d = static_cast<int>(cfg.get_int("d", 2));
        ic.D = 1.0;
        ic.nu = cfg.get_real("kappa", 4.0);
        ic.dt = cfg.get_real("dt", 0.01);
        ic.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 42));
        const EquilibriumStatsReport r = ibm_equilibrium_statistics(ic, cfg.get_real("T", 20.0));
        rep["N"] = r.N;
        rep["kappa"] = r.kappa;
        rep["ks"] = r.ks;
        rep["threshold"] = r.threshold;
        rep["underpowered"] = r.underpowered;
        rep["pass"] = r.pass;
    } else if (suite == "cross") {
        CrossScaleOptions co;
        co.N = static_cast<int>(cfg.get_int("N", co.N));
        co.kappa = cfg.get_real("kappa", co.kappa);
        co.R = cfg.get_real("R", co.R);
        co.dt = cfg.get_real("dt", co.dt);
        co.T_macro = cfg.get_real("T", co.T_macro);
        co.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(co.seed)));
        if (cfg.has("eps")) co.eps = cfg.get_real_list("eps").front();
        const CrossScaleReport r = particle_vs_macro(co);
        CsvTable t({"x", "rho_ibm", "rho_macro"});
        for (std::size_t b = 0; b < r.rho_ibm.size(); ++b)
            t.add_row({num((b + 0.5) / r.rho_ibm.size()), num(r.rho_ibm[b]), num(r.rho_macro[b])});
        write_text_with_sidecar(out_path(o, "cross.csv"), t.str(), cfg, co.seed);
        rep["eps"] = r.eps;
        rep["N"] = r.N;
        rep["T_macro"] = r.T_macro;
        rep["density_distance"] = r.density_distance;
        rep["perturbation_distance"] = r.perturbation_distance;
        rep["frozen_distance"] = r.frozen_distance;
        rep["direction_distance"] = r.direction_distance;
        rep["soft_pass"] = r.density_distance < 0.2;
    } else {
        throw ConfigError(ConfigErrorKind::invalid_value, 0,
                          "suite must be one of scaling, gci, corrector, equilibrium, cross");
    }
    const std::string text = rep.dump(2) + "\n";
    write_text_with_sidecar(out_path(o, "validate_" + suite + ".json"), text, cfg);
    std::fputs(text.c_str(), stdout);
}

int dispatch(const std::string& sub, const Options& o) {
    RunConfig cfg = parse_config(read_file(o.config));
    if (cfg.subcommand != sub)
        throw ConfigError(ConfigErrorKind::unknown_section, 0,
                          "config section [" + cfg.subcommand + "] does not match subcommand " + sub);
    if (o.seed) {
        bool uses_seed = false;
        for (const auto& k : schema_for(sub)) uses_seed = uses_seed || k.name == "seed";
        if (uses_seed)
            cfg.values["seed"] = static_cast<long long>(*o.seed);
        else
            std::fprintf(stderr, "nematic-hydro: %s is deterministic; --seed ignored\n", sub.c_str());
    }
    fs::create_directories(o.out);
    if (sub == "coeffs") run_coeffs(cfg, o);
    else if (sub == "ibm") run_ibm(cfg, o);
    else if (sub == "kinetic") run_kinetic(cfg, o);
    else if (sub == "macro") run_macro(cfg, o);
    else run_validate(cfg, o);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nematic alignment hydrodynamics toolkit", "nematic-hydro"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kCodeVersion);
    Options o;
    std::string chosen;
    for (const auto& name : subcommands()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " stage");
        sub->add_option("--config", o.config, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--seed", o.seed, "override the config seed");
        if (name == "macro") sub->add_option("--coeffs", o.coeffs, "coefficient table CSV")->check(CLI::ExistingFile);
        if (name == "validate")
            sub->add_option("--suite", o.suite, "scaling, gci, corrector, equilibrium or cross");
        sub->callback([&chosen, name]() { chosen = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::config);
    }
    try {
        return dispatch(chosen, o);
    } catch (const Error& e) {
        std::fprintf(stderr, "nematic-hydro: %s\n", e.what());
        return static_cast<int>(e.code());
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "nematic-hydro: invalid configuration: %s\n", e.what());
        return static_cast<int>(ExitCode::config);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "nematic-hydro: numerical failure: %s\n", e.what());
        return static_cast<int>(ExitCode::numerical);
    }
}
