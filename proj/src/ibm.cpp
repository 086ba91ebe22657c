#include "nematic/ibm.hpp"

#include "nematic/quadrature.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

namespace nematic {

namespace {

constexpr double kPi = std::numbers::pi;

double unit_ball_volume(int d) { return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }
double unit_sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

double bump_raw(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

double bump_normalizer_uncached(int d) {
    const Rule1D g = gauss_legendre(128, 0.0, 1.0);
    double m = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) m += g.w[q] * bump_raw(g.x[q]) * std::pow(g.x[q], d - 1);
    return 1.0 / (unit_sphere_area(d) * m);
}

double bump_normalizer(int d) {
    static const std::array<double, 9> cache = [] {
        std::array<double, 9> c{};
        for (int k = 2; k < 9; ++k) c[k] = bump_normalizer_uncached(k);
        return c;
    }();
    return d < 9 ? cache[d] : bump_normalizer_uncached(d);
}

double wrap(double x, double L) {
    double y = std::fmod(x, L);
    if (y < 0.0) y += L;
    if (y >= L) y -= L;
    return y;
}

double min_image(double dx, double L) {
    if (dx > 0.5 * L) dx -= L;
    else if (dx < -0.5 * L) dx += L;
    return dx;
}

void normalize_inplace(double* w, int d) {
    double n = 0.0;
    for (int k = 0; k < d; ++k) n += w[k] * w[k];
    n = std::sqrt(n);
    for (int k = 0; k < d; ++k) w[k] /= n;
}

// Accumulates sum_j w_j (w_j (x) w_j - Id/d) into q (row-major d x d).
void add_outer(Mat& q, const double* w, double weight, int d) {
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) q(a, b) += weight * (w[a] * w[b] - (a == b ? 1.0 / d : 0.0));
}

std::optional<Direction> direction_or_none(const QTensor& q) {
    try {
        return leading_direction(q).direction;
    } catch (const DegenerateLeadingEigenvalue&) {
        return std::nullopt;
    }
}

}  // namespace

const char* to_string(KernelKind k) {
    switch (k) {
        case KernelKind::indicator: return "indicator";
        case KernelKind::bump: return "bump";
        case KernelKind::global: return "global";
    }
    return "?";
}

KernelKind kernel_kind_from_string(const std::string& s) {
    if (s == "indicator") return KernelKind::indicator;
    if (s == "bump") return KernelKind::bump;
    if (s == "global") return KernelKind::global;
    throw std::invalid_argument("unknown kernel: " + s);
}

void IbmConfig::validate() const {
    if (N < 1) throw std::invalid_argument("IbmConfig: N must be >= 1");
    if (d < 2) throw std::invalid_argument("IbmConfig: d must be >= 2");
    if (!(nu >= 0.0)) throw std::invalid_argument("IbmConfig: nu must be >= 0");
    if (!(D >= 0.0)) throw std::invalid_argument("IbmConfig: D must be >= 0");
    if (!(L > 0.0)) throw std::invalid_argument("IbmConfig: L must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("IbmConfig: dt must be > 0");
    if (dt * nu > 0.1) throw std::invalid_argument("IbmConfig: dt * nu must be <= 0.1");
    if (kernel != KernelKind::global) {
        if (!(R > 0.0)) throw std::invalid_argument("IbmConfig: R must be > 0");
        if (!(R < 0.5 * L)) throw std::invalid_argument("IbmConfig: R must be < L/2");
    }
}

Vec ParticleState::position(int i) const {
    return Eigen::Map<const Vec>(&positions[static_cast<std::size_t>(i) * d], d);
}

Vec ParticleState::orientation(int i) const {
    return Eigen::Map<const Vec>(&orientations[static_cast<std::size_t>(i) * d], d);
}

ParticleState random_initial_state(const IbmConfig& cfg) {
    cfg.validate();
    ParticleState s;
    s.N = cfg.N;
    s.d = cfg.d;
    s.positions.resize(static_cast<std::size_t>(cfg.N) * cfg.d);
    s.orientations.resize(static_cast<std::size_t>(cfg.N) * cfg.d);
    const Philox4x32 gen(cfg.seed);
    for (int i = 0; i < cfg.N; ++i) {
        // Streams with the top counter word set are reserved for initialization.
        for (int k = 0; k < cfg.d; k += 2) {
            const auto x = gen({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k), 0u, 0xFFFFFFFFu});
            s.positions[static_cast<std::size_t>(i) * cfg.d + k] = cfg.L * uniform_open(x[0], x[1]);
            if (k + 1 < cfg.d) s.positions[static_cast<std::size_t>(i) * cfg.d + k + 1] = cfg.L * uniform_open(x[2], x[3]);
        }
        double* w = &s.orientations[static_cast<std::size_t>(i) * cfg.d];
        for (int k = 0; k < cfg.d; k += 4) {
            const auto z = normal_block(gen, {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k), 1u, 0x7FFFFFFEu});
            for (int t = 0; t < 4 && k + t < cfg.d; ++t) w[k + t] = z[t];
        }
        normalize_inplace(w, cfg.d);
    }
    return s;
}

double kernel_profile(KernelKind k, double s, int d) {
    switch (k) {
        case KernelKind::indicator: return s < 1.0 ? 1.0 / unit_ball_volume(d) : 0.0;
        case KernelKind::bump: return bump_normalizer(d) * bump_raw(s);
        case KernelKind::global: return 1.0;
    }
    return 0.0;
}

CellList::CellList(const ParticleState& s, double L, double R) : L_(L), R_(R), d_(s.d), n_(s.N) {
    m_ = static_cast<int>(std::floor(L / R));
    brute_ = m_ < 3 || d_ > 3;
    const std::size_t d = static_cast<std::size_t>(d_);
    if (brute_) {
        pos_ = s.positions;
        ori_ = s.orientations;
        return;
    }
    std::size_t ncell = 1;
    for (int k = 0; k < d_; ++k) ncell *= static_cast<std::size_t>(m_);
    std::vector<int> cell(static_cast<std::size_t>(s.N));
    start_.assign(ncell + 1, 0);
    for (int i = 0; i < s.N; ++i) {
        cell[static_cast<std::size_t>(i)] = cell_of(&s.positions[static_cast<std::size_t>(i) * d]);
        ++start_[static_cast<std::size_t>(cell[static_cast<std::size_t>(i)]) + 1];
    }
    for (std::size_t c = 0; c < ncell; ++c) start_[c + 1] += start_[c];
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    order_.resize(static_cast<std::size_t>(s.N));
    pos_.resize(s.positions.size());
    ori_.resize(s.orientations.size());
    for (int i = 0; i < s.N; ++i) {
        const auto t = static_cast<std::size_t>(fill[static_cast<std::size_t>(cell[static_cast<std::size_t>(i)])]++);
        order_[t] = i;
        for (std::size_t k = 0; k < d; ++k) {
            pos_[t * d + k] = s.positions[static_cast<std::size_t>(i) * d + k];
            ori_[t * d + k] = s.orientations[static_cast<std::size_t>(i) * d + k];
        }
    }
}

int CellList::cell_of(const double* x) const {
    const double h = L_ / m_;
    int idx = 0;
    for (int k = 0; k < d_; ++k) idx = idx * m_ + std::min(static_cast<int>(x[k] / h), m_ - 1);
    return idx;
}

QTensor global_qtensor(const ParticleState& s) {
    Mat q = Mat::Zero(s.d, s.d);
    for (int j = 0; j < s.N; ++j) add_outer(q, &s.orientations[static_cast<std::size_t>(j) * s.d], 1.0, s.d);
    q /= static_cast<double>(s.N);
    return {q};
}

namespace {

// Kernel-weighted sums sum_j K_j w_j w_j^T and sum_j K_j; DIM = 0 means runtime dimension.
template <int DIM>
double accumulate_local(const ParticleState& s, const IbmConfig& cfg, const double* xi, const CellList* cells,
                        double* acc) {
    const int d = DIM > 0 ? DIM : s.d;
    const bool bump = cfg.kernel == KernelKind::bump;
    const double kv_const = bump ? bump_normalizer(d) : 1.0 / unit_ball_volume(d);
    const double R2 = cfg.R * cfg.R;
    const double half = 0.5 * cfg.L;
    double wsum = 0.0;
    auto visit = [&](const double* xj, const double* w) {
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
            double dx = xi[k] - xj[k];
            if (dx > half) dx -= cfg.L;
            else if (dx < -half) dx += cfg.L;
            r2 += dx * dx;
        }
        if (r2 >= R2) return;
        const double kv = bump ? kv_const * bump_raw(std::sqrt(r2) / cfg.R) : kv_const;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) acc[a * d + b] += kv * w[a] * w[b];
        wsum += kv;
    };
    if (cells) {
        cells->for_neighbor_data(xi, visit);
    } else {
        for (int j = 0; j < s.N; ++j)
            visit(&s.positions[static_cast<std::size_t>(j) * d], &s.orientations[static_cast<std::size_t>(j) * d]);
    }
    return wsum;
}

}  // namespace

QTensor local_qtensor(const ParticleState& s, const IbmConfig& cfg, int i, const CellList* cells) {
    if (cfg.kernel == KernelKind::global) return global_qtensor(s);
    const int d = s.d;
    const double* xi = &s.positions[static_cast<std::size_t>(i) * d];
    const double norm = 1.0 / (std::pow(cfg.R, d) * s.N);
    double small[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
    std::vector<double> big;
    double* acc = small;
    double wsum = 0.0;
    if (d == 2) {
        wsum = accumulate_local<2>(s, cfg, xi, cells, acc);
    } else if (d == 3) {
        wsum = accumulate_local<3>(s, cfg, xi, cells, acc);
    } else {
        big.assign(static_cast<std::size_t>(d) * d, 0.0);
        acc = big.data();
        wsum = accumulate_local<0>(s, cfg, xi, cells, acc);
    }
    Mat q(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) q(a, b) = norm * (acc[a * d + b] - (a == b ? wsum / d : 0.0));
    return {q};
}

std::optional<Direction> local_mean_direction(const ParticleState& s, const IbmConfig& cfg, int i,
                                              const CellList* cells) {
    return direction_or_none(local_qtensor(s, cfg, i, cells));
}

Vec alignment_drift(const Vec& omega, const std::optional<Direction>& wbar, double nu) {
    if (!wbar) return Vec::Zero(omega.size());
    const Vec& b = wbar->vec();
    const double c = omega.dot(b);
    return nu * c * (b - c * omega);
}

namespace {

std::vector<std::optional<Direction>> mean_directions(const ParticleState& s, const IbmConfig& cfg, bool flip) {
    std::vector<std::optional<Direction>> out(static_cast<std::size_t>(s.N));
    if (cfg.kernel == KernelKind::global) {
        auto g = direction_or_none(global_qtensor(s));
        if (g && flip) g = -*g;
        std::fill(out.begin(), out.end(), g);
        return out;
    }
    const CellList cells(s, cfg.L, cfg.R);
    for (int i = 0; i < s.N; ++i) {
        auto w = local_mean_direction(s, cfg, i, &cells);
        if (w && flip) w = -*w;
        out[static_cast<std::size_t>(i)] = w;
    }
    return out;
}

}  // namespace

ParticleState step(const ParticleState& s, const IbmConfig& cfg, const Philox4x32& rng, const StepOptions& opt) {
    const int d = s.d;
    const std::size_t n = static_cast<std::size_t>(s.N);
    const double sig = std::sqrt(2.0 * cfg.D * cfg.dt);

    const auto wbar0 = mean_directions(s, cfg, opt.flip_mean_direction);
    std::vector<double> noise(n * d);
    std::vector<double> drift0(n * d);
    ParticleState pred = s;
    for (std::size_t i = 0; i < n; ++i) {
        const NormalStream ns{&rng, static_cast<std::uint32_t>(i), s.step_index};
        for (int k = 0; k < d; k += 4) {
            const auto z = ns.block(static_cast<std::uint32_t>(k / 4));
            for (int t = 0; t < 4 && k + t < d; ++t) noise[i * d + k + t] = sig * z[t];
        }
        const double* w = &s.orientations[i * d];
        const Vec wv = Eigen::Map<const Vec>(w, d);
        const Vec a = alignment_drift(wv, wbar0[i], cfg.nu);
        const Eigen::Map<const Vec> xi(&noise[i * d], d);
        const Vec pxi = xi - wv.dot(xi) * wv;
        double* wp = &pred.orientations[i * d];
        for (int k = 0; k < d; ++k) {
            drift0[i * d + k] = a[k];
            wp[k] = w[k] + cfg.dt * a[k] + pxi[k];
        }
        normalize_inplace(wp, d);
    }

    const auto wbar1 = mean_directions(pred, cfg, opt.flip_mean_direction);
    ParticleState out = s;
    for (std::size_t i = 0; i < n; ++i) {
        const double* w = &s.orientations[i * d];
        const Vec wv = Eigen::Map<const Vec>(w, d);
        const Vec wp = Eigen::Map<const Vec>(&pred.orientations[i * d], d);
        const Vec a1 = alignment_drift(wp, wbar1[i], cfg.nu);
        const Eigen::Map<const Vec> xi(&noise[i * d], d);
        const Vec pxi = xi - 0.5 * (wv.dot(xi) * wv + wp.dot(xi) * wp);
        double* wo = &out.orientations[i * d];
        for (int k = 0; k < d; ++k) wo[k] = w[k] + 0.5 * cfg.dt * (drift0[i * d + k] + a1[k]) + pxi[k];
        normalize_inplace(wo, d);
        double* x = &out.positions[i * d];
        for (int k = 0; k < d; ++k) x[k] = wrap(x[k] + cfg.dt * w[k], cfg.L);
    }
    out.time = s.time + cfg.dt;
    out.step_index = s.step_index + 1;
    return out;
}

CoarseField coarse_grain(const ParticleState& s, double L, int grid_n, double bandwidth) {
    if (grid_n < 1) throw std::invalid_argument("coarse_grain: grid_n must be >= 1");
    const int d = s.d;
    CoarseField cf;
    cf.grid_n = grid_n;
    cf.d = d;
    std::size_t ncell = 1;
    for (int k = 0; k < d; ++k) ncell *= static_cast<std::size_t>(grid_n);
    cf.rho.assign(ncell, 0.0);
    cf.direction.assign(ncell, Vec());
    cf.mask.assign(ncell, 0);
    const double h = L / grid_n;
    const double cell_vol = std::pow(h, d);

    std::vector<Mat> q(ncell, Mat::Zero(d, d));
    std::vector<int> count(ncell, 0);
    auto cell_index = [&](const double* x) {
        std::size_t idx = 0;
        for (int k = 0; k < d; ++k) idx = idx * grid_n + static_cast<std::size_t>(std::min(static_cast<int>(x[k] / h), grid_n - 1));
        return idx;
    };
    for (int i = 0; i < s.N; ++i) {
        const std::size_t c = cell_index(&s.positions[static_cast<std::size_t>(i) * d]);
        add_outer(q[c], &s.orientations[static_cast<std::size_t>(i) * d], 1.0, d);
        ++count[c];
    }
    for (std::size_t c = 0; c < ncell; ++c) {
        if (count[c] == 0) continue;
        const auto w = direction_or_none(QTensor{q[c] / count[c]});
        if (w) {
            cf.direction[c] = w->vec();
            cf.mask[c] = 1;
        }
    }

    if (bandwidth <= 0.0) {
        for (std::size_t c = 0; c < ncell; ++c) cf.rho[c] = count[c] / cell_vol;
        return cf;
    }
    // Periodic Gaussian kernel density estimate at cell centres, truncated at 4 bandwidths.
    const int reach = std::min(static_cast<int>(std::ceil(4.0 * bandwidth / h)), (grid_n - 1) / 2);
    const double gnorm = 1.0 / std::pow(2.0 * kPi * bandwidth * bandwidth, 0.5 * d);
    const int span = 2 * reach + 1;
    std::size_t nstencil = 1;
    for (int k = 0; k < d; ++k) nstencil *= static_cast<std::size_t>(span);
    for (int i = 0; i < s.N; ++i) {
        const double* x = &s.positions[static_cast<std::size_t>(i) * d];
        int base[8];
        for (int k = 0; k < d; ++k) base[k] = std::min(static_cast<int>(x[k] / h), grid_n - 1);
        for (std::size_t t = 0; t < nstencil; ++t) {
            std::size_t rem = t, idx = 0;
            double r2 = 0.0;
            int off[8];
            for (int k = d - 1; k >= 0; --k) {
                off[k] = static_cast<int>(rem % span) - reach;
                rem /= span;
            }
            for (int k = 0; k < d; ++k) {
                const int ci = base[k] + off[k];
                const double dx = min_image((ci + 0.5) * h - x[k], L);
                r2 += dx * dx;
                idx = idx * grid_n + static_cast<std::size_t>(((ci % grid_n) + grid_n) % grid_n);
            }
            cf.rho[idx] += gnorm * std::exp(-0.5 * r2 / (bandwidth * bandwidth));
        }
    }
    return cf;
}

RunResult run(const IbmConfig& cfg, double T, int observe_every, const ParticleState* initial, int coarse_grid,
              double bandwidth) {
    cfg.validate();
    if (!(T > 0.0)) throw std::invalid_argument("ibm run: T must be > 0");
    if (observe_every < 1) throw std::invalid_argument("ibm run: observe_every must be >= 1");
    const Philox4x32 rng(cfg.seed);
    RunResult res;
    ParticleState s = initial ? *initial : random_initial_state(cfg);
    const auto steps = static_cast<std::uint64_t>(std::llround(T / cfg.dt));
    auto observe = [&](const ParticleState& st) {
        Observation o;
        o.time = st.time;
        o.Q = global_qtensor(st).m;
        o.order_parameter = jacobi_eigen(o.Q).values[0];
        if (coarse_grid > 0) o.field = coarse_grain(st, cfg.L, coarse_grid, bandwidth);
        res.observations.push_back(std::move(o));
    };
    observe(s);
    for (std::uint64_t k = 0; k < steps; ++k) {
        s = step(s, cfg, rng);
        if ((k + 1) % static_cast<std::uint64_t>(observe_every) == 0 || k + 1 == steps) observe(s);
    }
    res.final_state = std::move(s);
    return res;
}

namespace {

template <class T>
void put_le(std::vector<unsigned char>& b, T v) {
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    // Host is assumed little-endian; reverse otherwise.
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    b.insert(b.end(), raw, raw + sizeof(T));
}

}  // namespace

std::vector<unsigned char> encode_binary_header(const IbmConfig& cfg) {
    std::vector<unsigned char> b = {'N', 'H', 'I', 'B'};
    put_le<std::uint32_t>(b, kIbmBinaryVersion);
    put_le<std::uint64_t>(b, static_cast<std::uint64_t>(cfg.N));
    put_le<std::uint32_t>(b, static_cast<std::uint32_t>(cfg.d));
    put_le<double>(b, cfg.dt);
    return b;
}

void append_binary_frame(std::vector<unsigned char>& buf, const ParticleState& s) {
    put_le<double>(buf, s.time);
    for (double x : s.positions) put_le<double>(buf, x);
    for (double w : s.orientations) put_le<double>(buf, w);
}

}  // namespace nematic
