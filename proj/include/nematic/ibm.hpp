#pragma once

#include "nematic/common.hpp"
#include "nematic/philox.hpp"
#include "nematic/qtensor.hpp"
#include "nematic/sphere.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nematic {

enum class KernelKind { indicator, bump, global };

const char* to_string(KernelKind k);
KernelKind kernel_kind_from_string(const std::string& s);

struct IbmConfig {
    int N = 1000;
    int d = 2;
    double nu = 1.0;
    double D = 1.0;
    double R = 0.1;
    KernelKind kernel = KernelKind::indicator;
    double L = 1.0;
    double dt = 0.01;
    std::uint64_t seed = 1;

    // Throws std::invalid_argument on violated invariants (dt nu <= 0.1, R < L/2 for local kernels).
    void validate() const;
};

// Positions and orientations stored row-wise: particle i occupies [i*d, (i+1)*d).
struct ParticleState {
    int N = 0;
    int d = 2;
    std::vector<double> positions;
    std::vector<double> orientations;
    double time = 0.0;
    std::uint64_t step_index = 0;

    Vec position(int i) const;
    Vec orientation(int i) const;
};

// Uniform positions in [0,L)^d and uniform orientations, drawn from the counter-based stream.
ParticleState random_initial_state(const IbmConfig& cfg);

// Kernel profile K(s), normalized so that int (1/R^d) K(|x|/R) dx = 1.
double kernel_profile(KernelKind k, double s, int d);

// Uniform-grid cell lists with cells of side >= R and minimum-image periodic distances.
// Positions and orientations are also kept packed in cell order for cache-friendly neighbour sweeps.
class CellList {
public:
    CellList(const ParticleState& s, double L, double R);
    // f(j) for every candidate neighbour j of particle i (original indices, ascending within a cell).
    template <class F>
    void for_neighbors(const ParticleState& s, int i, F&& f) const;
    // f(x_j, w_j) with pointers into the packed copies.
    template <class F>
    void for_neighbor_data(const double* xi, F&& f) const;
    int cells_per_side() const { return m_; }

private:
    int cell_of(const double* x) const;
    template <class F>
    void for_cells(const double* xi, F&& f) const;
    double L_, R_;
    int d_, m_, n_;
    bool brute_;
    std::vector<int> start_, order_;
    std::vector<double> pos_, ori_;
};

// Local Q-tensor of particle i and its leading direction; nullopt on a degenerate leading eigenvalue.
QTensor local_qtensor(const ParticleState& s, const IbmConfig& cfg, int i, const CellList* cells = nullptr);
std::optional<Direction> local_mean_direction(const ParticleState& s, const IbmConfig& cfg, int i,
                                              const CellList* cells = nullptr);

QTensor global_qtensor(const ParticleState& s);

// Alignment drift nu (w.wb) P_w wb; zero when wb is absent.
Vec alignment_drift(const Vec& omega, const std::optional<Direction>& wbar, double nu);

struct StepOptions {
    bool flip_mean_direction = false;  // negate every wbar (sign-independence check)
};

// One Heun step of the Stratonovich system; wbar is recomputed at the predicted orientations.
ParticleState step(const ParticleState& s, const IbmConfig& cfg, const Philox4x32& rng, const StepOptions& opt = {});

struct CoarseField {
    int grid_n = 0;
    int d = 2;
    std::vector<double> rho;                 // grid_n^d densities
    std::vector<Vec> direction;              // leading direction per cell (empty vector when masked)
    std::vector<unsigned char> mask;         // 1 where the direction is defined
};

// Kernel density estimate of rho (Gaussian, periodic; bandwidth <= 0 means cell histogram)
// and per-cell Q-tensor leading directions.
CoarseField coarse_grain(const ParticleState& s, double L, int grid_n, double bandwidth);

struct Observation {
    double time = 0.0;
    Mat Q;
    double order_parameter = 0.0;
    std::optional<CoarseField> field;
};

struct RunResult {
    ParticleState final_state;
    std::vector<Observation> observations;
};

RunResult run(const IbmConfig& cfg, double T, int observe_every, const ParticleState* initial = nullptr,
              int coarse_grid = 0, double bandwidth = 0.0);

// Binary trajectory frame file: magic "NHIB", u32 version, u64 N, u32 d, f64 dt, then frames of
// f64 time, N*d f64 positions, N*d f64 orientations; little-endian.
inline constexpr std::uint32_t kIbmBinaryVersion = 1;
std::vector<unsigned char> encode_binary_header(const IbmConfig& cfg);
void append_binary_frame(std::vector<unsigned char>& buf, const ParticleState& s);

// ------------------------------------------------------------------ implementation details

template <class F>
void CellList::for_cells(const double* xi, F&& f) const {
    int c[3] = {0, 0, 0};
    const double h = L_ / m_;
    for (int k = 0; k < d_; ++k) c[k] = std::min(static_cast<int>(xi[k] / h), m_ - 1);
    int off[3] = {-1, -1, -1};
    const int total = d_ == 2 ? 9 : 27;
    for (int t = 0; t < total; ++t) {
        int rem = t;
        int idx = 0;
        for (int k = d_ - 1; k >= 0; --k) {
            off[k] = rem % 3 - 1;
            rem /= 3;
        }
        for (int k = 0; k < d_; ++k) idx = idx * m_ + ((c[k] + off[k] + m_) % m_);
        f(start_[static_cast<std::size_t>(idx)], start_[static_cast<std::size_t>(idx) + 1]);
    }
}

template <class F>
void CellList::for_neighbors(const ParticleState& s, int i, F&& f) const {
    if (brute_) {
        for (int j = 0; j < s.N; ++j) f(j);
        return;
    }
    for_cells(&s.positions[static_cast<std::size_t>(i) * d_], [&](int a, int b) {
        for (int t = a; t < b; ++t) f(order_[static_cast<std::size_t>(t)]);
    });
}

template <class F>
void CellList::for_neighbor_data(const double* xi, F&& f) const {
    const std::size_t d = static_cast<std::size_t>(d_);
    if (brute_) {
        for (int j = 0; j < n_; ++j) f(&pos_[j * d], &ori_[j * d]);
        return;
    }
    for_cells(xi, [&](int a, int b) {
        for (int t = a; t < b; ++t) f(&pos_[t * d], &ori_[t * d]);
    });
}

}  // namespace nematic
