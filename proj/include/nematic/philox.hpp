#pragma once

#include <array>
#include <cstdint>

namespace nematic {

// Philox4x32-10 counter-based generator (Salmon et al. 2011).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}
    explicit Philox4x32(Key key) : key_(key) {}

    Counter operator()(Counter c) const;
    const Key& key() const { return key_; }

private:
    Key key_;
};

// Uniform double in the open interval (0, 1) from two 32-bit words (52 bits).
double uniform_open(std::uint32_t hi, std::uint32_t lo);

// Four standard normals from one Philox block via Box-Muller.
std::array<double, 4> normal_block(const Philox4x32& gen, Philox4x32::Counter c);

// Normal stream addressed by (stream id, step); block b covers normals 4b..4b+3.
struct NormalStream {
    const Philox4x32* gen;
    std::uint32_t stream;
    std::uint64_t step;

    std::array<double, 4> block(std::uint32_t b) const {
        return normal_block(*gen, {stream, static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), b});
    }
};

}  // namespace nematic
