#include "nematic/philox.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nematic;

TEST(Philox, KnownAnswerZero) {
    const Philox4x32 g(Philox4x32::Key{0u, 0u});
    const auto r = g({0u, 0u, 0u, 0u});
    EXPECT_EQ(r[0], 0x6627e8d5u);
    EXPECT_EQ(r[1], 0xe169c58du);
    EXPECT_EQ(r[2], 0xbc57ac4cu);
    EXPECT_EQ(r[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
    const Philox4x32 g(Philox4x32::Key{0xffffffffu, 0xffffffffu});
    const auto r = g({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
    EXPECT_EQ(r[0], 0x408f276du);
    EXPECT_EQ(r[1], 0x41c83b0eu);
    EXPECT_EQ(r[2], 0xa20bc7c6u);
    EXPECT_EQ(r[3], 0x6d5451fdu);
}

TEST(Philox, UniformOpenInterval) {
    EXPECT_GT(uniform_open(0u, 0u), 0.0);
    EXPECT_LT(uniform_open(0xffffffffu, 0xffffffffu), 1.0);
}

TEST(Philox, NormalMoments) {
    const Philox4x32 g(12345);
    double s = 0, s2 = 0;
    const int blocks = 50000;
    for (int b = 0; b < blocks; ++b) {
        const auto z = normal_block(g, {static_cast<std::uint32_t>(b), 0u, 0u, 0u});
        for (double v : z) {
            s += v;
            s2 += v * v;
        }
    }
    const double n = 4.0 * blocks;
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.01);
}
