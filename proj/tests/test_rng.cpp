#include "kolmo/estimate.hpp"
#include "kolmo/parallel.hpp"
#include "kolmo/rng.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <vector>

using namespace kolmo;

// Known-answer vectors of the Random123 reference implementation.
TEST(Philox, KnownAnswerZero) {
    const auto r = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(r, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
    const auto r = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(r, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
    const auto r = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                        {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(r, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStream, ReproducibleAndDistinct) {
    RandomStream a(42, 7, domain::girsanov), b(42, 7, domain::girsanov), c(42, 8, domain::girsanov),
        d(42, 7, domain::direct);
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        EXPECT_EQ(va, b.next_u64());
        EXPECT_NE(va, c.next_u64());
        EXPECT_NE(va, d.next_u64());
    }
}

TEST(RandomStream, UniformOpenInterval) {
    RandomStream s(1, 0);
    std::vector<double> u(200000);
    for (auto& x : u) {
        x = s.uniform();
        ASSERT_GT(x, 0.0);
        ASSERT_LT(x, 1.0);
    }
    EXPECT_NEAR(testutil::mean(u), 0.5, 4.0 * std::sqrt(1.0 / 12.0 / u.size()));
    EXPECT_NEAR(testutil::variance(u), 1.0 / 12.0, 2e-3);
}

TEST(RandomStream, NormalPassesKs) {
    RandomStream s(3, 1);
    std::vector<double> g(100000);
    for (auto& x : g) x = s.normal();
    EXPECT_LT(testutil::ks_normal(g), 1.628 / std::sqrt(double(g.size())));
    EXPECT_NEAR(testutil::variance(g), 1.0, 0.02);
}

TEST(RandomStream, GammaMoments) {
    for (double shape : {0.25, 0.5, 1.0, 3.5}) {
        RandomStream s(5, static_cast<std::uint64_t>(shape * 100));
        std::vector<double> v(200000);
        for (auto& x : v) {
            x = s.gamma(shape);
            ASSERT_GT(x, 0.0);
        }
        // Gamma(k, 1): mean k, variance k.
        EXPECT_NEAR(testutil::mean(v), shape, 4.0 * std::sqrt(shape / v.size())) << shape;
        EXPECT_NEAR(testutil::variance(v) / shape, 1.0, 0.05) << shape;
    }
}

TEST(Summaries, PairwiseSumMatchesNaiveOnIntegers) {
    std::vector<double> v(1001);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = double(i);
    EXPECT_EQ(pairwise_sum(v), 1000.0 * 1001.0 / 2.0);
    EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(Summaries, SummarizeAndZScore) {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const Estimate e = summarize(v, 9);
    EXPECT_DOUBLE_EQ(e.mean, 2.5);
    EXPECT_NEAR(e.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
    EXPECT_EQ(e.nsamples, 4u);
    EXPECT_TRUE(e.valid);

    const std::vector<double> bad{1.0, std::nan(""), 3.0};
    const Estimate f = summarize(bad, 0);
    EXPECT_FALSE(f.valid);
    EXPECT_EQ(f.nonfinite, 1u);

    Estimate a, b;
    a.mean = 1.0;
    b.mean = 1.0;
    a.std_error = b.std_error = 0.0;
    EXPECT_EQ(z_score(a, b), 0.0);
    b.mean = 2.0;
    EXPECT_TRUE(std::isinf(z_score(a, b)));
    a.std_error = 0.3;
    b.std_error = 0.4;
    EXPECT_NEAR(z_score(a, b), 2.0, 1e-15);
}

TEST(Parallel, CoversEveryIndexOnce) {
    for (unsigned w : {1u, 3u, 8u}) {
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(hits.size(), w, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) hits[i]++;
        });
        for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    }
}

TEST(Parallel, RethrowsWorkerException) {
    EXPECT_THROW(parallel_for(100, 4,
                              [](std::size_t b, std::size_t) {
                                  if (b > 0) throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
}
