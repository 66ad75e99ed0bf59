#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "cogfit/core/numeric.hpp"
#include "cogfit/core/parallel.hpp"
#include "cogfit/core/rng.hpp"

using namespace cogfit;

TEST(Rng, SplitMix64MatchesReferenceStream) {
    // first outputs of the reference SplitMix64 with state 0
    SplitMix64 rng(0);
    EXPECT_EQ(rng.next_u64(), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(rng.next_u64(), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(rng.next_u64(), 0x06C45D188009454FULL);
}

TEST(Rng, SameSeedSameStream) {
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform(), b.uniform());
    SplitMix64 c(42, 10);
    SplitMix64 d(42);
    for (int i = 0; i < 10; ++i) d.next_u64();
    EXPECT_EQ(c.next_u64(), d.next_u64());
}

TEST(Rng, UniformAndNormalMoments) {
    SplitMix64 rng(7);
    double s = 0, ss = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        ss += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(ss / n, 1.0, 0.01);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(rng.below(3), 3u);
    }
}

TEST(Rng, ShuffleIsPermutation) {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    SplitMix64 rng(3);
    rng.shuffle(v);
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Rng, DerivedSeedsDiffer) {
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
}

TEST(Numeric, SoftmaxShiftInvariance) {
    const std::vector<double> a{0.3, -1.2, 2.5};
    std::vector<double> b = a;
    for (double& x : b) x += 1234.5;
    const auto pa = softmax(a), pb = softmax(b);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(pa[i], pb[i], 1e-12);
}

TEST(Numeric, SoftmaxLargeLogitsStayFinite) {
    const std::vector<double> a{1e6, 0.0, -1e6};
    const auto p = softmax(a);
    EXPECT_DOUBLE_EQ(p[0], 1.0);
    EXPECT_DOUBLE_EQ(p[2], 0.0);
    EXPECT_NEAR(log_softmax_at(a, 1), -1e6, 1e-6);
}

TEST(Numeric, SigmoidStable) {
    EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
    EXPECT_NEAR(sigmoid(800.0), 1.0, 1e-15);
    EXPECT_GE(sigmoid(-800.0), 0.0);
}

TEST(Numeric, CompensatedSumRecoversSmallTerms) {
    std::vector<double> v{1.0, 1e100, 1.0, -1e100};
    EXPECT_DOUBLE_EQ(compensated_sum(v), 2.0);
}

TEST(Parallel, ResultIndependentOfWorkers) {
    std::vector<double> one(1000), four(1000);
    parallel_for(one.size(), 1, [&](std::size_t i) { one[i] = std::sin(double(i)); });
    parallel_for(four.size(), 4, [&](std::size_t i) { four[i] = std::sin(double(i)); });
    EXPECT_EQ(one, four);
}

TEST(Parallel, LowestFailingIndexIsRethrown) {
    try {
        parallel_for(100, 4, [](std::size_t i) {
            if (i == 30 || i == 80) throw std::runtime_error(std::to_string(i));
        });
        FAIL() << "expected exception";
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "30");
    }
}
