#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "kac/model.hpp"
#include "kac/rng.hpp"
#include "kac/samplers.hpp"

using namespace kac;

TEST(ModelParams, RejectsBadRanges) {
    EXPECT_THROW(ModelParams(1, 1.0), ModelError);
    EXPECT_THROW(ModelParams(10, 0.0), ModelError);
    EXPECT_THROW(ModelParams(10, 2.0), ModelError);
    EXPECT_THROW(ModelParams(10, 2.5), ModelError);
    EXPECT_NO_THROW(ModelParams(2, 1.999));
}

TEST(ModelParams, MinGapTimesNMinusOneIsAlpha) {
    for (int n : {2, 3, 10, 1000, 100000})
        for (double a : {0.1, 1.0, 1.8}) {
            ModelParams p(n, a);
            EXPECT_DOUBLE_EQ(p.min_gap() * (n - 1), a);
        }
}

TEST(SimplexPoint, Validation) {
    EXPECT_THROW(SimplexPoint({0.5, 0.6}), ModelError);
    EXPECT_THROW(SimplexPoint({1.5, -0.5}), ModelError);
    EXPECT_NO_THROW(SimplexPoint({0.25, 0.75}));
    EXPECT_NEAR(SimplexPoint::normalized({1, 3}).z()[1], 0.75, 1e-16);
}

TEST(TnMap, TwoParticleExtremes) {
    ModelParams p(2, 1.0);
    auto a = t_n_map(SimplexPoint({1.0, 0.0}), p);
    EXPECT_DOUBLE_EQ(a.energies[0], 0.5);
    EXPECT_DOUBLE_EQ(a.energies[1], 1.5);
    EXPECT_DOUBLE_EQ(a.energies[1] - a.energies[0], p.min_gap());
    auto b = t_n_map(SimplexPoint({0.0, 1.0}), p);
    EXPECT_DOUBLE_EQ(b.energies[0], 0.0);
    EXPECT_DOUBLE_EQ(b.energies[1], 2.0);
}

TEST(TnMap, ThreeParticleHandValue) {
    ModelParams p(3, 1.0);
    auto c = t_n_map(SimplexPoint({1.0 / 3, 1.0 / 3, 1.0 / 3}), p);
    EXPECT_NEAR(c.energies[0], 1.0 / 6, 1e-15);
    EXPECT_NEAR(c.energies[1], 11.0 / 12, 1e-15);
    EXPECT_NEAR(c.energies[2], 23.0 / 12, 1e-15);
    EXPECT_NEAR(c.energies[0] + c.energies[1] + c.energies[2], 3.0, 1e-14);
}

TEST(TnMap, DimensionMismatch) {
    EXPECT_THROW(t_n_map(SimplexPoint({0.5, 0.5}), ModelParams(3, 1.0)), ModelError);
}

TEST(TnInverse, Examples) {
    ModelParams p(2, 1.0);
    auto z = t_n_inverse(Configuration{{0.5, 1.5}, p});
    EXPECT_NEAR(z[0], 1.0, 1e-15);
    EXPECT_NEAR(z[1], 0.0, 1e-15);

    ModelParams q(40, 1.3);
    auto eq = t_n_map(SimplexPoint(std::vector<double>(40, 1.0 / 40)), q);
    auto back = t_n_inverse(eq);
    for (int j = 0; j < 40; ++j) EXPECT_NEAR(back[j], 1.0 / 40, 1e-13);
}

TEST(TnInverse, RejectsExclusionViolation) {
    ModelParams p(3, 1.0);
    EXPECT_THROW(t_n_inverse(Configuration{{0.0, 0.2, 2.8}, p}), ModelError);
}

TEST(TnMap, RoundTripAndInvariantsOnRandomPoints) {
    RngStream rng(7, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(rng.below(60));
        const double a = rng.uniform(0.01, 1.99);
        ModelParams p(n, a);
        SimplexPoint z = sample_simplex_flat(n, rng);
        auto c = t_n_map(z, p);
        const auto rep_v = validate(c);
        ASSERT_TRUE(rep_v.ok()) << rep_v.summary();
        auto z2 = t_n_inverse(c);
        auto c2 = t_n_map(z2, p);
        for (int j = 0; j < n; ++j) {
            EXPECT_NEAR(z2[j], z[j], 1e-9);
            EXPECT_NEAR(c2.energies[j], c.energies[j], 1e-9);
        }
    }
}

TEST(TnMap, RoundTripFiftyParticles) {
    RngStream rng(11, 3);
    ModelParams p(50, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        auto z = sample_simplex_flat(50, rng);
        auto z2 = t_n_inverse(t_n_map(z, p));
        for (int j = 0; j < 50; ++j) worst = std::max(worst, std::abs(z2[j] - z[j]));
    }
    EXPECT_LT(worst, 1e-9);
}

// Number of particles in ]a,b] minus one, times the minimal gap, is at most b - a.
TEST(TnMap, IntervalMassBound) {
    RngStream rng(5, 1);
    ModelParams p(300, 1.7);
    auto c = sample_flat(p, rng);
    for (int k = 0; k < 2000; ++k) {
        double a = rng.uniform(0.0, 4.0), b = rng.uniform(0.0, 4.0);
        if (a > b) std::swap(a, b);
        const auto lo = std::upper_bound(c.energies.begin(), c.energies.end(), a);
        const auto hi = std::upper_bound(c.energies.begin(), c.energies.end(), b);
        const long count = hi - lo;
        if (count > 0) EXPECT_LE((count - 1) * p.min_gap(), b - a + 1e-12);
    }
}

TEST(Validate, FlagsHalfGap) {
    ModelParams p(5, 1.0);
    auto c = t_n_map(SimplexPoint(std::vector<double>(5, 0.2)), p);
    ASSERT_TRUE(validate(c).ok());
    // Shrink the gap between 2 and 3 to eps/2, keeping the sum.
    const double eps = p.min_gap();
    const double cur = c.energies[3] - c.energies[2];
    const double shift = (cur - eps / 2) / 2;
    c.energies[2] += shift;
    c.energies[3] -= shift;
    auto rep = validate(c);
    EXPECT_FALSE(rep.ok());
    EXPECT_FALSE(rep.check("exclusion").pass);
    EXPECT_EQ(rep.check("exclusion").worst_index, 3);
    EXPECT_NEAR(rep.check("exclusion").magnitude, eps / 2, 1e-12);
    EXPECT_TRUE(rep.check("sum").pass);
}

TEST(Validate, FlagsSumDrift) {
    ModelParams p(5, 1.0);
    auto c = t_n_map(SimplexPoint(std::vector<double>(5, 0.2)), p);
    for (double& x : c.energies) x *= 1.001;
    auto rep = validate(c);
    EXPECT_FALSE(rep.check("sum").pass);
    EXPECT_NEAR(rep.check("sum").magnitude, 5e-3, 1e-9);
    EXPECT_TRUE(rep.check("exclusion").pass);
}

TEST(Validate, FlagsNegativeAndIntervalCount) {
    ModelParams p(4, 1.0);
    Configuration c{{-0.1, 0.2, 1.0, 2.9}, p};
    auto rep = validate(c);
    EXPECT_FALSE(rep.check("nonnegative").pass);
    EXPECT_EQ(rep.check("nonnegative").worst_index, 0);
    EXPECT_FALSE(rep.check("exclusion").pass);
    EXPECT_FALSE(rep.check("interval_count").pass);
}

TEST(ConfigurationCsv, RoundTrip) {
    ModelParams p(20, 0.7);
    RngStream rng(3, 9);
    auto c = sample_flat(p, rng);
    std::stringstream ss;
    write_configuration_csv(ss, c, {"seed=3"});
    auto d = read_configuration_csv(ss);
    EXPECT_EQ(d.params.n(), 20);
    EXPECT_DOUBLE_EQ(d.params.alpha(), 0.7);
    for (int i = 0; i < 20; ++i) EXPECT_DOUBLE_EQ(d.energies[i], c.energies[i]);
}

TEST(ConfigurationCsv, RowCountMismatch) {
    std::stringstream ss("# n=3\n# alpha=1\nindex,energy\n0,0.1\n1,1.2\n");
    EXPECT_THROW(read_configuration_csv(ss), ModelError);
}

TEST(ConfigurationCsv, RejectsOtherSchemasAndBadNumbers) {
    std::stringstream other("# schema=histogram/1\n# n=1\n# alpha=1\nx,density\n0.1,2.0\n");
    EXPECT_THROW(read_configuration_csv(other), ModelError);
    std::stringstream bad("# n=2\n# alpha=1\nindex,energy\n0,0.0\n1,abc\n");
    EXPECT_THROW(read_configuration_csv(bad), ModelError);
}
