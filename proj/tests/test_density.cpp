#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "shadowlab/density.hpp"

using namespace shadowlab;

namespace {

// Independent recount: walks the members for every endpoint.
std::pair<Rational, Rational> brute_profile(const std::vector<std::size_t>& members, std::size_t horizon,
                                            std::size_t first_endpoint) {
    Rational hi(0, 1), lo(1, 1);
    for (std::size_t n = first_endpoint; n <= horizon; ++n) {
        std::int64_t c = 0;
        for (auto m : members) c += m < n;
        const Rational d(c, static_cast<std::int64_t>(n));
        hi = std::max(hi, d);
        lo = std::min(lo, d);
    }
    return {hi, lo};
}

}  // namespace

TEST(Rational, ReducesAndCompares) {
    EXPECT_EQ(Rational(6, 8), Rational(3, 4));
    EXPECT_EQ(Rational(3, -6), Rational(-1, 2));
    EXPECT_LT(Rational(1, 3), Rational(34, 100));
    EXPECT_EQ((Rational(1, 4) + Rational(1, 12)).str(), "1/3");
    EXPECT_TRUE(Rational(1, 10).less_than(0.1000001));
    EXPECT_FALSE(Rational(1, 2).less_than(0.5));
    EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(IndexSet, RejectsOutOfRangeAndSortsMembers) {
    EXPECT_THROW(IndexSet(10, {3, 10}), std::out_of_range);
    const IndexSet e(10, {7, 2, 2, 5});
    EXPECT_EQ(e.members(), (std::vector<std::size_t>{2, 5, 7}));
    EXPECT_EQ(e.count_below(5), 1u);
    EXPECT_EQ(e.count_below(6), 2u);
    EXPECT_TRUE(e.contains(5));
    EXPECT_FALSE(e.contains(4));
}

TEST(DensityAt, BasicExamples) {
    const auto full = IndexSet::where(1000, [](std::size_t) { return true; });
    EXPECT_EQ(density_at(full, 1000), Rational(1, 1));
    const IndexSet empty(1000);
    for (std::size_t n : {1u, 17u, 1000u}) EXPECT_EQ(density_at(empty, n), Rational(0, 1));
    const auto even = IndexSet::where(1000, [](std::size_t i) { return i % 2 == 0; });
    EXPECT_EQ(density_at(even, 1000), Rational(1, 2));
}

TEST(DensityAt, RangeErrors) {
    const IndexSet e(10, {1});
    EXPECT_THROW(density_at(e, 0), std::out_of_range);
    EXPECT_THROW(density_at(e, 11), std::out_of_range);
}

TEST(DensityProfile, FullSetHalfTail) {
    const auto full = IndexSet::where(1000, [](std::size_t) { return true; });
    const auto p = density_profile(full, Rational(1, 2));
    EXPECT_EQ(p.upper_estimate, Rational(1, 1));
    EXPECT_EQ(p.lower_estimate, Rational(1, 1));
    EXPECT_EQ(p.value_at_full_horizon, Rational(1, 1));
}

TEST(DensityProfile, DoublingBlocksMatchEnumerationOracle) {
    // i is a member when floor(log2(i + 1)) is even.
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < 1000; ++i)
        if (static_cast<int>(std::floor(std::log2(static_cast<double>(i + 1)))) % 2 == 0) members.push_back(i);
    const IndexSet e(1000, members);
    const auto p = density_profile(e, kDefaultTailFraction);
    const auto [hi, lo] = brute_profile(members, 1000, tail_start(1000, kDefaultTailFraction));
    EXPECT_EQ(p.upper_estimate, hi);
    EXPECT_EQ(p.lower_estimate, lo);
    EXPECT_GT(p.upper_estimate, p.lower_estimate);
    // Frozen from the oracle above.
    EXPECT_EQ(p.upper_estimate, Rational(341, 751));
    EXPECT_EQ(p.lower_estimate, Rational(341, 1000));
}

TEST(DensityProfile, MultiplesOfThree) {
    const auto e = IndexSet::where(999, [](std::size_t i) { return i % 3 == 0; });
    const auto p = density_profile(e, Rational(1, 10));
    EXPECT_LE(std::fabs(p.upper_estimate.to_double() - 1.0 / 3), 1.0 / 333);
    EXPECT_LE(std::fabs(p.lower_estimate.to_double() - 1.0 / 3), 1.0 / 333);
    EXPECT_EQ(p.lower_estimate, Rational(1, 3));
}

TEST(DensityProfile, TailStart) {
    EXPECT_EQ(tail_start(100, Rational(1, 4)), 76u);
    EXPECT_EQ(tail_start(100, Rational(1, 1)), 1u);
    EXPECT_EQ(tail_start(7, Rational(1, 4)), 6u);
    EXPECT_THROW(tail_start(100, Rational(0, 1)), std::invalid_argument);
    EXPECT_THROW(tail_start(100, Rational(5, 4)), std::invalid_argument);
}

TEST(DensityProperties, ComplementAndRangeOnRandomSets) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t h = 1 + rng() % 300;
        const double q = std::uniform_real_distribution<double>(0, 1)(rng);
        const auto e = IndexSet::where(h, [&](std::size_t) { return std::uniform_real_distribution<double>(0, 1)(rng) < q; });
        const auto c = e.complement();
        for (std::size_t n = 1; n <= h; ++n) {
            const auto d = density_at(e, n);
            ASSERT_GE(d, Rational(0, 1));
            ASSERT_LE(d, Rational(1, 1));
            ASSERT_EQ(density_at(c, n), Rational(1, 1) - d);
        }
        const auto p = density_profile(e);
        const auto [hi, lo] = brute_profile(e.members(), h, tail_start(h, kDefaultTailFraction));
        ASSERT_EQ(p.upper_estimate, hi);
        ASSERT_EQ(p.lower_estimate, lo);
    }
}

TEST(DensityProperties, DoublingGapBreaksShrinkWithHorizon) {
    // Breaks at the ends of blocks of length 2^i.
    auto breaks = [](std::size_t horizon) {
        std::vector<std::size_t> m;
        std::size_t end = 0;
        for (std::size_t len = 1; end + len < horizon; len *= 2) {
            end += len;
            m.push_back(end - 1);
        }
        return IndexSet(horizon, m);
    };
    for (std::size_t n = 64; n <= (1u << 14); n *= 2)
        EXPECT_LE(density_profile(breaks(2 * n)).upper_estimate, density_profile(breaks(n)).upper_estimate) << n;
}

TEST(Syndetic, BasicExamples) {
    const auto mult5 = IndexSet::where(100, [](std::size_t i) { return i % 5 == 0; });
    EXPECT_TRUE(is_syndetic(mult5, 5));
    EXPECT_FALSE(is_syndetic(IndexSet(100, {0, 50}), 10));
    EXPECT_FALSE(is_syndetic(IndexSet(100), 1000));
}

TEST(Syndetic, GapsIncludeBothEnds) {
    // From 0 to 10 and from 10 to 99.
    EXPECT_EQ(max_gap(IndexSet(100, {10})), 89u);
    EXPECT_FALSE(is_syndetic(IndexSet(100, {10}), 88));
    EXPECT_TRUE(is_syndetic(IndexSet(100, {10}), 89));
    EXPECT_TRUE(is_syndetic(IndexSet(100, {0, 99}), 99));
}

TEST(Markov, BasicExamples) {
    const std::vector<double> zeros(10, 0.0);
    const auto a = markov_density_bound(zeros, 0.1);
    EXPECT_EQ(a.mean, 0.0L);
    EXPECT_TRUE(a.bad_set.empty());

    const std::vector<double> one{0.2, 0, 0, 0};
    const auto b = markov_density_bound(one, 0.1);
    EXPECT_NEAR(static_cast<double>(b.mean), 0.05, 1e-15);
    EXPECT_EQ(b.bad_set.members(), std::vector<std::size_t>{0});
    EXPECT_EQ(density_at(b.bad_set, 4), Rational(1, 4));
}

TEST(Markov, ForwardImplicationOnRandomSequences) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    const double eps = 0.1;
    int applied = 0;
    for (int s = 0; s < 10000; ++s) {
        const double spike = 0.03 * u(rng), floor = 0.02 * u(rng);
        std::vector<double> e(200);
        for (auto& x : e) x = u(rng) < spike ? u(rng) : floor * u(rng);
        const auto mb = markov_density_bound(e, eps);
        // Brute-force recount of the bad set.
        std::int64_t bad = 0;
        for (double x : e) bad += x >= eps;
        ASSERT_EQ(static_cast<std::int64_t>(mb.bad_set.size()), bad);
        if (mb.mean < eps * eps) {
            ++applied;
            ASSERT_TRUE(Rational(bad, 200).less_than(eps)) << "sequence " << s;
        }
    }
    EXPECT_GT(applied, 100);
}

TEST(ConverseBound, BasicExamples) {
    const std::vector<double> zeros(8, 0.0);
    EXPECT_DOUBLE_EQ(bounded_mean_from_density(zeros, 0.1, 1.0), 0.1);
    const std::vector<double> e{1, 0, 0, 0};
    EXPECT_DOUBLE_EQ(bounded_mean_from_density(e, 0.1, 1.0), 0.35);
    EXPECT_THROW(bounded_mean_from_density(std::vector<double>{1.5}, 0.1, 1.0), std::domain_error);
}

TEST(ConverseBound, HoldsOnRandomSequences) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    for (int s = 0; s < 5000; ++s) {
        const double diam = 0.5 + 3 * u(rng), eta = 0.01 + 0.2 * u(rng);
        std::vector<double> e(100);
        for (auto& x : e) x = diam * u(rng) * (u(rng) < 0.5 ? 1 : 0.01);
        long double sum = 0;
        for (double x : e) sum += x;
        ASSERT_LE(static_cast<double>(sum / 100), bounded_mean_from_density(e, eta, diam));
    }
}
