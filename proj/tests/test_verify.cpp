#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "shadowlab/oracle/doubling_backward.hpp"
#include "shadowlab/verify.hpp"

using namespace shadowlab;
using std::numbers::pi;

namespace {

TraceReport report_of(std::vector<double> errs, double diam = 1.0) { return TraceReport(std::move(errs), diam); }

}  // namespace

TEST(Trace, ExactOrbitHasZeroError) {
    const auto s = make_doubling_circle();
    const auto z = BinaryAngle::from_radians(0.3);
    const auto p = perturbed_orbit(s, z, 0.1, 500, 1, 0.0);
    const auto r = trace(s, z, p);
    EXPECT_EQ(r.sup_error, 0.0);
    EXPECT_EQ(r.cesaro_mean_estimate, 0.0);
    for (auto c : {Criterion::pointwise, Criterion::average, Criterion::mean_ergodic, Criterion::d_lower})
        EXPECT_TRUE(check(r, c, 0.01).satisfied) << to_string(c);
}

TEST(Trace, ConstantErrorFailsEverything) {
    const auto r = report_of(std::vector<double>(100, 0.2));
    for (auto c : {Criterion::pointwise, Criterion::average, Criterion::mean_ergodic, Criterion::d_lower})
        EXPECT_FALSE(check(r, c, 0.1).satisfied) << to_string(c);
    EXPECT_NEAR(r.cesaro_mean_estimate, 0.2, 1e-15);
}

TEST(Trace, ThresholdsAreStrict) {
    const auto r = report_of({0.0, 0.1, 0.0, 0.0});
    EXPECT_FALSE(check_pointwise(r, 0.1).satisfied);
    EXPECT_TRUE(check_pointwise(r, 0.1000001).satisfied);
    const auto a = report_of(std::vector<double>(8, 0.25));
    EXPECT_FALSE(check_average(a, 0.25).satisfied);
}

TEST(Trace, EvenIndexErrors) {
    std::vector<double> e(1000);
    for (std::size_t i = 0; i < e.size(); i += 2) e[i] = 1.0;
    const auto r = report_of(e);
    EXPECT_EQ(r.bad_profile(0.1).value_at_full_horizon, Rational(1, 2));
    EXPECT_FALSE(check_mean_ergodic(r, 0.1).satisfied);
    EXPECT_TRUE(check_mean_ergodic(r, 0.1, 0.51).satisfied);
    EXPECT_TRUE(check_d_lower(r, 0.1).satisfied);
    // Odd n gives (n - 1) / 2n, smallest at the first tail endpoint 751.
    EXPECT_EQ(r.good_lower_density(0.1), Rational(375, 751));
    EXPECT_FALSE(check_pointwise(r, 0.1).satisfied);
}

TEST(Trace, RejectsOutOfRangeErrors) {
    EXPECT_THROW(report_of({}), std::invalid_argument);
    EXPECT_THROW(report_of({-0.1}), std::domain_error);
    EXPECT_THROW(report_of({2.0}, 1.0), std::domain_error);
}

TEST(Criteria, NamesRoundTrip) {
    for (auto c : {Criterion::pointwise, Criterion::average, Criterion::mean_ergodic, Criterion::d_lower})
        EXPECT_EQ(criterion_from_string(to_string(c)), c);
    EXPECT_THROW(criterion_from_string("uniform"), std::invalid_argument);
}

TEST(Criteria, ImplicationsOnRandomReports) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    int markov_cases = 0;
    for (int t = 0; t < 3000; ++t) {
        const double eps = 0.02 + 0.3 * u(rng);
        const double spike = 0.2 * u(rng), level = eps * u(rng);
        std::vector<double> e(300);
        for (auto& x : e) x = u(rng) < spike ? u(rng) : level * u(rng) * u(rng);
        const auto r = report_of(e);
        const bool pw = check_pointwise(r, eps).satisfied;
        const bool me = check_mean_ergodic(r, eps).satisfied;
        if (pw) {
            ASSERT_TRUE(check_average(r, eps).satisfied);
            ASSERT_TRUE(me);
        }
        if (me) {
            ASSERT_TRUE(check_d_lower(r, eps).satisfied);
        }
        if (r.cesaro_mean_estimate < eps * eps) {
            ++markov_cases;
            ASSERT_TRUE(me) << "case " << t;
        }
        // Converse: the Cesàro estimate is at most ε + diam · (bad upper density).
        const double upper = r.bad_profile(eps).upper_estimate.to_double();
        ASSERT_LE(r.cesaro_mean_estimate, eps + upper + 1e-12);
    }
    EXPECT_GT(markov_cases, 50);
}

TEST(Search, MonotoneInResolution) {
    const auto s = make_doubling_circle();
    const auto p = ergodic_pseudo_orbit(s, {}, 0.05, doubling_schedule(), 512, 5);
    double prev = std::numeric_limits<double>::infinity();
    for (double r : {0.4, 0.1, 0.02, 0.005}) {
        const auto v = search_tracer(s, p, 0.2, Criterion::mean_ergodic, r);
        EXPECT_LE(v.statistic, prev) << r;
        prev = v.statistic;
        EXPECT_EQ(v.net_size, s.net_size(r));
        EXPECT_TRUE(v.witness.has_value());
    }
}

TEST(Search, MatchesExhaustiveMinimum) {
    const auto s = make_interval_isometry();
    const auto p = ergodic_pseudo_orbit(s, {}, 0.05, doubling_schedule(), 300, 2);
    for (auto c : {Criterion::pointwise, Criterion::average, Criterion::mean_ergodic, Criterion::d_lower}) {
        const auto v = search_tracer(s, p, 0.2, c, 1.0 / 64);
        const auto net = s.build_net(1.0 / 64);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < net.size(); ++k) {
            const double st = check(trace(s, net[k], p), c, 0.2).statistic;
            if (st < best) best = st, best_k = k;
        }
        EXPECT_EQ(v.statistic, best) << to_string(c);
        EXPECT_EQ(v.witness_index, best_k) << to_string(c);
    }
}

TEST(Search, IsometryBlocksHaveNoTracerOnFineGrid) {
    const auto s = make_interval_isometry();
    const auto p = isometry_block_sequence(8);
    const auto v = search_tracer(s, p, 0.3, Criterion::mean_ergodic, 1.0 / 1024);
    EXPECT_FALSE(v.satisfied);
    EXPECT_GE(v.statistic, 0.3);
}

TEST(Search, ResourceBudget) {
    const auto s = make_interval_isometry();
    const auto p = isometry_block_sequence(2);
    SearchOptions<double> opts;
    opts.max_candidates = 100;
    EXPECT_THROW(search_tracer(s, p, 0.3, Criterion::average, 0.001, opts), ResourceError);
    EXPECT_THROW(search_tracer(s, p, 0.3, Criterion::average, 0.0, opts), std::invalid_argument);
}

TEST(DoublingOracle, BackwardTracerShadowsPointwise) {
    const auto s = make_doubling_circle();
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const double delta = 0.001 * (1 + t);
        const auto p = perturbed_orbit(s, s.sample(rng), delta, 1000, 100 + t);
        const auto z = oracle::doubling_backward_tracer(p);
        const auto r = trace(s, z, p);
        ASSERT_LE(r.sup_error, delta * (1 + 1e-9)) << t;
        ASSERT_TRUE(check_pointwise(r, 2 * delta).satisfied);
    }
}

TEST(DoublingOracle, HintedSearchFindsMeanErgodicTracer) {
    const auto s = make_doubling_circle();
    const auto p = ergodic_pseudo_orbit(s, {}, 0.01 * pi, doubling_schedule(), 2048, 11);
    SearchOptions<BinaryAngle> opts;
    opts.hints.push_back(oracle::doubling_backward_tracer(p));
    const auto v = search_tracer(s, p, 0.05, Criterion::mean_ergodic, std::ldexp(2 * pi, -12), opts);
    EXPECT_TRUE(v.satisfied);
    EXPECT_LT(v.statistic, 0.05);
}

TEST(ShiftConstructive, ErrorsSmallAwayFromBreaks) {
    const auto s = make_full_shift(2, 2048 + 64);
    const std::size_t depth = 6;
    const auto p = ergodic_pseudo_orbit(s, {}, std::ldexp(1.0, -static_cast<int>(depth)), doubling_schedule(), 2048, 6);
    const auto z = shift_constructive_tracer(p, depth);
    const auto r = trace(s, z, p);
    const auto safe = break_free_windows(p.break_set, depth);
    for (auto i : safe.members()) {
        if (i + depth < p.horizon()) {
            ASSERT_LE(r.errors[i], std::ldexp(1.0, -static_cast<int>(depth))) << i;
        }
    }
    EXPECT_TRUE(check_mean_ergodic(r, std::ldexp(1.0, -5)).satisfied);
    EXPECT_THROW(shift_constructive_tracer(p, 0), std::invalid_argument);
}

TEST(BreakFreeWindows, SmallExample) {
    const IndexSet b(10, {4});
    EXPECT_EQ(break_free_windows(b, 2).members(), (std::vector<std::size_t>{0, 1, 2, 5, 6, 7, 8, 9}));
}

TEST(PowerSampling, HoldsOnRandomSequences) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> u(0, 9);
    std::uniform_real_distribution<double> ud(0, 1);
    for (int t = 0; t < 1000; ++t) {
        std::vector<long> a(1 + t % 200);
        for (auto& x : a) x = u(rng);
        std::vector<double> b(a.size());
        for (auto& x : b) x = ud(rng);
        for (std::size_t k : {1u, 2u, 3u, 5u}) {
            ASSERT_TRUE(power_sampling<long>(a, k).holds());
            ASSERT_TRUE(power_sampling<double>(b, k).holds());
        }
    }
    EXPECT_THROW(power_sampling<long>(std::vector<long>{1, -1}, 1), std::domain_error);
}
