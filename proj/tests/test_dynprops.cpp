#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "shadowlab/dynprops.hpp"

using namespace shadowlab;
using std::numbers::pi;

namespace {

std::vector<bool> reachable_from(const Adjacency& adj, std::size_t from) {
    std::vector<bool> seen(adj.size(), false);
    std::vector<std::size_t> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (auto v : adj[u])
            if (!seen[v]) seen[v] = true, stack.push_back(v);
    }
    return seen;
}

}  // namespace

TEST(Components, AgreeWithReachabilityOracle) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng() % 40;
        const double p = std::uniform_real_distribution<double>(0, 0.15)(rng);
        Adjacency adj(n);
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = 0; v < n; ++v)
                if (std::uniform_real_distribution<double>(0, 1)(rng) < p) adj[u].push_back(static_cast<std::uint32_t>(v));
        const auto c = strongly_connected_components(adj);
        std::vector<std::vector<bool>> reach;
        for (std::size_t u = 0; u < n; ++u) reach.push_back(reachable_from(adj, u));
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = 0; v < n; ++v)
                ASSERT_EQ(c.component[u] == c.component[v], reach[u][v] && reach[v][u]) << t;
    }
}

TEST(Components, LongCycleDoesNotOverflow) {
    const std::size_t n = 200000;
    Adjacency adj(n);
    for (std::size_t u = 0; u < n; ++u) adj[u].push_back(static_cast<std::uint32_t>((u + 1) % n));
    EXPECT_EQ(strongly_connected_components(adj).count, 1u);
    adj[n - 1].clear();
    EXPECT_EQ(strongly_connected_components(adj).count, n);
}

TEST(ChainTransitivity, IntervalIdentityIsChainTransitive) {
    const auto g = build_transition_graph(make_interval_identity(), 0.1, 0.02);
    EXPECT_TRUE(is_chain_transitive(g));
}

TEST(ChainTransitivity, TwoPointIdentityIsNot) {
    const auto s = make_finite_system("two-points", {0, 1});
    const auto g = build_transition_graph(s, 0.9, 0.4);
    EXPECT_EQ(g.nodes.size(), 2u);
    EXPECT_EQ(g.edge_count(), 2u);
    EXPECT_FALSE(is_chain_transitive(g));
}

TEST(ChainTransitivity, TwoCirclesNotTotally) {
    const auto v = is_totally_chain_transitive(make_two_circles_swap_double(), 0.5, 0.05, 2);
    EXPECT_EQ(v, (std::vector<bool>{true, false}));
    const auto g2 = build_transition_graph(make_power(make_two_circles_swap_double(), 2), 0.5, 0.05);
    const auto c = strongly_connected_components(g2.edges);
    EXPECT_EQ(c.count, 2u);
    for (std::size_t u = 0; u < g2.nodes.size(); ++u)
        for (std::size_t v2 = 0; v2 < g2.nodes.size(); ++v2)
            if (g2.nodes[u].component == g2.nodes[v2].component) {
                ASSERT_EQ(c.component[u], c.component[v2]);
            }
}

TEST(ChainTransitivity, DoublingIsTotally) {
    const auto v = is_totally_chain_transitive(make_doubling_circle(), 0.1, 0.02, 4);
    EXPECT_EQ(v, (std::vector<bool>{true, true, true, true}));
}

TEST(ChainTransitivity, ResolutionMustBeBelowHalfDelta) {
    EXPECT_THROW(build_transition_graph(make_interval_identity(), 0.1, 0.05), std::invalid_argument);
    EXPECT_THROW(is_totally_chain_transitive(make_interval_identity(), 0.1, 0.01, 0), std::invalid_argument);
}

TEST(Paths, AreDeltaChains) {
    const auto s = make_doubling_circle();
    const auto g = build_transition_graph(s, 0.1, 0.02);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        const auto a = static_cast<std::uint32_t>(rng() % g.nodes.size());
        const auto b = static_cast<std::uint32_t>(rng() % g.nodes.size());
        const auto path = find_path(g.edges, a, b);
        ASSERT_FALSE(path.empty());
        ASSERT_EQ(path.front(), a);
        ASSERT_EQ(path.back(), b);
        std::vector<BinaryAngle> chain;
        for (auto i : path) chain.push_back(g.nodes[i]);
        ASSERT_TRUE(is_delta_chain(s, chain, 0.1));
    }
    const Adjacency split{{0}, {1}};
    EXPECT_TRUE(find_path(split, 0, 1).empty());
    EXPECT_EQ(find_path(split, 0, 0), (std::vector<std::uint32_t>{0, 0}));
}

TEST(Transitivity, IdentityIsNot) {
    const auto ev = is_transitive_sampled(make_interval_identity(), 0.05, 64, 50, 3);
    EXPECT_FALSE(ev.transitive);
    ASSERT_TRUE(ev.failing_pair.has_value());
    EXPECT_GE(std::fabs(ev.failing_pair->first - ev.failing_pair->second), 0.05);
}

TEST(Transitivity, DoublingAndShiftAre) {
    const auto d = is_transitive_sampled(make_doubling_circle(), 0.1, 64, 50, 4);
    EXPECT_TRUE(d.transitive);
    EXPECT_EQ(d.hit_times.size(), 50u);
    const auto sh = is_transitive_sampled(make_full_shift(2, 128), 1.0 / 16, 64, 50, 5);
    EXPECT_TRUE(sh.transitive);
}

TEST(Returns, BasicExamples) {
    const auto d = make_doubling_circle();
    const auto fixed = syndetic_return_times(d, BinaryAngle(), 0.01, 100);
    EXPECT_EQ(fixed.size(), 100u);
    EXPECT_EQ(max_gap(fixed), 1u);

    const auto r7 = syndetic_return_times(d, BinaryAngle::from_fraction(1, 7, 512), 0.01, 99);
    for (std::size_t n = 1; n <= 99; ++n) ASSERT_EQ(r7.contains(n), n % 3 == 0) << n;
    EXPECT_TRUE(is_syndetic(r7, 3));

    const auto iso = syndetic_return_times(make_interval_isometry(), 0.3, 0.3, 50);
    for (std::size_t n = 1; n <= 50; ++n) ASSERT_EQ(iso.contains(n), n % 2 == 0) << n;
}

TEST(Returns, MostRecurrentCandidate) {
    const auto d = make_doubling_circle();
    Rng rng(6);
    const std::vector<BinaryAngle> candidates{d.sample(rng), BinaryAngle::from_fraction(1, 7, 512), d.sample(rng)};
    const auto [index, gap] = most_recurrent_point(d, candidates, 0.05, 200);
    EXPECT_EQ(index, 1u);
    EXPECT_EQ(gap, 3u);
    EXPECT_THROW(most_recurrent_point(d, std::vector<BinaryAngle>{}, 0.05, 10), std::invalid_argument);
}

TEST(Pairs, ClassifyThresholds) {
    EXPECT_EQ(PairClass<double>::classify(0.5, 0.8, 0.1), PairKind::distal_at_resolution);
    EXPECT_EQ(PairClass<double>::classify(0.05, 0.8, 0.1), PairKind::proximal);
    EXPECT_EQ(PairClass<double>::classify(0.01, 0.05, 0.1), PairKind::asymptotic);
    EXPECT_EQ(PairClass<double>::classify(0.1, 0.1, 0.1), PairKind::distal_at_resolution);
}

TEST(Pairs, Examples) {
    const auto d = make_doubling_circle();
    const auto same = classify_pair(d, BinaryAngle::from_radians(1.0), BinaryAngle::from_radians(1.0), 100, 0.01);
    EXPECT_EQ(same.kind, PairKind::asymptotic);
    const auto third = classify_pair(d, BinaryAngle(), BinaryAngle::from_fraction(1, 3, 512), 200, 0.1);
    EXPECT_EQ(third.kind, PairKind::distal_at_resolution);
    EXPECT_NEAR(third.liminf_distance, 2 * pi / 3, 1e-12);

    const std::size_t len = 2048;
    const auto s = make_full_shift(2, len);
    std::vector<std::uint8_t> a(len, 0), b(len, 0);
    b[3] = 1;
    EXPECT_EQ(classify_pair(s, SymbolPoint(a, 2, len), SymbolPoint(b, 2, len), 100, 0.01).kind, PairKind::asymptotic);
    // Ones at the squares: long runs of zeros between them, but a one in every tail window.
    std::vector<std::uint8_t> sq(len, 0);
    for (std::size_t k = 1; k * k < len; ++k) sq[k * k] = 1;
    const auto prox = classify_pair(s, SymbolPoint(a, 2, len), SymbolPoint(sq, 2, len), 1000, 0.01);
    EXPECT_EQ(prox.kind, PairKind::proximal);
    EXPECT_GE(prox.limsup_distance, 0.5);
}

TEST(Pairs, KindIsMonotoneInTolerance) {
    const auto d = make_doubling_circle();
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
        const auto x = d.sample(rng), y = d.sample(rng);
        int prev = 0;
        for (double tol : {0.001, 0.01, 0.1, 1.0, 4.0}) {
            const auto k = classify_pair(d, x, y, 64, tol).kind;
            const int rank = k == PairKind::distal_at_resolution ? 0 : k == PairKind::proximal ? 1 : 2;
            ASSERT_GE(rank, prev);
            prev = rank;
        }
    }
}

TEST(Pairs, IsometryIsEquicontinuous) {
    EXPECT_LE(equicontinuity_probe(make_interval_isometry(), 0.01, 100, 1000, 1), 0.01);
    EXPECT_GT(equicontinuity_probe(make_doubling_circle(), 0.01, 100, 100, 1), 0.5);
}

TEST(Proximality, EqualPointsSucceed) {
    const std::size_t h = 1000;
    const auto s = make_full_shift(2, h + 64);
    Rng rng(8);
    const auto x = s.sample(rng);
    const auto out = proximality_experiment(s, x, x, 1.0 / 8, h, shift_tracer(s, 5));
    EXPECT_TRUE(out.success) << out.failure_reason;
    EXPECT_EQ(out.z_x->kind, PairKind::asymptotic);
}

TEST(Proximality, ShiftPairsAreJoinedByOneTracer) {
    const std::size_t h = 1000;
    const auto s = make_full_shift(2, h + 64);
    Rng rng(9);
    for (int t = 0; t < 10; ++t) {
        const auto x = s.sample(rng), y = s.sample(rng);
        const auto out = proximality_experiment(s, x, y, 1.0 / 8, h, shift_tracer(s, 5));
        ASSERT_TRUE(out.success) << out.failure_reason;
        ASSERT_TRUE(out.verdict.satisfied);
        ASSERT_TRUE(out.z_x->proximal_or_asymptotic());
        ASSERT_TRUE(out.z_y->proximal_or_asymptotic());
    }
}

TEST(Proximality, IsometryFailureIsReported) {
    const auto s = make_interval_isometry();
    const auto out = proximality_experiment(s, 0.0, 1.0, 0.3, 1000, net_tracer(s, 1.0 / 1024));
    EXPECT_FALSE(out.success);
    EXPECT_FALSE(out.verdict.satisfied);
    EXPECT_FALSE(out.failure_reason.empty());
    EXPECT_FALSE(out.z_x.has_value());
}
