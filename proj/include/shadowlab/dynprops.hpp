#pragma once

// Finite-resolution probes of topological properties: chain transitivity
// through δ-transition graphs on an ε-net, sampled transitivity, return
// times and syndeticity, and proximal / asymptotic classification of pairs.
// Every probe is one-sided at its stated horizon and resolution.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "density.hpp"
#include "pseudo_orbit.hpp"
#include "system.hpp"
#include "verify.hpp"

namespace shadowlab {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

/// Nodes of an ε-net with an edge u → v whenever d(f(u), v) < delta.
/// Paths are exactly the finite δ-chains through net points.
template <class P>
struct TransitionGraph {
    std::vector<P> nodes;
    double delta = 0;
    double resolution = 0;
    Adjacency edges;

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& e : edges) n += e.size();
        return n;
    }
};

template <class P>
TransitionGraph<P> build_transition_graph(const System<P>& s, double delta, double resolution) {
    if (!(resolution > 0)) throw std::invalid_argument("build_transition_graph: resolution must be positive");
    if (!(delta > 2 * resolution))
        throw std::invalid_argument("build_transition_graph: delta " + std::to_string(delta) +
                                    " must exceed twice the resolution " + std::to_string(resolution));
    TransitionGraph<P> g;
    g.delta = delta;
    g.resolution = resolution;
    g.nodes = s.build_net(resolution);
    if (g.nodes.size() > std::numeric_limits<std::uint32_t>::max())
        throw ResourceError("build_transition_graph: too many nodes", g.nodes.size());
    g.edges.resize(g.nodes.size());
    for (std::size_t u = 0; u < g.nodes.size(); ++u) {
        const P image = s.map(g.nodes[u]);
        for (std::size_t v = 0; v < g.nodes.size(); ++v)
            if (s.metric(image, g.nodes[v]) < delta) g.edges[u].push_back(static_cast<std::uint32_t>(v));
    }
    return g;
}

/// Strongly connected components (Tarjan, iterative). component[v] is the
/// component id of v; ids are assigned in reverse topological order.
struct Components {
    std::vector<std::uint32_t> component;
    std::size_t count = 0;
};

inline Components strongly_connected_components(const Adjacency& adj) {
    const std::size_t n = adj.size();
    constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> index(n, kUnset), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    Components out;
    out.component.assign(n, kUnset);
    std::uint32_t next = 0;

    struct Frame {
        std::uint32_t v;
        std::size_t edge;
    };
    std::vector<Frame> call;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        call.push_back({root, 0});
        index[root] = low[root] = next++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& f = call.back();
            if (f.edge < adj[f.v].size()) {
                const std::uint32_t w = adj[f.v][f.edge++];
                if (index[w] == kUnset) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const std::uint32_t v = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    out.component[w] = static_cast<std::uint32_t>(out.count);
                } while (w != v);
                ++out.count;
            }
        }
    }
    return out;
}

/// Strongly connected: every ordered pair of nodes is joined by a δ-chain.
template <class P>
bool is_chain_transitive(const TransitionGraph<P>& g) {
    return !g.nodes.empty() && strongly_connected_components(g.edges).count == 1;
}

/// Entry k-1 is the chain-transitivity verdict for f^k.
template <class P>
std::vector<bool> is_totally_chain_transitive(const System<P>& s, double delta, double resolution,
                                              unsigned max_power) {
    if (max_power < 1) throw std::invalid_argument("is_totally_chain_transitive: max_power must be ≥ 1");
    std::vector<bool> out;
    for (unsigned k = 1; k <= max_power; ++k)
        out.push_back(is_chain_transitive(build_transition_graph(make_power(s, k), delta, resolution)));
    return out;
}

/// Shortest path from -> to by BFS, as node indices; empty if unreachable.
inline std::vector<std::uint32_t> find_path(const Adjacency& adj, std::uint32_t from, std::uint32_t to) {
    std::vector<std::uint32_t> parent(adj.size(), std::numeric_limits<std::uint32_t>::max());
    std::queue<std::uint32_t> q;
    q.push(from);
    parent[from] = from;
    while (!q.empty()) {
        const auto u = q.front();
        q.pop();
        for (auto v : adj[u]) {
            // Checked on edge discovery, so a path from a node to itself has at least one edge.
            if (v == to) {
                std::vector<std::uint32_t> path{v};
                for (auto w = u;; w = parent[w]) {
                    path.push_back(w);
                    if (w == from) break;
                }
                std::reverse(path.begin(), path.end());
                return path;
            }
            if (parent[v] == std::numeric_limits<std::uint32_t>::max()) {
                parent[v] = u;
                q.push(v);
            }
        }
    }
    return {};
}

/// Every consecutive pair of `chain` satisfies d(f(x_i), x_{i+1}) < delta.
template <class P>
bool is_delta_chain(const System<P>& s, const std::vector<P>& chain, double delta) {
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        if (!(s.metric(s.map(chain[i]), chain[i + 1]) < delta)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Transitivity

template <class P>
struct TransitivityEvidence {
    bool transitive = true;
    /// Smallest n ≥ 1 with f^n(U) ∩ V ≠ ∅ found for each tested pair.
    std::vector<std::size_t> hit_times;
    /// Centers of the first pair with no hit.
    std::optional<std::pair<P, P>> failing_pair;
};

/// For each pair of centers (a, b), looks for a net point u in U = B(a, radius)
/// (or a itself) and 1 ≤ n ≤ horizon with f^n(u) ∈ V = B(b, radius).
template <class P>
TransitivityEvidence<P> is_transitive_on_pairs(const System<P>& s, const std::vector<std::pair<P, P>>& pairs,
                                               double radius, std::size_t horizon, double net_resolution) {
    if (!(radius > 0)) throw std::invalid_argument("is_transitive_on_pairs: radius must be positive");
    const auto net = s.build_net(net_resolution);
    TransitivityEvidence<P> ev;
    for (const auto& [a, b] : pairs) {
        std::vector<P> current{a};
        for (const auto& u : net)
            if (s.metric(u, a) < radius) current.push_back(u);
        std::optional<std::size_t> hit;
        for (std::size_t n = 1; n <= horizon && !hit; ++n) {
            for (auto& u : current) {
                u = s.map(u);
                if (s.metric(u, b) < radius) {
                    hit = n;
                    break;
                }
            }
        }
        if (!hit) {
            ev.transitive = false;
            ev.failing_pair = std::make_pair(a, b);
            return ev;
        }
        ev.hit_times.push_back(*hit);
    }
    return ev;
}

/// Sampled version: `sample_count` random center pairs. One-sided: false
/// comes with a pair that has no hit at this horizon and resolution.
/// The default candidate net is fine enough (min(radius/32, radius²)) for
/// expanding maps and cylinder balls to spread across V within the horizon.
template <class P>
TransitivityEvidence<P> is_transitive_sampled(const System<P>& s, double radius, std::size_t horizon,
                                              std::size_t sample_count, std::uint64_t seed,
                                              std::optional<double> net_resolution = std::nullopt) {
    Rng rng(seed);
    std::vector<std::pair<P, P>> pairs;
    pairs.reserve(sample_count);
    for (std::size_t i = 0; i < sample_count; ++i) {
        P a = s.sample(rng);
        P b = s.sample(rng);
        pairs.emplace_back(std::move(a), std::move(b));
    }
    return is_transitive_on_pairs(s, pairs, radius, horizon,
                                  net_resolution.value_or(std::min(radius / 32, radius * radius)));
}

// ---------------------------------------------------------------------------
// Returns and minimality

/// {1 ≤ n ≤ horizon : d(f^n(x), x) < radius}, over horizon + 1 indices.
template <class P>
IndexSet syndetic_return_times(const System<P>& s, const P& x, double radius, std::size_t horizon) {
    if (!(radius > 0)) throw std::invalid_argument("syndetic_return_times: radius must be positive");
    std::vector<std::size_t> hits;
    P p = x;
    for (std::size_t n = 1; n <= horizon; ++n) {
        p = s.map(p);
        if (s.metric(p, x) < radius) hits.push_back(n);
    }
    return IndexSet(horizon + 1, std::move(hits));
}

/// Stand-in for a minimal point: the candidate whose return set to its own
/// radius-ball has the smallest largest gap (first one on ties).
template <class P>
std::pair<std::size_t, std::size_t> most_recurrent_point(const System<P>& s, const std::vector<P>& candidates,
                                                         double radius, std::size_t horizon) {
    if (candidates.empty()) throw std::invalid_argument("most_recurrent_point: no candidates");
    std::size_t best = 0, best_gap = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const std::size_t g = max_gap(syndetic_return_times(s, candidates[i], radius, horizon));
        if (g < best_gap) {
            best_gap = g;
            best = i;
        }
    }
    return {best, best_gap};
}

// ---------------------------------------------------------------------------
// Pairs

enum class PairKind { proximal, asymptotic, distal_at_resolution, undetermined };

inline std::string_view to_string(PairKind k) {
    switch (k) {
        case PairKind::proximal: return "proximal";
        case PairKind::asymptotic: return "asymptotic";
        case PairKind::distal_at_resolution: return "distal_at_resolution";
        case PairKind::undetermined: return "undetermined";
    }
    return "unknown";
}

template <class P>
struct PairClass {
    P x{};
    P y{};
    double liminf_distance = 0;
    double limsup_distance = 0;
    double tolerance = 0;
    PairKind kind = PairKind::undetermined;

    /// Recomputes the class from the two estimates.
    static PairKind classify(double liminf, double limsup, double tolerance) {
        if (limsup < tolerance) return PairKind::asymptotic;
        if (liminf < tolerance) return PairKind::proximal;
        return PairKind::distal_at_resolution;
    }
    bool proximal_or_asymptotic() const { return kind == PairKind::proximal || kind == PairKind::asymptotic; }
};

/// liminf estimate: min over 0 ≤ n ≤ horizon of d(f^n x, f^n y);
/// limsup estimate: max over the tail window of the same distances.
template <class P>
PairClass<P> classify_pair(const System<P>& s, const P& x, const P& y, std::size_t horizon, double tolerance,
                           const Rational& tail_fraction = kDefaultTailFraction) {
    if (!(tolerance > 0)) throw std::invalid_argument("classify_pair: tolerance must be positive");
    std::vector<double> d;
    d.reserve(horizon + 1);
    P fx = x, fy = y;
    for (std::size_t n = 0; n <= horizon; ++n) {
        d.push_back(s.metric(fx, fy));
        if (n < horizon) {
            fx = s.map(fx);
            fy = s.map(fy);
        }
    }
    const std::size_t first = tail_start(d.size(), tail_fraction) - 1;
    PairClass<P> c;
    c.x = x;
    c.y = y;
    c.tolerance = tolerance;
    c.liminf_distance = *std::min_element(d.begin(), d.end());
    c.limsup_distance = *std::max_element(d.begin() + static_cast<std::ptrdiff_t>(first), d.end());
    c.kind = PairClass<P>::classify(c.liminf_distance, c.limsup_distance, tolerance);
    return c;
}

/// Largest d(f^n x, f^n y), n ≤ horizon, over sampled pairs with d(x, y) < delta.
/// For an isometry this never exceeds the starting distance.
template <class P>
double equicontinuity_probe(const System<P>& s, double delta, std::size_t horizon, std::size_t samples,
                            std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const P x = s.sample(rng);
        P y = s.perturb(x, delta, rng);
        if (!(s.metric(x, y) < delta)) continue;
        P fx = x;
        for (std::size_t n = 0; n <= horizon; ++n) {
            worst = std::max(worst, s.metric(fx, y));
            fx = s.map(fx);
            y = s.map(y);
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Proximality construction

/// Produces a tracer for a pseudo orbit under the mean ergodic criterion at ε.
template <class P>
using Tracer = std::function<ShadowVerdict<P>(const PseudoOrbit<P>&, double epsilon)>;

template <class P>
Tracer<P> net_tracer(const System<P>& s, double resolution) {
    return [s, resolution](const PseudoOrbit<P>& p, double eps) {
        return search_tracer(s, p, eps, Criterion::mean_ergodic, resolution);
    };
}

/// Diagonal tracer on a full shift, checked under the mean ergodic criterion.
inline Tracer<SymbolPoint> shift_tracer(const System<SymbolPoint>& s, std::size_t prefix_depth) {
    return [s, prefix_depth](const PseudoOrbit<SymbolPoint>& p, double eps) {
        const SymbolPoint z = shift_constructive_tracer(p, prefix_depth);
        ShadowVerdict<SymbolPoint> v;
        static_cast<Verdict&>(v) = check_mean_ergodic(trace(s, z, p), eps);
        v.witness = z;
        v.candidates_evaluated = 1;
        return v;
    };
}

template <class P>
struct ProximalityOutcome {
    bool success = false;
    std::string failure_reason;
    WitnessSequence<P> sequence;
    ShadowVerdict<P> verdict;
    std::optional<PairClass<P>> z_x;
    std::optional<PairClass<P>> z_y;
};

/// Builds the x/y witness sequence, traces it, and classifies (z, x) and
/// (z, y) at tolerance ε. An untraceable sequence yields a failure record.
template <class P>
ProximalityOutcome<P> proximality_experiment(const System<P>& s, const P& x, const P& y, double epsilon,
                                             std::size_t horizon, const Tracer<P>& tracer,
                                             const std::function<std::size_t(std::size_t)>& schedule = doubling_schedule(),
                                             std::optional<double> delta = std::nullopt) {
    ProximalityOutcome<P> out;
    out.sequence = proximality_witness_sequence(s, x, y, schedule, horizon, delta.value_or(epsilon / 2));
    out.verdict = tracer(out.sequence.orbit, epsilon);
    if (!out.verdict.satisfied || !out.verdict.witness) {
        out.failure_reason = "no tracer satisfies mean_ergodic at epsilon " + std::to_string(epsilon) +
                             " (best statistic " + std::to_string(out.verdict.statistic) + ")";
        return out;
    }
    const P& z = *out.verdict.witness;
    out.z_x = classify_pair(s, z, x, horizon, epsilon);
    out.z_y = classify_pair(s, z, y, horizon, epsilon);
    out.success = out.z_x->proximal_or_asymptotic() && out.z_y->proximal_or_asymptotic();
    if (!out.success) out.failure_reason = "tracer found but a pair is not proximal at this tolerance";
    return out;
}

}  // namespace shadowlab
