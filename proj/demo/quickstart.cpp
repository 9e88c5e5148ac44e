// Generates a δ-ergodic pseudo orbit of the doubling map, traces it and
// prints the four verdicts.

#include <cstdio>

#include "shadowlab.hpp"
#include "shadowlab/oracle/doubling_backward.hpp"

int main() {
    using namespace shadowlab;
    const auto f = make_doubling_circle();
    const double delta = 0.01 * std::numbers::pi, eps = 0.05;
    const auto p = ergodic_pseudo_orbit<BinaryAngle>(f, {}, delta, doubling_schedule(), 4096, 42);
    std::printf("horizon %zu, breaks %zu, break density %s\n", p.horizon(), p.break_set.size(),
                density_at(p.break_set, p.horizon()).str().c_str());

    SearchOptions<BinaryAngle> opts;
    opts.hints = {oracle::doubling_backward_tracer(p)};
    const auto v = search_tracer(f, p, eps, Criterion::mean_ergodic, std::ldexp(2 * std::numbers::pi, -12), opts);
    std::printf("candidates evaluated %zu of %zu\n", v.candidates_evaluated, v.net_size + opts.hints.size());
    std::printf("%s\n", trace_summary_json(v.evidence, eps).dump(2).c_str());
    return v.satisfied ? 0 : 1;
}
