#include <benchmark/benchmark.h>

#include "emba/egraph.hpp"
#include "emba/extract.hpp"
#include "emba/rewrite.hpp"
#include "emba/semantics.hpp"

namespace {

constexpr const char* kObfuscatedAdd = "(x|y)+y-(~x&y)";

void BM_Parse(benchmark::State& state) {
    auto w = emba::Width::of(8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(emba::parse(kObfuscatedAdd, w));
    }
}
BENCHMARK(BM_Parse);

void BM_SimplifyObfuscatedAdd(benchmark::State& state) {
    auto w = emba::Width::of(8);
    auto input = emba::preprocess(emba::parse(kObfuscatedAdd, w), w);
    auto rules = emba::default_ruleset(w);
    for (auto _ : state) {
        emba::EGraph g(w);
        auto root = g.add_expr(*input);
        emba::saturate(g, rules, {});
        benchmark::DoNotOptimize(emba::extract_best(g, root, {}));
    }
}
BENCHMARK(BM_SimplifyObfuscatedAdd);

void BM_ExhaustiveEquiv8(benchmark::State& state) {
    auto w = emba::Width::of(8);
    auto a = emba::parse("x+y", w);
    auto b = emba::parse("(x|y)+(x&y)", w);
    for (auto _ : state) {
        benchmark::DoNotOptimize(emba::equiv_exhaustive(*a, *b, w));
    }
}
BENCHMARK(BM_ExhaustiveEquiv8);

}  // namespace

BENCHMARK_MAIN();
