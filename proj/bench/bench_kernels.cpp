// Parallel kernels vs. their serial reference twins on production-sized
// inputs. Run with --benchmark_filter=... to narrow.
#include <benchmark/benchmark.h>

#include <cstdint>

#include "c2m/backend.hpp"
#include "c2m/field.hpp"
#include "c2m/mask.hpp"
#include "c2m/reference.hpp"
#include "c2m/rng.hpp"

namespace {

using namespace c2m;

Field random_field(int w, int h, std::uint64_t seed) {
    Field f(w, h, 0.0);
    for (size_t i = 0; i < f.v.size(); ++i) {
        f.v[i] = rng::unit_uniform(rng::combine(seed, i));
    }
    return f;
}

Mask random_mask(int w, int h, std::uint64_t seed) {
    Mask m(w, h);
    for (size_t i = 0; i < m.bits.size(); ++i) {
        m.bits[i] = rng::unit_uniform(rng::combine(seed, i)) < 0.5 ? 1 : 0;
    }
    return m;
}

const int kDim = 512;

void bm_blur_parallel(benchmark::State& state) {
    Field f = random_field(kDim, kDim, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gaussian_blur_field(f, 2.5));
    }
}
BENCHMARK(bm_blur_parallel);

void bm_blur_reference(benchmark::State& state) {
    Field f = random_field(kDim, kDim, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::gaussian_blur_field(f, 2.5));
    }
}
BENCHMARK(bm_blur_reference);

void bm_dilate_parallel(benchmark::State& state) {
    Mask m = random_mask(kDim, kDim, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dilate(m, 2));
    }
}
BENCHMARK(bm_dilate_parallel);

void bm_dilate_reference(benchmark::State& state) {
    Mask m = random_mask(kDim, kDim, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::dilate(m, 2));
    }
}
BENCHMARK(bm_dilate_reference);

void bm_target_parallel(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthetic_target("crimson orb", kDim, kDim, 0));
    }
}
BENCHMARK(bm_target_parallel);

void bm_target_reference(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::synthetic_target("crimson orb", kDim, kDim, 0));
    }
}
BENCHMARK(bm_target_reference);

void bm_encode_parallel(benchmark::State& state) {
    SyntheticBackend be{SyntheticParams{}};
    Image img = synthetic_target("", kDim, kDim, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(be.encode(img));
    }
}
BENCHMARK(bm_encode_parallel);

void bm_encode_reference(benchmark::State& state) {
    Image img = synthetic_target("", kDim, kDim, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::encode(img, 8));
    }
}
BENCHMARK(bm_encode_reference);

void bm_composite_parallel(benchmark::State& state) {
    Image a = synthetic_target("", kDim, kDim, 0);
    Image b = synthetic_target("crimson orb", kDim, kDim, 0);
    SoftMask alpha(kDim, kDim, 0.0);
    for (size_t i = 0; i < alpha.alpha.size(); ++i) {
        alpha.alpha[i] = rng::unit_uniform(rng::combine(7, i));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(composite(b, a, alpha));
    }
}
BENCHMARK(bm_composite_parallel);

void bm_composite_reference(benchmark::State& state) {
    Image a = synthetic_target("", kDim, kDim, 0);
    Image b = synthetic_target("crimson orb", kDim, kDim, 0);
    SoftMask alpha(kDim, kDim, 0.0);
    for (size_t i = 0; i < alpha.alpha.size(); ++i) {
        alpha.alpha[i] = rng::unit_uniform(rng::combine(7, i));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::composite(b, a, alpha));
    }
}
BENCHMARK(bm_composite_reference);

void bm_score(benchmark::State& state) {
    SyntheticBackend be{SyntheticParams{}};
    Image img = synthetic_target("", kDim, kDim, 0);
    Mask m = upscale_mask(random_mask(kDim / 8, kDim / 8, 9), 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(be.score(img, m, "crimson orb"));
    }
}
BENCHMARK(bm_score);

}  // namespace

BENCHMARK_MAIN();
