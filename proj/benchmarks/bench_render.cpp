#include <benchmark/benchmark.h>

#include "c2p/partial_view.hpp"
#include "c2p/rng.hpp"

using namespace c2p;

namespace {

PointCloudFrame make_frame(std::size_t n) {
    Pcg32 rng(11);
    PointCloudFrame f;
    f.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        f.points.push_back({rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8),
                            rng.uniform(1.0, 5.0)});
    return f;
}

}  // namespace

static void BM_RenderDepth(benchmark::State& state) {
    PointCloudFrame frame = make_frame(static_cast<std::size_t>(state.range(0)));
    CameraPose pose{Mat3::identity(), {0, 0, 0}};
    CameraIntrinsics intr;
    for (auto _ : state) {
        DepthImage img = render_depth(frame, pose, intr);
        benchmark::DoNotOptimize(img);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RenderDepth)->Arg(256)->Arg(2048)->Arg(16384);

static void BM_OcclusionSample(benchmark::State& state) {
    PointCloudFrame frame = make_frame(static_cast<std::size_t>(state.range(0)));
    CameraPose pose{Mat3::identity(), {0, 0, 0}};
    CameraIntrinsics intr;
    for (auto _ : state) {
        OcclusionResult res = occlusion_sample(frame, pose, intr);
        benchmark::DoNotOptimize(res);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OcclusionSample)->Arg(2048)->Arg(16384);

static void BM_GeneratePartialSequence(benchmark::State& state) {
    Sequence seq;
    seq.frames.assign(8, make_frame(2048));
    TrajectoryConfig cfg;
    for (auto _ : state) {
        PartialSequence out =
            generate_partial_sequence(seq, {2.5, 0, 0}, cfg, 3);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_GeneratePartialSequence);

BENCHMARK_MAIN();
