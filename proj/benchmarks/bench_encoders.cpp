#include <benchmark/benchmark.h>

#include "c2p/encoders.hpp"
#include "c2p/synth.hpp"

using namespace c2p;

namespace {

Sequence make_sequence(std::size_t frames, std::size_t points) {
    return generate_scene(default_scene_template(frames, points, 4), 5);
}

}  // namespace

static void BM_FarthestPointSample(benchmark::State& state) {
    Sequence seq = make_sequence(1, static_cast<std::size_t>(state.range(0)));
    const PointCloudFrame& frame = seq.frames[0];
    std::size_t anchors = frame.size() / 32;
    for (auto _ : state) {
        auto idx = farthest_point_sample(frame, anchors);
        benchmark::DoNotOptimize(idx);
    }
}
BENCHMARK(BM_FarthestPointSample)->Arg(256)->Arg(2048);

static void BM_BallQuery(benchmark::State& state) {
    Sequence seq = make_sequence(1, static_cast<std::size_t>(state.range(0)));
    const PointCloudFrame& frame = seq.frames[0];
    for (auto _ : state) {
        auto idx = ball_query(frame, 0, 0.9, 32);
        benchmark::DoNotOptimize(idx);
    }
}
BENCHMARK(BM_BallQuery)->Arg(256)->Arg(2048);

static void BM_TeacherForward(benchmark::State& state) {
    Sequence seq = make_sequence(8, static_cast<std::size_t>(state.range(0)));
    Encoder teacher(EncoderConfig{}, false, 1);
    ag::NoGradGuard ng;
    for (auto _ : state) {
        FeatureSequence f = teacher.forward(seq);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_TeacherForward)->Arg(256)->Arg(1024);

static void BM_StudentForward(benchmark::State& state) {
    Sequence seq = make_sequence(8, static_cast<std::size_t>(state.range(0)));
    Encoder student(EncoderConfig{}, true, 2);
    ag::NoGradGuard ng;
    for (auto _ : state) {
        FeatureSequence f = student.forward(seq);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_StudentForward)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
