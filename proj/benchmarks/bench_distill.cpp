#include <benchmark/benchmark.h>

#include "c2p/distill.hpp"
#include "c2p/synth.hpp"

using namespace c2p;

static void BM_LossForward(benchmark::State& state) {
    Sequence scene = generate_scene(default_scene_template(8, 256, 4), 7);
    EncoderConfig enc;
    DistillConfig dc;
    ViewConfig vc;
    Encoder teacher(enc, false, 1);
    Encoder student(enc, true, 2);
    PredictorBank bank(dc.window.nonzero_offsets(), true, enc.feature_dim, 3);
    ViewPair views = build_views(scene, Strategy::C2P, vc, 4, false);
    ag::NoGradGuard ng;
    for (auto _ : state) {
        FeatureSequence tf = teacher.forward(views.teacher_input);
        FeatureSequence sf = student.forward(views.student_input);
        ag::Tensor geo = geo_loss(sf, tf, dc);
        ag::Tensor time = time_loss(sf, tf, bank, dc);
        benchmark::DoNotOptimize(geo);
        benchmark::DoNotOptimize(time);
    }
}
BENCHMARK(BM_LossForward);

static void BM_TrainStep(benchmark::State& state) {
    Sequence scene = generate_scene(default_scene_template(8, 256, 4), 7);
    EncoderConfig enc;
    DistillConfig dc;
    TrainConfig tc;
    ViewConfig vc;
    DistillTrainer trainer(enc, dc, tc, vc, 5);
    std::uint64_t step = 0;
    for (auto _ : state) {
        LossBreakdown lb = trainer.train_step({&scene, &scene}, 0.01, step++);
        benchmark::DoNotOptimize(lb);
    }
}
BENCHMARK(BM_TrainStep);

static void BM_PartialViewBuild(benchmark::State& state) {
    Sequence scene = generate_scene(default_scene_template(8, 2048, 4), 9);
    ViewConfig vc;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        ViewPair views = build_views(scene, Strategy::C2P, vc, seed++, false);
        benchmark::DoNotOptimize(views);
    }
}
BENCHMARK(BM_PartialViewBuild);

BENCHMARK_MAIN();
