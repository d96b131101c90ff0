#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "c2p/checkpoint.hpp"
#include "c2p/distill.hpp"
#include "c2p/rng.hpp"
#include "c2p/synth.hpp"

using namespace c2p;

namespace {

// Straight-line evaluator of the contrastive objective, sharing no code
// with the graph implementation. rows: L x d, unit or not; anchors from
// `anchor_rows`, positives from `pos_rows`.
double brute_infonce(const std::vector<std::vector<double>>& anchors,
                     const std::vector<std::vector<double>>& teacher,
                     const std::vector<std::size_t>& anchor_frames,
                     const std::vector<std::size_t>& positive_frames,
                     const WindowSpec& window, double tau, bool literal) {
    double total = 0.0;
    const std::size_t L = teacher.size();
    for (std::size_t t = 0; t < anchors.size(); ++t) {
        std::size_t i = anchor_frames[t];
        const auto& a = anchors[t];
        auto dot = [&](const std::vector<double>& b) {
            double s = 0.0;
            for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
            return s;
        };
        double pos = dot(teacher[positive_frames[t]]) / tau;
        double denom = 0.0;
        for (std::size_t j = 0; j < L; ++j) {
            long long delta = static_cast<long long>(j) - static_cast<long long>(i);
            bool in_window = false;
            for (int o : window.offsets)
                if (delta == o) in_window = true;
            if (!in_window) denom += std::exp(dot(teacher[j]) / tau);
        }
        if (!literal) denom += std::exp(pos);
        total += -(pos - std::log(denom));
    }
    return total;
}

FeatureSequence make_features(const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return ag::Tensor::from_data({rows.size(), rows[0].size()},
                                 std::move(flat));
}

std::vector<std::vector<double>> random_unit_rows(std::size_t L, std::size_t d,
                                                  Pcg32& rng) {
    std::vector<std::vector<double>> rows(L, std::vector<double>(d));
    for (auto& r : rows) {
        double n = 0.0;
        for (double& v : r) {
            v = rng.uniform(-1, 1);
            n += v * v;
        }
        n = std::sqrt(n);
        for (double& v : r) v /= n;
    }
    return rows;
}

std::vector<std::vector<double>> tensor_rows(const ag::Tensor& t) {
    std::vector<std::vector<double>> rows(t.shape()[0],
                                          std::vector<double>(t.shape()[1]));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            rows[i][j] = t.at(i * rows[i].size() + j);
    return rows;
}

Sequence tiny_scene(std::uint64_t seed, std::size_t frames = 6,
                    std::size_t points = 48) {
    return generate_scene(default_scene_template(frames, points, 2), seed);
}

}  // namespace

TEST_CASE("negative pool enumerations") {
    WindowSpec w3 = WindowSpec::window3();
    CHECK(negative_pool(2, w3, 5) == std::vector<std::size_t>{0, 4});
    CHECK(negative_pool(0, w3, 5) == std::vector<std::size_t>{2, 3, 4});
    CHECK(negative_pool(4, w3, 5) == std::vector<std::size_t>{0, 1, 2});
    CHECK(negative_pool(0, WindowSpec::window1(), 3) ==
          std::vector<std::size_t>{1, 2});
    CHECK(negative_pool(1, w3, 3).empty());
}

TEST_CASE("an empty combined negative pool is a degenerate batch") {
    Pcg32 rng(2);
    auto s = random_unit_rows(3, 4, rng);
    auto t = random_unit_rows(3, 4, rng);
    DistillConfig cfg;  // window 3: anchor 1 of L=3 has no negatives
    CHECK_THROWS_AS(geo_loss(make_features(s), make_features(t), cfg),
                    ConfigError);
}

TEST_CASE("batch scope adds the other sequence's frames as negatives") {
    Pcg32 rng(1);
    auto s = random_unit_rows(5, 8, rng);
    auto t = random_unit_rows(5, 8, rng);
    auto other = random_unit_rows(5, 8, rng);
    DistillConfig cfg;

    // 2 own negatives + 5 extra rows: geometric term must differ from the
    // sequence-scope value and match the oracle over the combined pool.
    std::vector<ag::Tensor> extras = {make_features(other)};
    ag::Tensor with_batch = geo_loss(make_features(s), make_features(t), cfg,
                                     extras);
    ag::Tensor without = geo_loss(make_features(s), make_features(t), cfg);
    CHECK(with_batch.scalar() != without.scalar());

    // Oracle: treat extras as extra always-negative frames.
    double expect = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        auto dot = [&](const std::vector<double>& a,
                       const std::vector<double>& b) {
            double acc = 0.0;
            for (std::size_t j = 0; j < 8; ++j) acc += a[j] * b[j];
            return acc;
        };
        double pos = dot(s[i], t[i]) / cfg.tau;
        double denom = 0.0;
        std::size_t count = 0;
        for (std::size_t j = 0; j < 5; ++j) {
            long long delta = (long long)j - (long long)i;
            if (delta < -1 || delta > 1) {
                denom += std::exp(dot(s[i], t[j]) / cfg.tau);
                ++count;
            }
        }
        for (const auto& row : other) {
            denom += std::exp(dot(s[i], row) / cfg.tau);
            ++count;
        }
        if (i == 2) CHECK(count == 7);  // 2 in-sequence + 5 batch negatives
        expect += -(pos - std::log(denom));
    }
    expect /= 5.0;
    CHECK(std::fabs(with_batch.scalar() - expect) < 1e-10);
}

TEST_CASE("uniform features give log(Nneg) per anchor") {
    std::vector<std::vector<double>> rows(5);
    std::vector<double> u = {0.5, 0.5, 0.5, 0.5};
    for (auto& r : rows) r = u;
    DistillConfig cfg;
    std::vector<double> per_frame;
    geo_loss(make_features(rows), make_features(rows), cfg, {}, &per_frame);
    REQUIRE(per_frame.size() == 5);
    CHECK(std::fabs(per_frame[2] - std::log(2.0)) < 1e-9);  // interior: Nneg=2
    CHECK(std::fabs(per_frame[0] - std::log(3.0)) < 1e-9);  // boundary: Nneg=3
}

TEST_CASE("orthogonal negatives give log(Nneg) - 1/tau per anchor") {
    // Rows are distinct basis vectors; anchor i matches teacher i exactly.
    std::vector<std::vector<double>> rows(5, std::vector<double>(5, 0.0));
    for (std::size_t i = 0; i < 5; ++i) rows[i][i] = 1.0;
    DistillConfig cfg;
    cfg.tau = 1.0;
    std::vector<double> per_frame;
    geo_loss(make_features(rows), make_features(rows), cfg, {}, &per_frame);
    CHECK(std::fabs(per_frame[2] - (std::log(2.0) - 1.0)) < 1e-9);

    cfg.tau = 0.07;
    geo_loss(make_features(rows), make_features(rows), cfg, {}, &per_frame);
    CHECK(std::fabs(per_frame[2] - (std::log(2.0) - 1.0 / 0.07)) < 1e-9);
}

TEST_CASE("geo_loss matches the brute-force oracle on random instances") {
    Pcg32 rng(7);
    for (int iter = 0; iter < 25; ++iter) {
        std::size_t L = 4 + rng.next_below(3);  // 4..6
        std::size_t d = 4 + rng.next_below(5);
        auto s = random_unit_rows(L, d, rng);
        auto t = random_unit_rows(L, d, rng);
        DistillConfig cfg;
        cfg.denominator = (iter % 2) ? DenominatorMode::Standard
                                     : DenominatorMode::Literal;
        std::vector<std::size_t> frames(L);
        for (std::size_t i = 0; i < L; ++i) frames[i] = i;
        double want = brute_infonce(s, t, frames, frames, cfg.window, cfg.tau,
                                    cfg.denominator == DenominatorMode::Literal) /
                      static_cast<double>(L);
        double got = geo_loss(make_features(s), make_features(t), cfg).scalar();
        CHECK(std::fabs(got - want) < 1e-10);
    }
}

TEST_CASE("time_loss hits the closed form when predictions are exact") {
    // Teacher rows: positives e1, negatives e2/e3; zeroed predictor heads
    // with b2 = e1 output exactly the positive.
    std::vector<std::vector<double>> t(5, std::vector<double>(4, 0.0));
    t[1][0] = 1.0;
    t[2][0] = 1.0;
    t[3][0] = 1.0;
    t[0][1] = 1.0;
    t[4][2] = 1.0;
    std::vector<std::vector<double>> s(5, std::vector<double>(4, 0.0));
    for (auto& r : s) r[3] = 1.0;

    DistillConfig cfg;
    cfg.tau = 1.0;
    PredictorBank bank({-1, 1}, true, 4, 1);
    for (auto& [name, tensor] : bank.params()) {
        auto d = tensor.mutable_data();
        std::fill(d.begin(), d.end(), 0.0);
    }
    for (const char* head : {"m1.b2", "p1.b2"}) {
        auto d = bank.params().at(head).mutable_data();
        d[0] = 1.0;
    }

    std::vector<double> per_frame;
    time_loss(make_features(s), make_features(t), bank, cfg, {}, &per_frame);
    CHECK(std::fabs(per_frame[2] - (std::log(2.0) - 1.0)) < 1e-9);
}

TEST_CASE("window of one makes the temporal loss exactly zero") {
    Pcg32 rng(9);
    auto s = random_unit_rows(5, 6, rng);
    auto t = random_unit_rows(5, 6, rng);
    DistillConfig cfg;
    cfg.window = WindowSpec::window1();
    cfg.reset_offset_weights();
    PredictorBank bank({}, true, 6, 2);
    ag::Tensor loss =
        time_loss(make_features(s), make_features(t), bank, cfg);
    CHECK(loss.scalar() == 0.0);
}

TEST_CASE("time_loss matches the brute-force oracle") {
    Pcg32 rng(11);
    for (int iter = 0; iter < 15; ++iter) {
        std::size_t L = 5 + rng.next_below(4);  // 5..8
        std::size_t d = 4 + rng.next_below(13); // 4..16
        auto s = random_unit_rows(L, d, rng);
        auto t = random_unit_rows(L, d, rng);
        DistillConfig cfg;
        PredictorBank bank({-1, 1}, true, d, 100 + iter);
        FeatureSequence sf = make_features(s);
        FeatureSequence tf = make_features(t);
        double got = time_loss(sf, tf, bank, cfg).scalar();

        // Oracle: predictor outputs evaluated through the bank, then the
        // objective recomputed with plain loops and boundary weights.
        auto m1 = tensor_rows(ag::l2_normalize(bank.forward(sf, -1), 1));
        auto p1 = tensor_rows(ag::l2_normalize(bank.forward(sf, 1), 1));
        double want = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            double frame = 0.0, weight = 0.0;
            for (int o : {-1, 1}) {
                long long tgt = (long long)i + o;
                if (tgt < 0 || tgt >= (long long)L) continue;
                weight += 0.25;
            }
            if (weight == 0.0) continue;
            for (int o : {-1, 1}) {
                long long tgt = (long long)i + o;
                if (tgt < 0 || tgt >= (long long)L) continue;
                const auto& a = (o == -1 ? m1 : p1)[i];
                auto dot = [&](const std::vector<double>& b) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < d; ++j) acc += a[j] * b[j];
                    return acc;
                };
                double pos = dot(t[tgt]) / cfg.tau;
                double denom = 0.0;
                for (std::size_t j = 0; j < L; ++j) {
                    long long delta = (long long)j - (long long)i;
                    if (delta >= -1 && delta <= 1) continue;
                    denom += std::exp(dot(t[j]) / cfg.tau);
                }
                frame += (0.25 / weight) * -(pos - std::log(denom));
            }
            want += frame;
        }
        want /= static_cast<double>(L);
        CHECK(std::fabs(got - want) < 1e-10);
    }
}

TEST_CASE("monotonicity: raising the positive similarity lowers the loss") {
    Pcg32 rng(13);
    auto t = random_unit_rows(5, 6, rng);
    auto s = random_unit_rows(5, 6, rng);
    DistillConfig cfg;
    double base = geo_loss(make_features(s), make_features(t), cfg).scalar();
    // Pull anchor 2 toward its positive.
    for (std::size_t j = 0; j < 6; ++j)
        s[2][j] = 0.2 * s[2][j] + 0.8 * t[2][j];
    double n = 0.0;
    for (double v : s[2]) n += v * v;
    for (double& v : s[2]) v /= std::sqrt(n);
    double closer = geo_loss(make_features(s), make_features(t), cfg).scalar();
    CHECK(closer < base);
}

TEST_CASE("total_loss combines and validates weights") {
    DistillConfig cfg;
    LossBreakdown lb = total_loss(2.0, 4.0, cfg);
    CHECK(lb.total == 3.0);
    CHECK(lb.total - (cfg.alpha1 * lb.geo + cfg.alpha2 * lb.time) == 0.0);

    DistillConfig geo_only;
    geo_only.alpha1 = 1.0;
    geo_only.alpha2 = 0.0;
    geo_only.offset_weights = {0.0, 0.0};
    CHECK(total_loss(2.0, 4.0, geo_only).total == 2.0);

    DistillConfig bad;
    bad.alpha1 = 0.7;  // alpha2 still 0.5
    CHECK_THROWS_AS(total_loss(1.0, 1.0, bad), ConfigError);
}

TEST_CASE("defaults reproduce the 50/25/25 split") {
    DistillConfig cfg;
    CHECK(cfg.tau == 0.07);
    CHECK(cfg.alpha1 == 0.5);
    CHECK(cfg.offset_weight(-1) == 0.25);
    CHECK(cfg.offset_weight(1) == 0.25);
    CHECK(cfg.window.offsets == std::vector<int>{-1, 0, 1});
}

TEST_CASE("window presets parse") {
    CHECK(WindowSpec::parse("1").offsets == std::vector<int>{0});
    CHECK(WindowSpec::parse("5").offsets == std::vector<int>{-2, -1, 0, 1, 2});
    CHECK(WindowSpec::parse("pm2").offsets == std::vector<int>{-2, 0, 2});
    CHECK(WindowSpec::parse("-1,0,1").offsets == std::vector<int>{-1, 0, 1});
    CHECK_THROWS_AS(WindowSpec::parse("1,2"), ConfigError);   // missing 0
    CHECK_THROWS_AS(WindowSpec::parse("junk"), ConfigError);
}

TEST_CASE("build_views per strategy") {
    Sequence scene = tiny_scene(3);
    ViewConfig vc;

    ViewPair c2c = build_views(scene, Strategy::C2C, vc, 5, false);
    CHECK(c2c.teacher_input.frames.size() == c2c.student_input.frames.size());
    for (std::size_t i = 0; i < scene.length(); ++i)
        CHECK(c2c.teacher_input.frames[i].points ==
              c2c.student_input.frames[i].points);

    ViewPair c2p = build_views(scene, Strategy::C2P, vc, 5, false);
    for (std::size_t i = 0; i < scene.length(); ++i) {
        CHECK(c2p.teacher_input.frames[i].points == scene.frames[i].points);
        for (const Vec3& p : c2p.student_input.frames[i].points)
            CHECK(std::find(scene.frames[i].points.begin(),
                            scene.frames[i].points.end(),
                            p) != scene.frames[i].points.end());
    }

    ViewPair p2p = build_views(scene, Strategy::P2P, vc, 5, false);
    bool differ = false;
    for (std::size_t i = 0; i < scene.length(); ++i)
        differ = differ || p2p.teacher_input.frames[i].points !=
                               p2p.student_input.frames[i].points;
    CHECK(differ);

    ViewPair shared = build_views(scene, Strategy::P2P, vc, 5, true);
    for (std::size_t i = 0; i < scene.length(); ++i)
        CHECK(shared.teacher_input.frames[i].points ==
              shared.student_input.frames[i].points);
}

TEST_CASE("warmup schedule") {
    CHECK(warmup_lr(0, 0.01, 10) == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(warmup_lr(9, 0.01, 10) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(warmup_lr(30, 0.01, 10) == 0.01);
    CHECK(warmup_lr(0, 0.01, 0) == 0.01);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
    EncoderConfig enc;
    enc.feature_dim = 8;
    enc.heads = 2;
    enc.spatial_stride = 8;
    enc.neighbors = 8;
    enc.max_frames = 8;
    DistillConfig dc;
    TrainConfig tc;
    ViewConfig vc;
    DistillTrainer trainer(enc, dc, tc, vc, 3);
    std::vector<double> before(
        trainer.student().params().at("local.w1").data().begin(),
        trainer.student().params().at("local.w1").data().end());

    Sequence scene = tiny_scene(4);
    LossBreakdown lb = trainer.train_step({&scene}, 0.0, 99);
    CHECK(std::isfinite(lb.total));
    auto after = trainer.student().params().at("local.w1").data();
    for (std::size_t i = 0; i < before.size(); ++i)
        CHECK(before[i] == after[i]);
}

TEST_CASE("train_step is deterministic given the seed") {
    EncoderConfig enc;
    enc.feature_dim = 8;
    enc.heads = 2;
    enc.spatial_stride = 8;
    enc.neighbors = 8;
    enc.max_frames = 8;
    DistillConfig dc;
    TrainConfig tc;
    ViewConfig vc;
    Sequence scene = tiny_scene(5);

    auto run_once = [&] {
        DistillTrainer t(enc, dc, tc, vc, 17);
        LossBreakdown lb = t.train_step({&scene}, 0.01, 5);
        std::vector<double> w(t.student().params().at("local.w1").data().begin(),
                              t.student().params().at("local.w1").data().end());
        return std::make_pair(lb.total, w);
    };
    auto [l1, w1] = run_once();
    auto [l2, w2] = run_once();
    CHECK(l1 == l2);
    CHECK(w1 == w2);
}

TEST_CASE("poisoned parameters raise NumericError and leave state intact") {
    EncoderConfig enc;
    enc.feature_dim = 8;
    enc.heads = 2;
    enc.spatial_stride = 8;
    enc.neighbors = 8;
    enc.max_frames = 8;
    DistillTrainer trainer(enc, DistillConfig{}, TrainConfig{}, ViewConfig{}, 1);
    auto w = trainer.student().params().at("local.w1").mutable_data();
    w[0] = std::nan("");
    std::vector<double> snapshot(w.begin(), w.end());
    Sequence scene = tiny_scene(6);
    CHECK_THROWS_AS(trainer.train_step({&scene}, 0.01, 1), NumericError);
    auto after = trainer.student().params().at("local.w1").data();
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
        bool unchanged = after[i] == snapshot[i] ||
                         (std::isnan(after[i]) && std::isnan(snapshot[i]));
        CHECK(unchanged);
    }
}

TEST_CASE("short training run reduces the loss") {
    EncoderConfig enc;
    enc.feature_dim = 16;
    enc.heads = 2;
    enc.spatial_stride = 8;
    enc.neighbors = 8;
    enc.max_frames = 8;
    DistillConfig dc;
    TrainConfig tc;
    tc.epochs = 12;
    tc.warmup_epochs = 3;
    tc.batch_size = 4;
    ViewConfig vc;
    SceneSpec tmpl = default_scene_template(5, 64, 2);
    std::vector<Sequence> data = make_dataset(6, tmpl, 0);
    DistillTrainer trainer(enc, dc, tc, vc, 0);
    trainer.run(data, nullptr);
    REQUIRE(trainer.epoch_means().size() == 12);
    CHECK(trainer.epoch_means().back() < trainer.epoch_means().front());
}

TEST_CASE("checkpoint save, resume, and step continuity") {
    namespace fs = std::filesystem;
    EncoderConfig enc;
    enc.feature_dim = 8;
    enc.heads = 2;
    enc.spatial_stride = 8;
    enc.neighbors = 8;
    enc.max_frames = 8;
    DistillConfig dc;
    TrainConfig tc;
    tc.epochs = 2;
    tc.batch_size = 2;
    ViewConfig vc;
    SceneSpec tmpl = default_scene_template(4, 32, 2);
    std::vector<Sequence> data = make_dataset(4, tmpl, 1);

    std::string path = (fs::temp_directory_path() / "c2p_trainer.c2pw").string();

    // Zero-epoch run: checkpoint equals the initial parameters.
    {
        DistillTrainer t(enc, dc, TrainConfig{.epochs = 0}, vc, 5);
        std::vector<double> init(
            t.student().params().at("local.w1").data().begin(),
            t.student().params().at("local.w1").data().end());
        t.run(data, nullptr, path);
        ParamSet saved = read_checkpoint(path);
        auto loaded = saved.at("student.local.w1").data();
        for (std::size_t i = 0; i < init.size(); ++i)
            CHECK(loaded[i] == init[i]);
        CHECK(saved.at("meta.step").scalar() == 0.0);
    }

    // Split run equals straight run, and the step counter continues.
    DistillTrainer full(enc, dc, TrainConfig{.epochs = 4, .batch_size = 2},
                        vc, 5);
    full.run(data, nullptr);

    DistillTrainer head(enc, dc, TrainConfig{.epochs = 2, .batch_size = 2},
                        vc, 5);
    head.run(data, nullptr, path);
    DistillTrainer tail(enc, dc, TrainConfig{.epochs = 4, .batch_size = 2},
                        vc, 5);
    tail.resume(path);
    CHECK(tail.step_count() == 4);  // 2 epochs x 2 steps
    tail.run(data, nullptr);
    CHECK(tail.step_count() == full.step_count());
    auto wa = full.student().params().at("local.w1").data();
    auto wb = tail.student().params().at("local.w1").data();
    for (std::size_t i = 0; i < wa.size(); ++i) CHECK(wa[i] == wb[i]);
    fs::remove(path);
}

TEST_CASE("teacher modes: stop-gradient freezes, ema tracks the student") {
    EncoderConfig enc;
    enc.feature_dim = 8;
    enc.heads = 2;
    enc.spatial_stride = 8;
    enc.neighbors = 8;
    enc.max_frames = 8;
    ViewConfig vc;
    Sequence scene = tiny_scene(8);

    DistillConfig frozen;
    frozen.teacher_mode = TeacherMode::StopGradient;
    DistillTrainer ft(enc, frozen, TrainConfig{}, vc, 2);
    std::vector<double> before(
        ft.teacher().params().at("local.w1").data().begin(),
        ft.teacher().params().at("local.w1").data().end());
    ft.train_step({&scene}, 0.05, 3);
    auto after = ft.teacher().params().at("local.w1").data();
    for (std::size_t i = 0; i < before.size(); ++i)
        CHECK(after[i] == before[i]);

    DistillConfig ema;
    ema.teacher_mode = TeacherMode::Ema;
    ema.ema_decay = 0.5;
    DistillTrainer et(enc, ema, TrainConfig{}, vc, 2);
    std::vector<double> t0(
        et.teacher().params().at("local.w1").data().begin(),
        et.teacher().params().at("local.w1").data().end());
    et.train_step({&scene}, 0.0, 3);  // lr 0: student fixed, EMA still blends
    auto t1 = et.teacher().params().at("local.w1").data();
    auto s1 = et.student().params().at("local.w1").data();
    for (std::size_t i = 0; i < t0.size(); ++i)
        CHECK(t1[i] == doctest::Approx(0.5 * t0[i] + 0.5 * s1[i]).epsilon(1e-12));
}

TEST_CASE("full objective gradient through both encoders and predictors") {
    EncoderConfig enc;
    enc.feature_dim = 8;
    enc.heads = 2;
    enc.spatial_stride = 8;
    enc.neighbors = 8;
    enc.max_frames = 8;
    DistillConfig dc;
    ViewConfig vc;
    vc.trajectory.direction = SweepDirection::LeftToRight;
    Sequence scene = tiny_scene(12, 5, 40);
    ViewPair views = build_views(scene, Strategy::C2P, vc, 3, false);
    Encoder teacher(enc, false, 31);
    Encoder student(enc, true, 32);
    PredictorBank bank(dc.window.nonzero_offsets(), true, enc.feature_dim, 33);

    auto objective = [&]() {
        FeatureSequence tf = teacher.forward(views.teacher_input);
        FeatureSequence sf = student.forward(views.student_input);
        return ag::add(ag::mul(geo_loss(sf, tf, dc), dc.alpha1),
                       ag::mul(time_loss(sf, tf, bank, dc), dc.alpha2));
    };
    for (const char* name : {"local.w1", "local.b2"}) {
        double err = ag::grad_check(
            [&](const ag::Tensor&) { return objective(); },
            teacher.params().at(name), 1e-5);
        CHECK(err < 1e-4);
    }
    for (const char* name : {"local.w1", "pos_embed", "block0.wv"}) {
        double err = ag::grad_check(
            [&](const ag::Tensor&) { return objective(); },
            student.params().at(name), 1e-5);
        CHECK(err < 1e-4);
    }
    double err = ag::grad_check([&](const ag::Tensor&) { return objective(); },
                                bank.params().at("p1.w2"), 1e-5);
    CHECK(err < 1e-4);
}
