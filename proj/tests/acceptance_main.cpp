// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "c2p/checkpoint.hpp"
#include "c2p/config.hpp"
#include "c2p/distill.hpp"
#include "c2p/eval.hpp"
#include "c2p/parallel.hpp"
#include "c2p/partial_view.hpp"
#include "c2p/rng.hpp"
#include "c2p/sequence_io.hpp"
#include "c2p/synth.hpp"

using namespace c2p;
namespace fs = std::filesystem;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string g_cli;
fs::path g_work;

int run_cli(const std::string& args, const std::string& stdout_file = "") {
    std::string cmd = g_cli + " " + args;
    if (!stdout_file.empty()) cmd += " > " + stdout_file;
    cmd += " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::size_t worker_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : std::min<unsigned>(hw, 8);
}

// ---- criterion 1: z-buffer vs brute-force per-pixel minimum ----

bool criterion_occlusion_oracle() {
    double t0 = now_seconds();
    const CameraIntrinsics intr;  // 64x64
    std::atomic<std::size_t> mismatches{0};
    const std::size_t frames = 1000;
    parallel_for(frames, worker_threads(), [&](std::size_t fi) {
        Pcg32 rng = stream_rng(0xACC1, fi);
        std::size_t n = 1 + rng.next_below(512);
        PointCloudFrame frame;
        for (std::size_t i = 0; i < n; ++i)
            frame.points.push_back({rng.uniform(-1.0, 1.0),
                                    rng.uniform(-1.0, 1.0),
                                    rng.uniform(-0.5, 6.0)});
        CameraPose pose = look_at({rng.uniform(-0.4, 0.4),
                                   rng.uniform(-0.4, 0.4),
                                   rng.uniform(-1.5, -0.5)},
                                  {0, 0, 2.5}, {0, 0, 1});
        DepthImage img = render_depth(frame, pose, intr);

        // Independent path: project each point once, then per pixel take
        // the minimum over the full list.
        struct Proj {
            std::uint32_t u, v;
            double z;
        };
        std::vector<Proj> projs(n, {0, 0, -1.0});
        for (std::size_t i = 0; i < n; ++i) {
            Vec3 cam = pose.to_camera(frame.points[i]);
            if (!(cam.z > 0.0)) continue;
            double uf = std::floor(intr.fx * cam.x / cam.z + intr.cx);
            double vf = std::floor(intr.fy * cam.y / cam.z + intr.cy);
            if (uf < 0 || vf < 0 || uf >= 64 || vf >= 64) continue;
            projs[i] = {static_cast<std::uint32_t>(uf),
                        static_cast<std::uint32_t>(vf), cam.z};
        }
        std::size_t bad = 0;
        for (std::uint32_t v = 0; v < 64; ++v)
            for (std::uint32_t u = 0; u < 64; ++u) {
                double best = std::numeric_limits<double>::infinity();
                std::uint32_t best_i = DepthImage::kNoIndex;
                for (std::size_t i = 0; i < n; ++i) {
                    if (projs[i].z <= 0.0 || projs[i].u != u ||
                        projs[i].v != v)
                        continue;
                    if (projs[i].z < best) {
                        best = projs[i].z;
                        best_i = static_cast<std::uint32_t>(i);
                    }
                }
                if (img.index_at(u, v) != best_i) ++bad;
                else if (best_i != DepthImage::kNoIndex &&
                         img.depth_at(u, v) != best)
                    ++bad;
            }
        mismatches += bad;
    });
    double elapsed = now_seconds() - t0;
    bool ok = mismatches == 0 && elapsed < 10.0;
    std::printf("CRITERION 1 occlusion-oracle: %s (1000 frames, %zu mismatches, %.2f s)\n",
                ok ? "PASS" : "FAIL", mismatches.load(), elapsed);
    return ok;
}

// ---- criterion 2: bit-identical subset ----

bool criterion_subset_invariant() {
    SceneSpec tmpl = default_scene_template(8, 256, 4);
    std::vector<Sequence> scenes = make_dataset(100, tmpl, 0xC2);
    ViewConfig vc;
    std::atomic<std::size_t> violations{0};
    parallel_for(scenes.size(), worker_threads(), [&](std::size_t i) {
        Sequence partial = make_view(scenes[i], vc, 1000 + i);
        std::size_t bad = 0;
        for (std::size_t t = 0; t < partial.length(); ++t) {
            const auto& pool = scenes[i].frames[t].points;
            for (const Vec3& p : partial.frames[t].points)
                if (std::find(pool.begin(), pool.end(), p) == pool.end())
                    ++bad;
        }
        violations += bad;
    });
    bool ok = violations == 0;
    std::printf("CRITERION 2 subset-invariant: %s (100 sequences, %zu violations)\n",
                ok ? "PASS" : "FAIL", violations.load());
    return ok;
}

// ---- criterion 3: trajectory invariants at 150 and 360 degrees ----

bool criterion_trajectory_invariants() {
    SceneSpec tmpl = default_scene_template(8, 64, 4);
    Sequence scene = generate_scene(tmpl, 3);
    Sequence scene12 = generate_scene(default_scene_template(12, 64, 4), 3);
    std::size_t failures = 0;
    for (double sweep : {150.0, 360.0}) {
        TrajectoryConfig cfg;
        cfg.sweep_degrees = sweep;
        const Sequence& seq = sweep == 150.0 ? scene : scene12;
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            CameraTrajectory traj =
                sample_trajectory(seq, {2.5, 0, 0}, cfg, seed);
            double total = traj.entries.back().theta_offset -
                           traj.entries.front().theta_offset;
            if (std::fabs(std::fabs(total) - sweep * kDeg) >= 1e-12) ++failures;
            double step0 =
                traj.entries[1].theta_offset - traj.entries[0].theta_offset;
            for (std::size_t i = 1; i < traj.entries.size(); ++i) {
                double step = traj.entries[i].theta_offset -
                              traj.entries[i - 1].theta_offset;
                if (std::fabs(step - step0) >= 1e-12) ++failures;
            }
            for (const TrajectoryEntry& e : traj.entries) {
                if (std::fabs(e.phi_offset) > 5.0 * kDeg + 1e-15) ++failures;
                double ratio = e.radius / traj.base_radius;
                if (ratio < 0.8 - 1e-12 || ratio > 1.2 + 1e-12) ++failures;
            }
        }
    }
    bool ok = failures == 0;
    std::printf("CRITERION 3 trajectory-invariants: %s (2x1000 seeds, %zu failures)\n",
                ok ? "PASS" : "FAIL", failures);
    return ok;
}

// ---- criterion 4: gradient suite through the CLI ----

bool criterion_gradient_suite() {
    double t0 = now_seconds();
    int rc = run_cli("gradcheck --tolerance 1e-4",
                     (g_work / "gradcheck.txt").string());
    double elapsed = now_seconds() - t0;
    bool ok = rc == 0 && elapsed < 60.0;
    std::printf("CRITERION 4 gradient-suite: %s (exit %d, %.2f s)\n",
                ok ? "PASS" : "FAIL", rc, elapsed);
    return ok;
}

// ---- criterion 5: closed forms ----

FeatureSequence rows_tensor(const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return ag::Tensor::from_data({rows.size(), rows[0].size()},
                                 std::move(flat));
}

bool criterion_closed_forms() {
    bool ok = true;

    // Uniform features: per-anchor term log(Nneg).
    std::vector<std::vector<double>> uni(5, {0.5, 0.5, 0.5, 0.5});
    DistillConfig cfg;
    std::vector<double> per_frame;
    geo_loss(rows_tensor(uni), rows_tensor(uni), cfg, {}, &per_frame);
    const double want[5] = {std::log(3.0), std::log(2.0), std::log(2.0),
                            std::log(2.0), std::log(3.0)};
    for (int i = 0; i < 5; ++i)
        ok = ok && std::fabs(per_frame[i] - want[i]) < 1e-9;

    // Orthogonal negatives at the default temperature.
    std::vector<std::vector<double>> basis(5, std::vector<double>(5, 0.0));
    for (int i = 0; i < 5; ++i) basis[i][i] = 1.0;
    geo_loss(rows_tensor(basis), rows_tensor(basis), cfg, {}, &per_frame);
    ok = ok &&
         std::fabs(per_frame[2] - (std::log(2.0) - 1.0 / cfg.tau)) < 1e-9;

    // Weight identity at machine precision.
    LossBreakdown lb = total_loss(1.7320508, 2.2360679, cfg);
    ok = ok && (lb.total - (cfg.alpha1 * lb.geo + cfg.alpha2 * lb.time)) == 0.0;
    ok = ok && std::fabs(lb.total - (0.5 * 1.7320508 + 0.5 * 2.2360679)) < 1e-12;

    // Window {0}: temporal term identically zero.
    DistillConfig w1 = cfg;
    w1.window = WindowSpec::window1();
    w1.reset_offset_weights();
    PredictorBank none({}, true, 4, 0);
    Pcg32 rng(5);
    std::vector<std::vector<double>> s(4, std::vector<double>(4));
    std::vector<std::vector<double>> t(4, std::vector<double>(4));
    for (auto& r : s)
        for (double& v : r) v = rng.uniform(-1, 1);
    for (auto& r : t)
        for (double& v : r) v = rng.uniform(-1, 1);
    double tl = time_loss(rows_tensor(s), rows_tensor(t), none, w1).scalar();
    ok = ok && tl == 0.0;

    std::printf("CRITERION 5 loss-closed-forms: %s\n", ok ? "PASS" : "FAIL");
    return ok;
}

// ---- criterion 6: independent evaluator on random instances ----

bool criterion_loss_oracle() {
    Pcg32 rng(0x10E);
    auto unit_rows = [&](std::size_t L, std::size_t d) {
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
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };

    std::size_t failures = 0;
    for (int iter = 0; iter < 100; ++iter) {
        std::size_t L = 5 + rng.next_below(4);   // 5..8
        std::size_t d = 4 + rng.next_below(13);  // 4..16
        auto s = unit_rows(L, d);
        auto t = unit_rows(L, d);
        DistillConfig cfg;
        cfg.denominator = (iter % 2) ? DenominatorMode::Standard
                                     : DenominatorMode::Literal;
        bool literal = cfg.denominator == DenominatorMode::Literal;

        // Geometric term, straight arithmetic.
        double geo_want = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            double pos = dot(s[i], t[i]) / cfg.tau;
            double denom = literal ? 0.0 : std::exp(pos);
            for (std::size_t j = 0; j < L; ++j) {
                long long delta = (long long)j - (long long)i;
                if (delta >= -1 && delta <= 1) continue;
                denom += std::exp(dot(s[i], t[j]) / cfg.tau);
            }
            geo_want += -(pos - std::log(denom));
        }
        geo_want /= static_cast<double>(L);
        double geo_got =
            geo_loss(rows_tensor(s), rows_tensor(t), cfg).scalar();
        if (std::fabs(geo_got - geo_want) >= 1e-10) ++failures;

        // Temporal term: predictor outputs are inputs to the oracle.
        PredictorBank bank({-1, 1}, true, d, 900 + iter);
        FeatureSequence sf = rows_tensor(s);
        double time_got =
            time_loss(sf, rows_tensor(t), bank, cfg).scalar();
        auto row_of = [&](const ag::Tensor& m, std::size_t i) {
            std::vector<double> r(d);
            for (std::size_t j = 0; j < d; ++j) r[j] = m.at(i * d + j);
            return r;
        };
        ag::Tensor pred_m1 = ag::l2_normalize(bank.forward(sf, -1), 1);
        ag::Tensor pred_p1 = ag::l2_normalize(bank.forward(sf, 1), 1);
        double time_want = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            double weight = 0.0;
            for (int o : {-1, 1}) {
                long long tgt = (long long)i + o;
                if (tgt >= 0 && tgt < (long long)L) weight += 0.25;
            }
            if (weight == 0.0) continue;
            for (int o : {-1, 1}) {
                long long tgt = (long long)i + o;
                if (tgt < 0 || tgt >= (long long)L) continue;
                std::vector<double> a =
                    row_of(o == -1 ? pred_m1 : pred_p1, i);
                double pos = dot(a, t[tgt]) / cfg.tau;
                double denom = literal ? 0.0 : std::exp(pos);
                for (std::size_t j = 0; j < L; ++j) {
                    long long delta = (long long)j - (long long)i;
                    if (delta >= -1 && delta <= 1) continue;
                    denom += std::exp(dot(a, t[j]) / cfg.tau);
                }
                time_want += (0.25 / weight) * -(pos - std::log(denom));
            }
        }
        time_want /= static_cast<double>(L);
        if (std::fabs(time_got - time_want) >= 1e-10) ++failures;
    }
    bool ok = failures == 0;
    std::printf("CRITERION 6 loss-oracle: %s (100 instances, %zu failures)\n",
                ok ? "PASS" : "FAIL", failures);
    return ok;
}

// ---- criterion 7: paper defaults through --print-config ----

bool criterion_paper_defaults() {
    std::string out = (g_work / "print_config.txt").string();
    int rc = run_cli("--print-config", out);
    std::string text = slurp(out);
    const char* wanted[] = {"tau = 0.07",
                            "lr = 0.01",
                            "warmup_epochs = 10",
                            "window_offsets = -1,0,1",
                            "loss_split = 0.5,0.25,0.25",
                            "spatial_stride = 32",
                            "ball_radius = 0.9",
                            "neighbors = 32",
                            "sweep_degrees = 150"};
    bool ok = rc == 0;
    for (const char* w : wanted)
        if (text.find(w) == std::string::npos) {
            ok = false;
            std::printf("  missing: %s\n", w);
        }
    std::printf("CRITERION 7 paper-defaults: %s\n", ok ? "PASS" : "FAIL");
    return ok;
}

// ---- criteria 8 and 9: training smoke + probe sanity ----

struct SmokeOutcome {
    bool trained = false;
    double ratio = 1.0;
    bool csv_identical = false;
    double elapsed = 0.0;
    std::string csv;
    std::vector<Sequence> dataset;
    RunConfig cfg;
    std::unique_ptr<DistillTrainer> trainer;
};

SmokeOutcome run_smoke() {
    SmokeOutcome out;
    out.cfg = RunConfig::defaults();
    SceneSpec tmpl = default_scene_template(out.cfg.data_frames,
                                            out.cfg.data_points,
                                            out.cfg.data_phases);
    out.dataset = make_dataset(out.cfg.data_scenes, tmpl, 0);

    auto one_run = [&](std::string& csv) {
        auto trainer = std::make_unique<DistillTrainer>(
            out.cfg.encoder, out.cfg.distill, out.cfg.train, out.cfg.view, 0);
        std::ostringstream log;
        log << "epoch,step,lr,L_geo,L_time,L_total\n";
        trainer->run(out.dataset, &log);
        csv = log.str();
        return trainer;
    };

    double t0 = now_seconds();
    out.trainer = one_run(out.csv);
    out.elapsed = now_seconds() - t0;

    std::string csv2;
    one_run(csv2);
    out.csv_identical = out.csv == csv2;

    const auto& means = out.trainer->epoch_means();
    out.ratio = means.back() / means.front();
    out.trained = true;
    return out;
}

bool criterion_training_smoke(const SmokeOutcome& smoke) {
    bool ok = smoke.trained && smoke.ratio <= 0.5 && smoke.csv_identical &&
              smoke.elapsed < 600.0;
    std::printf(
        "CRITERION 8 training-smoke: %s (epoch50/epoch1 = %.4f, csv %s, %.1f s)\n",
        ok ? "PASS" : "FAIL", smoke.ratio,
        smoke.csv_identical ? "byte-identical" : "DIFFERS", smoke.elapsed);
    return ok;
}

bool criterion_probe_sanity(const SmokeOutcome& smoke) {
    FeatureTable pretrained =
        extract_features(smoke.trainer->student(), smoke.dataset);
    Encoder random_student(smoke.cfg.encoder, true,
                           splitmix64(99 ^ 0x57D0E3A7u));
    FeatureTable random_init = extract_features(random_student, smoke.dataset);

    std::vector<double> pre, rnd;
    for (std::uint64_t seed : {0, 1, 2}) {
        pre.push_back(linear_probe(pretrained, seed, smoke.cfg.probe).accuracy);
        rnd.push_back(linear_probe(random_init, seed, smoke.cfg.probe).accuracy);
    }
    std::sort(pre.begin(), pre.end());
    std::sort(rnd.begin(), rnd.end());
    double pre_median = pre[1], rnd_median = rnd[1];
    bool ok = pre_median >= rnd_median - 0.02;
    std::printf(
        "CRITERION 9 probe-sanity: %s (pretrained median %.4f vs random %.4f)\n",
        ok ? "PASS" : "FAIL", pre_median, rnd_median);
    return ok;
}

// ---- criterion 10: full ablation grid ----

bool criterion_ablation_grid() {
    double t0 = now_seconds();
    RunConfig cfg;
    cfg.encoder.feature_dim = 16;
    cfg.encoder.heads = 2;
    cfg.encoder.spatial_stride = 16;
    cfg.encoder.neighbors = 8;
    cfg.encoder.max_frames = 8;
    cfg.train.epochs = 2;
    cfg.train.warmup_epochs = 1;
    cfg.train.batch_size = 4;
    cfg.probe.steps = 100;
    cfg.data_scenes = 8;
    cfg.data_frames = 6;
    cfg.data_points = 64;
    SceneSpec tmpl = default_scene_template(cfg.data_frames, cfg.data_points,
                                            cfg.data_phases);
    std::vector<Sequence> data = make_dataset(cfg.data_scenes, tmpl, 1);

    std::vector<AblationCell> grid = full_ablation_grid();
    AblationReport report =
        run_ablation(grid, cfg, data, {0}, worker_threads(), false);

    std::ostringstream csv;
    write_report_csv(csv, report);
    std::ofstream((g_work / "ablation.csv")) << csv.str();

    std::set<std::string> labels;
    bool rows_ok = report.rows.size() == 96;
    for (const AblationRow& row : report.rows) {
        labels.insert(row.cell_label);
        rows_ok = rows_ok && row.probe_acc >= 0.0 && row.probe_acc <= 1.0 &&
                  std::isfinite(row.final_total);
    }
    double elapsed = now_seconds() - t0;
    bool ok = rows_ok && labels.size() == 96;
    std::printf(
        "CRITERION 10 ablation-grid: %s (%zu rows, %zu labels, %.1f s)\n",
        ok ? "PASS" : "FAIL", report.rows.size(), labels.size(), elapsed);
    return ok;
}

// ---- criterion 11: CLI byte determinism across reruns and threads ----

bool criterion_cli_determinism() {
    fs::path dir = g_work / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&](const std::string& s) { return (dir / s).string(); };

    bool ok = true;
    auto expect = [&](bool cond, const char* what) {
        if (!cond) {
            ok = false;
            std::printf("  determinism breach: %s\n", what);
        }
    };

    std::ofstream cfg(p("tiny.cfg"));
    cfg << "[data]\nscenes = 4\nframes = 4\npoints = 48\n"
           "[encoder]\nfeature_dim = 8\nheads = 2\nspatial_stride = 8\n"
           "neighbors = 8\nmax_frames = 8\n"
           "[train]\nepochs = 2\nbatch_size = 2\nwarmup_epochs = 1\n"
           "[probe]\nsteps = 60\n";
    cfg.close();

    // synth at two thread counts
    expect(run_cli("synth --config " + p("tiny.cfg") + " --seed 4 --out " +
                   p("d1") + " --threads 1") == 0, "synth run 1");
    expect(run_cli("synth --config " + p("tiny.cfg") + " --seed 4 --out " +
                   p("d2") + " --threads 3") == 0, "synth run 2");
    for (const char* f : {"manifest.csv", "seq_00000.c2ps", "seq_00003.c2ps"})
        expect(slurp(dir / "d1" / f) == slurp(dir / "d2" / f), "synth bytes");

    // generate
    std::string in = p("d1") + "/seq_00000.c2ps";
    expect(run_cli("generate --in " + in + " --seed 9 --out " + p("g1.c2ps") +
                   " --emit-depth " + p("dep1")) == 0, "generate run 1");
    expect(run_cli("generate --in " + in + " --seed 9 --out " + p("g2.c2ps") +
                   " --emit-depth " + p("dep2")) == 0, "generate run 2");
    expect(slurp(p("g1.c2ps")) == slurp(p("g2.c2ps")), "generate bytes");
    expect(slurp(dir / "dep1" / "depth_0000.c2pd") ==
               slurp(dir / "dep2" / "depth_0000.c2pd"), "depth bytes");

    // pretrain
    std::string pre = "pretrain --data " + p("d1") + " --config " +
                      p("tiny.cfg") + " --seed 0";
    expect(run_cli(pre + " --out " + p("c1.c2pw") + " --log " + p("l1.csv") +
                   " --threads 1") == 0, "pretrain run 1");
    expect(run_cli(pre + " --out " + p("c2.c2pw") + " --log " + p("l2.csv") +
                   " --threads 2") == 0, "pretrain run 2");
    expect(slurp(p("c1.c2pw")) == slurp(p("c2.c2pw")), "checkpoint bytes");
    expect(slurp(p("l1.csv")) == slurp(p("l2.csv")), "metrics bytes");

    // probe stdout
    std::string probe = "probe --data " + p("d1") + " --config " +
                        p("tiny.cfg") + " --ckpt " + p("c1.c2pw") + " --seed 1";
    expect(run_cli(probe, p("probe1.txt")) == 0, "probe run 1");
    expect(run_cli(probe, p("probe2.txt")) == 0, "probe run 2");
    expect(slurp(p("probe1.txt")) == slurp(p("probe2.txt")), "probe output");

    // ablate across thread counts
    std::string abl = "ablate --data " + p("d1") + " --config " +
                      p("tiny.cfg") + " --grid strategy=C2P,C2C --seeds 0,1 ";
    expect(run_cli(abl + "--threads 1 --out " + p("a1")) == 0, "ablate run 1");
    expect(run_cli(abl + "--threads 4 --out " + p("a2")) == 0, "ablate run 2");
    expect(slurp(dir / "a1" / "report.csv") == slurp(dir / "a2" / "report.csv"),
           "ablate bytes");

    std::printf("CRITERION 11 cli-determinism: %s\n", ok ? "PASS" : "FAIL");
    return ok;
}

}  // namespace

int main() {
    const char* cli = std::getenv("C2P_CLI");
    if (!cli) {
        std::fprintf(stderr,
                     "C2P_CLI must point at the c2p binary (set by ctest)\n");
        return 2;
    }
    g_cli = cli;
    g_work = fs::temp_directory_path() / "c2p_acceptance";
    fs::create_directories(g_work);

    int failures = 0;
    auto tally = [&](bool ok) { failures += ok ? 0 : 1; };

    tally(criterion_occlusion_oracle());
    tally(criterion_subset_invariant());
    tally(criterion_trajectory_invariants());
    tally(criterion_gradient_suite());
    tally(criterion_closed_forms());
    tally(criterion_loss_oracle());
    tally(criterion_paper_defaults());
    SmokeOutcome smoke = run_smoke();
    tally(criterion_training_smoke(smoke));
    tally(criterion_probe_sanity(smoke));
    tally(criterion_ablation_grid());
    tally(criterion_cli_determinism());

    if (failures == 0)
        std::printf("ACCEPTANCE: all 11 criteria PASS\n");
    else
        std::printf("ACCEPTANCE: %d criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
