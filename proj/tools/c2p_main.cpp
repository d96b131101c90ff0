// c2p: complete-to-partial 4D distillation pipeline.
//
// Subcommands: synth, generate, pretrain, probe, ablate, gradcheck.
// Exit codes: 0 success, 1 usage/config, 2 I/O or format, 3 numeric.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "c2p/checkpoint.hpp"
#include "c2p/config.hpp"
#include "c2p/eval.hpp"
#include "c2p/parallel.hpp"
#include "c2p/sequence_io.hpp"
#include "c2p/synth.hpp"

namespace fs = std::filesystem;
using namespace c2p;

namespace {

RunConfig load_config(const std::string& path) {
    return path.empty() ? RunConfig::defaults() : RunConfig::from_file(path);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stoull(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad seed list entry: '" + tok + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty seed list");
    return out;
}

// Grid spec: "full", or ;-separated axes, e.g.
// "strategy=C2P,C2C;window=1,3;view=trajectory;teacher=asym;predictor=framewise".
// Unlisted axes stay at the base config's value.
std::vector<AblationCell> parse_grid(const std::string& spec,
                                     const RunConfig& base) {
    if (spec == "full") return full_ablation_grid();

    AblationCell base_cell;
    base_cell.strategy = base.distill.strategy;
    base_cell.window = base.distill.window.str() == "-1,0,1" ? "3"
                       : base.distill.window.str() == "0"    ? "1"
                       : base.distill.window.str() == "-2,-1,0,1,2" ? "5"
                       : base.distill.window.str() == "-2,0,2"      ? "pm2"
                                                                    : "3";
    base_cell.random_view = base.view.use_random_sampling;
    base_cell.symmetric_teacher = base.distill.symmetric_teacher;
    base_cell.framewise_predictor = base.distill.framewise_predictors;

    std::vector<Strategy> strategies = {base_cell.strategy};
    std::vector<std::string> windows = {base_cell.window};
    std::vector<bool> views = {base_cell.random_view};
    std::vector<bool> teachers = {base_cell.symmetric_teacher};
    std::vector<bool> predictors = {base_cell.framewise_predictor};

    std::stringstream ss(spec);
    std::string axis;
    while (std::getline(ss, axis, ';')) {
        if (axis.empty()) continue;
        std::size_t eq = axis.find('=');
        if (eq == std::string::npos)
            throw ConfigError("grid axis needs '=': " + axis);
        std::string name = axis.substr(0, eq);
        std::string values = axis.substr(eq + 1);
        std::vector<std::string> vals;
        std::stringstream vs(values);
        std::string v;
        while (std::getline(vs, v, ',')) vals.push_back(v);
        if (vals.empty()) throw ConfigError("grid axis has no values: " + axis);
        if (name == "strategy") {
            strategies.clear();
            for (const std::string& s : vals) {
                if (s == "C2P") strategies.push_back(Strategy::C2P);
                else if (s == "C2C") strategies.push_back(Strategy::C2C);
                else if (s == "P2P") strategies.push_back(Strategy::P2P);
                else throw ConfigError("unknown strategy: " + s);
            }
        } else if (name == "window") {
            windows = vals;
            for (const std::string& w : vals) WindowSpec::parse(w);
        } else if (name == "view") {
            views.clear();
            for (const std::string& s : vals) {
                if (s == "trajectory") views.push_back(false);
                else if (s == "random") views.push_back(true);
                else throw ConfigError("unknown view: " + s);
            }
        } else if (name == "teacher") {
            teachers.clear();
            for (const std::string& s : vals) {
                if (s == "asym") teachers.push_back(false);
                else if (s == "sym") teachers.push_back(true);
                else throw ConfigError("unknown teacher arch: " + s);
            }
        } else if (name == "predictor") {
            predictors.clear();
            for (const std::string& s : vals) {
                if (s == "framewise") predictors.push_back(true);
                else if (s == "single") predictors.push_back(false);
                else throw ConfigError("unknown predictor mode: " + s);
            }
        } else {
            throw ConfigError("unknown grid axis: " + name);
        }
    }

    std::vector<AblationCell> cells;
    for (Strategy st : strategies)
        for (const std::string& w : windows)
            for (bool rv : views)
                for (bool sym : teachers)
                    for (bool fw : predictors)
                        cells.push_back({st, w, rv, sym, fw});
    return cells;
}

Encoder student_from_checkpoint(const RunConfig& cfg,
                                const std::string& ckpt_path) {
    ParamSet saved = read_checkpoint(ckpt_path);
    Encoder student(cfg.encoder, true, 0);
    ParamSet prefixed;
    prefixed.adopt(student.params(), "student.");
    load_into(prefixed, saved);
    return student;
}

int cmd_synth(const RunConfig& cfg, std::uint64_t seed,
              const std::string& out_dir) {
    SceneSpec tmpl = default_scene_template(cfg.data_frames, cfg.data_points,
                                            cfg.data_phases);
    std::vector<Sequence> data = make_dataset(cfg.data_scenes, tmpl, seed);
    write_dataset(out_dir, data);
    std::cout << "wrote " << data.size() << " sequences to " << out_dir
              << "\n";
    return 0;
}

int cmd_generate(const RunConfig& cfg_in, std::uint64_t seed,
                 const std::string& in_path, const std::string& out_path,
                 double random_ratio, const std::string& depth_dir,
                 const std::string& xyz_prefix) {
    RunConfig cfg = cfg_in;
    SequenceFile input = read_sequence(in_path);
    const Sequence& complete = input.sequence;

    if (random_ratio > 0.0) {
        cfg.view.use_random_sampling = true;
        cfg.view.random_keep_ratio = random_ratio;
        Sequence partial = make_view(complete, cfg.view, seed);
        write_sequence(out_path, partial);
        if (!xyz_prefix.empty()) export_xyz(xyz_prefix, partial);
        std::cout << "wrote " << out_path << "\n";
        return 0;
    }

    PartialSequence result = generate_partial_sequence(
        complete, cfg.view.base_camera_for(complete), cfg.view.trajectory,
        seed);
    std::vector<FrameCamera> cameras;
    cameras.reserve(result.trajectory.length());
    for (const TrajectoryEntry& e : result.trajectory.entries)
        cameras.push_back({cfg.view.trajectory.intrinsics, e.pose});
    write_sequence(out_path, result.sequence, &cameras);

    if (!depth_dir.empty()) {
        fs::create_directories(depth_dir);
        for (std::size_t i = 0; i < complete.length(); ++i) {
            DepthImage img =
                render_depth(complete.frames[i], result.trajectory.entries[i].pose,
                             cfg.view.trajectory.intrinsics);
            char name[32];
            std::snprintf(name, sizeof name, "depth_%04zu.c2pd", i);
            write_depth_image((fs::path(depth_dir) / name).string(), img);
        }
    }
    if (!xyz_prefix.empty()) export_xyz(xyz_prefix, result.sequence);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_pretrain(const RunConfig& cfg, std::uint64_t seed,
                 const std::string& data_dir, const std::string& ckpt_path,
                 const std::string& log_path, const std::string& resume_path) {
    std::vector<Sequence> data = load_dataset(data_dir);
    DistillTrainer trainer(cfg.encoder, cfg.distill, cfg.train, cfg.view,
                           seed);
    bool resuming = !resume_path.empty();
    if (resuming) trainer.resume(resume_path);

    std::ofstream log;
    if (!log_path.empty()) {
        log.open(log_path, resuming ? std::ios::app : std::ios::out);
        if (!log) throw FormatError("cannot open log: " + log_path);
        if (!resuming) log << "epoch,step,lr,L_geo,L_time,L_total\n";
    }
    trainer.run(data, log_path.empty() ? nullptr : &log, ckpt_path);
    std::cout << "trained " << trainer.epochs_done() << " epochs, "
              << trainer.step_count() << " steps\n";
    return 0;
}

int cmd_probe(const RunConfig& cfg, std::uint64_t seed,
              const std::string& data_dir, const std::string& ckpt_path) {
    std::vector<Sequence> data = load_dataset(data_dir);
    Encoder student = student_from_checkpoint(cfg, ckpt_path);
    FeatureTable table = extract_features(student, data);
    ProbeResult result = linear_probe(table, seed, cfg.probe);
    result.config_fingerprint = cfg.fingerprint();
    char line[96];
    std::snprintf(line, sizeof line, "acc=%.12g\n", result.accuracy);
    std::cout << line;
    std::snprintf(line, sizeof line, "config_fingerprint=%016llx\n",
                  static_cast<unsigned long long>(result.config_fingerprint));
    std::cout << line;
    return 0;
}

int cmd_ablate(const RunConfig& cfg, const std::string& data_dir,
               const std::string& grid_spec, const std::string& out_dir,
               const std::string& seed_list, const std::string& fractions,
               std::size_t threads, bool wall_times) {
    std::vector<Sequence> data = load_dataset(data_dir);
    std::vector<std::uint64_t> seeds = parse_seed_list(seed_list);
    fs::create_directories(out_dir);

    AblationReport report;
    if (!fractions.empty()) {
        std::vector<double> fracs;
        std::stringstream ss(fractions);
        std::string tok;
        while (std::getline(ss, tok, ','))
            fracs.push_back(std::stod(tok));
        report = data_fraction_run(fracs, cfg, data, seeds, threads, wall_times);
    } else {
        std::vector<AblationCell> cells = parse_grid(grid_spec, cfg);
        for (const AblationCell& cell : cells) {
            std::ofstream cc(fs::path(out_dir) / (cell.label() + ".cfg"));
            cc << apply_cell(cfg, cell).canonical_text();
        }
        report = run_ablation(cells, cfg, data, seeds, threads, wall_times);
    }

    std::ofstream csv(fs::path(out_dir) / "report.csv");
    if (!csv) throw FormatError("cannot open report: " + out_dir);
    write_report_csv(csv, report);
    std::cout << "wrote " << report.rows.size() << " rows to " << out_dir
              << "/report.csv\n";
    return 0;
}

// Per-op and composite gradient checks; nonzero exit if any exceeds tol.
int cmd_gradcheck(double tolerance) {
    using ag::Tensor;
    const double h = 1e-5;
    Pcg32 rng(splitmix64(2024));
    auto randn = [&](ag::Shape shape, double lo = -1.0, double hi = 1.0) {
        std::vector<double> d(ag::numel(shape));
        for (double& v : d) v = rng.uniform(lo, hi);
        return Tensor::from_data(std::move(shape), std::move(d), true);
    };

    struct Check {
        const char* name;
        std::function<double()> run;
    };
    Tensor a = randn({4, 5});
    Tensor b = randn({4, 5});
    Tensor m1 = randn({4, 6});
    Tensor m2 = randn({6, 3});
    Tensor bias = randn({5});
    Tensor gain = randn({5}, 0.5, 1.5);
    Tensor q = randn({5, 8});
    Tensor kx = randn({5, 8});
    Tensor vx = randn({5, 8});

    std::vector<Check> checks = {
        {"add", [&] { return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::mul(ag::add(x, b), ag::add(x, b))); }, a, h); }},
        {"sub", [&] { return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::mul(ag::sub(x, b), ag::sub(x, b))); }, a, h); }},
        {"scalar_mul", [&] { return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::mul(ag::mul(x, 1.7), ag::mul(x, 0.3))); }, a, h); }},
        {"mul", [&] { return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::mul(ag::mul(x, b), x)); }, a, h); }},
        {"add_bias", [&] { return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::mul(ag::add_bias(a, x), ag::add_bias(a, x))); }, bias, h); }},
        {"matmul_lhs", [&] { return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::mul(ag::matmul(x, m2), ag::matmul(x, m2))); }, m1, h); }},
        {"matmul_rhs", [&] { return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::mul(ag::matmul(m1, x), ag::matmul(m1, x))); }, m2, h); }},
        {"transpose", [&] { return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::mul(ag::transpose(x), ag::transpose(x))); }, a, h); }},
        {"reshape", [&] { return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::mul(ag::reshape(x, {20}), ag::reshape(x, {20}))); }, a, h); }},
        {"concat", [&] { return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::mul(ag::concat({x, b}, 0), ag::concat({b, x}, 0))); }, a, h); }},
        {"gather_rows", [&] { return ag::grad_check([&](const Tensor& x) { Tensor g = ag::gather_rows(x, {0, 2, 2, 3}); return ag::sum(ag::mul(g, g)); }, a, h); }},
        {"slice_cols", [&] { return ag::grad_check([&](const Tensor& x) { Tensor s = ag::slice_cols(x, 1, 3); return ag::sum(ag::mul(s, s)); }, a, h); }},
        {"relu", [&] { return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::mul(ag::relu(x), ag::relu(x))); }, a, h); }},
        {"exp", [&] { return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::exp(x)); }, a, h); }},
        {"log", [&] { Tensor pos = randn({4, 5}, 0.5, 2.0); return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::log(x)); }, pos, h); }},
        {"mean", [&] { return ag::grad_check([&](const Tensor& x) { Tensor m = ag::mean(x, 1); return ag::sum(ag::mul(m, m)); }, a, h); }},
        {"max_pool", [&] { return ag::grad_check([&](const Tensor& x) { Tensor m = ag::max_pool(x, 0); return ag::sum(ag::mul(m, m)); }, a, h); }},
        {"softmax", [&] { return ag::grad_check([&](const Tensor& x) { Tensor s = ag::softmax(x, 1); return ag::sum(ag::mul(s, b)); }, a, h); }},
        {"broadcast_scalar", [&] { Tensor s = randn({}); return ag::grad_check([&](const Tensor& x) { return ag::sum(ag::mul(ag::broadcast_scalar(x, {4, 5}), b)); }, s, h); }},
        {"layer_norm_x", [&] { return ag::grad_check([&](const Tensor& x) { Tensor y = ag::layer_norm(x, gain, bias); return ag::sum(ag::mul(y, b)); }, a, h); }},
        {"layer_norm_gain", [&] { return ag::grad_check([&](const Tensor& x) { Tensor y = ag::layer_norm(a, x, bias); return ag::sum(ag::mul(y, b)); }, gain, h); }},
        {"l2_normalize", [&] { return ag::grad_check([&](const Tensor& x) { Tensor y = ag::l2_normalize(x, 1, 1e-12); return ag::sum(ag::mul(y, b)); }, a, h); }},
        {"attention_q", [&] { return ag::grad_check([&](const Tensor& x) { Tensor y = ag::attention(x, kx, vx, 2); return ag::sum(ag::mul(y, y)); }, q, h); }},
        {"attention_k", [&] { return ag::grad_check([&](const Tensor& x) { Tensor y = ag::attention(q, x, vx, 2); return ag::sum(ag::mul(y, y)); }, kx, h); }},
        {"attention_v", [&] { return ag::grad_check([&](const Tensor& x) { Tensor y = ag::attention(q, kx, x, 2); return ag::sum(ag::mul(y, y)); }, vx, h); }},
    };

    // Full objective through both encoders and the predictors.
    EncoderConfig enc;
    enc.feature_dim = 16;
    enc.heads = 2;
    enc.spatial_stride = 8;
    enc.neighbors = 8;
    enc.max_frames = 8;
    DistillConfig dc;
    ViewConfig vc;
    vc.trajectory.direction = SweepDirection::LeftToRight;
    SceneSpec tmpl = default_scene_template(5, 48, 2);
    Sequence scene = generate_scene(tmpl, 7);
    ViewPair views = build_views(scene, Strategy::C2P, vc, 11, false);
    Encoder teacher(enc, false, 21);
    Encoder student(enc, true, 22);
    PredictorBank preds(dc.window.nonzero_offsets(), true, enc.feature_dim, 23);
    auto objective = [&]() {
        FeatureSequence tf = teacher.forward(views.teacher_input);
        FeatureSequence sf = student.forward(views.student_input);
        ag::Tensor geo = geo_loss(sf, tf, dc);
        ag::Tensor time = time_loss(sf, tf, preds, dc);
        return ag::add(ag::mul(geo, dc.alpha1), ag::mul(time, dc.alpha2));
    };
    for (const char* pname :
         {"local.w1", "local.b1", "local.w2", "local.b2"}) {
        checks.push_back({"objective/teacher", [&, pname] {
            return ag::grad_check([&](const Tensor&) { return objective(); },
                                  teacher.params().at(pname), h);
        }});
    }
    for (const char* pname : {"local.w1", "pos_embed", "block0.wq",
                              "block0.ff.w1", "block0.ln1.gain"}) {
        checks.push_back({"objective/student", [&, pname] {
            return ag::grad_check([&](const Tensor&) { return objective(); },
                                  student.params().at(pname), h);
        }});
    }
    for (const char* pname : {"m1.w1", "p1.b2", "m1.ln.gain"}) {
        checks.push_back({"objective/predictor", [&, pname] {
            return ag::grad_check([&](const Tensor&) { return objective(); },
                                  preds.params().at(pname), h);
        }});
    }

    bool ok = true;
    for (const Check& c : checks) {
        double err = c.run();
        bool pass = err < tolerance;
        ok = ok && pass;
        std::printf("%-22s max_rel_err=%.3e %s\n", c.name, err,
                    pass ? "ok" : "FAIL");
    }
    if (!ok) throw NumericError("gradient check exceeded tolerance");
    std::cout << "all gradient checks passed at tolerance " << tolerance
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complete-to-partial 4D distillation pipeline"};
    app.require_subcommand(0, 1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    bool print_config = false;
    long long threads_flag = 0;
    app.add_option("--config", config_path, "Config file (key = value sections)");
    app.add_flag("--print-config", print_config,
                 "Print the effective configuration and exit");
    app.add_option("--threads", threads_flag, "Worker thread cap");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
    std::string synth_out;
    std::uint64_t synth_seed = 0;
    long long synth_scenes = -1, synth_frames = -1, synth_points = -1,
              synth_phases = -1;
    std::string synth_config;
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--seed", synth_seed, "Master seed");
    synth->add_option("--scenes", synth_scenes, "Sequence count");
    synth->add_option("--frames", synth_frames, "Frames per sequence");
    synth->add_option("--points", synth_points, "Points per frame");
    synth->add_option("--phases", synth_phases, "Motion phases (classes)");
    synth->add_option("--config", synth_config, "Config file");

    // generate
    auto* gen = app.add_subcommand("generate", "Partial-view generation for one sequence");
    std::string gen_in, gen_out, gen_config, gen_depth, gen_xyz;
    std::uint64_t gen_seed = 0;
    double gen_random = 0.0;
    gen->add_option("--in", gen_in, "Input C2PS file")->required();
    gen->add_option("--out", gen_out, "Output C2PS file")->required();
    gen->add_option("--config", gen_config, "Config file");
    gen->add_option("--seed", gen_seed, "Seed");
    gen->add_option("--random-sampling", gen_random,
                    "Random-sampling baseline with this keep ratio");
    gen->add_option("--emit-depth", gen_depth, "Directory for C2PD depth images");
    gen->add_option("--emit-xyz", gen_xyz,
                    "Prefix for one ASCII xyz file per output frame");

    // pretrain
    auto* pre = app.add_subcommand("pretrain", "Run the distillation pretraining loop");
    std::string pre_data, pre_config, pre_out, pre_log, pre_resume;
    std::uint64_t pre_seed = 0;
    pre->add_option("--data", pre_data, "Dataset directory")->required();
    pre->add_option("--config", pre_config, "Config file");
    pre->add_option("--seed", pre_seed, "Seed");
    pre->add_option("--out", pre_out, "Checkpoint path")->required();
    pre->add_option("--log", pre_log, "Metrics CSV path");
    pre->add_option("--resume", pre_resume, "Resume from checkpoint");

    // probe
    auto* probe = app.add_subcommand("probe", "Linear-probe a checkpoint");
    std::string probe_data, probe_ckpt, probe_config;
    std::uint64_t probe_seed = 0;
    probe->add_option("--data", probe_data, "Dataset directory")->required();
    probe->add_option("--ckpt", probe_ckpt, "Checkpoint path")->required();
    probe->add_option("--config", probe_config, "Config file");
    probe->add_option("--seed", probe_seed, "Probe split seed");

    // ablate
    auto* abl = app.add_subcommand("ablate", "Run the comparison grid");
    std::string abl_data, abl_grid = "full", abl_out, abl_config,
                abl_seeds = "0", abl_fractions;
    bool abl_wall = false;
    abl->add_option("--data", abl_data, "Dataset directory")->required();
    abl->add_option("--grid", abl_grid, "Grid spec or 'full'");
    abl->add_option("--out", abl_out, "Output directory")->required();
    abl->add_option("--config", abl_config, "Config file");
    abl->add_option("--seeds", abl_seeds, "Comma-separated seed list");
    abl->add_option("--fractions", abl_fractions,
                    "Data-efficiency fractions instead of a grid");
    abl->add_flag("--wall-times", abl_wall,
                  "Record wall-clock seconds (breaks byte reproducibility)");

    // gradcheck
    auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
    double gc_tol = 1e-4;
    gc->add_option("--tolerance", gc_tol, "Max relative error");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        std::size_t threads = resolve_threads(threads_flag);
        if (print_config) {
            std::cout << load_config(config_path).canonical_text();
            return 0;
        }
        if (synth->parsed()) {
            RunConfig cfg = load_config(!synth_config.empty() ? synth_config
                                                              : config_path);
            if (synth_scenes > 0) cfg.data_scenes = static_cast<std::size_t>(synth_scenes);
            if (synth_frames > 0) cfg.data_frames = static_cast<std::size_t>(synth_frames);
            if (synth_points > 0) cfg.data_points = static_cast<std::size_t>(synth_points);
            if (synth_phases > 0) cfg.data_phases = static_cast<std::size_t>(synth_phases);
            cfg.validate();
            return cmd_synth(cfg, synth_seed, synth_out);
        }
        if (gen->parsed())
            return cmd_generate(load_config(!gen_config.empty() ? gen_config
                                                                : config_path),
                                gen_seed, gen_in, gen_out, gen_random,
                                gen_depth, gen_xyz);
        if (pre->parsed())
            return cmd_pretrain(load_config(!pre_config.empty() ? pre_config
                                                                : config_path),
                                pre_seed, pre_data, pre_out, pre_log,
                                pre_resume);
        if (probe->parsed())
            return cmd_probe(load_config(!probe_config.empty() ? probe_config
                                                               : config_path),
                             probe_seed, probe_data, probe_ckpt);
        if (abl->parsed())
            return cmd_ablate(load_config(!abl_config.empty() ? abl_config
                                                              : config_path),
                              abl_data, abl_grid, abl_out, abl_seeds,
                              abl_fractions, threads, abl_wall);
        if (gc->parsed()) return cmd_gradcheck(gc_tol);
        std::cout << app.help();
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
