#include "c2p/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace c2p {

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    }
    if (used != v.size())
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    return out;
}

std::size_t parse_size(const std::string& key, const std::string& v) {
    double d = parse_double(key, v);
    if (d < 0 || d != std::floor(d))
        throw ConfigError("config: " + key + " must be a non-negative integer");
    return static_cast<std::size_t>(d);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: " + key + " must be true or false");
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_double(key, tok));
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt(v[i]);
    }
    return s;
}

const char* direction_name(SweepDirection d) {
    switch (d) {
        case SweepDirection::LeftToRight: return "left";
        case SweepDirection::RightToLeft: return "right";
        default: return "random";
    }
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::C2P: return "C2P";
        case Strategy::C2C: return "C2C";
        default: return "P2P";
    }
}

const char* teacher_mode_name(TeacherMode m) {
    switch (m) {
        case TeacherMode::Joint: return "joint";
        case TeacherMode::StopGradient: return "stopgrad";
        default: return "ema";
    }
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        throw FormatError("config is not a readable file: " + path);
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

RunConfig RunConfig::from_text(const std::string& text) {
    // Collect raw entries first: window_offsets must be applied before
    // loss_split regardless of their order in the file.
    std::map<std::string, std::string> kv;
    std::string section;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = line.substr(1, line.size() - 2);
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": key outside any [section]");
        std::string full = section + "." + key;
        if (kv.count(full))
            throw ConfigError("config: duplicate key " + full);
        kv[full] = value;
    }

    RunConfig cfg;
    bool saw_split = false;
    std::string split_value;
    auto take = [&](const char* name) -> std::string* {
        auto it = kv.find(name);
        if (it == kv.end()) return nullptr;
        return &it->second;
    };
    auto apply = [&](const char* name, auto&& setter) {
        if (std::string* v = take(name)) {
            setter(*v);
            kv.erase(name);
        }
    };

    apply("data.scenes", [&](const std::string& v) { cfg.data_scenes = parse_size("data.scenes", v); });
    apply("data.frames", [&](const std::string& v) { cfg.data_frames = parse_size("data.frames", v); });
    apply("data.points", [&](const std::string& v) { cfg.data_points = parse_size("data.points", v); });
    apply("data.phases", [&](const std::string& v) { cfg.data_phases = parse_size("data.phases", v); });

    TrajectoryConfig& tr = cfg.view.trajectory;
    apply("trajectory.sweep_degrees", [&](const std::string& v) { tr.sweep_degrees = parse_double("sweep_degrees", v); });
    apply("trajectory.vertical_jitter_degrees", [&](const std::string& v) { tr.vertical_jitter_degrees = parse_double("vertical_jitter_degrees", v); });
    apply("trajectory.zoom_min", [&](const std::string& v) { tr.zoom_min = parse_double("zoom_min", v); });
    apply("trajectory.zoom_max", [&](const std::string& v) { tr.zoom_max = parse_double("zoom_max", v); });
    apply("trajectory.zoom_step", [&](const std::string& v) { tr.zoom_step = parse_double("zoom_step", v); });
    apply("trajectory.direction", [&](const std::string& v) {
        if (v == "left") tr.direction = SweepDirection::LeftToRight;
        else if (v == "right") tr.direction = SweepDirection::RightToLeft;
        else if (v == "random") tr.direction = SweepDirection::Random;
        else throw ConfigError("config: direction must be left, right, or random");
    });
    apply("trajectory.width", [&](const std::string& v) { tr.intrinsics.width = static_cast<std::uint32_t>(parse_size("width", v)); });
    apply("trajectory.height", [&](const std::string& v) { tr.intrinsics.height = static_cast<std::uint32_t>(parse_size("height", v)); });
    apply("trajectory.fx", [&](const std::string& v) { tr.intrinsics.fx = parse_double("fx", v); });
    apply("trajectory.fy", [&](const std::string& v) { tr.intrinsics.fy = parse_double("fy", v); });
    apply("trajectory.cx", [&](const std::string& v) { tr.intrinsics.cx = parse_double("cx", v); });
    apply("trajectory.cy", [&](const std::string& v) { tr.intrinsics.cy = parse_double("cy", v); });
    apply("trajectory.base_distance", [&](const std::string& v) { cfg.view.base_distance = parse_double("base_distance", v); });
    apply("trajectory.base_azimuth_degrees", [&](const std::string& v) { cfg.view.base_azimuth_degrees = parse_double("base_azimuth_degrees", v); });
    apply("trajectory.base_elevation_degrees", [&](const std::string& v) { cfg.view.base_elevation_degrees = parse_double("base_elevation_degrees", v); });
    apply("trajectory.view", [&](const std::string& v) {
        if (v == "trajectory") cfg.view.use_random_sampling = false;
        else if (v == "random") cfg.view.use_random_sampling = true;
        else throw ConfigError("config: view must be trajectory or random");
    });
    apply("trajectory.random_keep_ratio", [&](const std::string& v) { cfg.view.random_keep_ratio = parse_double("random_keep_ratio", v); });

    apply("encoder.spatial_stride", [&](const std::string& v) { cfg.encoder.spatial_stride = parse_size("spatial_stride", v); });
    apply("encoder.ball_radius", [&](const std::string& v) { cfg.encoder.ball_radius = parse_double("ball_radius", v); });
    apply("encoder.neighbors", [&](const std::string& v) { cfg.encoder.neighbors = parse_size("neighbors", v); });
    apply("encoder.feature_dim", [&](const std::string& v) { cfg.encoder.feature_dim = parse_size("feature_dim", v); });
    apply("encoder.heads", [&](const std::string& v) { cfg.encoder.heads = parse_size("heads", v); });
    apply("encoder.layers", [&](const std::string& v) { cfg.encoder.layers = parse_size("layers", v); });
    apply("encoder.max_frames", [&](const std::string& v) { cfg.encoder.max_frames = parse_size("max_frames", v); });
    apply("encoder.anchor_pool", [&](const std::string& v) {
        if (v == "mean") cfg.encoder.anchor_pool = AnchorPool::Mean;
        else if (v == "max") cfg.encoder.anchor_pool = AnchorPool::Max;
        else throw ConfigError("config: anchor_pool must be mean or max");
    });

    apply("distill.tau", [&](const std::string& v) { cfg.distill.tau = parse_double("tau", v); });
    apply("distill.window_offsets", [&](const std::string& v) {
        cfg.distill.window = WindowSpec::parse(v);
        cfg.distill.reset_offset_weights();
    });
    apply("distill.loss_split", [&](const std::string& v) {
        saw_split = true;
        split_value = v;
    });
    apply("distill.negative_scope", [&](const std::string& v) {
        if (v == "sequence") cfg.distill.scope = NegativeScope::Sequence;
        else if (v == "batch") cfg.distill.scope = NegativeScope::Batch;
        else throw ConfigError("config: negative_scope must be sequence or batch");
    });
    apply("distill.denominator", [&](const std::string& v) {
        if (v == "literal") cfg.distill.denominator = DenominatorMode::Literal;
        else if (v == "standard") cfg.distill.denominator = DenominatorMode::Standard;
        else throw ConfigError("config: denominator must be literal or standard");
    });
    apply("distill.strategy", [&](const std::string& v) {
        if (v == "C2P") cfg.distill.strategy = Strategy::C2P;
        else if (v == "C2C") cfg.distill.strategy = Strategy::C2C;
        else if (v == "P2P") cfg.distill.strategy = Strategy::P2P;
        else throw ConfigError("config: strategy must be C2P, C2C, or P2P");
    });
    apply("distill.predictor", [&](const std::string& v) {
        if (v == "framewise") cfg.distill.framewise_predictors = true;
        else if (v == "single") cfg.distill.framewise_predictors = false;
        else throw ConfigError("config: predictor must be framewise or single");
    });
    apply("distill.teacher_mode", [&](const std::string& v) {
        if (v == "joint") cfg.distill.teacher_mode = TeacherMode::Joint;
        else if (v == "stopgrad") cfg.distill.teacher_mode = TeacherMode::StopGradient;
        else if (v == "ema") cfg.distill.teacher_mode = TeacherMode::Ema;
        else throw ConfigError("config: teacher_mode must be joint, stopgrad, or ema");
    });
    apply("distill.ema_decay", [&](const std::string& v) { cfg.distill.ema_decay = parse_double("ema_decay", v); });
    apply("distill.p2p_shared", [&](const std::string& v) { cfg.distill.p2p_shared_view = parse_bool("p2p_shared", v); });
    apply("distill.symmetric_teacher", [&](const std::string& v) { cfg.distill.symmetric_teacher = parse_bool("symmetric_teacher", v); });

    apply("train.lr", [&](const std::string& v) { cfg.train.base_lr = parse_double("lr", v); });
    apply("train.warmup_epochs", [&](const std::string& v) { cfg.train.warmup_epochs = parse_size("warmup_epochs", v); });
    apply("train.momentum", [&](const std::string& v) { cfg.train.momentum = parse_double("momentum", v); });
    apply("train.epochs", [&](const std::string& v) { cfg.train.epochs = parse_size("epochs", v); });
    apply("train.batch_size", [&](const std::string& v) { cfg.train.batch_size = parse_size("batch_size", v); });
    apply("train.checkpoint_interval", [&](const std::string& v) { cfg.train.checkpoint_interval = parse_size("checkpoint_interval", v); });

    apply("probe.lr", [&](const std::string& v) { cfg.probe.lr = parse_double("probe lr", v); });
    apply("probe.steps", [&](const std::string& v) { cfg.probe.steps = parse_size("probe steps", v); });
    apply("probe.train_fraction", [&](const std::string& v) { cfg.probe.train_fraction = parse_double("train_fraction", v); });

    if (!kv.empty())
        throw ConfigError("config: unknown key " + kv.begin()->first);

    if (saw_split) {
        std::vector<double> split = parse_double_list("loss_split", split_value);
        std::size_t nz = cfg.distill.window.nonzero_offsets().size();
        if (split.size() != 1 + nz)
            throw ConfigError(
                "config: loss_split needs 1 + " + std::to_string(nz) +
                " entries for window " + cfg.distill.window.str());
        // With no nonzero offsets the temporal term is identically zero
        // and only alpha1 is stated; otherwise the entries must sum to 1.
        if (nz > 0) {
            double total = 0.0;
            for (double w : split) total += w;
            if (std::fabs(total - 1.0) > 1e-12)
                throw ConfigError("config: loss_split must sum to 1");
        }
        cfg.distill.alpha1 = split[0];
        cfg.distill.alpha2 = 1.0 - split[0];
        cfg.distill.offset_weights.assign(split.begin() + 1, split.end());
    }

    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    if (data_scenes < 1) throw ConfigError("config: data.scenes must be >= 1");
    if (data_frames < 1) throw ConfigError("config: data.frames must be >= 1");
    if (data_points < 1) throw ConfigError("config: data.points must be >= 1");
    if (data_phases < 1) throw ConfigError("config: data.phases must be >= 1");
    if (!(view.base_distance > 0.0))
        throw ConfigError("config: base_distance must be positive");
    if (!(view.random_keep_ratio > 0.0) || view.random_keep_ratio > 1.0)
        throw ConfigError("config: random_keep_ratio must be in (0, 1]");
    view.trajectory.validate();
    encoder.validate();
    distill.validate();
    train.validate();
    probe.validate();
}

std::string RunConfig::canonical_text() const {
    std::ostringstream os;
    os << "[data]\n";
    os << "scenes = " << data_scenes << "\n";
    os << "frames = " << data_frames << "\n";
    os << "points = " << data_points << "\n";
    os << "phases = " << data_phases << "\n";
    os << "\n[trajectory]\n";
    const TrajectoryConfig& tr = view.trajectory;
    os << "sweep_degrees = " << fmt(tr.sweep_degrees) << "\n";
    os << "vertical_jitter_degrees = " << fmt(tr.vertical_jitter_degrees) << "\n";
    os << "zoom_min = " << fmt(tr.zoom_min) << "\n";
    os << "zoom_max = " << fmt(tr.zoom_max) << "\n";
    os << "zoom_step = " << fmt(tr.zoom_step) << "\n";
    os << "direction = " << direction_name(tr.direction) << "\n";
    os << "width = " << tr.intrinsics.width << "\n";
    os << "height = " << tr.intrinsics.height << "\n";
    os << "fx = " << fmt(tr.intrinsics.fx) << "\n";
    os << "fy = " << fmt(tr.intrinsics.fy) << "\n";
    os << "cx = " << fmt(tr.intrinsics.cx) << "\n";
    os << "cy = " << fmt(tr.intrinsics.cy) << "\n";
    os << "base_distance = " << fmt(view.base_distance) << "\n";
    os << "base_azimuth_degrees = " << fmt(view.base_azimuth_degrees) << "\n";
    os << "base_elevation_degrees = " << fmt(view.base_elevation_degrees) << "\n";
    os << "view = " << (view.use_random_sampling ? "random" : "trajectory") << "\n";
    os << "random_keep_ratio = " << fmt(view.random_keep_ratio) << "\n";
    os << "\n[encoder]\n";
    os << "spatial_stride = " << encoder.spatial_stride << "\n";
    os << "ball_radius = " << fmt(encoder.ball_radius) << "\n";
    os << "neighbors = " << encoder.neighbors << "\n";
    os << "feature_dim = " << encoder.feature_dim << "\n";
    os << "heads = " << encoder.heads << "\n";
    os << "layers = " << encoder.layers << "\n";
    os << "max_frames = " << encoder.max_frames << "\n";
    os << "anchor_pool = "
       << (encoder.anchor_pool == AnchorPool::Mean ? "mean" : "max") << "\n";
    os << "\n[distill]\n";
    os << "tau = " << fmt(distill.tau) << "\n";
    os << "window_offsets = " << distill.window.str() << "\n";
    std::vector<double> split;
    split.push_back(distill.alpha1);
    for (double w : distill.offset_weights) split.push_back(w);
    os << "loss_split = " << fmt_list(split) << "\n";
    os << "negative_scope = "
       << (distill.scope == NegativeScope::Sequence ? "sequence" : "batch")
       << "\n";
    os << "denominator = "
       << (distill.denominator == DenominatorMode::Literal ? "literal"
                                                           : "standard")
       << "\n";
    os << "strategy = " << strategy_name(distill.strategy) << "\n";
    os << "predictor = "
       << (distill.framewise_predictors ? "framewise" : "single") << "\n";
    os << "teacher_mode = " << teacher_mode_name(distill.teacher_mode) << "\n";
    os << "ema_decay = " << fmt(distill.ema_decay) << "\n";
    os << "p2p_shared = " << (distill.p2p_shared_view ? "true" : "false") << "\n";
    os << "symmetric_teacher = "
       << (distill.symmetric_teacher ? "true" : "false") << "\n";
    os << "\n[train]\n";
    os << "lr = " << fmt(train.base_lr) << "\n";
    os << "warmup_epochs = " << train.warmup_epochs << "\n";
    os << "momentum = " << fmt(train.momentum) << "\n";
    os << "epochs = " << train.epochs << "\n";
    os << "batch_size = " << train.batch_size << "\n";
    os << "checkpoint_interval = " << train.checkpoint_interval << "\n";
    os << "\n[probe]\n";
    os << "lr = " << fmt(probe.lr) << "\n";
    os << "steps = " << probe.steps << "\n";
    os << "train_fraction = " << fmt(probe.train_fraction) << "\n";
    return os.str();
}

}  // namespace c2p
