#include "c2p/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "c2p/rng.hpp"
#include "c2p/sequence_io.hpp"

namespace c2p {

namespace fs = std::filesystem;

void SceneSpec::validate() const {
    if (primitives.empty()) throw ConfigError("scene: no primitives");
    if (frames < 1) throw ConfigError("scene: frames must be >= 1");
    if (foreground >= primitives.size())
        throw ConfigError("scene: foreground index out of range");
    for (const PrimitiveSpec& p : primitives) {
        if (p.point_count < 1)
            throw ConfigError("scene: primitive point count must be >= 1");
        if (!(p.size > 0.0)) throw ConfigError("scene: primitive size must be positive");
        if (p.phases.empty()) throw ConfigError("scene: primitive has no phases");
        std::size_t total = 0;
        for (const MotionPhase& ph : p.phases) total += ph.duration;
        if (total != frames)
            throw ConfigError("scene: phase durations sum to " +
                              std::to_string(total) + ", expected " +
                              std::to_string(frames));
    }
}

namespace {

std::vector<Vec3> sphere_surface(const Vec3& center, double radius,
                                 std::size_t n) {
    // Fibonacci spiral: even coverage without rejection sampling.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Vec3> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) /
                             static_cast<double>(n);
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double theta = golden * static_cast<double>(i);
        pts.push_back(center + Vec3{r * std::cos(theta), r * std::sin(theta),
                                    z} * radius);
    }
    return pts;
}

std::vector<Vec3> box_surface(const Vec3& center, double half, std::size_t n,
                              Pcg32& rng) {
    std::vector<Vec3> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t face = rng.next_below(6);
        double a = rng.uniform(-half, half);
        double b = rng.uniform(-half, half);
        Vec3 p;
        switch (face) {
            case 0: p = {half, a, b}; break;
            case 1: p = {-half, a, b}; break;
            case 2: p = {a, half, b}; break;
            case 3: p = {a, -half, b}; break;
            case 4: p = {a, b, half}; break;
            default: p = {a, b, -half}; break;
        }
        pts.push_back(center + p);
    }
    return pts;
}

// Phase index active at frame t (phases tile the timeline in order).
std::size_t phase_at(const std::vector<MotionPhase>& phases, std::size_t t) {
    std::size_t end = 0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        end += phases[i].duration;
        if (t < end) return i;
    }
    return phases.size() - 1;
}

}  // namespace

SceneSpec default_scene_template(std::size_t frames, std::size_t points,
                                 std::size_t phases) {
    if (phases < 1) throw ConfigError("scene template: phases must be >= 1");
    if (frames < phases)
        throw ConfigError("scene template: need at least one frame per phase");
    SceneSpec spec;
    spec.frames = frames;
    spec.foreground = 0;

    // Phase identity must be visible to a translation-invariant local
    // stage, so each phase carries a distinct spin rate and the sphere
    // runs fast enough to graze the box walls: which wall lights up in
    // the anchor neighborhoods tracks the motion direction.
    PrimitiveSpec fg;
    fg.kind = PrimitiveKind::Sphere;
    fg.size = 0.5;
    fg.point_count = std::max<std::size_t>(1, points / 2);
    fg.center = {0, 0, 0};
    const double speed = 0.5;
    for (std::size_t k = 0; k < phases; ++k) {
        MotionPhase ph;
        double ang = 2.0 * std::numbers::pi * static_cast<double>(k) /
                     static_cast<double>(phases);
        ph.velocity = {speed * std::cos(ang), speed * std::sin(ang), 0.0};
        ph.angular_velocity_z = 0.1 + 0.25 * static_cast<double>(k);
        ph.duration = frames / phases + (k < frames % phases ? 1 : 0);
        ph.label = static_cast<std::uint32_t>(k);
        fg.phases.push_back(ph);
    }
    spec.primitives.push_back(fg);

    if (points > fg.point_count) {
        PrimitiveSpec bg;
        bg.kind = PrimitiveKind::Box;
        bg.size = 1.2;
        bg.point_count = points - fg.point_count;
        bg.center = {0, 0, 0};
        bg.phases.push_back({Vec3{0, 0, 0}, 0.0, frames, 0});
        spec.primitives.push_back(bg);
    }
    return spec;
}

Sequence generate_scene(const SceneSpec& spec, std::uint64_t seed) {
    spec.validate();
    const std::size_t L = spec.frames;

    // Current point set and analytic centroid per primitive.
    std::vector<std::vector<Vec3>> points(spec.primitives.size());
    std::vector<Vec3> centers(spec.primitives.size());
    for (std::size_t pi = 0; pi < spec.primitives.size(); ++pi) {
        const PrimitiveSpec& p = spec.primitives[pi];
        if (p.kind == PrimitiveKind::Sphere) {
            points[pi] = sphere_surface(p.center, p.size, p.point_count);
        } else {
            Pcg32 rng(splitmix64(seed ^ (0xB0F1u + pi)));
            points[pi] = box_surface(p.center, p.size, p.point_count, rng);
        }
        centers[pi] = p.center;
    }

    Sequence seq;
    seq.frames.resize(L);
    seq.labels.resize(L);
    for (std::size_t t = 0; t < L; ++t) {
        if (t > 0) {
            // Step into frame t follows the phase active at t.
            for (std::size_t pi = 0; pi < spec.primitives.size(); ++pi) {
                const MotionPhase& ph =
                    spec.primitives[pi]
                        .phases[phase_at(spec.primitives[pi].phases, t)];
                Mat3 rot = Mat3::rotation_z(ph.angular_velocity_z);
                bool rotate = ph.angular_velocity_z != 0.0;
                for (Vec3& p : points[pi]) {
                    if (rotate)
                        p = rot * (p - centers[pi]) + centers[pi] + ph.velocity;
                    else
                        p = p + ph.velocity;
                }
                centers[pi] = centers[pi] + ph.velocity;
            }
        }
        PointCloudFrame& frame = seq.frames[t];
        for (const auto& pts : points)
            frame.points.insert(frame.points.end(), pts.begin(), pts.end());
        const PrimitiveSpec& fg = spec.primitives[spec.foreground];
        seq.labels[t] = fg.phases[phase_at(fg.phases, t)].label;
    }
    return seq;
}

std::vector<Sequence> make_dataset(std::size_t count,
                                   const SceneSpec& template_spec,
                                   std::uint64_t master_seed) {
    if (count < 1) throw ConfigError("make_dataset: count must be >= 1");
    template_spec.validate();
    std::vector<Sequence> out(count);
    for (std::size_t si = 0; si < count; ++si) {
        Pcg32 rng = stream_rng(master_seed, si);
        SceneSpec spec = template_spec;
        PrimitiveSpec& fg = spec.primitives[spec.foreground];

        // Permute (phase, duration, label) together: labels stay
        // canonical, per-sequence class counts stay within one frame.
        std::vector<std::size_t> perm = rng.permutation(fg.phases.size());
        std::vector<MotionPhase> permuted;
        permuted.reserve(fg.phases.size());
        for (std::size_t j : perm) permuted.push_back(fg.phases[j]);
        fg.phases = std::move(permuted);
        for (MotionPhase& ph : fg.phases) {
            double scale = rng.uniform(0.85, 1.15);
            ph.velocity = ph.velocity * scale;
        }

        std::uint64_t scene_seed = rng.next_u64();
        out[si] = generate_scene(spec, scene_seed);
        char id[32];
        std::snprintf(id, sizeof id, "seq-%05zu", si);
        out[si].id = id;
    }
    return out;
}

void write_dataset(const std::string& dir,
                   const std::vector<Sequence>& sequences) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream manifest(fs::path(dir) / "manifest.csv");
    if (!manifest)
        throw FormatError("cannot open for writing: " + dir + "/manifest.csv");
    manifest << "index,file,frames,points,has_labels\n";
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "seq_%05zu.c2ps", i);
        write_sequence((fs::path(dir) / name).string(), sequences[i]);
        const Sequence& s = sequences[i];
        manifest << i << "," << name << "," << s.length() << ","
                 << (s.frames.empty() ? 0 : s.frames.front().size()) << ","
                 << (s.has_labels() ? 1 : 0) << "\n";
    }
    if (!manifest)
        throw FormatError("write failed: " + dir + "/manifest.csv");
}

std::vector<Sequence> load_dataset(const std::string& dir) {
    std::vector<std::string> files;
    fs::path manifest_path = fs::path(dir) / "manifest.csv";
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::size_t a = line.find(',');
            std::size_t b = line.find(',', a + 1);
            if (a == std::string::npos || b == std::string::npos)
                throw FormatError("malformed manifest line: " + line);
            files.push_back((fs::path(dir) / line.substr(a + 1, b - a - 1))
                                .string());
        }
    } else {
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".c2ps")
                files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
    }
    if (files.empty())
        throw FormatError("no sequences found in " + dir);
    std::vector<Sequence> out;
    out.reserve(files.size());
    for (const std::string& f : files) {
        SequenceFile sf = read_sequence(f);
        sf.sequence.id = fs::path(f).stem().string();
        out.push_back(std::move(sf.sequence));
    }
    return out;
}

}  // namespace c2p
