#include "c2p/partial_view.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "c2p/rng.hpp"

namespace c2p {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

CameraTrajectory sample_trajectory(const Sequence& seq,
                                   const Vec3& base_camera_pos,
                                   const TrajectoryConfig& cfg,
                                   std::uint64_t seed) {
    cfg.validate();
    if (seq.frames.empty())
        throw ConfigError("sample_trajectory: empty sequence");

    CameraTrajectory traj;
    traj.center = centroid(seq.frames.front());
    Vec3 d = base_camera_pos - traj.center;
    traj.base_radius = d.norm();
    if (traj.base_radius == 0.0)
        throw ConfigError("sample_trajectory: base camera coincides with scene center");
    traj.base_theta = std::atan2(d.y, d.x);
    traj.base_phi = std::asin(d.z / traj.base_radius);

    Pcg32 rng(splitmix64(seed));

    bool right_to_left = false;
    switch (cfg.direction) {
        case SweepDirection::LeftToRight: right_to_left = false; break;
        case SweepDirection::RightToLeft: right_to_left = true; break;
        case SweepDirection::Random: right_to_left = rng.next_bool(); break;
    }

    const std::size_t L = seq.length();
    const double sweep = cfg.sweep_degrees * kDegToRad;
    const double jitter = cfg.vertical_jitter_degrees * kDegToRad;
    const double phi_step = 1.0 * kDegToRad;

    traj.entries.resize(L);
    double phi_off = 0.0;
    double zoom = 1.0;
    for (std::size_t i = 0; i < L; ++i) {
        // Endpoints land exactly at +-sweep/2; a single frame sits at the
        // base azimuth.
        double theta_off = 0.0;
        if (L > 1) {
            double frac = static_cast<double>(i) / static_cast<double>(L - 1);
            theta_off = sweep * frac - sweep * 0.5;
            if (right_to_left) theta_off = -theta_off;
        }

        phi_off = std::clamp(phi_off + rng.uniform(-phi_step, phi_step),
                             -jitter, jitter);
        zoom = std::clamp(zoom + rng.uniform(-cfg.zoom_step, cfg.zoom_step),
                          cfg.zoom_min, cfg.zoom_max);

        double theta = traj.base_theta + theta_off;
        double phi = traj.base_phi + phi_off;
        double radius = traj.base_radius * zoom;
        Vec3 pos = traj.center + Vec3{std::cos(phi) * std::cos(theta),
                                      std::cos(phi) * std::sin(theta),
                                      std::sin(phi)} * radius;

        TrajectoryEntry& e = traj.entries[i];
        e.theta_offset = theta_off;
        e.phi_offset = phi_off;
        e.radius = radius;
        e.pose = look_at(pos, traj.center, Vec3{0, 0, 1});
    }
    return traj;
}

DepthImage render_depth(const PointCloudFrame& frame, const CameraPose& pose,
                        const CameraIntrinsics& intr) {
    DepthImage img(intr.width, intr.height);
    for (std::size_t i = 0; i < frame.size(); ++i) {
        Vec3 cam = pose.to_camera(frame.points[i]);
        if (auto px = project(cam, intr))
            img.record(px->u, px->v, px->depth, static_cast<std::uint32_t>(i));
    }
    return img;
}

OcclusionResult occlusion_sample(const PointCloudFrame& frame,
                                 const CameraPose& pose,
                                 const CameraIntrinsics& intr) {
    DepthImage img = render_depth(frame, pose, intr);
    std::vector<bool> keep(frame.size(), false);
    for (std::uint32_t v = 0; v < img.height(); ++v)
        for (std::uint32_t u = 0; u < img.width(); ++u) {
            std::uint32_t idx = img.index_at(u, v);
            if (idx != DepthImage::kNoIndex) keep[idx] = true;
        }

    OcclusionResult out;
    for (std::uint32_t i = 0; i < frame.size(); ++i)
        if (keep[i]) {
            out.surviving_indices.push_back(i);
            out.frame.points.push_back(frame.points[i]);
        }
    return out;
}

PointCloudFrame back_project(const DepthImage& depth, const CameraPose& pose,
                             const CameraIntrinsics& intr) {
    PointCloudFrame out;
    for (std::uint32_t v = 0; v < depth.height(); ++v)
        for (std::uint32_t u = 0; u < depth.width(); ++u) {
            if (depth.empty_at(u, v)) continue;
            Vec3 cam = unproject_pixel(u, v, depth.depth_at(u, v), intr);
            out.points.push_back(pose.to_world(cam));
        }
    return out;
}

PartialSequence generate_partial_sequence(const Sequence& seq,
                                          const Vec3& base_camera_pos,
                                          const TrajectoryConfig& cfg,
                                          std::uint64_t seed) {
    PartialSequence out;
    out.trajectory = sample_trajectory(seq, base_camera_pos, cfg, seed);
    out.sequence.id = seq.id;
    out.sequence.labels = seq.labels;
    out.sequence.frames.reserve(seq.length());
    for (std::size_t i = 0; i < seq.length(); ++i)
        out.sequence.frames.push_back(
            occlusion_sample(seq.frames[i], out.trajectory.entries[i].pose,
                             cfg.intrinsics)
                .frame);
    return out;
}

PointCloudFrame random_sample(const PointCloudFrame& frame, double keep_ratio,
                              std::uint64_t seed) {
    if (!(keep_ratio > 0.0) || keep_ratio > 1.0)
        throw ConfigError("random_sample: keep_ratio must be in (0, 1]");
    const std::size_t n = frame.size();
    const std::size_t m = static_cast<std::size_t>(
        std::llround(keep_ratio * static_cast<double>(n)));

    Pcg32 rng(splitmix64(seed));
    std::vector<std::uint32_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t j =
            i + rng.next_below(static_cast<std::uint32_t>(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());

    PointCloudFrame out;
    out.points.reserve(m);
    for (std::uint32_t i : idx) out.points.push_back(frame.points[i]);
    return out;
}

}  // namespace c2p
