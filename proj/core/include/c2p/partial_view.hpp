#pragma once

#include <cstdint>
#include <vector>

#include "c2p/geometry.hpp"

namespace c2p {

enum class SweepDirection { LeftToRight, RightToLeft, Random };

// Camera trajectory generation parameters. Defaults mirror the standard
// pretraining setup: a 150 degree horizontal sweep with +-5 degrees of
// vertical jitter and random zoom in [0.8, 1.2] on a 64x64 image.
struct TrajectoryConfig {
    double sweep_degrees = 150.0;
    double vertical_jitter_degrees = 5.0;
    double zoom_min = 0.8;
    double zoom_max = 1.2;
    double zoom_step = 0.02;  // per-frame multiplier walk step
    SweepDirection direction = SweepDirection::Random;
    CameraIntrinsics intrinsics;

    void validate() const {
        if (!(sweep_degrees > 0.0) || sweep_degrees > 360.0)
            throw ConfigError("trajectory: sweep_degrees must be in (0, 360]");
        if (vertical_jitter_degrees < 0.0)
            throw ConfigError("trajectory: vertical_jitter_degrees must be >= 0");
        if (!(zoom_min > 0.0) || zoom_min > zoom_max)
            throw ConfigError("trajectory: need 0 < zoom_min <= zoom_max");
        intrinsics.validate();
    }
};

// One camera position on the sphere, stored as offsets relative to the
// base camera's azimuth/elevation plus the realized radius and pose.
struct TrajectoryEntry {
    double theta_offset = 0.0;  // azimuth offset, radians
    double phi_offset = 0.0;    // elevation offset, radians
    double radius = 0.0;
    CameraPose pose;
};

struct CameraTrajectory {
    std::vector<TrajectoryEntry> entries;
    Vec3 center;         // sphere center = centroid of frame 1
    double base_radius = 0.0;
    double base_theta = 0.0;  // azimuth of the base camera, radians
    double base_phi = 0.0;    // elevation of the base camera, radians

    std::size_t length() const { return entries.size(); }
};

// Partial frame plus the indices of the complete-frame points that
// survived occlusion culling.
struct OcclusionResult {
    PointCloudFrame frame;
    std::vector<std::uint32_t> surviving_indices;
};

struct PartialSequence {
    Sequence sequence;
    CameraTrajectory trajectory;
};

// Samples a smooth camera path on the sphere around the centroid of the
// first frame. Azimuth offsets are evenly spaced over exactly
// sweep_degrees with endpoints at +-sweep/2 around the base camera
// azimuth; elevation follows a +-1 degree/step random walk clipped to
// the jitter bound; radius follows a zoom_step random walk clipped to
// [zoom_min, zoom_max] times the base radius. Deterministic given seed.
CameraTrajectory sample_trajectory(const Sequence& seq,
                                   const Vec3& base_camera_pos,
                                   const TrajectoryConfig& cfg,
                                   std::uint64_t seed);

// Z-buffer rasterization: each pixel keeps the minimum camera-space z
// among the points projecting to it (ties to the lowest point index).
DepthImage render_depth(const PointCloudFrame& frame, const CameraPose& pose,
                        const CameraIntrinsics& intr);

// Keeps exactly the points that win a pixel in render_depth, preserving
// their original world coordinates bit-for-bit.
OcclusionResult occlusion_sample(const PointCloudFrame& frame,
                                 const CameraPose& pose,
                                 const CameraIntrinsics& intr);

// Lifts every non-empty pixel back to a world-space point through the
// pixel center and the inverse pose.
PointCloudFrame back_project(const DepthImage& depth, const CameraPose& pose,
                             const CameraIntrinsics& intr);

// Full pipeline: trajectory sampling followed by per-frame occlusion
// culling. Labels and id carry over from the input sequence.
PartialSequence generate_partial_sequence(const Sequence& seq,
                                          const Vec3& base_camera_pos,
                                          const TrajectoryConfig& cfg,
                                          std::uint64_t seed);

// Baseline view generation: uniform subset without replacement of size
// round(keep_ratio * N), output in ascending original index order.
PointCloudFrame random_sample(const PointCloudFrame& frame, double keep_ratio,
                              std::uint64_t seed);

}  // namespace c2p
