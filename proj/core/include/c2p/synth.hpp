#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "c2p/geometry.hpp"

namespace c2p {

enum class PrimitiveKind { Sphere, Box };

// One segment of a primitive's motion script. The label names the
// motion class and stays with the phase when dataset generation permutes
// phase order, so frame labels mean the same thing in every sequence.
struct MotionPhase {
    Vec3 velocity;                    // scene units per frame
    double angular_velocity_z = 0.0;  // radians per frame, about the centroid
    std::size_t duration = 0;         // frames
    std::uint32_t label = 0;
};

struct PrimitiveSpec {
    PrimitiveKind kind = PrimitiveKind::Sphere;
    double size = 0.5;  // sphere radius or box half-extent
    std::size_t point_count = 128;
    Vec3 center;
    std::vector<MotionPhase> phases;
};

struct SceneSpec {
    std::vector<PrimitiveSpec> primitives;
    std::size_t frames = 8;
    std::size_t foreground = 0;  // labels follow this primitive's phases

    void validate() const;
};

// Foreground sphere with `phases` translation phases (velocity directions
// spread around the horizontal circle) over a static box backdrop.
SceneSpec default_scene_template(std::size_t frames, std::size_t points,
                                 std::size_t phases);

// Samples surface points once per primitive (Fibonacci spiral for
// spheres, seeded PCG32 for boxes) and rigidly advects them through the
// motion script. Frame t's label is the phase active at t.
Sequence generate_scene(const SceneSpec& spec, std::uint64_t seed);

// Per-sequence randomization (phase order permutation, velocity scale)
// from splitmix64-derived streams; phase labels stay canonical so the
// probe's classes are comparable across sequences.
std::vector<Sequence> make_dataset(std::size_t count,
                                   const SceneSpec& template_spec,
                                   std::uint64_t master_seed);

// C2PS files named seq_NNNNN.c2ps plus manifest.csv
// (index,file,frames,points,has_labels).
void write_dataset(const std::string& dir,
                   const std::vector<Sequence>& sequences);

// Loads via manifest.csv when present, otherwise sorted *.c2ps files.
std::vector<Sequence> load_dataset(const std::string& dir);

}  // namespace c2p
