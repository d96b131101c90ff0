#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "c2p/distill.hpp"
#include "c2p/encoders.hpp"

namespace c2p {

std::uint64_t fnv1a64(std::string_view text);

struct ProbeConfig {
    double lr = 0.1;
    std::size_t steps = 500;
    double train_fraction = 0.8;

    void validate() const {
        if (!(lr > 0.0)) throw ConfigError("probe: lr must be positive");
        if (steps < 1) throw ConfigError("probe: steps must be >= 1");
        if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
            throw ConfigError("probe: train_fraction must be in (0, 1)");
    }
};

// The full experiment configuration: plain `key = value` text under
// [section] headers, every key mirroring a module config field. Unknown
// sections or keys are rejected. canonical_text() is the diffable
// provenance record and the input to fingerprint().
struct RunConfig {
    // [data]
    std::size_t data_scenes = 64;
    std::size_t data_frames = 8;
    std::size_t data_points = 256;
    std::size_t data_phases = 4;

    ViewConfig view;        // [trajectory]
    EncoderConfig encoder;  // [encoder]
    DistillConfig distill;  // [distill]
    TrainConfig train;      // [train]
    ProbeConfig probe;      // [probe]

    static RunConfig defaults() { return RunConfig{}; }
    static RunConfig from_file(const std::string& path);
    static RunConfig from_text(const std::string& text);

    std::string canonical_text() const;
    std::uint64_t fingerprint() const { return fnv1a64(canonical_text()); }
    void validate() const;
};

}  // namespace c2p
