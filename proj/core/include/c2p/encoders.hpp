#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "c2p/geometry.hpp"
#include "c2p/params.hpp"
#include "c2p/tensor.hpp"

namespace c2p {

// L x d matrix of frame-level features with L2-normalized rows.
using FeatureSequence = ag::Tensor;

enum class AnchorPool { Mean, Max };

struct EncoderConfig {
    std::size_t spatial_stride = 32;  // anchors per frame = N / stride
    double ball_radius = 0.9;
    std::size_t neighbors = 32;  // k
    std::size_t feature_dim = 64;
    std::size_t heads = 4;
    std::size_t layers = 1;       // temporal transformer blocks
    std::size_t max_frames = 64;  // position embedding table size
    AnchorPool anchor_pool = AnchorPool::Mean;

    void validate() const {
        if (spatial_stride < 1) throw ConfigError("encoder: spatial_stride must be >= 1");
        if (!(ball_radius > 0.0)) throw ConfigError("encoder: ball_radius must be positive");
        if (neighbors < 1) throw ConfigError("encoder: neighbors must be >= 1");
        if (feature_dim < 1) throw ConfigError("encoder: feature_dim must be >= 1");
        if (heads < 1 || feature_dim % heads != 0)
            throw ConfigError("encoder: feature_dim must be divisible by heads");
        if (max_frames < 1) throw ConfigError("encoder: max_frames must be >= 1");
    }

    std::size_t anchors_for(std::size_t point_count) const {
        std::size_t a = point_count / spatial_stride;
        return a == 0 ? 1 : a;
    }
};

// Greedy farthest point sampling starting at index 0; each step adds the
// point maximizing min distance to the chosen set, ties to the lowest
// index. Deterministic.
std::vector<std::size_t> farthest_point_sample(const PointCloudFrame& frame,
                                               std::size_t count);

// Up to k in-radius neighbors of the anchor point in ascending index
// order; short results repeat the first found index, an isolated anchor
// yields k copies of itself.
std::vector<std::size_t> ball_query(const PointCloudFrame& frame,
                                    std::size_t anchor_index, double radius,
                                    std::size_t k);

// The shared two-layer perceptron of the local aggregation stage:
// relative offset (3) -> d -> d with relu between, max over neighbors.
struct LocalStageParams {
    ag::Tensor w1, b1, w2, b2;
};

// A x d anchor features for one frame.
ag::Tensor local_aggregate(const PointCloudFrame& frame,
                           const std::vector<std::size_t>& anchors,
                           const LocalStageParams& params,
                           const EncoderConfig& cfg);

// Frame encoder. The teacher is the local aggregation stage alone
// (temporal = false): frame i's feature depends only on frame i. The
// student adds learned frame-index embeddings and pre-norm transformer
// blocks over the frame axis (temporal = true).
class Encoder {
public:
    Encoder(const EncoderConfig& cfg, bool temporal, std::uint64_t seed);

    // [L, d] features, rows L2-normalized. Empty frames map to zero rows.
    FeatureSequence forward(const Sequence& seq) const;

    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }
    const EncoderConfig& config() const { return cfg_; }
    bool temporal() const { return temporal_; }

private:
    LocalStageParams local_params() const;

    EncoderConfig cfg_;
    bool temporal_;
    ParamSet params_;
};

// Per-offset prediction heads: linear -> layer_norm -> relu -> linear.
// In frame-wise mode each nonzero offset owns a head; in single mode one
// head serves every offset.
class PredictorBank {
public:
    PredictorBank(const std::vector<int>& nonzero_offsets, bool framewise,
                  std::size_t dim, std::uint64_t seed);

    // x: [n, d] student features; output is un-normalized.
    ag::Tensor forward(const ag::Tensor& x, int offset) const;

    bool framewise() const { return framewise_; }
    const std::vector<int>& offsets() const { return offsets_; }
    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }

private:
    std::string head_prefix(int offset) const;

    std::vector<int> offsets_;
    bool framewise_;
    ParamSet params_;
};

}  // namespace c2p
