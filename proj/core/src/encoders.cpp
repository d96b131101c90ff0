#include "c2p/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace c2p {

namespace {

double dist2(const Vec3& a, const Vec3& b) {
    Vec3 d = a - b;
    return d.dot(d);
}

}  // namespace

std::vector<std::size_t> farthest_point_sample(const PointCloudFrame& frame,
                                               std::size_t count) {
    const std::size_t n = frame.size();
    if (count > n)
        throw ConfigError("farthest_point_sample: requested " +
                          std::to_string(count) + " anchors from " +
                          std::to_string(n) + " points");
    std::vector<std::size_t> chosen;
    if (count == 0) return chosen;
    chosen.reserve(count);
    chosen.push_back(0);
    std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
    for (std::size_t step = 1; step < count; ++step) {
        const Vec3& last = frame.points[chosen.back()];
        double best = -1.0;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
            min_d2[i] = std::min(min_d2[i], dist2(frame.points[i], last));
            if (min_d2[i] > best) {  // strict: ties keep the lowest index
                best = min_d2[i];
                best_i = i;
            }
        }
        chosen.push_back(best_i);
    }
    return chosen;
}

std::vector<std::size_t> ball_query(const PointCloudFrame& frame,
                                    std::size_t anchor_index, double radius,
                                    std::size_t k) {
    if (k < 1) throw ConfigError("ball_query: k must be >= 1");
    if (anchor_index >= frame.size())
        throw ConfigError("ball_query: anchor index out of range");
    const Vec3& center = frame.points[anchor_index];
    const double r2 = radius * radius;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < frame.size() && out.size() < k; ++i)
        if (dist2(frame.points[i], center) <= r2) out.push_back(i);
    if (out.empty()) out.push_back(anchor_index);
    while (out.size() < k) out.push_back(out.front());
    return out;
}

ag::Tensor local_aggregate(const PointCloudFrame& frame,
                           const std::vector<std::size_t>& anchors,
                           const LocalStageParams& params,
                           const EncoderConfig& cfg) {
    const std::size_t a = anchors.size();
    const std::size_t k = cfg.neighbors;
    std::vector<double> offsets;
    offsets.reserve(a * k * 3);
    for (std::size_t ai = 0; ai < a; ++ai) {
        const Vec3& anchor = frame.points[anchors[ai]];
        for (std::size_t ni :
             ball_query(frame, anchors[ai], cfg.ball_radius, k)) {
            Vec3 rel = frame.points[ni] - anchor;
            offsets.push_back(rel.x);
            offsets.push_back(rel.y);
            offsets.push_back(rel.z);
        }
    }
    ag::Tensor rel = ag::Tensor::from_data({a * k, 3}, std::move(offsets));
    ag::Tensor h = ag::relu(ag::add_bias(ag::matmul(rel, params.w1), params.b1));
    h = ag::add_bias(ag::matmul(h, params.w2), params.b2);
    h = ag::reshape(h, {a, k, cfg.feature_dim});
    return ag::max_pool(h, 1);  // elementwise max over neighbors
}

Encoder::Encoder(const EncoderConfig& cfg, bool temporal, std::uint64_t seed)
    : cfg_(cfg), temporal_(temporal) {
    cfg_.validate();
    const std::size_t d = cfg_.feature_dim;
    Pcg32 rng(splitmix64(seed));

    params_.add("local.w1", init_uniform({3, d}, 3, rng));
    params_.add("local.b1", init_uniform({d}, 3, rng));
    params_.add("local.w2", init_uniform({d, d}, d, rng));
    params_.add("local.b2", init_uniform({d}, d, rng));

    if (temporal_) {
        params_.add("pos_embed", init_uniform({cfg_.max_frames, d}, d, rng));
        for (std::size_t l = 0; l < cfg_.layers; ++l) {
            std::string p = "block" + std::to_string(l) + ".";
            params_.add(p + "ln1.gain", ag::Tensor::full({d}, 1.0, true));
            params_.add(p + "ln1.bias", ag::Tensor::zeros({d}, true));
            params_.add(p + "wq", init_uniform({d, d}, d, rng));
            params_.add(p + "wk", init_uniform({d, d}, d, rng));
            params_.add(p + "wv", init_uniform({d, d}, d, rng));
            params_.add(p + "wo", init_uniform({d, d}, d, rng));
            params_.add(p + "ln2.gain", ag::Tensor::full({d}, 1.0, true));
            params_.add(p + "ln2.bias", ag::Tensor::zeros({d}, true));
            params_.add(p + "ff.w1", init_uniform({d, d}, d, rng));
            params_.add(p + "ff.b1", init_uniform({d}, d, rng));
            params_.add(p + "ff.w2", init_uniform({d, d}, d, rng));
            params_.add(p + "ff.b2", init_uniform({d}, d, rng));
        }
    }
}

LocalStageParams Encoder::local_params() const {
    return {params_.at("local.w1"), params_.at("local.b1"),
            params_.at("local.w2"), params_.at("local.b2")};
}

FeatureSequence Encoder::forward(const Sequence& seq) const {
    const std::size_t L = seq.length();
    const std::size_t d = cfg_.feature_dim;
    if (L == 0) throw ConfigError("encoder: empty sequence");
    if (temporal_ && L > cfg_.max_frames)
        throw ConfigError("encoder: sequence length " + std::to_string(L) +
                          " exceeds max_frames " +
                          std::to_string(cfg_.max_frames));

    LocalStageParams local = local_params();
    std::vector<ag::Tensor> rows;
    rows.reserve(L);
    for (const PointCloudFrame& frame : seq.frames) {
        if (frame.empty()) {
            rows.push_back(ag::Tensor::zeros({1, d}));
            continue;
        }
        std::size_t a = cfg_.anchors_for(frame.size());
        std::vector<std::size_t> anchors = farthest_point_sample(frame, a);
        ag::Tensor feats = local_aggregate(frame, anchors, local, cfg_);
        ag::Tensor pooled = cfg_.anchor_pool == AnchorPool::Mean
                                ? ag::mean(feats, 0)
                                : ag::max_pool(feats, 0);
        rows.push_back(ag::reshape(pooled, {1, d}));
    }
    ag::Tensor x = L == 1 ? rows[0] : ag::concat(rows, 0);

    if (temporal_) {
        std::vector<std::size_t> idx(L);
        for (std::size_t i = 0; i < L; ++i) idx[i] = i;
        x = ag::add(x, ag::gather_rows(params_.at("pos_embed"), idx));
        for (std::size_t l = 0; l < cfg_.layers; ++l) {
            std::string p = "block" + std::to_string(l) + ".";
            ag::Tensor y = ag::layer_norm(x, params_.at(p + "ln1.gain"),
                                          params_.at(p + "ln1.bias"));
            ag::Tensor att = ag::attention(ag::matmul(y, params_.at(p + "wq")),
                                           ag::matmul(y, params_.at(p + "wk")),
                                           ag::matmul(y, params_.at(p + "wv")),
                                           cfg_.heads);
            x = ag::add(x, ag::matmul(att, params_.at(p + "wo")));
            ag::Tensor z = ag::layer_norm(x, params_.at(p + "ln2.gain"),
                                          params_.at(p + "ln2.bias"));
            ag::Tensor ff = ag::add_bias(
                ag::matmul(ag::relu(ag::add_bias(
                               ag::matmul(z, params_.at(p + "ff.w1")),
                               params_.at(p + "ff.b1"))),
                           params_.at(p + "ff.w2")),
                params_.at(p + "ff.b2"));
            x = ag::add(x, ff);
        }
    }
    return ag::l2_normalize(x, 1);
}

PredictorBank::PredictorBank(const std::vector<int>& nonzero_offsets,
                             bool framewise, std::size_t dim,
                             std::uint64_t seed)
    : offsets_(nonzero_offsets), framewise_(framewise) {
    for (int o : offsets_)
        if (o == 0) throw ConfigError("predictor: offset 0 has no head");
    Pcg32 rng(splitmix64(seed));
    auto add_head = [&](const std::string& prefix) {
        params_.add(prefix + "w1", init_uniform({dim, dim}, dim, rng));
        params_.add(prefix + "b1", init_uniform({dim}, dim, rng));
        params_.add(prefix + "ln.gain", ag::Tensor::full({dim}, 1.0, true));
        params_.add(prefix + "ln.bias", ag::Tensor::zeros({dim}, true));
        params_.add(prefix + "w2", init_uniform({dim, dim}, dim, rng));
        params_.add(prefix + "b2", init_uniform({dim}, dim, rng));
    };
    if (framewise_) {
        for (int o : offsets_) add_head(head_prefix(o));
    } else if (!offsets_.empty()) {
        add_head("shared.");
    }
}

std::string PredictorBank::head_prefix(int offset) const {
    if (!framewise_) return "shared.";
    return (offset < 0 ? "m" + std::to_string(-offset)
                       : "p" + std::to_string(offset)) +
           ".";
}

ag::Tensor PredictorBank::forward(const ag::Tensor& x, int offset) const {
    if (std::find(offsets_.begin(), offsets_.end(), offset) == offsets_.end())
        throw ConfigError("predictor: no head for offset " +
                          std::to_string(offset));
    std::string p = head_prefix(offset);
    ag::Tensor h = ag::add_bias(ag::matmul(x, params_.at(p + "w1")),
                                params_.at(p + "b1"));
    h = ag::relu(ag::layer_norm(h, params_.at(p + "ln.gain"),
                                params_.at(p + "ln.bias")));
    return ag::add_bias(ag::matmul(h, params_.at(p + "w2")),
                        params_.at(p + "b2"));
}

}  // namespace c2p
