#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "c2p/encoders.hpp"
#include "c2p/partial_view.hpp"

namespace c2p {

// Time window around each anchor frame: offsets inside it are positives
// or prediction targets, frames outside it are negatives.
struct WindowSpec {
    std::vector<int> offsets;  // ascending, contains 0

    static WindowSpec window1() { return {{0}}; }
    static WindowSpec window3() { return {{-1, 0, 1}}; }
    static WindowSpec window5() { return {{-2, -1, 0, 1, 2}}; }
    static WindowSpec plus_minus_2() { return {{-2, 0, 2}}; }
    // Accepts "1", "3", "5", "pm2", or a comma-separated offset list.
    static WindowSpec parse(const std::string& text);

    void validate() const;
    bool contains(int offset) const;
    std::vector<int> nonzero_offsets() const;
    std::string str() const;  // canonical "o1,o2,..." form
};

enum class Strategy { C2P, C2C, P2P };
enum class NegativeScope { Sequence, Batch };
enum class DenominatorMode { Literal, Standard };
enum class TeacherMode { Joint, StopGradient, Ema };

struct DistillConfig {
    double tau = 0.07;
    double alpha1 = 0.5;  // geometric term weight
    double alpha2 = 0.5;  // temporal term weight
    WindowSpec window = WindowSpec::window3();
    // Absolute weight per nonzero offset (ascending offset order); must
    // sum to alpha2. Defaults split alpha2 evenly: the 0.5/0.25/0.25
    // geometry/previous/next split for window 3.
    std::vector<double> offset_weights = {0.25, 0.25};
    NegativeScope scope = NegativeScope::Sequence;
    DenominatorMode denominator = DenominatorMode::Literal;
    Strategy strategy = Strategy::C2P;
    bool framewise_predictors = true;
    TeacherMode teacher_mode = TeacherMode::Joint;
    double ema_decay = 0.99;
    bool p2p_shared_view = false;  // one shared partial view instead of two
    bool symmetric_teacher = false;  // teacher gets its own transformer

    void validate() const;
    // Rebuilds offset_weights as an even split of alpha2.
    void reset_offset_weights();
    double offset_weight(int offset) const;
};

struct LossBreakdown {
    double geo = 0.0;
    double time = 0.0;
    double total = 0.0;
    std::vector<double> per_frame_geo;   // filled by the pairwise losses
    std::vector<double> per_frame_time;
};

// Frames of the same sequence outside the time window around i. May be
// empty at degenerate L; the losses raise once the combined pool
// (including any batch extras) is empty.
std::vector<std::size_t> negative_pool(std::size_t i, const WindowSpec& window,
                                       std::size_t L);

// Eq.-style geometric InfoNCE: anchor = student row i, positive =
// teacher row i, negatives = teacher rows outside the window plus any
// extra rows (other sequences of the batch). Mean over anchors.
ag::Tensor geo_loss(const FeatureSequence& student,
                    const FeatureSequence& teacher, const DistillConfig& cfg,
                    const std::vector<ag::Tensor>& extra_negatives = {},
                    std::vector<double>* per_frame = nullptr);

// Temporal InfoNCE: the predictor maps student row i to offset o; the
// positive is teacher row i+o, negatives as in geo_loss. Offset weights
// renormalize when boundary truncation removes offsets.
ag::Tensor time_loss(const FeatureSequence& student,
                     const FeatureSequence& teacher,
                     const PredictorBank& predictors, const DistillConfig& cfg,
                     const std::vector<ag::Tensor>& extra_negatives = {},
                     std::vector<double>* per_frame = nullptr);

// alpha1 * geo + alpha2 * time with the weight identity checked.
LossBreakdown total_loss(double geo, double time, const DistillConfig& cfg);

struct ViewPair {
    Sequence teacher_input;
    Sequence student_input;
};

// Partial-view generation settings shared by training and the CLI.
struct ViewConfig {
    TrajectoryConfig trajectory;
    double base_distance = 2.5;
    double base_azimuth_degrees = 0.0;
    double base_elevation_degrees = 0.0;
    bool use_random_sampling = false;  // random-sampling baseline instead
    double random_keep_ratio = 0.5;

    Vec3 base_camera_for(const Sequence& seq) const;
};

// One view of a complete sequence: trajectory + occlusion culling, or the
// per-frame random-sampling baseline.
Sequence make_view(const Sequence& complete, const ViewConfig& cfg,
                   std::uint64_t seed);

// C2P: (complete, partial); C2C: (complete, complete); P2P: two
// independently seeded partial views (seed, seed+1), or one shared view.
ViewPair build_views(const Sequence& complete, Strategy strategy,
                     const ViewConfig& cfg, std::uint64_t seed,
                     bool p2p_shared);

// Linear warmup to base_lr over warmup_epochs, constant afterwards.
double warmup_lr(std::size_t epoch, double base_lr, std::size_t warmup_epochs);

struct TrainConfig {
    double base_lr = 0.01;
    std::size_t warmup_epochs = 10;
    double momentum = 0.9;
    std::size_t epochs = 50;
    std::size_t batch_size = 2;
    std::size_t checkpoint_interval = 0;  // epochs; 0 = final only

    void validate() const;
};

// SGD with classic momentum; velocity buffers keyed by parameter name.
class Sgd {
public:
    explicit Sgd(double momentum) : momentum_(momentum) {}

    void step(ParamSet& params, double lr);

    // Velocity state as named tensors (for checkpointing).
    ParamSet state() const;
    void load_state(const ParamSet& saved);

private:
    double momentum_;
    std::vector<std::pair<std::string, std::vector<double>>> velocity_;

    std::vector<double>& velocity_for(const std::string& name,
                                      std::size_t size);
};

// The pretraining loop: builds views per strategy, forwards both
// branches, evaluates the combined objective, and applies SGD to the
// student, predictors, and (per teacher_mode) the teacher.
class DistillTrainer {
public:
    DistillTrainer(const EncoderConfig& enc_cfg, const DistillConfig& distill,
                   const TrainConfig& train, const ViewConfig& views,
                   std::uint64_t seed);

    // One optimizer step over a batch of complete sequences. Throws
    // NumericError and leaves all state untouched if the loss is not
    // finite.
    LossBreakdown train_step(const std::vector<const Sequence*>& batch,
                             double lr, std::uint64_t view_seed_base);

    // Runs cfg.epochs epochs over the dataset, appending one CSV row
    // per step to metrics ("epoch,step,lr,L_geo,L_time,L_total") when a
    // stream is given. checkpoint_path, when set, receives C2PW dumps.
    LossBreakdown run(const std::vector<Sequence>& dataset,
                      std::ostream* metrics,
                      const std::string& checkpoint_path = "");

    // Mean L_total per completed epoch, in epoch order.
    const std::vector<double>& epoch_means() const { return epoch_means_; }

    Encoder& teacher() { return *teacher_; }
    Encoder& student() { return *student_; }
    const Encoder& student() const { return *student_; }
    PredictorBank& predictors() { return *predictors_; }

    // Full trainable + optimizer + progress state, for checkpoints.
    ParamSet checkpoint_state() const;
    void save(const std::string& path) const;
    void resume(const std::string& path);

    std::size_t step_count() const { return step_; }
    std::size_t epochs_done() const { return epochs_done_; }

private:
    LossBreakdown evaluate_batch(const std::vector<const Sequence*>& batch,
                                 std::uint64_t view_seed_base,
                                 ag::Tensor* total_out);
    void apply_ema();

    EncoderConfig enc_cfg_;
    DistillConfig distill_;
    TrainConfig train_;
    ViewConfig views_;
    std::uint64_t seed_;
    std::unique_ptr<Encoder> teacher_;
    std::unique_ptr<Encoder> student_;
    std::unique_ptr<PredictorBank> predictors_;
    Sgd opt_;
    std::size_t step_ = 0;
    std::size_t epochs_done_ = 0;
    std::vector<double> epoch_means_;
};

// Writes one metrics row; shared so logs are byte-stable everywhere.
void write_metrics_row(std::ostream& os, std::size_t epoch, std::size_t step,
                       double lr, const LossBreakdown& loss);

}  // namespace c2p
