#include "c2p/distill.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "c2p/checkpoint.hpp"
#include "c2p/rng.hpp"

namespace c2p {

namespace {

constexpr std::uint64_t kTeacherTag = 0x7EAC4E21u;
constexpr std::uint64_t kStudentTag = 0x57D0E3A7u;
constexpr std::uint64_t kPredictorTag = 0x9D1C70B5u;
constexpr std::uint64_t kOrderTag = 0x05DE27u;

ag::Tensor logsumexp(const ag::Tensor& v) {
    ag::Tensor m = ag::max_pool(v, 0);
    ag::Tensor e = ag::exp(ag::sub(v, ag::broadcast_scalar(m, v.shape())));
    return ag::add(m, ag::log(ag::sum(e)));
}

// Pool rows scored against a [1, d] anchor, scaled by 1/tau -> rank-1.
ag::Tensor scaled_scores(const ag::Tensor& anchor, const ag::Tensor& pool,
                         double tau) {
    ag::Tensor s = ag::matmul(pool, ag::transpose(anchor));
    return ag::reshape(ag::mul(s, 1.0 / tau), {pool.shape()[0]});
}

// One InfoNCE term: -log(exp(pos) / sum(exp(negatives))) in literal mode;
// standard mode adds the positive back into the denominator.
ag::Tensor infonce_term(const ag::Tensor& pos_score,
                        const ag::Tensor& neg_scores, DenominatorMode mode) {
    ag::Tensor denom_scores =
        mode == DenominatorMode::Standard
            ? ag::concat({neg_scores, ag::reshape(pos_score, {1})}, 0)
            : neg_scores;
    return ag::sub(logsumexp(denom_scores), pos_score);
}

// Teacher rows outside the window plus batch extras, as one [n, d] pool.
ag::Tensor negative_rows(const FeatureSequence& teacher, std::size_t i,
                         const WindowSpec& window,
                         const std::vector<ag::Tensor>& extras) {
    std::vector<ag::Tensor> parts;
    std::vector<std::size_t> negs =
        negative_pool(i, window, teacher.shape()[0]);
    if (!negs.empty()) parts.push_back(ag::gather_rows(teacher, negs));
    for (const ag::Tensor& e : extras) parts.push_back(e);
    if (parts.empty())
        throw ConfigError("degenerate batch: empty negative pool at frame " +
                          std::to_string(i));
    return parts.size() == 1 ? parts[0] : ag::concat(parts, 0);
}

void check_feature_pair(const FeatureSequence& student,
                        const FeatureSequence& teacher, const char* op) {
    if (student.rank() != 2 || teacher.rank() != 2 ||
        student.shape() != teacher.shape())
        throw ConfigError(std::string(op) +
                          ": student/teacher feature shape mismatch");
}

}  // namespace

// ---- WindowSpec ----

WindowSpec WindowSpec::parse(const std::string& text) {
    if (text == "1") return window1();
    if (text == "3") return window3();
    if (text == "5") return window5();
    if (text == "pm2") return plus_minus_2();
    WindowSpec w;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        int v;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            throw ConfigError("window: cannot parse offset '" + tok + "'");
        }
        if (used != tok.size())
            throw ConfigError("window: cannot parse offset '" + tok + "'");
        w.offsets.push_back(v);
    }
    w.validate();
    return w;
}

void WindowSpec::validate() const {
    if (offsets.empty() || !contains(0))
        throw ConfigError("window: offsets must contain 0");
    if (!std::is_sorted(offsets.begin(), offsets.end()))
        throw ConfigError("window: offsets must be ascending");
    if (std::adjacent_find(offsets.begin(), offsets.end()) != offsets.end())
        throw ConfigError("window: duplicate offsets");
}

bool WindowSpec::contains(int offset) const {
    return std::find(offsets.begin(), offsets.end(), offset) != offsets.end();
}

std::vector<int> WindowSpec::nonzero_offsets() const {
    std::vector<int> out;
    for (int o : offsets)
        if (o != 0) out.push_back(o);
    return out;
}

std::string WindowSpec::str() const {
    std::string s;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(offsets[i]);
    }
    return s;
}

// ---- DistillConfig ----

void DistillConfig::validate() const {
    if (!(tau > 0.0)) throw ConfigError("distill: tau must be positive");
    if (std::fabs(alpha1 + alpha2 - 1.0) > 1e-12)
        throw ConfigError("distill: alpha1 + alpha2 must equal 1");
    if (alpha1 < 0.0 || alpha2 < 0.0)
        throw ConfigError("distill: loss weights must be non-negative");
    window.validate();
    std::vector<int> nz = window.nonzero_offsets();
    if (offset_weights.size() != nz.size())
        throw ConfigError("distill: need one offset weight per nonzero window offset");
    double sum = 0.0;
    for (double w : offset_weights) {
        if (w < 0.0) throw ConfigError("distill: offset weights must be non-negative");
        sum += w;
    }
    if (!nz.empty() && std::fabs(sum - alpha2) > 1e-12)
        throw ConfigError("distill: offset weights must sum to alpha2");
    if (teacher_mode == TeacherMode::Ema &&
        (ema_decay < 0.0 || ema_decay >= 1.0))
        throw ConfigError("distill: ema_decay must be in [0, 1)");
}

void DistillConfig::reset_offset_weights() {
    std::vector<int> nz = window.nonzero_offsets();
    offset_weights.assign(nz.size(),
                          nz.empty() ? 0.0
                                     : alpha2 / static_cast<double>(nz.size()));
}

double DistillConfig::offset_weight(int offset) const {
    std::vector<int> nz = window.nonzero_offsets();
    for (std::size_t i = 0; i < nz.size(); ++i)
        if (nz[i] == offset) return offset_weights[i];
    throw ConfigError("distill: offset " + std::to_string(offset) +
                      " not in window");
}

// ---- losses ----

std::vector<std::size_t> negative_pool(std::size_t i, const WindowSpec& window,
                                       std::size_t L) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < L; ++j) {
        long long delta =
            static_cast<long long>(j) - static_cast<long long>(i);
        if (delta < INT_MIN || delta > INT_MAX ||
            !window.contains(static_cast<int>(delta)))
            out.push_back(j);
    }
    return out;
}

ag::Tensor geo_loss(const FeatureSequence& student,
                    const FeatureSequence& teacher, const DistillConfig& cfg,
                    const std::vector<ag::Tensor>& extra_negatives,
                    std::vector<double>* per_frame) {
    check_feature_pair(student, teacher, "geo_loss");
    const std::size_t L = student.shape()[0];
    if (per_frame) per_frame->clear();
    ag::Tensor acc = ag::Tensor::scalar_value(0.0);
    for (std::size_t i = 0; i < L; ++i) {
        ag::Tensor anchor = ag::gather_rows(student, {i});
        ag::Tensor pos = ag::mul(
            ag::sum(ag::mul(anchor, ag::gather_rows(teacher, {i}))),
            1.0 / cfg.tau);
        ag::Tensor negs =
            negative_rows(teacher, i, cfg.window, extra_negatives);
        ag::Tensor term =
            infonce_term(pos, scaled_scores(anchor, negs, cfg.tau),
                         cfg.denominator);
        if (per_frame) per_frame->push_back(term.scalar());
        acc = ag::add(acc, term);
    }
    return ag::mul(acc, 1.0 / static_cast<double>(L));
}

ag::Tensor time_loss(const FeatureSequence& student,
                     const FeatureSequence& teacher,
                     const PredictorBank& predictors, const DistillConfig& cfg,
                     const std::vector<ag::Tensor>& extra_negatives,
                     std::vector<double>* per_frame) {
    check_feature_pair(student, teacher, "time_loss");
    const std::size_t L = student.shape()[0];
    std::vector<int> nz = cfg.window.nonzero_offsets();
    if (per_frame) per_frame->assign(L, 0.0);
    if (nz.empty()) return ag::Tensor::scalar_value(0.0);
    for (int o : nz)
        if (std::find(predictors.offsets().begin(), predictors.offsets().end(),
                      o) == predictors.offsets().end())
            throw ConfigError("time_loss: predictor bank missing offset " +
                              std::to_string(o));

    // Relative weights; even fallback when alpha2 is 0 keeps the term
    // defined (it is then multiplied by 0 anyway).
    double wsum = 0.0;
    for (double w : cfg.offset_weights) wsum += w;
    std::vector<double> rel(nz.size());
    for (std::size_t oi = 0; oi < nz.size(); ++oi)
        rel[oi] = wsum > 0.0 ? cfg.offset_weights[oi] / wsum
                             : 1.0 / static_cast<double>(nz.size());

    // All anchors through each head at once, then normalized per row.
    std::vector<ag::Tensor> predicted(nz.size());
    for (std::size_t oi = 0; oi < nz.size(); ++oi)
        predicted[oi] =
            ag::l2_normalize(predictors.forward(student, nz[oi]), 1);

    ag::Tensor acc = ag::Tensor::scalar_value(0.0);
    for (std::size_t i = 0; i < L; ++i) {
        double valid_weight = 0.0;
        for (std::size_t oi = 0; oi < nz.size(); ++oi) {
            long long target = static_cast<long long>(i) + nz[oi];
            if (target >= 0 && target < static_cast<long long>(L))
                valid_weight += rel[oi];
        }
        if (valid_weight == 0.0) continue;  // no reachable offsets (tiny L)
        ag::Tensor frame_term;
        bool has_term = false;
        for (std::size_t oi = 0; oi < nz.size(); ++oi) {
            long long target = static_cast<long long>(i) + nz[oi];
            if (target < 0 || target >= static_cast<long long>(L)) continue;
            ag::Tensor anchor = ag::gather_rows(predicted[oi], {i});
            ag::Tensor pos = ag::mul(
                ag::sum(ag::mul(anchor,
                                ag::gather_rows(
                                    teacher,
                                    {static_cast<std::size_t>(target)}))),
                1.0 / cfg.tau);
            ag::Tensor negs =
                negative_rows(teacher, i, cfg.window, extra_negatives);
            ag::Tensor term = ag::mul(
                infonce_term(pos, scaled_scores(anchor, negs, cfg.tau),
                             cfg.denominator),
                rel[oi] / valid_weight);
            frame_term = has_term ? ag::add(frame_term, term) : term;
            has_term = true;
        }
        if (per_frame) (*per_frame)[i] = frame_term.scalar();
        acc = ag::add(acc, frame_term);
    }
    return ag::mul(acc, 1.0 / static_cast<double>(L));
}

LossBreakdown total_loss(double geo, double time, const DistillConfig& cfg) {
    cfg.validate();
    LossBreakdown out;
    out.geo = geo;
    out.time = time;
    out.total = cfg.alpha1 * geo + cfg.alpha2 * time;
    return out;
}

// ---- views ----

Vec3 ViewConfig::base_camera_for(const Sequence& seq) const {
    if (seq.frames.empty() || seq.frames.front().empty())
        throw ConfigError("view: sequence has no points to center on");
    Vec3 center = centroid(seq.frames.front());
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    double az = base_azimuth_degrees * kDegToRad;
    double el = base_elevation_degrees * kDegToRad;
    return center + Vec3{std::cos(el) * std::cos(az),
                         std::cos(el) * std::sin(az), std::sin(el)} *
                        base_distance;
}

Sequence make_view(const Sequence& complete, const ViewConfig& cfg,
                   std::uint64_t seed) {
    if (cfg.use_random_sampling) {
        Sequence out;
        out.id = complete.id;
        out.labels = complete.labels;
        out.frames.reserve(complete.length());
        for (std::size_t i = 0; i < complete.length(); ++i)
            out.frames.push_back(random_sample(complete.frames[i],
                                               cfg.random_keep_ratio,
                                               splitmix64(seed ^ i)));
        return out;
    }
    return generate_partial_sequence(complete, cfg.base_camera_for(complete),
                                     cfg.trajectory, seed)
        .sequence;
}

ViewPair build_views(const Sequence& complete, Strategy strategy,
                     const ViewConfig& cfg, std::uint64_t seed,
                     bool p2p_shared) {
    switch (strategy) {
        case Strategy::C2C:
            return {complete, complete};
        case Strategy::C2P:
            return {complete, make_view(complete, cfg, seed)};
        case Strategy::P2P: {
            Sequence first = make_view(complete, cfg, seed);
            if (p2p_shared) return {first, first};
            return {std::move(first), make_view(complete, cfg, seed + 1)};
        }
    }
    throw ConfigError("build_views: unknown strategy");
}

// ---- optimizer and trainer ----

double warmup_lr(std::size_t epoch, double base_lr,
                 std::size_t warmup_epochs) {
    if (epoch < warmup_epochs)
        return base_lr * static_cast<double>(epoch + 1) /
               static_cast<double>(warmup_epochs);
    return base_lr;
}

void TrainConfig::validate() const {
    if (!(base_lr >= 0.0)) throw ConfigError("train: lr must be >= 0");
    if (momentum < 0.0 || momentum >= 1.0)
        throw ConfigError("train: momentum must be in [0, 1)");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
}

std::vector<double>& Sgd::velocity_for(const std::string& name,
                                       std::size_t size) {
    for (auto& [n, v] : velocity_)
        if (n == name) return v;
    velocity_.emplace_back(name, std::vector<double>(size, 0.0));
    return velocity_.back().second;
}

void Sgd::step(ParamSet& params, double lr) {
    for (auto& [name, t] : params) {
        auto g = t.grad();
        auto v = t.mutable_data();
        std::vector<double>& vel = velocity_for(name, v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            vel[i] = momentum_ * vel[i] + g[i];
            v[i] -= lr * vel[i];
        }
    }
}

ParamSet Sgd::state() const {
    ParamSet out;
    for (const auto& [name, v] : velocity_)
        out.add(name, ag::Tensor::from_data({v.size()}, v));
    return out;
}

void Sgd::load_state(const ParamSet& saved) {
    velocity_.clear();
    for (const auto& [name, t] : saved) {
        auto d = t.data();
        velocity_.emplace_back(name, std::vector<double>(d.begin(), d.end()));
    }
}

DistillTrainer::DistillTrainer(const EncoderConfig& enc_cfg,
                               const DistillConfig& distill,
                               const TrainConfig& train,
                               const ViewConfig& views, std::uint64_t seed)
    : enc_cfg_(enc_cfg), distill_(distill), train_(train), views_(views),
      seed_(seed), opt_(train.momentum) {
    enc_cfg_.validate();
    distill_.validate();
    train_.validate();
    teacher_ = std::make_unique<Encoder>(enc_cfg_, distill_.symmetric_teacher,
                                         splitmix64(seed ^ kTeacherTag));
    student_ = std::make_unique<Encoder>(enc_cfg_, true,
                                         splitmix64(seed ^ kStudentTag));
    predictors_ = std::make_unique<PredictorBank>(
        distill_.window.nonzero_offsets(), distill_.framewise_predictors,
        enc_cfg_.feature_dim, splitmix64(seed ^ kPredictorTag));
}

LossBreakdown DistillTrainer::evaluate_batch(
    const std::vector<const Sequence*>& batch, std::uint64_t view_seed_base,
    ag::Tensor* total_out) {
    if (batch.empty()) throw ConfigError("train_step: empty batch");
    const std::size_t B = batch.size();

    std::vector<FeatureSequence> teacher_feats(B), student_feats(B);
    for (std::size_t b = 0; b < B; ++b) {
        ViewPair views = build_views(*batch[b], distill_.strategy, views_,
                                     splitmix64(view_seed_base ^ b),
                                     distill_.p2p_shared_view);
        if (distill_.teacher_mode == TeacherMode::Joint) {
            teacher_feats[b] = teacher_->forward(views.teacher_input);
        } else {
            ag::NoGradGuard ng;
            teacher_feats[b] = teacher_->forward(views.teacher_input);
        }
        student_feats[b] = student_->forward(views.student_input);
    }

    bool has_time = !distill_.window.nonzero_offsets().empty();
    ag::Tensor geo_acc = ag::Tensor::scalar_value(0.0);
    ag::Tensor time_acc = ag::Tensor::scalar_value(0.0);
    for (std::size_t b = 0; b < B; ++b) {
        std::vector<ag::Tensor> extras;
        if (distill_.scope == NegativeScope::Batch)
            for (std::size_t other = 0; other < B; ++other)
                if (other != b) extras.push_back(teacher_feats[other]);
        geo_acc = ag::add(geo_acc, geo_loss(student_feats[b], teacher_feats[b],
                                            distill_, extras));
        if (has_time)
            time_acc = ag::add(
                time_acc, time_loss(student_feats[b], teacher_feats[b],
                                    *predictors_, distill_, extras));
    }
    double inv_b = 1.0 / static_cast<double>(B);
    ag::Tensor geo_mean = ag::mul(geo_acc, inv_b);
    ag::Tensor time_mean = ag::mul(time_acc, inv_b);
    ag::Tensor total = ag::add(ag::mul(geo_mean, distill_.alpha1),
                               ag::mul(time_mean, distill_.alpha2));

    if (total_out) *total_out = total;
    LossBreakdown out;
    out.geo = geo_mean.scalar();
    out.time = time_mean.scalar();
    out.total = total.scalar();
    return out;
}

LossBreakdown DistillTrainer::train_step(
    const std::vector<const Sequence*>& batch, double lr,
    std::uint64_t view_seed_base) {
    ag::Tensor total;
    LossBreakdown out = evaluate_batch(batch, view_seed_base, &total);
    if (!std::isfinite(out.total))
        throw NumericError("train_step: non-finite loss");

    teacher_->params().zero_grad();
    student_->params().zero_grad();
    predictors_->params().zero_grad();
    if (total.requires_grad()) ag::backward(total);

    // Prefixed names keep teacher/student velocity buffers apart.
    ParamSet updatable;
    updatable.adopt(student_->params(), "student.");
    updatable.adopt(predictors_->params(), "predictor.");
    if (distill_.teacher_mode == TeacherMode::Joint)
        updatable.adopt(teacher_->params(), "teacher.");
    opt_.step(updatable, lr);
    if (distill_.teacher_mode == TeacherMode::Ema) apply_ema();
    return out;
}

void DistillTrainer::apply_ema() {
    double decay = distill_.ema_decay;
    for (auto& [name, t] : teacher_->params()) {
        if (!student_->params().contains(name)) continue;
        auto src = student_->params().at(name).data();
        auto dst = t.mutable_data();
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i] = decay * dst[i] + (1.0 - decay) * src[i];
    }
}

LossBreakdown DistillTrainer::run(const std::vector<Sequence>& dataset,
                                  std::ostream* metrics,
                                  const std::string& checkpoint_path) {
    if (dataset.empty()) throw ConfigError("train: empty dataset");
    LossBreakdown last;
    for (std::size_t epoch = epochs_done_; epoch < train_.epochs; ++epoch) {
        double lr = warmup_lr(epoch, train_.base_lr, train_.warmup_epochs);
        Pcg32 order_rng(splitmix64(splitmix64(seed_ ^ kOrderTag) ^ epoch));
        std::vector<std::size_t> order = order_rng.permutation(dataset.size());

        double epoch_total = 0.0;
        std::size_t epoch_steps = 0;
        for (std::size_t start = 0; start < order.size();
             start += train_.batch_size) {
            std::size_t end =
                std::min(order.size(), start + train_.batch_size);
            std::vector<const Sequence*> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i)
                batch.push_back(&dataset[order[i]]);
            std::uint64_t view_seed =
                splitmix64(splitmix64(seed_ ^ 0xBA7C4u) ^ step_);
            last = train_step(batch, lr, view_seed);
            if (metrics) write_metrics_row(*metrics, epoch, step_, lr, last);
            epoch_total += last.total;
            ++epoch_steps;
            ++step_;
        }
        epochs_done_ = epoch + 1;
        epoch_means_.push_back(epoch_total /
                               static_cast<double>(epoch_steps));
        if (!checkpoint_path.empty() && train_.checkpoint_interval > 0 &&
            epochs_done_ % train_.checkpoint_interval == 0)
            save(checkpoint_path);
    }
    if (!checkpoint_path.empty()) save(checkpoint_path);
    return last;
}

ParamSet DistillTrainer::checkpoint_state() const {
    ParamSet all;
    all.adopt(teacher_->params(), "teacher.");
    all.adopt(student_->params(), "student.");
    all.adopt(predictors_->params(), "predictor.");
    ParamSet opt_state = opt_.state();
    all.adopt(opt_state, "opt.");
    all.add("meta.step",
            ag::Tensor::scalar_value(static_cast<double>(step_)));
    all.add("meta.epochs_done",
            ag::Tensor::scalar_value(static_cast<double>(epochs_done_)));
    return all;
}

void DistillTrainer::save(const std::string& path) const {
    write_checkpoint(path, checkpoint_state());
}

void DistillTrainer::resume(const std::string& path) {
    ParamSet saved = read_checkpoint(path);
    ParamSet live;
    live.adopt(teacher_->params(), "teacher.");
    live.adopt(student_->params(), "student.");
    live.adopt(predictors_->params(), "predictor.");
    load_into(live, saved);

    ParamSet opt_state;
    for (const auto& [name, t] : saved)
        if (name.starts_with("opt.")) opt_state.add(name.substr(4), t);
    opt_.load_state(opt_state);

    step_ = static_cast<std::size_t>(saved.at("meta.step").scalar());
    epochs_done_ =
        static_cast<std::size_t>(saved.at("meta.epochs_done").scalar());
}

void write_metrics_row(std::ostream& os, std::size_t epoch, std::size_t step,
                       double lr, const LossBreakdown& loss) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.12g,%.12g,%.12g,%.12g\n", epoch,
                  step, lr, loss.geo, loss.time, loss.total);
    os << buf;
}

}  // namespace c2p
