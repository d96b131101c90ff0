#include "c2p/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "c2p/parallel.hpp"
#include "c2p/rng.hpp"

namespace c2p {

FeatureTable extract_features(const Encoder& student,
                              const std::vector<Sequence>& data) {
    FeatureTable table;
    table.dim = student.config().feature_dim;
    ag::NoGradGuard ng;
    for (std::size_t si = 0; si < data.size(); ++si) {
        const Sequence& seq = data[si];
        if (!seq.has_labels())
            throw ConfigError("extract_features: sequence " + seq.id +
                              " has no labels");
        FeatureSequence feats = student.forward(seq);
        auto fv = feats.data();
        table.features.insert(table.features.end(), fv.begin(), fv.end());
        for (std::size_t t = 0; t < seq.length(); ++t) {
            table.labels.push_back(seq.labels[t]);
            table.sequence_index.push_back(si);
        }
    }
    return table;
}

ProbeResult linear_probe(const FeatureTable& table, std::uint64_t split_seed,
                         const ProbeConfig& cfg) {
    cfg.validate();
    const std::size_t rows = table.rows();
    const std::size_t d = table.dim;
    if (rows == 0) throw ConfigError("linear_probe: empty feature table");

    std::size_t num_sequences = 0;
    for (std::size_t s : table.sequence_index)
        num_sequences = std::max(num_sequences, s + 1);
    if (num_sequences < 2)
        throw ConfigError("linear_probe: need at least 2 sequences to split");

    std::uint32_t num_classes = 0;
    for (std::uint32_t l : table.labels)
        num_classes = std::max(num_classes, l + 1);
    std::vector<bool> present(num_classes, false);
    for (std::uint32_t l : table.labels) present[l] = true;
    if (std::count(present.begin(), present.end(), true) < 2)
        throw ConfigError("linear_probe: degenerate labels (fewer than 2 classes)");

    // Sequence-level split keeps all frames of a sequence on one side.
    Pcg32 rng(splitmix64(split_seed));
    std::vector<std::size_t> perm = rng.permutation(num_sequences);
    std::size_t n_train_seq = static_cast<std::size_t>(
        std::llround(cfg.train_fraction * static_cast<double>(num_sequences)));
    n_train_seq = std::clamp<std::size_t>(n_train_seq, 1, num_sequences - 1);
    std::vector<bool> in_train(num_sequences, false);
    for (std::size_t i = 0; i < n_train_seq; ++i) in_train[perm[i]] = true;

    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t r = 0; r < rows; ++r)
        (in_train[table.sequence_index[r]] ? train_rows : test_rows)
            .push_back(r);

    // Standardize from the training split; constant dimensions pass
    // through centered.
    std::vector<double> mu(d, 0.0), sigma(d, 1.0);
    for (std::size_t r : train_rows)
        for (std::size_t j = 0; j < d; ++j)
            mu[j] += table.features[r * d + j];
    for (std::size_t j = 0; j < d; ++j)
        mu[j] /= static_cast<double>(train_rows.size());
    std::vector<double> var(d, 0.0);
    for (std::size_t r : train_rows)
        for (std::size_t j = 0; j < d; ++j) {
            double t = table.features[r * d + j] - mu[j];
            var[j] += t * t;
        }
    for (std::size_t j = 0; j < d; ++j) {
        double s = std::sqrt(var[j] / static_cast<double>(train_rows.size()));
        sigma[j] = s < 1e-12 ? 1.0 : s;
    }
    auto standardized = [&](std::size_t r, std::size_t j) {
        return (table.features[r * d + j] - mu[j]) / sigma[j];
    };

    const std::size_t C = num_classes;
    std::vector<double> W(d * C, 0.0), b(C, 0.0);
    std::vector<double> logits(C), probs(C);
    std::vector<double> gw(d * C), gb(C);
    const double inv_n = 1.0 / static_cast<double>(train_rows.size());
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        std::fill(gw.begin(), gw.end(), 0.0);
        std::fill(gb.begin(), gb.end(), 0.0);
        for (std::size_t r : train_rows) {
            for (std::size_t c = 0; c < C; ++c) logits[c] = b[c];
            for (std::size_t j = 0; j < d; ++j) {
                double x = standardized(r, j);
                const double* wrow = &W[j * C];
                for (std::size_t c = 0; c < C; ++c) logits[c] += x * wrow[c];
            }
            double m = *std::max_element(logits.begin(), logits.end());
            double z = 0.0;
            for (std::size_t c = 0; c < C; ++c) {
                probs[c] = std::exp(logits[c] - m);
                z += probs[c];
            }
            for (std::size_t c = 0; c < C; ++c) probs[c] /= z;
            probs[table.labels[r]] -= 1.0;
            for (std::size_t j = 0; j < d; ++j) {
                double x = standardized(r, j);
                double* grow = &gw[j * C];
                for (std::size_t c = 0; c < C; ++c) grow[c] += x * probs[c];
            }
            for (std::size_t c = 0; c < C; ++c) gb[c] += probs[c];
        }
        for (std::size_t i = 0; i < W.size(); ++i) W[i] -= cfg.lr * inv_n * gw[i];
        for (std::size_t c = 0; c < C; ++c) b[c] -= cfg.lr * inv_n * gb[c];
    }

    std::size_t correct = 0;
    std::vector<std::size_t> class_total(C, 0), class_correct(C, 0);
    for (std::size_t r : test_rows) {
        for (std::size_t c = 0; c < C; ++c) logits[c] = b[c];
        for (std::size_t j = 0; j < d; ++j) {
            double x = standardized(r, j);
            const double* wrow = &W[j * C];
            for (std::size_t c = 0; c < C; ++c) logits[c] += x * wrow[c];
        }
        std::size_t pred = 0;
        for (std::size_t c = 1; c < C; ++c)
            if (logits[c] > logits[pred]) pred = c;
        std::uint32_t truth = table.labels[r];
        ++class_total[truth];
        if (pred == truth) {
            ++correct;
            ++class_correct[truth];
        }
    }

    ProbeResult out;
    out.seed = split_seed;
    out.accuracy = test_rows.empty()
                       ? 0.0
                       : static_cast<double>(correct) /
                             static_cast<double>(test_rows.size());
    out.per_class_accuracy.resize(C, 0.0);
    for (std::size_t c = 0; c < C; ++c)
        if (class_total[c] > 0)
            out.per_class_accuracy[c] = static_cast<double>(class_correct[c]) /
                                        static_cast<double>(class_total[c]);
    return out;
}

std::string AblationCell::label() const {
    std::string s;
    switch (strategy) {
        case Strategy::C2P: s = "C2P"; break;
        case Strategy::C2C: s = "C2C"; break;
        case Strategy::P2P: s = "P2P"; break;
    }
    s += "_w" + window;
    s += random_view ? "_rand" : "_traj";
    s += symmetric_teacher ? "_sym" : "_asym";
    s += framewise_predictor ? "_fw" : "_single";
    return s;
}

std::vector<AblationCell> full_ablation_grid() {
    std::vector<AblationCell> cells;
    for (Strategy st : {Strategy::C2P, Strategy::C2C, Strategy::P2P})
        for (const char* w : {"1", "3", "5", "pm2"})
            for (bool rand_view : {false, true})
                for (bool sym : {false, true})
                    for (bool fw : {true, false})
                        cells.push_back({st, w, rand_view, sym, fw});
    return cells;
}

RunConfig apply_cell(const RunConfig& base, const AblationCell& cell) {
    RunConfig cfg = base;
    cfg.distill.strategy = cell.strategy;
    cfg.distill.window = WindowSpec::parse(cell.window);
    cfg.distill.reset_offset_weights();
    cfg.distill.symmetric_teacher = cell.symmetric_teacher;
    cfg.distill.framewise_predictors = cell.framewise_predictor;
    cfg.view.use_random_sampling = cell.random_view;
    cfg.validate();
    return cfg;
}

namespace {

AblationRow run_cell(const RunConfig& cfg, const std::string& label,
                     const std::vector<Sequence>& pretrain_data,
                     const std::vector<Sequence>& probe_data,
                     std::uint64_t seed, bool pretrain, bool measure_wall) {
    auto t0 = std::chrono::steady_clock::now();
    DistillTrainer trainer(cfg.encoder, cfg.distill, cfg.train, cfg.view, seed);
    double final_total = 0.0;
    if (pretrain && cfg.train.epochs > 0) {
        trainer.run(pretrain_data, nullptr);
        final_total = trainer.epoch_means().back();
    }
    FeatureTable table = extract_features(trainer.student(), probe_data);
    ProbeResult probe = linear_probe(table, seed, cfg.probe);
    probe.config_fingerprint = cfg.fingerprint();
    AblationRow row;
    row.cell_label = label;
    row.seed = seed;
    row.probe_acc = probe.accuracy;
    row.final_total = final_total;
    row.epochs = pretrain ? cfg.train.epochs : 0;
    if (measure_wall) {
        auto t1 = std::chrono::steady_clock::now();
        row.wall_seconds =
            std::chrono::duration<double>(t1 - t0).count();
    }
    return row;
}

}  // namespace

AblationReport run_ablation(const std::vector<AblationCell>& cells,
                            const RunConfig& base,
                            const std::vector<Sequence>& dataset,
                            const std::vector<std::uint64_t>& seeds,
                            std::size_t threads, bool measure_wall) {
    if (cells.empty()) throw ConfigError("run_ablation: empty grid");
    if (seeds.empty()) throw ConfigError("run_ablation: no seeds");
    struct Item {
        RunConfig cfg;
        std::string label;
        std::uint64_t seed;
    };
    std::vector<Item> items;
    for (const AblationCell& cell : cells)
        for (std::uint64_t seed : seeds)
            items.push_back({apply_cell(base, cell), cell.label(), seed});

    AblationReport report;
    report.rows.resize(items.size());
    parallel_for(items.size(), threads, [&](std::size_t i) {
        report.rows[i] = run_cell(items[i].cfg, items[i].label, dataset,
                                  dataset, items[i].seed, true, measure_wall);
    });
    return report;
}

AblationReport data_fraction_run(const std::vector<double>& fractions,
                                 const RunConfig& base,
                                 const std::vector<Sequence>& dataset,
                                 const std::vector<std::uint64_t>& seeds,
                                 std::size_t threads, bool measure_wall) {
    if (fractions.empty()) throw ConfigError("data_fraction_run: no fractions");
    if (seeds.empty()) throw ConfigError("data_fraction_run: no seeds");
    struct Item {
        double fraction;
        std::uint64_t seed;
        bool pretrained;
    };
    std::vector<Item> items;
    for (double f : fractions) {
        if (!(f > 0.0) || f > 1.0)
            throw ConfigError("data_fraction_run: fractions must be in (0, 1]");
        std::size_t count = static_cast<std::size_t>(
            std::llround(f * static_cast<double>(dataset.size())));
        if (count == 0)
            throw ConfigError("data_fraction_run: fraction yields 0 sequences");
        for (std::uint64_t seed : seeds) {
            items.push_back({f, seed, true});
            items.push_back({f, seed, false});
        }
    }

    AblationReport report;
    report.rows.resize(items.size());
    parallel_for(items.size(), threads, [&](std::size_t i) {
        const Item& item = items[i];
        std::size_t count = static_cast<std::size_t>(std::llround(
            item.fraction * static_cast<double>(dataset.size())));
        // Deterministic subset of the pretraining data, kept in dataset
        // order so fraction 1.0 reproduces the base run; the probe split
        // below depends only on the seed.
        Pcg32 rng(splitmix64(item.seed ^ 0xF4AC710E5ULL));
        std::vector<std::size_t> perm = rng.permutation(dataset.size());
        perm.resize(count);
        std::sort(perm.begin(), perm.end());
        std::vector<Sequence> subset;
        subset.reserve(count);
        for (std::size_t j : perm) subset.push_back(dataset[j]);

        char label[64];
        std::snprintf(label, sizeof label, "frac%g_%s", item.fraction,
                      item.pretrained ? "pretrained" : "random");
        report.rows[i] = run_cell(base, label, subset, dataset, item.seed,
                                  item.pretrained, measure_wall);
    });
    return report;
}

void write_report_csv(std::ostream& os, const AblationReport& report) {
    os << "cell_label,seed,probe_acc,final_L_total,epochs,wall_seconds\n";
    for (const AblationRow& row : report.rows) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%llu,%.12g,%.12g,%zu,%.3f\n",
                      row.cell_label.c_str(),
                      static_cast<unsigned long long>(row.seed), row.probe_acc,
                      row.final_total, row.epochs, row.wall_seconds);
        os << buf;
    }
}

}  // namespace c2p
