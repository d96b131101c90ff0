#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "c2p/config.hpp"

namespace c2p {

struct FeatureTable {
    std::size_t dim = 0;
    std::vector<double> features;             // [rows x dim], row-major
    std::vector<std::uint32_t> labels;        // one per row
    std::vector<std::size_t> sequence_index;  // one per row

    std::size_t rows() const { return labels.size(); }
};

// Frozen student features for every frame of every sequence, no
// gradients recorded. Sequences must carry labels.
FeatureTable extract_features(const Encoder& student,
                              const std::vector<Sequence>& data);

struct ProbeResult {
    double accuracy = 0.0;  // exactly correct / total on the held-out split
    std::vector<double> per_class_accuracy;
    std::uint64_t seed = 0;
    std::uint64_t config_fingerprint = 0;
};

// 80/20 sequence-level split, per-dimension standardization from the
// training split, multinomial logistic regression by full-batch gradient
// descent on the frozen features. Deterministic given the split seed.
ProbeResult linear_probe(const FeatureTable& table, std::uint64_t split_seed,
                         const ProbeConfig& cfg);

// One cell of the comparison grid over the method's design choices.
struct AblationCell {
    Strategy strategy = Strategy::C2P;
    std::string window = "3";  // "1", "3", "5", "pm2"
    bool random_view = false;
    bool symmetric_teacher = false;
    bool framewise_predictor = true;

    std::string label() const;
};

// strategy x window x view x teacher arch x predictor: 96 cells.
std::vector<AblationCell> full_ablation_grid();

RunConfig apply_cell(const RunConfig& base, const AblationCell& cell);

struct AblationRow {
    std::string cell_label;
    std::uint64_t seed = 0;
    double probe_acc = 0.0;
    double final_total = 0.0;  // mean L_total of the last epoch
    std::size_t epochs = 0;
    double wall_seconds = 0.0;
};

struct AblationReport {
    std::vector<AblationRow> rows;
};

// Pretrain + probe per (cell, seed), cells in parallel. wall_seconds is
// reported as 0 unless measure_wall is set, keeping the default report
// byte-reproducible.
AblationReport run_ablation(const std::vector<AblationCell>& cells,
                            const RunConfig& base,
                            const std::vector<Sequence>& dataset,
                            const std::vector<std::uint64_t>& seeds,
                            std::size_t threads, bool measure_wall = false);

// Per fraction of the dataset: pretrain on the subset then probe, and
// probe a random-init student under the same protocol. The probe split
// depends only on the seed, so it is fixed across fractions.
AblationReport data_fraction_run(const std::vector<double>& fractions,
                                 const RunConfig& base,
                                 const std::vector<Sequence>& dataset,
                                 const std::vector<std::uint64_t>& seeds,
                                 std::size_t threads,
                                 bool measure_wall = false);

// "cell_label,seed,probe_acc,final_L_total,epochs,wall_seconds"
void write_report_csv(std::ostream& os, const AblationReport& report);

}  // namespace c2p
