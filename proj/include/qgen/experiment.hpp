#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qgen/training.hpp"

namespace qgen {

/// A full experiment: one training configuration repeated over several seeds
/// (seed_i = base seed + i), with artifacts written to a run directory.
struct ExperimentSpec {
    TrainConfig train;
    std::string out_dir;
    int repeats = 5;
    bool save_samples = true;
    bool save_params = true;
    bool save_histograms = false;
    int sample_count = 10000; // generated-sample CSV size per seed

    nlohmann::json to_json() const; // defaults materialized
    /// Throws std::invalid_argument listing every bad field in one message.
    static ExperimentSpec from_json(const nlohmann::json& j);
};

struct ExperimentSummary {
    std::vector<double> per_seed_best_kl;
    double mean_best_kl = 0.0;
    double stddev_best_kl = 0.0;
    std::vector<TrainTrace> traces;
};

/// Runs every repeat and writes: config.json (resolved spec), per-seed
/// trace_seed<i>.jsonl + samples_seed<i>.csv (+ params, histogram), and
/// summary.json. Every artifact is derived from the spec's seeds only, so
/// re-running reproduces the directory byte for byte; wall-clock timings go
/// to a separate timing.json outside that contract.
ExperimentSummary run_experiment(const ExperimentSpec& spec);

/// KL(reference || samples) with both files histogrammed at 2^r bins per
/// dimension; points are forward-transformed first when a transform model
/// JSON is supplied.
nlohmann::json evaluate_files(const std::string& samples_csv, const std::string& reference_csv,
                              int precision, const std::string& transform_json_path = "");

/// Resource-estimate grid as CSV rows (plus the runtime crossover note).
std::string resources_csv(int d_min, int d_max, const std::vector<int>& precisions,
                          int n_blocks_continuous, int n_blocks_discrete, int shots_per_sample);

/// Writes `content` through a temp file + rename so readers never observe a
/// partially written artifact.
void atomic_write_file(const std::string& path, const std::string& content);

std::string trace_to_jsonl(const TrainTrace& trace);

} // namespace qgen
