#include "qgen/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qgen/resources.hpp"

namespace qgen {

namespace fs = std::filesystem;

nlohmann::json ExperimentSpec::to_json() const {
    nlohmann::json j = train.to_json();
    j["out_dir"] = out_dir;
    j["repeats"] = repeats;
    j["save_samples"] = save_samples;
    j["save_params"] = save_params;
    j["save_histograms"] = save_histograms;
    j["sample_count"] = sample_count;
    return j;
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
    std::vector<std::string> problems;
    ExperimentSpec spec;
    try {
        spec.train = TrainConfig::from_json(j);
    } catch (const std::exception& e) {
        problems.emplace_back(e.what());
    }
    spec.out_dir = j.value("out_dir", std::string{});
    spec.repeats = j.value("repeats", 5);
    spec.save_samples = j.value("save_samples", true);
    spec.save_params = j.value("save_params", true);
    spec.save_histograms = j.value("save_histograms", false);
    spec.sample_count = j.value("sample_count", 10000);

    if (spec.repeats < 1) {
        problems.push_back("repeats must be >= 1");
    }
    if (spec.sample_count < 1) {
        problems.push_back("sample_count must be >= 1");
    }
    if (spec.train.epochs < 1) {
        problems.push_back("epochs must be >= 1");
    }
    if (spec.train.batch_size < 1) {
        problems.push_back("batch_size must be >= 1");
    }
    if (spec.train.dataset.n > 0 && spec.train.batch_size > spec.train.dataset.n) {
        problems.push_back("batch_size must not exceed the dataset size");
    }
    if (spec.train.model != ModelKind::ClassicalGan &&
        spec.train.architecture != CircuitKind::Continuous && spec.train.precision < 2) {
        problems.push_back("precision must be >= 2 for discrete architectures");
    }
    if (spec.train.n_blocks < 1) {
        problems.push_back("n_blocks must be >= 1");
    }
    if (spec.train.dataset.name == DatasetName::Stocks && spec.train.dataset.csv_paths.empty()) {
        problems.push_back("stocks dataset requires csv_paths");
    }
    if (!problems.empty()) {
        std::string message = "invalid experiment spec:";
        for (const auto& p : problems) {
            message += "\n  - " + p;
        }
        throw std::invalid_argument(message);
    }
    return spec;
}

void atomic_write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write file: " + tmp);
        }
        out << content;
    }
    fs::rename(tmp, path);
}

namespace {

std::string json_line(const nlohmann::json& j) {
    return j.dump() + "\n";
}

nlohmann::json trace_summary_json(const TrainTrace& trace) {
    nlohmann::json j;
    j["best_kl"] = trace.best_kl;
    j["epochs_recorded"] = trace.records.size();
    j["discriminator_collapse"] = trace.discriminator_collapse;
    j["nonfinite_flag"] = trace.nonfinite_flag;
    if (!trace.block_start_kl.empty()) {
        j["block_start_kl"] = trace.block_start_kl;
    }
    return j;
}

std::string histogram_csv(const Histogram& h) {
    std::ostringstream out;
    for (int m = 0; m < h.dim; ++m) {
        out << "cell" << (m + 1) << ',';
    }
    out << "probability\n";
    std::vector<std::size_t> idx(static_cast<std::size_t>(h.dim), 0);
    char buf[40];
    for (std::size_t flat = 0; flat < h.n_cells(); ++flat) {
        std::size_t rem = flat;
        for (int m = h.dim - 1; m >= 0; --m) {
            idx[static_cast<std::size_t>(m)] = rem % static_cast<std::size_t>(h.bins_per_dim);
            rem /= static_cast<std::size_t>(h.bins_per_dim);
        }
        for (int m = 0; m < h.dim; ++m) {
            out << idx[static_cast<std::size_t>(m)] << ',';
        }
        std::snprintf(buf, sizeof(buf), "%.17g", h.probs[flat]);
        out << buf << '\n';
    }
    return out.str();
}

std::string points_csv_string(const Matrix& points) {
    std::ostringstream out;
    for (std::size_t j = 0; j < points.cols; ++j) {
        out << (j ? ",x" : "x") << (j + 1);
    }
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < points.rows; ++i) {
        for (std::size_t j = 0; j < points.cols; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", points(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
    return out.str();
}

} // namespace

std::string trace_to_jsonl(const TrainTrace& trace) {
    std::string out;
    for (const EpochRecord& rec : trace.records) {
        nlohmann::json j{{"epoch", rec.epoch}, {"kl", rec.kl}};
        if (trace.config_echo.value("model", "") != "qcbm") {
            j["loss_d"] = rec.loss_d;
            j["loss_g"] = rec.loss_g;
        } else {
            j["block"] = rec.block;
        }
        out += json_line(j);
    }
    return out;
}

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
    if (!spec.out_dir.empty()) {
        fs::create_directories(spec.out_dir);
    }
    const auto artifact_path = [&](const std::string& name) {
        return (fs::path(spec.out_dir) / name).string();
    };
    if (!spec.out_dir.empty()) {
        atomic_write_file(artifact_path("config.json"), spec.to_json().dump(2) + "\n");
    }

    const TrainingData data = prepare_training_data(spec.train);

    ExperimentSummary summary;
    nlohmann::json timing = nlohmann::json::array();
    for (int rep = 0; rep < spec.repeats; ++rep) {
        TrainConfig config = spec.train;
        config.seed = spec.train.seed + static_cast<std::uint64_t>(rep);
        TrainTrace trace;
        switch (config.model) {
        case ModelKind::Qcbm:
            trace = train_qcbm(config, data);
            break;
        case ModelKind::Qgan:
            trace = train_qgan(config, data);
            break;
        case ModelKind::ClassicalGan:
            trace = train_classical_gan(config, data);
            break;
        }
        summary.per_seed_best_kl.push_back(trace.best_kl);
        timing.push_back({{"seed", config.seed}, {"wall_seconds", trace.wall_seconds}});

        if (!spec.out_dir.empty()) {
            const std::string tag = "seed" + std::to_string(config.seed);
            atomic_write_file(artifact_path("trace_" + tag + ".jsonl"), trace_to_jsonl(trace));
            if (spec.save_params) {
                nlohmann::json jp = trace_summary_json(trace);
                jp["best_params"] = trace.best_params;
                atomic_write_file(artifact_path("result_" + tag + ".json"), jp.dump(2) + "\n");
            }
            if (spec.save_samples) {
                const SampleBatch samples =
                    generate_samples(config, trace, spec.sample_count, config.seed);
                atomic_write_file(artifact_path("samples_" + tag + ".csv"),
                                  points_csv_string(samples));
                if (spec.save_histograms) {
                    atomic_write_file(
                        artifact_path("histogram_" + tag + ".csv"),
                        histogram_csv(histogram(samples, spec.train.eval_precision)));
                }
            }
        }
        summary.traces.push_back(std::move(trace));
    }

    double mean = 0.0;
    for (double kl : summary.per_seed_best_kl) {
        mean += kl;
    }
    mean /= static_cast<double>(summary.per_seed_best_kl.size());
    double var = 0.0;
    for (double kl : summary.per_seed_best_kl) {
        var += (kl - mean) * (kl - mean);
    }
    var /= static_cast<double>(summary.per_seed_best_kl.size());
    summary.mean_best_kl = mean;
    summary.stddev_best_kl = std::sqrt(var);

    if (!spec.out_dir.empty()) {
        nlohmann::json js{{"per_seed_best_kl", summary.per_seed_best_kl},
                          {"mean_best_kl", summary.mean_best_kl},
                          {"stddev_best_kl", summary.stddev_best_kl},
                          {"repeats", spec.repeats},
                          {"base_seed", spec.train.seed}};
        atomic_write_file(artifact_path("summary.json"), js.dump(2) + "\n");
        // timings live outside the byte-reproducibility contract
        atomic_write_file(artifact_path("timing.json"), timing.dump(2) + "\n");
    }
    return summary;
}

nlohmann::json evaluate_files(const std::string& samples_csv, const std::string& reference_csv,
                              int precision, const std::string& transform_json_path) {
    Matrix samples = read_points_csv(samples_csv);
    Matrix reference = read_points_csv(reference_csv);
    if (samples.cols != reference.cols) {
        throw std::invalid_argument("evaluate: sample and reference dimensions differ");
    }
    bool transformed = false;
    if (!transform_json_path.empty()) {
        std::ifstream in(transform_json_path);
        if (!in) {
            throw std::runtime_error("cannot open transform model: " + transform_json_path);
        }
        nlohmann::json j;
        in >> j;
        const TransformModel model = TransformModel::from_json(j);
        samples = model.forward(samples);
        reference = model.forward(reference);
        transformed = true;
    }
    const Histogram p = histogram(samples, precision);
    const Histogram q = histogram(reference, precision);
    const double kl_smoothed = kl_divergence(q, p, 1e-8);
    const double kl_raw = kl_divergence(q, p, 0.0);
    return nlohmann::json{{"kl", kl_smoothed},
                          {"kl_unsmoothed", kl_raw},
                          {"epsilon", 1e-8},
                          {"precision", precision},
                          {"transformed", transformed},
                          {"n_samples", samples.rows},
                          {"n_reference", reference.rows}};
}

std::string resources_csv(int d_min, int d_max, const std::vector<int>& precisions,
                          int n_blocks_continuous, int n_blocks_discrete, int shots_per_sample) {
    std::ostringstream out;
    out << "# runtime unit: abstract depth time-steps per generated sample\n";
    out << "# runtime_crossover_r(N_s=" << shots_per_sample << ", N_b_cont=" << n_blocks_continuous
        << ", N_b_disc=" << n_blocks_discrete << ") = "
        << runtime_crossover_r(shots_per_sample, n_blocks_continuous, n_blocks_discrete) << "\n";
    out << "architecture,d,r,n_blocks,n_shots,qubits,init_gates,init_depth,gates_per_block,"
           "depth_per_block,runtime_per_sample\n";
    const auto emit = [&](const ResourceEstimate& est) {
        out << circuit_kind_name(est.kind) << ',' << est.dim << ',' << est.precision << ','
            << est.n_blocks << ',' << est.shots_per_sample << ',' << est.qubits << ','
            << est.init_gates << ',' << est.init_depth << ',' << est.gates_per_block << ','
            << est.depth_per_block << ',' << est.runtime_per_sample << '\n';
    };
    for (int d = d_min; d <= d_max; ++d) {
        emit(estimate(CircuitKind::Continuous, d, 0, n_blocks_continuous, shots_per_sample));
        for (int r : precisions) {
            emit(estimate(CircuitKind::DiscreteStandard, d, r, n_blocks_discrete, 1));
            emit(estimate(CircuitKind::DiscreteCopula, d, r, n_blocks_discrete, 1));
        }
    }
    return out.str();
}

} // namespace qgen
