#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgen/circuits.hpp"
#include "qgen/datasets.hpp"
#include "qgen/metrics.hpp"
#include "qgen/transforms.hpp"

namespace qgen {

enum class ModelKind { Qcbm, Qgan, ClassicalGan };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct DatasetSpec {
    DatasetName name = DatasetName::X;
    int dim = 2;
    std::int64_t n = 50000;
    std::uint64_t seed = 1;
    std::vector<std::string> csv_paths; // stocks only
};

struct OptimizerConfig {
    // CMA-ES (QCBM)
    double sigma0 = 0.1;
    int population = 0; // 0 = 4 + floor(3 ln dim)
    double kl_tolerance = 1e-5;
    int patience = 20; // generations of |dKL| < kl_tolerance before stopping
    // Adam (QGAN / classical GAN)
    double lr_generator = 1e-3;
    double lr_discriminator = 1e-3;
    double qgan_init_scale = 0.1; // uniform(-s, s) cold-start for circuit angles
    int disc_steps_per_gen_step = 1;
};

struct TrainConfig {
    ModelKind model = ModelKind::Qcbm;
    CircuitKind architecture = CircuitKind::DiscreteCopula; // quantum models
    TransformKind transform = TransformKind::Pit;
    DatasetSpec dataset;
    int precision = 4; // r, discrete architectures
    int n_blocks = 1;
    int epochs = 400;
    int batch_size = 1000;
    int batches_per_epoch = 0; // 0 = dataset size / batch size (at least 1)
    int eval_precision = 4;    // KL evaluation grid
    int eval_samples = 0;      // 0 = batch_size
    std::uint64_t seed = 1;
    OptimizerConfig optimizer;
    // classical GAN topology
    int classical_hidden_width = 32;
    int classical_hidden_layers = 2;
    int classical_noise_dim = 8;

    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
};

struct EpochRecord {
    int epoch = 0;
    int block = 1;  // QCBM block counter; always 1 otherwise
    double kl = 0.0;
    double loss_d = 0.0; // adversarial models only
    double loss_g = 0.0;
};

struct TrainTrace {
    std::vector<EpochRecord> records;
    std::vector<double> block_start_kl; // QCBM: warm-start loss entering each block
    std::vector<double> best_params;    // circuit angles or flat generator weights
    double best_kl = 0.0;
    bool discriminator_collapse = false;
    bool nonfinite_flag = false;
    double wall_seconds = 0.0; // informational; excluded from persisted traces
    nlohmann::json config_echo;
};

/// Dataset -> transform -> target histogram, shared by every trainer.
struct TrainingData {
    RawDataset raw;
    TransformModel transform;
    SampleBatch transformed;
    Histogram target; // Q on the eval grid
};

TrainingData prepare_training_data(const TrainConfig& config);

/// Parameter-shift gradient of E[f] = sum_i P_i(theta) f(i) for a discrete
/// template, computed exactly from the shifted state vectors.
std::vector<double> psr_gradient(const CircuitTemplate& tmpl, std::span<const double> params,
                                 const std::function<double(std::uint64_t)>& observable);

/// Parameter-shift gradient of f(s(theta, z)) for the continuous template.
/// Exact for observables linear in the output coordinates (each coordinate
/// is itself an expectation value); the QGAN chain rule only ever needs the
/// per-coordinate case below.
std::vector<double> psr_gradient(const CircuitTemplate& tmpl, std::span<const double> params,
                                 std::span<const double> noise,
                                 const std::function<double(std::span<const double>)>& observable);

/// Jacobian d s_k / d theta_j of the continuous output, dim x n_params.
Matrix psr_output_jacobian(const CircuitTemplate& tmpl, std::span<const double> params,
                           std::span<const double> noise);

TrainTrace train_qcbm(const TrainConfig& config, const TrainingData& data);
TrainTrace train_qgan(const TrainConfig& config, const TrainingData& data);
TrainTrace train_classical_gan(const TrainConfig& config, const TrainingData& data);

/// prepare_training_data + dispatch on config.model.
TrainTrace run_training(const TrainConfig& config);

/// Generates samples from a trained model in the transformed [0,1]^d space.
SampleBatch generate_samples(const TrainConfig& config, const TrainTrace& trace, int n_samples,
                             std::uint64_t seed);

} // namespace qgen
