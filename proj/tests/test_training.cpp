#include <doctest.h>

#include <cmath>
#include <functional>

#include "helpers.hpp"
#include "qgen/training.hpp"

using namespace qgen;

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Exact expectation sum_i P_i(theta) f(i), the quantity psr_gradient
/// differentiates; used as the finite-difference baseline.
double discrete_expectation(const CircuitTemplate& tmpl, std::span<const double> params,
                            const std::function<double(std::uint64_t)>& f) {
    const auto probs = evaluate_state(tmpl, params).probabilities();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i] * f(static_cast<std::uint64_t>(i));
    }
    return acc;
}

CircuitTemplate single_rx_template() {
    CircuitTemplate tmpl;
    tmpl.kind = CircuitKind::DiscreteStandard;
    tmpl.dim = 1;
    tmpl.precision = 1;
    tmpl.n_blocks = 1;
    tmpl.n_qubits = 1;
    tmpl.n_params = 1;
    tmpl.gates_per_block = 1;
    tmpl.gates = {make_rx(0, AngleSource::param(0))};
    return tmpl;
}

TrainingData point_mass_data(int dim, int precision) {
    TrainingData data;
    data.target.dim = dim;
    data.target.bins_per_dim = 1 << precision;
    data.target.n_source_points = 1;
    std::size_t cells = 1;
    for (int m = 0; m < dim; ++m) {
        cells *= static_cast<std::size_t>(data.target.bins_per_dim);
    }
    data.target.probs.assign(cells, 0.0);
    data.target.probs[0] = 1.0;
    return data;
}

TrainingData x2d_pit_data(std::int64_t n, std::uint64_t seed, int precision) {
    TrainingData data;
    data.raw = gen_x(2, n, seed);
    data.transform = TransformModel::fit(TransformKind::Pit, data.raw.points);
    data.transformed = data.transform.forward(data.raw.points);
    data.target = histogram(data.transformed, precision);
    return data;
}

} // namespace

TEST_CASE("parameter shift of a single RX against the analytic derivative") {
    const auto tmpl = single_rx_template();
    const std::vector<double> theta{kPi / 3.0};
    // <Z> = cos(theta), so d<Z>/dtheta = -sin(theta)
    const auto z_value = [](std::uint64_t i) { return i == 0 ? 1.0 : -1.0; };
    const auto grad = psr_gradient(tmpl, theta, z_value);
    REQUIRE(grad.size() == 1);
    CHECK(grad[0] == doctest::Approx(-std::sin(kPi / 3.0)).epsilon(1e-12));
}

TEST_CASE("constant observables have zero gradient") {
    const auto tmpl = build_discrete_copula(2, 3, 1);
    Rng rng(4);
    std::vector<double> theta(static_cast<std::size_t>(tmpl.n_params));
    for (double& t : theta) {
        t = rng.uniform(-kPi, kPi);
    }
    const auto grad = psr_gradient(tmpl, theta, [](std::uint64_t) { return 0.7; });
    for (double g : grad) {
        CHECK(std::abs(g) <= 1e-12);
    }
}

TEST_CASE("parameter shift matches finite differences on a 6-qubit circuit") {
    const auto tmpl = build_discrete_standard(2, 3, 1); // 6 qubits, 16 params
    Rng rng(1001);
    std::vector<double> theta(static_cast<std::size_t>(tmpl.n_params));
    for (double& t : theta) {
        t = rng.uniform(-kPi, kPi);
    }
    std::vector<double> f_table(std::size_t{1} << tmpl.n_qubits);
    for (double& f : f_table) {
        f = rng.uniform(-2.0, 2.0);
    }
    const auto f = [&](std::uint64_t i) { return f_table[i]; };

    const auto grad = psr_gradient(tmpl, theta, f);
    const double h = 1e-5;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        std::vector<double> shifted = theta;
        shifted[k] = theta[k] + h;
        const double plus = discrete_expectation(tmpl, shifted, f);
        shifted[k] = theta[k] - h;
        const double minus = discrete_expectation(tmpl, shifted, f);
        const double fd = (plus - minus) / (2.0 * h);
        CHECK(std::abs(grad[k] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("continuous parameter shift matches finite differences for linear observables") {
    const auto tmpl = build_continuous(2, 2);
    Rng rng(2002);
    std::vector<double> theta(static_cast<std::size_t>(tmpl.n_params));
    for (double& t : theta) {
        t = rng.uniform(-kPi, kPi);
    }
    const std::vector<double> noise{0.8, -0.3};
    const std::vector<double> w{1.3, -0.4};
    const auto f = [&](std::span<const double> s) { return w[0] * s[0] + w[1] * s[1]; };

    const auto grad = psr_gradient(tmpl, theta, noise, f);
    const double h = 1e-5;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        std::vector<double> shifted = theta;
        shifted[k] = theta[k] + h;
        const double plus = f(run_continuous(tmpl, shifted, noise));
        shifted[k] = theta[k] - h;
        const double minus = f(run_continuous(tmpl, shifted, noise));
        const double fd = (plus - minus) / (2.0 * h);
        CHECK(std::abs(grad[k] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("output jacobian agrees with the scalar parameter shift") {
    const auto tmpl = build_continuous(3, 1);
    Rng rng(7);
    std::vector<double> theta(static_cast<std::size_t>(tmpl.n_params));
    for (double& t : theta) {
        t = rng.uniform(-kPi, kPi);
    }
    const std::vector<double> noise{0.1, 0.9, -1.4};
    const Matrix jac = psr_output_jacobian(tmpl, theta, noise);
    for (int c = 0; c < 3; ++c) {
        const auto project = [c](std::span<const double> s) {
            return s[static_cast<std::size_t>(c)];
        };
        const auto grad = psr_gradient(tmpl, theta, noise, project);
        for (std::size_t k = 0; k < theta.size(); ++k) {
            CHECK(jac(static_cast<std::size_t>(c), k) ==
                  doctest::Approx(grad[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("qcbm does not diverge when the start is already optimal") {
    TrainConfig config;
    config.model = ModelKind::Qcbm;
    config.architecture = CircuitKind::DiscreteStandard;
    config.dataset.dim = 2;
    config.precision = 2;
    config.n_blocks = 1;
    config.epochs = 50;
    config.seed = 5;
    const TrainingData data = point_mass_data(2, 2);
    const TrainTrace trace = train_qcbm(config, data);
    CHECK(trace.best_kl <= 1e-3);
    REQUIRE(!trace.block_start_kl.empty());
    // theta = 0 hits the target exactly; only the epsilon smoothing remains
    CHECK(trace.block_start_kl[0] <= 1e-5);
}

TEST_CASE("qcbm warm start: block 2 opens at block 1's best loss") {
    TrainConfig config;
    config.model = ModelKind::Qcbm;
    config.architecture = CircuitKind::DiscreteCopula;
    config.dataset.dim = 2;
    config.precision = 2;
    config.n_blocks = 2;
    config.epochs = 15;
    config.seed = 21;
    const TrainingData data = x2d_pit_data(4000, 3, 2);
    const TrainTrace trace = train_qcbm(config, data);
    REQUIRE(trace.block_start_kl.size() == 2);

    double block1_best = trace.block_start_kl[0];
    for (const EpochRecord& rec : trace.records) {
        if (rec.block == 1) {
            block1_best = std::min(block1_best, rec.kl);
        }
    }
    CHECK(std::abs(trace.block_start_kl[1] - block1_best) <= 1e-12);
}

TEST_CASE("qcbm best KL never increases when a block is appended") {
    TrainConfig config;
    config.model = ModelKind::Qcbm;
    config.architecture = CircuitKind::DiscreteCopula;
    config.dataset.dim = 2;
    config.precision = 2;
    config.epochs = 12;
    config.seed = 31;
    const TrainingData data = x2d_pit_data(4000, 4, 2);

    config.n_blocks = 1;
    const double kl_one = train_qcbm(config, data).best_kl;
    config.n_blocks = 2;
    const double kl_two = train_qcbm(config, data).best_kl;
    CHECK(kl_two <= kl_one + 1e-9);
}

TEST_CASE("qcbm trace integrity") {
    TrainConfig config;
    config.model = ModelKind::Qcbm;
    config.architecture = CircuitKind::DiscreteCopula;
    config.dataset.dim = 2;
    config.precision = 2;
    config.n_blocks = 1;
    config.epochs = 10;
    config.seed = 8;
    const TrainingData data = x2d_pit_data(2000, 5, 2);
    const TrainTrace trace = train_qcbm(config, data);
    REQUIRE(!trace.records.empty());
    double min_kl = trace.records[0].kl;
    int prev_epoch = 0;
    for (const EpochRecord& rec : trace.records) {
        CHECK(rec.epoch == prev_epoch + 1);
        prev_epoch = rec.epoch;
        CHECK(std::isfinite(rec.kl));
        min_kl = std::min(min_kl, rec.kl);
    }
    CHECK(trace.best_kl <= min_kl + 1e-15);
}

TEST_CASE("qcbm training is bit-reproducible") {
    TrainConfig config;
    config.model = ModelKind::Qcbm;
    config.architecture = CircuitKind::DiscreteStandard;
    config.dataset.dim = 2;
    config.precision = 2;
    config.n_blocks = 1;
    config.epochs = 8;
    config.seed = 99;
    const TrainingData data = x2d_pit_data(2000, 6, 2);
    const TrainTrace a = train_qcbm(config, data);
    const TrainTrace b = train_qcbm(config, data);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].kl == b.records[i].kl);
    }
    CHECK(a.best_params == b.best_params);
}

TEST_CASE("continuous qcbm runs and records finite losses") {
    TrainConfig config;
    config.model = ModelKind::Qcbm;
    config.architecture = CircuitKind::Continuous;
    config.dataset.dim = 2;
    config.n_blocks = 1;
    config.epochs = 5;
    config.batch_size = 200;
    config.eval_precision = 2;
    config.seed = 12;
    const TrainingData data = x2d_pit_data(2000, 7, 2);
    const TrainTrace trace = train_qcbm(config, data);
    CHECK(std::isfinite(trace.best_kl));
    CHECK(trace.records.size() <= 5);
}

TEST_CASE("discrete qgan smoke run: finite, deterministic, sane trace") {
    TrainConfig config;
    config.model = ModelKind::Qgan;
    config.architecture = CircuitKind::DiscreteCopula;
    config.dataset.dim = 2;
    config.precision = 2;
    config.n_blocks = 1;
    config.epochs = 3;
    config.batch_size = 64;
    config.batches_per_epoch = 2;
    config.eval_precision = 2;
    config.seed = 77;
    const TrainingData data = x2d_pit_data(2000, 8, 2);
    const TrainTrace a = train_qgan(config, data);
    REQUIRE(a.records.size() == 3);
    for (const EpochRecord& rec : a.records) {
        CHECK(std::isfinite(rec.kl));
        CHECK(std::isfinite(rec.loss_d));
        CHECK(std::isfinite(rec.loss_g));
        CHECK(rec.loss_d > 0.0);
    }
    CHECK_FALSE(a.nonfinite_flag);
    const TrainTrace b = train_qgan(config, data);
    CHECK(a.best_params == b.best_params);
    CHECK(a.best_kl == b.best_kl);
}

TEST_CASE("continuous qgan smoke run") {
    TrainConfig config;
    config.model = ModelKind::Qgan;
    config.architecture = CircuitKind::Continuous;
    config.dataset.dim = 2;
    config.n_blocks = 1;
    config.epochs = 2;
    config.batch_size = 32;
    config.batches_per_epoch = 2;
    config.eval_precision = 2;
    config.seed = 13;
    const TrainingData data = x2d_pit_data(1000, 9, 2);
    const TrainTrace trace = train_qgan(config, data);
    REQUIRE(trace.records.size() == 2);
    for (const EpochRecord& rec : trace.records) {
        CHECK(std::isfinite(rec.kl));
        CHECK(std::isfinite(rec.loss_g));
    }
}

TEST_CASE("classical gan smoke run is reproducible") {
    TrainConfig config;
    config.model = ModelKind::ClassicalGan;
    config.dataset.dim = 2;
    config.epochs = 3;
    config.batch_size = 64;
    config.batches_per_epoch = 3;
    config.eval_precision = 2;
    config.classical_hidden_width = 8;
    config.classical_hidden_layers = 2;
    config.seed = 14;
    const TrainingData data = x2d_pit_data(2000, 10, 2);
    const TrainTrace a = train_classical_gan(config, data);
    const TrainTrace b = train_classical_gan(config, data);
    REQUIRE(a.records.size() == 3);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].kl == b.records[i].kl);
        CHECK(a.records[i].loss_d == b.records[i].loss_d);
    }
    CHECK(a.best_params == b.best_params);
}

TEST_CASE("generate_samples stays in the unit cube and respects the seed") {
    TrainConfig config;
    config.model = ModelKind::Qcbm;
    config.architecture = CircuitKind::DiscreteCopula;
    config.dataset.dim = 2;
    config.precision = 2;
    config.n_blocks = 1;
    config.epochs = 5;
    config.seed = 3;
    const TrainingData data = x2d_pit_data(2000, 11, 2);
    const TrainTrace trace = train_qcbm(config, data);
    const SampleBatch s1 = generate_samples(config, trace, 500, 42);
    const SampleBatch s2 = generate_samples(config, trace, 500, 42);
    CHECK(s1.data == s2.data);
    for (double v : s1.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("train config json round trip") {
    TrainConfig config;
    config.model = ModelKind::Qgan;
    config.architecture = CircuitKind::DiscreteStandard;
    config.transform = TransformKind::MinMax;
    config.dataset.name = DatasetName::O;
    config.dataset.dim = 3;
    config.dataset.n = 12345;
    config.dataset.seed = 99;
    config.epochs = 17;
    config.optimizer.lr_generator = 0.02;
    const TrainConfig back = TrainConfig::from_json(config.to_json());
    CHECK(back.to_json() == config.to_json());
}
