#include "qgen/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qgen/cmaes.hpp"
#include "qgen/neural.hpp"
#include "qgen/rng.hpp"

namespace qgen {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kKlEpsilon = 1e-8;

// seed stream tags, one per independent randomness consumer
enum StreamTag : std::uint64_t {
    kCmaes = 1,
    kQcbmNoise = 2,
    kMinibatch = 3,
    kGenerator = 4,
    kEval = 5,
    kDiscInit = 6,
    kGenInit = 7,
    kSampleOut = 8,
};

double wall_time_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int resolve_batches_per_epoch(const TrainConfig& config, std::int64_t n_points) {
    if (config.batches_per_epoch > 0) {
        return config.batches_per_epoch;
    }
    return std::max<int>(1, static_cast<int>(n_points / std::max(1, config.batch_size)));
}

CircuitTemplate build_architecture(const TrainConfig& config) {
    switch (config.architecture) {
    case CircuitKind::Continuous:
        return build_continuous(config.dataset.dim, config.n_blocks);
    case CircuitKind::DiscreteStandard:
        return build_discrete_standard(config.dataset.dim, config.precision, config.n_blocks);
    case CircuitKind::DiscreteCopula:
        return build_discrete_copula(config.dataset.dim, config.precision, config.n_blocks);
    }
    throw std::invalid_argument("unknown architecture");
}

double kl_against_target(const Histogram& target, const Histogram& model) {
    return kl_divergence(target, model, kKlEpsilon);
}

/// KL(Q, P(theta)) for a discrete circuit, P read exactly from the state.
double discrete_qcbm_loss(const Histogram& target, const CircuitEvaluator& eval,
                          std::span<const double> params) {
    const StateVector state = eval.state(params);
    const std::vector<double> probs = state.probabilities();
    const double denom = 1.0 + kKlEpsilon * static_cast<double>(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double qi = target.probs[i];
        if (qi > 0.0) {
            acc += qi * std::log(qi * denom / (probs[i] + kKlEpsilon));
        }
    }
    return acc;
}

SampleBatch draw_continuous_batch(const CircuitTemplate& tmpl, std::span<const double> params,
                                  Rng& noise_rng, int n_samples) {
    SampleBatch batch(static_cast<std::size_t>(n_samples), static_cast<std::size_t>(tmpl.dim));
    std::vector<double> noise(static_cast<std::size_t>(tmpl.n_noise_slots));
    for (int i = 0; i < n_samples; ++i) {
        for (double& z : noise) {
            z = noise_rng.uniform(-kPi, kPi);
        }
        const std::vector<double> point = run_continuous(tmpl, params, noise);
        std::copy(point.begin(), point.end(), batch.row(static_cast<std::size_t>(i)).begin());
    }
    return batch;
}

std::vector<double> random_angles(Rng& rng, std::size_t n, double scale) {
    std::vector<double> v(n);
    for (double& x : v) {
        x = rng.uniform(-scale, scale);
    }
    return v;
}

/// QGAN cold start: small random angles, with each qubit's first mixing (RY)
/// gate opened to -pi/2 and its last to +pi/2. The two layers cancel (RY is
/// real orthogonal), so the model starts at the architecture's natural
/// identity distribution, but the entangling phases between them keep
/// first-order gradients. A start whose mixers are exactly closed freezes
/// every diagonal parameter; moving probability into an empty grid cell is
/// then second order in the amplitudes and adversarial training stalls in a
/// collapsed mode.
std::vector<double> qgan_initial_angles(const CircuitTemplate& tmpl, Rng& rng, double scale) {
    std::vector<double> theta = random_angles(rng, static_cast<std::size_t>(tmpl.n_params), scale);
    std::vector<int> first_ry(static_cast<std::size_t>(tmpl.n_qubits), -1);
    std::vector<int> last_ry(static_cast<std::size_t>(tmpl.n_qubits), -1);
    for (const GateOp& g : tmpl.gates) {
        if (g.kind == GateKind::RY && g.angle.kind == AngleKind::Param) {
            const auto q = static_cast<std::size_t>(g.q0);
            if (first_ry[q] < 0) {
                first_ry[q] = g.angle.slot;
            }
            last_ry[q] = g.angle.slot;
        }
    }
    constexpr double half_pi = 1.5707963267948966;
    for (int q = 0; q < tmpl.n_qubits; ++q) {
        const int first = first_ry[static_cast<std::size_t>(q)];
        const int last = last_ry[static_cast<std::size_t>(q)];
        if (last < 0) {
            continue;
        }
        theta[static_cast<std::size_t>(last)] += half_pi;
        if (first != last) {
            theta[static_cast<std::size_t>(first)] -= half_pi;
        }
    }
    return theta;
}

/// Plain gradient descent for the circuit angles. The adversarial flow
/// oscillates around the balance point; unlike a normalized optimizer the
/// raw step shrinks with the gradient, so the generator decelerates there
/// instead of overshooting onto a collapse saddle.
struct AngleSgd {
    double lr;
    explicit AngleSgd(double learning_rate) : lr(learning_rate) {}
    void step(std::span<double> params, std::span<const double> grads) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            params[i] -= lr * grads[i];
        }
    }
};

/// {0,1} bit rows for every grid cell of an rd-qubit discrete register.
Matrix cell_bit_table(int n_qubits) {
    const std::size_t n_cells = std::size_t{1} << n_qubits;
    Matrix bits(n_cells, static_cast<std::size_t>(n_qubits));
    for (std::size_t i = 0; i < n_cells; ++i) {
        for (int b = 0; b < n_qubits; ++b) {
            bits(i, static_cast<std::size_t>(b)) =
                static_cast<double>((i >> (n_qubits - 1 - b)) & 1);
        }
    }
    return bits;
}

} // namespace

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::Qcbm:
        return "qcbm";
    case ModelKind::Qgan:
        return "qgan";
    case ModelKind::ClassicalGan:
        return "classical_gan";
    }
    return "unknown";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "qcbm") {
        return ModelKind::Qcbm;
    }
    if (name == "qgan") {
        return ModelKind::Qgan;
    }
    if (name == "classical_gan") {
        return ModelKind::ClassicalGan;
    }
    throw std::invalid_argument("unknown model kind: " + name);
}

nlohmann::json TrainConfig::to_json() const {
    return nlohmann::json{
        {"model", model_kind_name(model)},
        {"architecture", circuit_kind_name(architecture)},
        {"transform", transform_kind_name(transform)},
        {"dataset",
         {{"name", dataset_name_str(dataset.name)},
          {"dim", dataset.dim},
          {"n", dataset.n},
          {"seed", dataset.seed},
          {"csv_paths", dataset.csv_paths}}},
        {"precision", precision},
        {"n_blocks", n_blocks},
        {"epochs", epochs},
        {"batch_size", batch_size},
        {"batches_per_epoch", batches_per_epoch},
        {"eval_precision", eval_precision},
        {"eval_samples", eval_samples},
        {"seed", seed},
        {"optimizer",
         {{"sigma0", optimizer.sigma0},
          {"population", optimizer.population},
          {"kl_tolerance", optimizer.kl_tolerance},
          {"patience", optimizer.patience},
          {"lr_generator", optimizer.lr_generator},
          {"lr_discriminator", optimizer.lr_discriminator},
          {"qgan_init_scale", optimizer.qgan_init_scale},
          {"disc_steps_per_gen_step", optimizer.disc_steps_per_gen_step}}},
        {"classical_hidden_width", classical_hidden_width},
        {"classical_hidden_layers", classical_hidden_layers},
        {"classical_noise_dim", classical_noise_dim}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.model = model_kind_from_name(j.at("model").get<std::string>());
    if (j.contains("architecture")) {
        c.architecture = circuit_kind_from_name(j.at("architecture").get<std::string>());
    }
    c.transform = transform_kind_from_name(j.at("transform").get<std::string>());
    const auto& jd = j.at("dataset");
    c.dataset.name = dataset_name_from_str(jd.at("name").get<std::string>());
    c.dataset.dim = jd.value("dim", 2);
    c.dataset.n = jd.value("n", std::int64_t{50000});
    c.dataset.seed = jd.value("seed", std::uint64_t{1});
    c.dataset.csv_paths = jd.value("csv_paths", std::vector<std::string>{});
    c.precision = j.value("precision", 4);
    c.n_blocks = j.value("n_blocks", 1);
    c.epochs = j.value("epochs", c.model == ModelKind::Qcbm ? 400 : 2000);
    c.batch_size = j.value("batch_size", 1000);
    c.batches_per_epoch = j.value("batches_per_epoch", 0);
    c.eval_precision = j.value("eval_precision", 4);
    c.eval_samples = j.value("eval_samples", 0);
    c.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("optimizer")) {
        const auto& jo = j.at("optimizer");
        c.optimizer.sigma0 = jo.value("sigma0", 0.1);
        c.optimizer.population = jo.value("population", 0);
        c.optimizer.kl_tolerance = jo.value("kl_tolerance", 1e-5);
        c.optimizer.patience = jo.value("patience", 20);
        c.optimizer.lr_generator = jo.value("lr_generator", 1e-3);
        c.optimizer.lr_discriminator = jo.value("lr_discriminator", 1e-3);
        c.optimizer.qgan_init_scale = jo.value("qgan_init_scale", 0.1);
        c.optimizer.disc_steps_per_gen_step = jo.value("disc_steps_per_gen_step", 1);
    }
    c.classical_hidden_width = j.value("classical_hidden_width", 32);
    c.classical_hidden_layers = j.value("classical_hidden_layers", 2);
    c.classical_noise_dim = j.value("classical_noise_dim", 8);
    return c;
}

TrainingData prepare_training_data(const TrainConfig& config) {
    TrainingData data;
    switch (config.dataset.name) {
    case DatasetName::MixedGaussian:
        data.raw = gen_mixed_gaussian(config.dataset.dim, config.dataset.n, config.dataset.seed);
        break;
    case DatasetName::X:
        data.raw = gen_x(config.dataset.dim, config.dataset.n, config.dataset.seed);
        break;
    case DatasetName::O:
        data.raw = gen_o(config.dataset.dim, config.dataset.n, config.dataset.seed);
        break;
    case DatasetName::Stocks:
        data.raw = load_stocks(config.dataset.csv_paths);
        break;
    }
    data.transform = TransformModel::fit(config.transform, data.raw.points);
    data.transformed = data.transform.forward(data.raw.points);
    data.target = histogram(data.transformed, config.eval_precision);
    return data;
}

std::vector<double> psr_gradient(const CircuitTemplate& tmpl, std::span<const double> params,
                                 const std::function<double(std::uint64_t)>& observable) {
    if (!tmpl.is_discrete()) {
        throw std::invalid_argument("psr_gradient: discrete overload needs a discrete template");
    }
    if (params.size() != static_cast<std::size_t>(tmpl.n_params)) {
        throw std::invalid_argument("psr_gradient: parameter vector length mismatch");
    }
    std::vector<double> f_values(std::size_t{1} << tmpl.n_qubits);
    for (std::size_t i = 0; i < f_values.size(); ++i) {
        f_values[i] = observable(static_cast<std::uint64_t>(i));
    }

    auto expectation = [&](const StateVector& state) {
        const auto amps = state.amplitudes();
        double acc = 0.0;
        for (std::size_t i = 0; i < amps.size(); ++i) {
            acc += std::norm(amps[i]) * f_values[i];
        }
        return acc;
    };

    // walk the circuit once, branching a +-pi/2 shift at each parametric gate;
    // builders assign parameter slots in gate order, which this relies on
    std::vector<double> grad(params.size(), 0.0);
    StateVector prefix(tmpl.n_qubits);
    std::vector<double> shifted(params.begin(), params.end());
    std::size_t next_gate = 0;
    for (std::size_t g = 0; g < tmpl.gates.size(); ++g) {
        const GateOp& gate = tmpl.gates[g];
        if (gate.angle.kind != AngleKind::Param) {
            continue;
        }
        const auto slot = static_cast<std::size_t>(gate.angle.slot);
        // advance the shared prefix up to this gate
        for (; next_gate < g; ++next_gate) {
            const GateOp& earlier = tmpl.gates[next_gate];
            apply_gate(prefix, earlier,
                       earlier.angle.kind == AngleKind::Param
                           ? std::optional<double>(params[static_cast<std::size_t>(
                                 earlier.angle.slot)])
                           : std::nullopt);
        }
        double plus = 0.0;
        double minus = 0.0;
        for (int sign = 0; sign < 2; ++sign) {
            StateVector state = prefix;
            shifted[slot] = params[slot] + (sign == 0 ? kPi / 2.0 : -kPi / 2.0);
            evaluate_state_from(tmpl, state, g, shifted);
            (sign == 0 ? plus : minus) = expectation(state);
        }
        shifted[slot] = params[slot];
        grad[slot] = (plus - minus) / 2.0;
    }
    return grad;
}

std::vector<double> psr_gradient(const CircuitTemplate& tmpl, std::span<const double> params,
                                 std::span<const double> noise,
                                 const std::function<double(std::span<const double>)>& observable) {
    if (tmpl.kind != CircuitKind::Continuous) {
        throw std::invalid_argument("psr_gradient: continuous overload needs a continuous template");
    }
    std::vector<double> shifted(params.begin(), params.end());
    std::vector<double> grad(params.size(), 0.0);
    for (std::size_t k = 0; k < params.size(); ++k) {
        shifted[k] = params[k] + kPi / 2.0;
        const double plus = observable(run_continuous(tmpl, shifted, noise));
        shifted[k] = params[k] - kPi / 2.0;
        const double minus = observable(run_continuous(tmpl, shifted, noise));
        shifted[k] = params[k];
        grad[k] = (plus - minus) / 2.0;
    }
    return grad;
}

Matrix psr_output_jacobian(const CircuitTemplate& tmpl, std::span<const double> params,
                           std::span<const double> noise) {
    if (tmpl.kind != CircuitKind::Continuous) {
        throw std::invalid_argument("psr_output_jacobian: continuous template required");
    }
    Matrix jac(static_cast<std::size_t>(tmpl.dim), params.size());
    std::vector<double> shifted(params.begin(), params.end());
    for (std::size_t k = 0; k < params.size(); ++k) {
        shifted[k] = params[k] + kPi / 2.0;
        const std::vector<double> plus = run_continuous(tmpl, shifted, noise);
        shifted[k] = params[k] - kPi / 2.0;
        const std::vector<double> minus = run_continuous(tmpl, shifted, noise);
        shifted[k] = params[k];
        for (int c = 0; c < tmpl.dim; ++c) {
            jac(static_cast<std::size_t>(c), k) =
                (plus[static_cast<std::size_t>(c)] - minus[static_cast<std::size_t>(c)]) / 2.0;
        }
    }
    return jac;
}

TrainTrace train_qcbm(const TrainConfig& config, const TrainingData& data) {
    const auto start = std::chrono::steady_clock::now();
    TrainTrace trace;
    trace.config_echo = config.to_json();

    Rng noise_rng(derive_seed(config.seed, kQcbmNoise));
    const bool continuous = config.architecture == CircuitKind::Continuous;

    double best_kl = std::numeric_limits<double>::infinity();
    std::vector<double> best_params;
    int epoch = 0;

    CircuitTemplate tmpl;
    std::vector<double> warm_start;
    for (int block = 1; block <= config.n_blocks; ++block) {
        if (block == 1) {
            TrainConfig one_block = config;
            one_block.n_blocks = 1;
            tmpl = build_architecture(one_block);
            warm_start.assign(static_cast<std::size_t>(tmpl.n_params), 0.0);
        } else {
            auto grown = append_block(tmpl, std::move(warm_start));
            tmpl = std::move(grown.first);
            warm_start = std::move(grown.second);
        }
        const CircuitEvaluator evaluator(tmpl);
        auto loss = [&](std::span<const double> theta) {
            if (continuous) {
                const SampleBatch batch =
                    draw_continuous_batch(tmpl, theta, noise_rng, config.batch_size);
                return kl_against_target(data.target, histogram(batch, config.eval_precision));
            }
            return discrete_qcbm_loss(data.target, evaluator, theta);
        };

        // the warm-started incumbent counts as the block's starting loss
        const double start_loss = loss(warm_start);
        if (!std::isfinite(start_loss)) {
            trace.nonfinite_flag = true;
            break;
        }
        trace.block_start_kl.push_back(start_loss);
        if (start_loss < best_kl) {
            best_kl = start_loss;
            best_params = warm_start;
        }

        CmaEs es(warm_start, config.optimizer.sigma0, config.optimizer.population,
                 derive_seed(config.seed, kCmaes + static_cast<std::uint64_t>(block) * 64));
        std::vector<double> values(static_cast<std::size_t>(es.lambda()));
        // stall window over the per-generation KL; the search stops once the
        // KL change across `patience` successive generations falls below tol
        std::vector<double> window;
        for (int gen = 0; gen < config.epochs; ++gen) {
            const auto& candidates = es.ask();
            bool finite = true;
            double gen_best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                values[i] = loss(candidates[i]);
                finite = finite && std::isfinite(values[i]);
                gen_best = std::min(gen_best, values[i]);
            }
            if (!finite) {
                trace.nonfinite_flag = true;
                break;
            }
            es.tell(values);
            if (es.best_value() < best_kl) {
                best_kl = es.best_value();
                best_params = es.best_point();
            }
            ++epoch;
            trace.records.push_back({epoch, block, best_kl, 0.0, 0.0});
            window.push_back(gen_best);
            if (static_cast<int>(window.size()) > config.optimizer.patience) {
                window.erase(window.begin());
                const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
                if (*hi - *lo < config.optimizer.kl_tolerance) {
                    break;
                }
            }
        }
        warm_start = best_params;
    }

    trace.best_kl = best_kl;
    trace.best_params = std::move(best_params);
    trace.wall_seconds = wall_time_since(start);
    return trace;
}

namespace {

struct QganDiscreteStep {
    double loss_d = 0.0;
    double loss_g = 0.0;
};

/// One discriminator + one generator update for the discrete QGAN.
QganDiscreteStep qgan_discrete_minibatch(const TrainConfig& config, const TrainingData& data,
                                         const CircuitEvaluator& evaluator,
                                         std::vector<double>& theta, AdamState& theta_adam,
                                         Mlp& disc, AdamState& disc_adam, const Matrix& all_bits,
                                         Rng& batch_rng, Rng& gen_rng, TrainTrace& trace) {
    const int m = config.batch_size;
    const int n_qubits = evaluator.circuit().n_qubits;
    const int bins = 1 << config.precision;

    const StateVector state = evaluator.state(theta);
    QganDiscreteStep step;

    // discriminator update(s) on fresh real + generated minibatches; the
    // generated rows are single-shot measurements of the current state
    Matrix disc_input(static_cast<std::size_t>(2 * m), static_cast<std::size_t>(n_qubits));
    for (int d_step = 0; d_step < std::max(1, config.optimizer.disc_steps_per_gen_step);
         ++d_step) {
        for (int i = 0; i < m; ++i) {
            const auto row = static_cast<std::size_t>(batch_rng.below(data.transformed.rows));
            const std::size_t cell = cell_index(data.transformed.row(row), bins);
            for (int b = 0; b < n_qubits; ++b) {
                disc_input(static_cast<std::size_t>(i), static_cast<std::size_t>(b)) =
                    all_bits(cell, static_cast<std::size_t>(b));
            }
        }
        const auto fake_cells = state.sample_basis(gen_rng, m);
        for (int i = 0; i < m; ++i) {
            for (int b = 0; b < n_qubits; ++b) {
                disc_input(static_cast<std::size_t>(m + i), static_cast<std::size_t>(b)) =
                    all_bits(fake_cells[static_cast<std::size_t>(i)], static_cast<std::size_t>(b));
            }
        }
        const Mlp::Trace fwd = disc.forward_cached(disc_input);
        const Matrix& out = fwd.output();
        std::vector<double> d_real(static_cast<std::size_t>(m));
        std::vector<double> d_fake(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            d_real[static_cast<std::size_t>(i)] = out(static_cast<std::size_t>(i), 0);
            d_fake[static_cast<std::size_t>(i)] = out(static_cast<std::size_t>(m + i), 0);
        }
        step.loss_d = bce_losses(d_real, d_fake).first;
        if (!backward_and_step(disc, disc_adam, fwd,
                               bce_discriminator_output_grad(d_real, d_fake))) {
            trace.nonfinite_flag = true;
        }
    }

    // generator update: L_G = E_{x ~ P(theta)}[-log D(x)], expectation taken
    // exactly over all grid cells, gradient by the parameter-shift rule
    {
        const Matrix d_all = disc.forward(all_bits);
        std::vector<double> f_values(d_all.rows);
        for (std::size_t i = 0; i < d_all.rows; ++i) {
            f_values[i] = -std::log(std::clamp(d_all(i, 0), 1e-12, 1.0 - 1e-12));
        }
        const std::vector<double> probs = evaluator.state(theta).probabilities();
        for (std::size_t i = 0; i < probs.size(); ++i) {
            step.loss_g += probs[i] * f_values[i];
        }
        const std::vector<double> grad =
            psr_gradient(evaluator.circuit(), theta,
                         [&](std::uint64_t cell) { return f_values[cell]; });
        bool finite = true;
        for (double g : grad) {
            finite = finite && std::isfinite(g);
        }
        if (finite) {
            theta_adam.step(theta, grad);
        } else {
            trace.nonfinite_flag = true;
        }
    }
    return step;
}

/// One discriminator + one generator update for the continuous QGAN.
QganDiscreteStep qgan_continuous_minibatch(const TrainConfig& config, const TrainingData& data,
                                           const CircuitTemplate& tmpl,
                                           std::vector<double>& theta, AdamState& theta_adam,
                                           Mlp& disc, AdamState& disc_adam, Rng& batch_rng,
                                           Rng& gen_rng, TrainTrace& trace) {
    const int m = config.batch_size;
    const int d = tmpl.dim;

    Matrix noise(static_cast<std::size_t>(m), static_cast<std::size_t>(tmpl.n_noise_slots));
    for (double& z : noise.data) {
        z = gen_rng.uniform(-kPi, kPi);
    }
    Matrix fake(static_cast<std::size_t>(m), static_cast<std::size_t>(d));
    for (int i = 0; i < m; ++i) {
        const std::vector<double> point =
            run_continuous(tmpl, theta, noise.row(static_cast<std::size_t>(i)));
        std::copy(point.begin(), point.end(), fake.row(static_cast<std::size_t>(i)).begin());
    }

    Matrix disc_input(static_cast<std::size_t>(2 * m), static_cast<std::size_t>(d));
    for (int i = 0; i < m; ++i) {
        const auto row = static_cast<std::size_t>(batch_rng.below(data.transformed.rows));
        std::copy(data.transformed.row(row).begin(), data.transformed.row(row).end(),
                  disc_input.row(static_cast<std::size_t>(i)).begin());
        std::copy(fake.row(static_cast<std::size_t>(i)).begin(),
                  fake.row(static_cast<std::size_t>(i)).end(),
                  disc_input.row(static_cast<std::size_t>(m + i)).begin());
    }

    QganDiscreteStep step;
    {
        const Mlp::Trace fwd = disc.forward_cached(disc_input);
        const Matrix& out = fwd.output();
        std::vector<double> d_real(static_cast<std::size_t>(m));
        std::vector<double> d_fake(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            d_real[static_cast<std::size_t>(i)] = out(static_cast<std::size_t>(i), 0);
            d_fake[static_cast<std::size_t>(i)] = out(static_cast<std::size_t>(m + i), 0);
        }
        step.loss_d = bce_losses(d_real, d_fake).first;
        if (!backward_and_step(disc, disc_adam, fwd,
                               bce_discriminator_output_grad(d_real, d_fake))) {
            trace.nonfinite_flag = true;
        }
    }

    // generator update: batch loss Eq-style -1/m sum log D(s(theta, z_l)),
    // discriminator input gradient chain-ruled with the per-coordinate
    // parameter-shift Jacobian of the circuit output
    {
        const Mlp::Trace fwd = disc.forward_cached(fake);
        const Matrix& out = fwd.output();
        std::vector<double> d_fake(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            d_fake[static_cast<std::size_t>(i)] = out(static_cast<std::size_t>(i), 0);
        }
        step.loss_g = 0.0;
        for (double p : d_fake) {
            step.loss_g -= std::log(std::clamp(p, 1e-12, 1.0 - 1e-12));
        }
        step.loss_g /= static_cast<double>(m);

        const Mlp::Gradients dgrads = disc.backward(fwd, bce_generator_output_grad(d_fake));
        std::vector<double> grad(theta.size(), 0.0);
        for (int i = 0; i < m; ++i) {
            const Matrix jac = psr_output_jacobian(tmpl, theta, noise.row(static_cast<std::size_t>(i)));
            for (int c = 0; c < d; ++c) {
                const double dl_ds = dgrads.input(static_cast<std::size_t>(i),
                                                  static_cast<std::size_t>(c));
                for (std::size_t k = 0; k < theta.size(); ++k) {
                    grad[k] += dl_ds * jac(static_cast<std::size_t>(c), k);
                }
            }
        }
        bool finite = true;
        for (double g : grad) {
            finite = finite && std::isfinite(g);
        }
        if (finite) {
            theta_adam.step(theta, grad);
        } else {
            trace.nonfinite_flag = true;
        }
    }
    return step;
}

} // namespace

TrainTrace train_qgan(const TrainConfig& config, const TrainingData& data) {
    const auto start = std::chrono::steady_clock::now();
    TrainTrace trace;
    trace.config_echo = config.to_json();

    const CircuitTemplate tmpl = build_architecture(config);
    const CircuitEvaluator evaluator(tmpl);
    const bool continuous = config.architecture == CircuitKind::Continuous;

    Rng init_rng(derive_seed(config.seed, kGenInit));
    std::vector<double> theta =
        qgan_initial_angles(tmpl, init_rng, config.optimizer.qgan_init_scale);
    AdamState theta_adam(theta.size(), config.optimizer.lr_generator);

    // continuous: d inputs, two hidden layers of 32, ReLU;
    // discrete: rd bit inputs, one hidden layer of 16 (2D) / 32 (3D), leaky ReLU
    std::vector<int> disc_sizes;
    Activation disc_act;
    if (continuous) {
        disc_sizes = {tmpl.dim, 32, 32, 1};
        disc_act = Activation::ReLU;
    } else {
        disc_sizes = {tmpl.n_qubits, tmpl.dim == 2 ? 16 : 32, 1};
        disc_act = Activation::LeakyReLU;
    }
    Mlp disc(disc_sizes, disc_act, derive_seed(config.seed, kDiscInit));
    AdamState disc_adam(disc.n_params(), config.optimizer.lr_discriminator);

    Rng batch_rng(derive_seed(config.seed, kMinibatch));
    Rng gen_rng(derive_seed(config.seed, kGenerator));
    Rng eval_rng(derive_seed(config.seed, kEval));

    const Matrix all_bits = continuous ? Matrix() : cell_bit_table(tmpl.n_qubits);
    const int batches = resolve_batches_per_epoch(config, data.transformed.rows);
    const int eval_samples = config.eval_samples > 0 ? config.eval_samples : config.batch_size;

    double best_kl = std::numeric_limits<double>::infinity();
    std::vector<double> best_params = theta;
    int collapse_run = 0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        double loss_d_sum = 0.0;
        double loss_g_sum = 0.0;
        for (int b = 0; b < batches; ++b) {
            const QganDiscreteStep step =
                continuous
                    ? qgan_continuous_minibatch(config, data, tmpl, theta, theta_adam, disc,
                                                disc_adam, batch_rng, gen_rng, trace)
                    : qgan_discrete_minibatch(config, data, evaluator, theta, theta_adam, disc,
                                              disc_adam, all_bits, batch_rng, gen_rng, trace);
            loss_d_sum += step.loss_d;
            loss_g_sum += step.loss_g;
        }
        const double loss_d = loss_d_sum / batches;
        const double loss_g = loss_g_sum / batches;

        // discriminator collapse: vanishing loss for 50 consecutive epochs
        collapse_run = loss_d < 1e-6 ? collapse_run + 1 : 0;
        if (collapse_run >= 50) {
            trace.discriminator_collapse = true;
        }

        double kl = 0.0;
        if (continuous) {
            const SampleBatch batch = draw_continuous_batch(tmpl, theta, eval_rng, eval_samples);
            kl = kl_against_target(data.target, histogram(batch, config.eval_precision));
        } else {
            const SampleBatch batch = run_discrete(tmpl, theta, eval_rng, eval_samples);
            kl = kl_against_target(data.target, histogram(batch, config.eval_precision));
        }
        if (kl < best_kl) {
            best_kl = kl;
            best_params = theta;
        }
        trace.records.push_back({epoch, 1, kl, loss_d, loss_g});
    }

    trace.best_kl = best_kl;
    trace.best_params = std::move(best_params);
    trace.wall_seconds = wall_time_since(start);
    return trace;
}

TrainTrace train_classical_gan(const TrainConfig& config, const TrainingData& data) {
    const auto start = std::chrono::steady_clock::now();
    TrainTrace trace;
    trace.config_echo = config.to_json();

    const int d = data.raw.dim;
    std::vector<int> gen_sizes{config.classical_noise_dim};
    std::vector<int> disc_sizes{d};
    for (int l = 0; l < config.classical_hidden_layers; ++l) {
        gen_sizes.push_back(config.classical_hidden_width);
        disc_sizes.push_back(config.classical_hidden_width);
    }
    gen_sizes.push_back(d);
    disc_sizes.push_back(1);

    Mlp gen(gen_sizes, Activation::ReLU, derive_seed(config.seed, kGenInit));
    Mlp disc(disc_sizes, Activation::LeakyReLU, derive_seed(config.seed, kDiscInit));
    AdamState gen_adam(gen.n_params(), config.optimizer.lr_generator);
    AdamState disc_adam(disc.n_params(), config.optimizer.lr_discriminator);

    Rng batch_rng(derive_seed(config.seed, kMinibatch));
    Rng gen_rng(derive_seed(config.seed, kGenerator));
    Rng eval_rng(derive_seed(config.seed, kEval));

    const int m = config.batch_size;
    const int batches = resolve_batches_per_epoch(config, data.transformed.rows);
    const int eval_samples = config.eval_samples > 0 ? config.eval_samples : config.batch_size;

    auto draw_noise = [&](Rng& rng, int n) {
        Matrix z(static_cast<std::size_t>(n), static_cast<std::size_t>(config.classical_noise_dim));
        for (double& v : z.data) {
            v = rng.normal();
        }
        return z;
    };

    double best_kl = std::numeric_limits<double>::infinity();
    std::vector<double> best_params = gen.flat_params();
    int collapse_run = 0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        double loss_d_sum = 0.0;
        double loss_g_sum = 0.0;
        for (int b = 0; b < batches; ++b) {
            const Matrix noise = draw_noise(gen_rng, m);
            const Mlp::Trace gen_fwd = gen.forward_cached(noise);
            const Matrix& fake = gen_fwd.output();

            Matrix disc_input(static_cast<std::size_t>(2 * m), static_cast<std::size_t>(d));
            for (int i = 0; i < m; ++i) {
                const auto row = static_cast<std::size_t>(batch_rng.below(data.transformed.rows));
                std::copy(data.transformed.row(row).begin(), data.transformed.row(row).end(),
                          disc_input.row(static_cast<std::size_t>(i)).begin());
                std::copy(fake.row(static_cast<std::size_t>(i)).begin(),
                          fake.row(static_cast<std::size_t>(i)).end(),
                          disc_input.row(static_cast<std::size_t>(m + i)).begin());
            }

            // discriminator step
            {
                const Mlp::Trace fwd = disc.forward_cached(disc_input);
                std::vector<double> d_real(static_cast<std::size_t>(m));
                std::vector<double> d_fake(static_cast<std::size_t>(m));
                for (int i = 0; i < m; ++i) {
                    d_real[static_cast<std::size_t>(i)] =
                        fwd.output()(static_cast<std::size_t>(i), 0);
                    d_fake[static_cast<std::size_t>(i)] =
                        fwd.output()(static_cast<std::size_t>(m + i), 0);
                }
                loss_d_sum += bce_losses(d_real, d_fake).first;
                if (!backward_and_step(disc, disc_adam, fwd,
                                       bce_discriminator_output_grad(d_real, d_fake))) {
                    trace.nonfinite_flag = true;
                }
            }
            // generator step through the updated discriminator
            {
                const Mlp::Trace disc_fwd = disc.forward_cached(fake);
                std::vector<double> d_fake(static_cast<std::size_t>(m));
                for (int i = 0; i < m; ++i) {
                    d_fake[static_cast<std::size_t>(i)] =
                        disc_fwd.output()(static_cast<std::size_t>(i), 0);
                }
                double loss_g = 0.0;
                for (double p : d_fake) {
                    loss_g -= std::log(std::clamp(p, 1e-12, 1.0 - 1e-12));
                }
                loss_g_sum += loss_g / m;
                const Mlp::Gradients dgrads =
                    disc.backward(disc_fwd, bce_generator_output_grad(d_fake));
                if (!backward_and_step(gen, gen_adam, gen_fwd, dgrads.input)) {
                    trace.nonfinite_flag = true;
                }
            }
        }
        const double loss_d = loss_d_sum / batches;
        collapse_run = loss_d < 1e-6 ? collapse_run + 1 : 0;
        if (collapse_run >= 50) {
            trace.discriminator_collapse = true;
        }

        const Matrix eval_noise = draw_noise(eval_rng, eval_samples);
        const double kl =
            kl_against_target(data.target, histogram(gen.forward(eval_noise),
                                                     config.eval_precision));
        if (kl < best_kl) {
            best_kl = kl;
            best_params = gen.flat_params();
        }
        trace.records.push_back({epoch, 1, kl, loss_d, loss_g_sum / batches});
    }

    trace.best_kl = best_kl;
    trace.best_params = std::move(best_params);
    trace.wall_seconds = wall_time_since(start);
    return trace;
}

TrainTrace run_training(const TrainConfig& config) {
    const TrainingData data = prepare_training_data(config);
    switch (config.model) {
    case ModelKind::Qcbm:
        return train_qcbm(config, data);
    case ModelKind::Qgan:
        return train_qgan(config, data);
    case ModelKind::ClassicalGan:
        return train_classical_gan(config, data);
    }
    throw std::invalid_argument("unknown model kind");
}

SampleBatch generate_samples(const TrainConfig& config, const TrainTrace& trace, int n_samples,
                             std::uint64_t seed) {
    Rng rng(derive_seed(seed, kSampleOut));
    if (config.model == ModelKind::ClassicalGan) {
        std::vector<int> gen_sizes{config.classical_noise_dim};
        for (int l = 0; l < config.classical_hidden_layers; ++l) {
            gen_sizes.push_back(config.classical_hidden_width);
        }
        gen_sizes.push_back(config.dataset.dim);
        Mlp gen(gen_sizes, Activation::ReLU, 0);
        gen.set_flat_params(trace.best_params);
        Matrix noise(static_cast<std::size_t>(n_samples),
                     static_cast<std::size_t>(config.classical_noise_dim));
        for (double& v : noise.data) {
            v = rng.normal();
        }
        return gen.forward(noise);
    }
    const CircuitTemplate tmpl = build_architecture(config);
    if (tmpl.kind == CircuitKind::Continuous) {
        return draw_continuous_batch(tmpl, trace.best_params, rng, n_samples);
    }
    return run_discrete(tmpl, trace.best_params, rng, n_samples);
}

} // namespace qgen
