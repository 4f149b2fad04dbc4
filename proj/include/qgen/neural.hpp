#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qgen/matrix.hpp"

namespace qgen {

enum class Activation { ReLU, LeakyReLU }; // leaky slope fixed at 0.2

/// Dense feed-forward network with a sigmoid output layer. Serves as the
/// QGAN discriminators and as both halves of the classical GAN baseline.
class Mlp {
  public:
    /// layer_sizes = {in, hidden..., out}; weights start uniform in
    /// +-1/sqrt(fan_in), biases at zero.
    Mlp(std::vector<int> layer_sizes, Activation hidden_activation, std::uint64_t seed);

    Matrix forward(const Matrix& batch) const;

    /// Activations of every layer (input included), kept for backprop.
    struct Trace {
        std::vector<Matrix> activations;
        const Matrix& output() const { return activations.back(); }
    };
    Trace forward_cached(const Matrix& batch) const;

    struct Gradients {
        std::vector<Matrix> weight;
        std::vector<std::vector<double>> bias;
        Matrix input; // dL/d(batch), used to chain into a quantum generator
    };
    /// Backpropagates dL/d(output) through the cached forward pass.
    Gradients backward(const Trace& trace, const Matrix& output_grad) const;

    std::size_t n_params() const;
    std::vector<double> flat_params() const;
    void set_flat_params(std::span<const double> flat);
    void apply_flat_update(std::span<const double> delta);

    const std::vector<int>& layer_sizes() const { return layer_sizes_; }
    Activation hidden_activation() const { return hidden_activation_; }
    std::vector<Matrix>& weights() { return weights_; }
    std::vector<std::vector<double>>& biases() { return biases_; }

    nlohmann::json to_json() const;
    static Mlp from_json(const nlohmann::json& j);

  private:
    std::vector<int> layer_sizes_;
    Activation hidden_activation_;
    std::vector<Matrix> weights_;             // per layer, out x in
    std::vector<std::vector<double>> biases_; // per layer, out
};

/// Adam moment estimates for one flat parameter vector.
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<double> m, v;
    std::int64_t step_count = 0;

    explicit AdamState(std::size_t n_params, double learning_rate = 1e-3)
        : lr(learning_rate), m(n_params, 0.0), v(n_params, 0.0) {}

    /// In-place Adam update of `params` from `grads`.
    void step(std::span<double> params, std::span<const double> grads);
};

/// GAN cross-entropy losses: L_D = -mean(log d_real + log(1 - d_fake)),
/// L_G = -mean(log d_fake). Probabilities are clamped to
/// [1e-12, 1 - 1e-12] before taking logs.
std::pair<double, double> bce_losses(std::span<const double> d_real,
                                     std::span<const double> d_fake);

/// dL_D/d(output) for the concatenated (real, fake) discriminator batch.
Matrix bce_discriminator_output_grad(std::span<const double> d_real,
                                     std::span<const double> d_fake);

/// dL_G/d(output) for a fake batch.
Matrix bce_generator_output_grad(std::span<const double> d_fake);

/// Backprop + one Adam step. Returns false (leaving the network untouched)
/// if any gradient is non-finite, so the caller can flag the trace.
bool backward_and_step(Mlp& mlp, AdamState& adam, const Mlp::Trace& trace,
                       const Matrix& output_grad);

} // namespace qgen
