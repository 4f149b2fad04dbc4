#include "qgen/neural.hpp"

#include <cmath>
#include <stdexcept>

#include "qgen/rng.hpp"

namespace qgen {

namespace {

constexpr double kLeakySlope = 0.2;
constexpr double kProbClamp = 1e-12;

double clamp_prob(double p) {
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

} // namespace

Mlp::Mlp(std::vector<int> layer_sizes, Activation hidden_activation, std::uint64_t seed)
    : layer_sizes_(std::move(layer_sizes)), hidden_activation_(hidden_activation) {
    if (layer_sizes_.size() < 2) {
        throw std::invalid_argument("Mlp: need at least input and output layers");
    }
    for (int s : layer_sizes_) {
        if (s < 1) {
            throw std::invalid_argument("Mlp: layer sizes must be positive");
        }
    }
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
        const auto fan_in = static_cast<std::size_t>(layer_sizes_[l]);
        const auto fan_out = static_cast<std::size_t>(layer_sizes_[l + 1]);
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Matrix w(fan_out, fan_in);
        for (double& v : w.data) {
            v = rng.uniform(-bound, bound);
        }
        weights_.push_back(std::move(w));
        biases_.emplace_back(fan_out, 0.0);
    }
}

Mlp::Trace Mlp::forward_cached(const Matrix& batch) const {
    if (static_cast<int>(batch.cols) != layer_sizes_.front()) {
        throw std::invalid_argument("Mlp::forward: input width mismatch");
    }
    Trace trace;
    trace.activations.reserve(layer_sizes_.size());
    trace.activations.push_back(batch);
    const std::size_t n_layers = weights_.size();
    for (std::size_t l = 0; l < n_layers; ++l) {
        const Matrix& prev = trace.activations.back();
        const Matrix& w = weights_[l];
        const auto& b = biases_[l];
        Matrix next(prev.rows, w.rows);
        const bool last = (l + 1 == n_layers);
        for (std::size_t i = 0; i < prev.rows; ++i) {
            const double* in_row = prev.data.data() + i * prev.cols;
            double* out_row = next.data.data() + i * next.cols;
            for (std::size_t o = 0; o < w.rows; ++o) {
                const double* w_row = w.data.data() + o * w.cols;
                double z = b[o];
                for (std::size_t k = 0; k < w.cols; ++k) {
                    z += w_row[k] * in_row[k];
                }
                if (last) {
                    out_row[o] = 1.0 / (1.0 + std::exp(-z));
                } else if (hidden_activation_ == Activation::ReLU) {
                    out_row[o] = z > 0.0 ? z : 0.0;
                } else {
                    out_row[o] = z > 0.0 ? z : kLeakySlope * z;
                }
            }
        }
        trace.activations.push_back(std::move(next));
    }
    return trace;
}

Matrix Mlp::forward(const Matrix& batch) const {
    return forward_cached(batch).activations.back();
}

Mlp::Gradients Mlp::backward(const Trace& trace, const Matrix& output_grad) const {
    const std::size_t n_layers = weights_.size();
    if (trace.activations.size() != n_layers + 1) {
        throw std::invalid_argument("Mlp::backward: trace does not match network");
    }
    const Matrix& out = trace.activations.back();
    if (!output_grad.same_shape(out)) {
        throw std::invalid_argument("Mlp::backward: output gradient shape mismatch");
    }

    Gradients grads;
    grads.weight.resize(n_layers);
    grads.bias.resize(n_layers);

    // delta = dL/dz of the current layer, starting from the sigmoid output
    Matrix delta(out.rows, out.cols);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const double a = out.data[i];
        delta.data[i] = output_grad.data[i] * a * (1.0 - a);
    }

    for (std::size_t l = n_layers; l-- > 0;) {
        const Matrix& input = trace.activations[l];
        const Matrix& w = weights_[l];
        Matrix& dw = grads.weight[l];
        dw = Matrix(w.rows, w.cols);
        auto& db = grads.bias[l];
        db.assign(w.rows, 0.0);
        for (std::size_t i = 0; i < input.rows; ++i) {
            const double* in_row = input.data.data() + i * input.cols;
            const double* d_row = delta.data.data() + i * delta.cols;
            for (std::size_t o = 0; o < w.rows; ++o) {
                const double d = d_row[o];
                db[o] += d;
                double* dw_row = dw.data.data() + o * dw.cols;
                for (std::size_t k = 0; k < w.cols; ++k) {
                    dw_row[k] += d * in_row[k];
                }
            }
        }
        // propagate to the previous layer
        Matrix prev_delta(input.rows, input.cols);
        for (std::size_t i = 0; i < input.rows; ++i) {
            const double* d_row = delta.data.data() + i * delta.cols;
            double* p_row = prev_delta.data.data() + i * prev_delta.cols;
            for (std::size_t k = 0; k < input.cols; ++k) {
                double acc = 0.0;
                for (std::size_t o = 0; o < w.rows; ++o) {
                    acc += w.data[o * w.cols + k] * d_row[o];
                }
                p_row[k] = acc;
            }
        }
        if (l > 0) {
            // through the hidden activation (slope recoverable from the sign)
            for (std::size_t i = 0; i < prev_delta.data.size(); ++i) {
                const double a = input.data[i];
                if (hidden_activation_ == Activation::ReLU) {
                    prev_delta.data[i] = a > 0.0 ? prev_delta.data[i] : 0.0;
                } else {
                    prev_delta.data[i] *= a > 0.0 ? 1.0 : kLeakySlope;
                }
            }
        }
        delta = std::move(prev_delta);
    }
    grads.input = std::move(delta);
    return grads;
}

std::size_t Mlp::n_params() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        n += weights_[l].data.size() + biases_[l].size();
    }
    return n;
}

std::vector<double> Mlp::flat_params() const {
    std::vector<double> flat;
    flat.reserve(n_params());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        flat.insert(flat.end(), weights_[l].data.begin(), weights_[l].data.end());
        flat.insert(flat.end(), biases_[l].begin(), biases_[l].end());
    }
    return flat;
}

void Mlp::set_flat_params(std::span<const double> flat) {
    if (flat.size() != n_params()) {
        throw std::invalid_argument("Mlp::set_flat_params: length mismatch");
    }
    std::size_t pos = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (double& v : weights_[l].data) {
            v = flat[pos++];
        }
        for (double& v : biases_[l]) {
            v = flat[pos++];
        }
    }
}

void Mlp::apply_flat_update(std::span<const double> delta) {
    if (delta.size() != n_params()) {
        throw std::invalid_argument("Mlp::apply_flat_update: length mismatch");
    }
    std::size_t pos = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (double& v : weights_[l].data) {
            v += delta[pos++];
        }
        for (double& v : biases_[l]) {
            v += delta[pos++];
        }
    }
}

nlohmann::json Mlp::to_json() const {
    return nlohmann::json{
        {"layer_sizes", layer_sizes_},
        {"hidden_activation", hidden_activation_ == Activation::ReLU ? "relu" : "leaky_relu"},
        {"params", flat_params()}};
}

Mlp Mlp::from_json(const nlohmann::json& j) {
    const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
    const auto act_name = j.at("hidden_activation").get<std::string>();
    const Activation act = act_name == "relu" ? Activation::ReLU : Activation::LeakyReLU;
    Mlp mlp(sizes, act, 0);
    const auto params = j.at("params").get<std::vector<double>>();
    mlp.set_flat_params(params);
    return mlp;
}

void AdamState::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m.size() || grads.size() != m.size()) {
        throw std::invalid_argument("AdamState::step: size mismatch");
    }
    ++step_count;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
        params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
}

std::pair<double, double> bce_losses(std::span<const double> d_real,
                                     std::span<const double> d_fake) {
    if (d_real.empty() || d_fake.empty()) {
        throw std::invalid_argument("bce_losses: empty batch");
    }
    double loss_d = 0.0;
    for (double p : d_real) {
        loss_d -= std::log(clamp_prob(p));
    }
    loss_d /= static_cast<double>(d_real.size());
    double fake_term = 0.0;
    double loss_g = 0.0;
    for (double p : d_fake) {
        fake_term -= std::log(clamp_prob(1.0 - p));
        loss_g -= std::log(clamp_prob(p));
    }
    loss_d += fake_term / static_cast<double>(d_fake.size());
    loss_g /= static_cast<double>(d_fake.size());
    return {loss_d, loss_g};
}

Matrix bce_discriminator_output_grad(std::span<const double> d_real,
                                     std::span<const double> d_fake) {
    Matrix grad(d_real.size() + d_fake.size(), 1);
    const double inv_real = 1.0 / static_cast<double>(d_real.size());
    const double inv_fake = 1.0 / static_cast<double>(d_fake.size());
    for (std::size_t i = 0; i < d_real.size(); ++i) {
        grad(i, 0) = -inv_real / clamp_prob(d_real[i]);
    }
    for (std::size_t i = 0; i < d_fake.size(); ++i) {
        grad(d_real.size() + i, 0) = inv_fake / clamp_prob(1.0 - d_fake[i]);
    }
    return grad;
}

Matrix bce_generator_output_grad(std::span<const double> d_fake) {
    Matrix grad(d_fake.size(), 1);
    const double inv = 1.0 / static_cast<double>(d_fake.size());
    for (std::size_t i = 0; i < d_fake.size(); ++i) {
        grad(i, 0) = -inv / clamp_prob(d_fake[i]);
    }
    return grad;
}

bool backward_and_step(Mlp& mlp, AdamState& adam, const Mlp::Trace& trace,
                       const Matrix& output_grad) {
    const Mlp::Gradients grads = mlp.backward(trace, output_grad);
    std::vector<double> flat_grad;
    flat_grad.reserve(mlp.n_params());
    for (std::size_t l = 0; l < grads.weight.size(); ++l) {
        flat_grad.insert(flat_grad.end(), grads.weight[l].data.begin(),
                         grads.weight[l].data.end());
        flat_grad.insert(flat_grad.end(), grads.bias[l].begin(), grads.bias[l].end());
    }
    for (double g : flat_grad) {
        if (!std::isfinite(g)) {
            return false;
        }
    }
    std::vector<double> params = mlp.flat_params();
    adam.step(params, flat_grad);
    mlp.set_flat_params(params);
    return true;
}

} // namespace qgen
