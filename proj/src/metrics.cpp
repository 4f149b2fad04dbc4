#include "qgen/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qgen {

std::size_t cell_of(double x, int bins_per_dim) {
    if (x < 0.0 || x > 1.0 || !std::isfinite(x)) {
        throw std::invalid_argument("histogram: coordinate outside [0, 1]");
    }
    const auto bins = static_cast<std::size_t>(bins_per_dim);
    auto cell = static_cast<std::size_t>(std::floor(x * static_cast<double>(bins)));
    if (cell >= bins) {
        cell = bins - 1;
    }
    return cell;
}

std::size_t cell_index(std::span<const double> point, int bins_per_dim) {
    std::size_t flat = 0;
    for (double x : point) {
        flat = flat * static_cast<std::size_t>(bins_per_dim) + cell_of(x, bins_per_dim);
    }
    return flat;
}

Histogram histogram(const SampleBatch& samples, int precision) {
    if (precision < 1 || precision > 16) {
        throw std::invalid_argument("histogram: precision must be in [1, 16]");
    }
    if (samples.rows == 0 || samples.cols == 0) {
        throw std::invalid_argument("histogram: empty sample batch");
    }
    Histogram h;
    h.dim = static_cast<int>(samples.cols);
    h.bins_per_dim = 1 << precision;
    h.n_source_points = static_cast<std::int64_t>(samples.rows);
    std::size_t n_cells = 1;
    for (int m = 0; m < h.dim; ++m) {
        n_cells *= static_cast<std::size_t>(h.bins_per_dim);
    }
    h.probs.assign(n_cells, 0.0);
    const double weight = 1.0 / static_cast<double>(samples.rows);
    for (std::size_t i = 0; i < samples.rows; ++i) {
        h.probs[cell_index(samples.row(i), h.bins_per_dim)] += weight;
    }
    return h;
}

Histogram exact_model_histogram(const CircuitTemplate& tmpl, std::span<const double> params) {
    if (!tmpl.is_discrete()) {
        throw std::invalid_argument(
            "exact_model_histogram: continuous templates require sampled histograms");
    }
    const StateVector state = evaluate_state(tmpl, params);
    Histogram h;
    h.dim = tmpl.dim;
    h.bins_per_dim = 1 << tmpl.precision;
    h.n_source_points = 0; // exact distribution, not sample-based
    // basis index == flat cell index under the MSB-first register layout
    h.probs = state.probabilities();
    return h;
}

double kl_divergence(const Histogram& q, const Histogram& p, double epsilon) {
    if (q.dim != p.dim || q.bins_per_dim != p.bins_per_dim || q.n_cells() != p.n_cells()) {
        throw std::invalid_argument("kl_divergence: histogram shapes differ");
    }
    if (epsilon < 0.0) {
        throw std::invalid_argument("kl_divergence: epsilon must be >= 0");
    }
    const double n_cells = static_cast<double>(q.n_cells());
    const double denom = 1.0 + epsilon * n_cells;
    double acc = 0.0;
    for (std::size_t i = 0; i < q.n_cells(); ++i) {
        const double qi = q.probs[i];
        if (qi <= 0.0) {
            continue;
        }
        const double pi = (p.probs[i] + epsilon) / denom;
        if (pi <= 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        acc += qi * std::log(qi / pi);
    }
    return acc;
}

} // namespace qgen
