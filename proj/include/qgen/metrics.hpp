#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qgen/circuits.hpp"
#include "qgen/matrix.hpp"

namespace qgen {

/// Normalized d-dimensional histogram on a 2^r-per-dimension grid, stored
/// row-major with dimension 0 slowest. For discrete architectures the flat
/// cell index coincides with the measurement basis index.
struct Histogram {
    int dim = 0;
    int bins_per_dim = 0;
    std::int64_t n_source_points = 0;
    std::vector<double> probs;

    std::size_t n_cells() const { return probs.size(); }
};

/// Grid cell of one coordinate: min(floor(2^r * x), 2^r - 1).
std::size_t cell_of(double x, int bins_per_dim);

/// Flat cell index of a d-dimensional point in [0,1]^d.
std::size_t cell_index(std::span<const double> point, int bins_per_dim);

/// Histogram of a sample batch; throws if any coordinate leaves [0,1].
Histogram histogram(const SampleBatch& samples, int precision);

/// Model distribution of a discrete template read directly from the state
/// vector (no sampling noise); the QCBM loss uses this.
Histogram exact_model_histogram(const CircuitTemplate& tmpl, std::span<const double> params);

/// sum over cells with Q_i > 0 of Q_i ln(Q_i / P~_i), where
/// P~ = (P + eps) / (1 + eps * n_cells). Smoothing is applied to the model
/// side only; eps = 0 with an empty model cell under data support yields
/// +infinity (not an error).
double kl_divergence(const Histogram& q, const Histogram& p, double epsilon = 1e-8);

} // namespace qgen
