#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qgen/matrix.hpp"
#include "qgen/statevector.hpp"

namespace qgen {

enum class CircuitKind { Continuous, DiscreteStandard, DiscreteCopula };

std::string circuit_kind_name(CircuitKind kind);
CircuitKind circuit_kind_from_name(const std::string& name);

/// Architecture descriptor expanded into an ordered gate list.
///
/// Continuous: one qubit per data dimension; each block re-inserts the
///   d-dimensional noise vector via RX gates (data re-uploading), entangles
///   with a CNOT ring and applies RZ/RY/RZ trainable layers.
/// DiscreteStandard: r qubits per dimension; per block an RY layer, a
///   nearest-neighbour RZZ chain and a second RY layer (last qubit omitted).
/// DiscreteCopula: r qubits per dimension; a one-time init stage entangles
///   register 0 with every other register (H + CNOT ladder), after which all
///   gates stay inside their register, so every register's marginal is
///   exactly uniform for any parameter values.
struct CircuitTemplate {
    CircuitKind kind = CircuitKind::DiscreteCopula;
    int dim = 0;          // d
    int precision = 0;    // r (discrete kinds only, 0 for continuous)
    int n_blocks = 0;     // N_b
    int n_qubits = 0;
    int n_params = 0;
    int n_noise_slots = 0;   // continuous only (= dim)
    int init_gate_count = 0; // copula only (= r*d)
    int gates_per_block = 0;
    std::vector<GateOp> gates;

    bool is_discrete() const { return kind != CircuitKind::Continuous; }
    /// Gate range [begin, end) of block `b` within `gates`.
    std::pair<std::size_t, std::size_t> block_range(int b) const;
};

CircuitTemplate build_continuous(int dim, int n_blocks);
CircuitTemplate build_discrete_standard(int dim, int precision, int n_blocks);
CircuitTemplate build_discrete_copula(int dim, int precision, int n_blocks);

/// Runs the gate list on |0...0> with parameter and noise slots resolved.
StateVector evaluate_state(const CircuitTemplate& tmpl, std::span<const double> params,
                           std::span<const double> noise = {});

/// As evaluate_state, but continues from a caller-provided prefix state and
/// gate offset (used to reuse the fixed copula init stage across evaluations).
void evaluate_state_from(const CircuitTemplate& tmpl, StateVector& state, std::size_t first_gate,
                         std::span<const double> params, std::span<const double> noise = {});

/// Value of register m (qubits [m*r, (m+1)*r)) inside a basis index.
std::uint64_t register_value(std::uint64_t basis, int dim, int precision, int register_index);

/// Caches the state after the non-parametric init stage, so repeated
/// evaluations (CMA-ES populations, parameter-shift pairs) skip it.
class CircuitEvaluator {
  public:
    explicit CircuitEvaluator(const CircuitTemplate& tmpl);

    StateVector state(std::span<const double> params, std::span<const double> noise = {}) const;

    const CircuitTemplate& circuit() const { return *tmpl_; }

  private:
    const CircuitTemplate* tmpl_;
    StateVector post_init_;
    std::size_t first_gate_;
};

/// Discrete generation: samples basis indices, splits them into per-dimension
/// grid cells i_m and returns continuous coordinates (i_m + u)/2^r with an
/// independent uniform jitter u per coordinate. All randomness comes from the
/// single stream: n_samples index draws first, then row-major jitters.
SampleBatch run_discrete(const CircuitTemplate& tmpl, std::span<const double> params, Rng& rng,
                         int n_samples);
SampleBatch run_discrete(const CircuitTemplate& tmpl, std::span<const double> params,
                         std::uint64_t seed, int n_samples);

/// Continuous generation: one sample per noise vector, coordinates
/// (<sigma_z>_k + 1)/2 computed exactly from the state vector.
std::vector<double> run_continuous(const CircuitTemplate& tmpl, std::span<const double> params,
                                   std::span<const double> noise);

/// Appends one zero-initialized block, keeping the output distribution of
/// discrete templates exactly unchanged (their blocks are fully parametric).
/// A continuous block also carries the noise rotations and the CNOT ring,
/// which are not parametric, so outputs change in general; they coincide
/// only when the incoming state is |0...0>.
std::pair<CircuitTemplate, std::vector<double>> append_block(const CircuitTemplate& tmpl,
                                                             std::vector<double> params);

nlohmann::json template_to_json(const CircuitTemplate& tmpl);
CircuitTemplate template_from_json(const nlohmann::json& j);

} // namespace qgen
