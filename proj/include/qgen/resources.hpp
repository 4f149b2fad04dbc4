#pragma once

#include <string>
#include <vector>

#include "qgen/circuits.hpp"

namespace qgen {

/// Closed-form per-sample hardware cost of one architecture. Runtime is in
/// abstract depth time-steps, not wall clock.
struct ResourceEstimate {
    CircuitKind kind = CircuitKind::Continuous;
    int dim = 0;
    int precision = 0;       // ignored for the continuous kind
    int n_blocks = 0;
    int shots_per_sample = 1; // N_s; 1 for discrete kinds
    int qubits = 0;
    int init_gates = 0;
    int init_depth = 0;
    int gates_per_block = 0;
    int depth_per_block = 0;
    long long runtime_per_sample = 0;
};

ResourceEstimate estimate(CircuitKind kind, int dim, int precision, int n_blocks,
                          int shots_per_sample);

/// Smallest integer r at which the discrete-standard runtime slope in d
/// (N_b_disc * r per dimension) reaches the continuous slope
/// (N_s * N_b_cont per dimension).
int runtime_crossover_r(int shots_per_sample, int n_blocks_continuous, int n_blocks_discrete);

/// Comparison of a built template against the closed-form estimates.
/// Gate counts must match exactly; measured sequential depth may sit within
/// one step of the formula value. Known exceptions (the d=1 continuous
/// circuit has no entangling ring) come back as deviations, not errors.
struct CircuitAudit {
    ResourceEstimate expected;
    int actual_qubits = 0;
    int actual_init_gates = 0;
    int actual_gates_per_block = 0;
    int actual_params_per_block = 0;
    int measured_init_depth = 0;
    int measured_depth_per_block = 0;
    bool gates_match = false;
    bool depth_within_one = false;
    std::vector<std::string> deviations;

    bool clean() const { return gates_match && depth_within_one && deviations.empty(); }
};

CircuitAudit audit_circuit(const CircuitTemplate& tmpl);

/// Depth of a gate sequence under the schedule the estimates assume: a
/// maximal run of one-qubit gates on distinct qubits costs one step and
/// every two-qubit gate costs one step. With `parallel_groups` set (block
/// stages), disjoint qubit groups run concurrently; without it (the init
/// stage), every entangling gate is serialized, matching the conservative
/// init-depth formula.
int sequential_depth(std::span<const GateOp> gates, int n_qubits, bool parallel_groups);

} // namespace qgen
