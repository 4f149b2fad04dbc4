#include "qgen/resources.hpp"

#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace qgen {

ResourceEstimate estimate(CircuitKind kind, int dim, int precision, int n_blocks,
                          int shots_per_sample) {
    if (dim < 1) {
        throw std::invalid_argument("estimate: dim must be >= 1");
    }
    if (n_blocks < 1) {
        throw std::invalid_argument("estimate: n_blocks must be >= 1");
    }
    if (kind != CircuitKind::Continuous && precision < 2) {
        throw std::invalid_argument("estimate: precision must be >= 2 for discrete kinds");
    }
    if (shots_per_sample < 1) {
        throw std::invalid_argument("estimate: shots_per_sample must be >= 1");
    }
    ResourceEstimate est;
    est.kind = kind;
    est.dim = dim;
    est.n_blocks = n_blocks;
    const long long d = dim;
    const long long r = precision;
    const long long nb = n_blocks;
    switch (kind) {
    case CircuitKind::Continuous:
        est.precision = 0;
        est.shots_per_sample = shots_per_sample;
        est.qubits = dim;
        est.gates_per_block = static_cast<int>(5 * d);
        est.depth_per_block = static_cast<int>(d + 4);
        est.runtime_per_sample = static_cast<long long>(shots_per_sample) * nb * (d + 4);
        break;
    case CircuitKind::DiscreteStandard:
        est.precision = precision;
        est.shots_per_sample = 1;
        est.qubits = static_cast<int>(r * d);
        est.gates_per_block = static_cast<int>(3 * r * d - 2);
        est.depth_per_block = static_cast<int>(r * d + 2);
        est.runtime_per_sample = nb * (r * d + 2);
        break;
    case CircuitKind::DiscreteCopula:
        est.precision = precision;
        est.shots_per_sample = 1;
        est.qubits = static_cast<int>(r * d);
        est.init_gates = static_cast<int>(r * d);
        est.init_depth = static_cast<int>(r * (d - 1) + 1);
        est.gates_per_block = static_cast<int>(r * d * (r + 5) / 2);
        est.depth_per_block = static_cast<int>(r * (r - 1) / 2 + 3);
        est.runtime_per_sample = r * (d - 1) + 1 + nb * (r * (r - 1) / 2 + 3);
        break;
    }
    return est;
}

int runtime_crossover_r(int shots_per_sample, int n_blocks_continuous, int n_blocks_discrete) {
    if (shots_per_sample < 1 || n_blocks_continuous < 1 || n_blocks_discrete < 1) {
        throw std::invalid_argument("runtime_crossover_r: arguments must be positive");
    }
    // smallest r with N_b_disc * r >= N_s * N_b_cont
    const long long target =
        static_cast<long long>(shots_per_sample) * n_blocks_continuous;
    const long long nb = n_blocks_discrete;
    return static_cast<int>((target + nb - 1) / nb);
}

int sequential_depth(std::span<const GateOp> gates, int n_qubits, bool parallel_groups) {
    // union-find over qubits to split the sequence into parallel groups;
    // with parallel_groups off, everything lands in one group
    std::vector<int> parent(static_cast<std::size_t>(n_qubits));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int q) {
        while (parent[static_cast<std::size_t>(q)] != q) {
            q = parent[static_cast<std::size_t>(q)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(q)])];
        }
        return q;
    };
    if (parallel_groups) {
        for (const GateOp& g : gates) {
            if (g.arity() == 2) {
                parent[static_cast<std::size_t>(find(g.q0))] = find(g.q1);
            }
        }
    } else {
        for (int q = 1; q < n_qubits; ++q) {
            parent[static_cast<std::size_t>(q)] = 0;
        }
    }

    std::vector<int> depth(static_cast<std::size_t>(n_qubits), 0);
    std::vector<std::vector<bool>> layer_used(
        static_cast<std::size_t>(n_qubits), std::vector<bool>(static_cast<std::size_t>(n_qubits), false));
    std::vector<bool> layer_open(static_cast<std::size_t>(n_qubits), false);
    auto flush = [&](int root) {
        auto& used = layer_used[static_cast<std::size_t>(root)];
        if (layer_open[static_cast<std::size_t>(root)]) {
            ++depth[static_cast<std::size_t>(root)];
            std::fill(used.begin(), used.end(), false);
            layer_open[static_cast<std::size_t>(root)] = false;
        }
    };
    for (const GateOp& g : gates) {
        const int root = find(g.q0);
        if (g.arity() == 2) {
            flush(root);
            ++depth[static_cast<std::size_t>(root)];
        } else {
            auto& used = layer_used[static_cast<std::size_t>(root)];
            if (used[static_cast<std::size_t>(g.q0)]) {
                flush(root);
            }
            used[static_cast<std::size_t>(g.q0)] = true;
            layer_open[static_cast<std::size_t>(root)] = true;
        }
    }
    for (int q = 0; q < n_qubits; ++q) {
        flush(find(q));
    }
    int max_depth = 0;
    for (int q = 0; q < n_qubits; ++q) {
        max_depth = std::max(max_depth, depth[static_cast<std::size_t>(find(q))]);
    }
    return max_depth;
}

CircuitAudit audit_circuit(const CircuitTemplate& tmpl) {
    CircuitAudit audit;
    audit.expected = estimate(tmpl.kind, tmpl.dim, tmpl.precision, tmpl.n_blocks, 1);
    audit.actual_qubits = tmpl.n_qubits;
    audit.actual_init_gates = tmpl.init_gate_count;

    const auto [block_begin, block_end] = tmpl.block_range(0);
    audit.actual_gates_per_block = static_cast<int>(block_end - block_begin);
    int params_in_block = 0;
    for (std::size_t g = block_begin; g < block_end; ++g) {
        params_in_block += tmpl.gates[g].angle.kind == AngleKind::Param ? 1 : 0;
    }
    audit.actual_params_per_block = params_in_block;

    const std::span<const GateOp> all(tmpl.gates);
    audit.measured_init_depth =
        tmpl.init_gate_count > 0
            ? sequential_depth(all.subspan(0, static_cast<std::size_t>(tmpl.init_gate_count)),
                               tmpl.n_qubits, false)
            : 0;
    audit.measured_depth_per_block =
        sequential_depth(all.subspan(block_begin, block_end - block_begin), tmpl.n_qubits, true);

    audit.gates_match = audit.actual_qubits == audit.expected.qubits &&
                        audit.actual_init_gates == audit.expected.init_gates &&
                        audit.actual_gates_per_block == audit.expected.gates_per_block;
    audit.depth_within_one =
        std::abs(audit.measured_init_depth - audit.expected.init_depth) <= 1 &&
        std::abs(audit.measured_depth_per_block - audit.expected.depth_per_block) <= 1;

    if (tmpl.kind == CircuitKind::Continuous && tmpl.dim == 1) {
        audit.deviations.push_back(
            "d=1 continuous circuit has no entangling ring; gate and depth "
            "counts fall below the 5d / d+4 formulas");
    }
    if (!audit.gates_match) {
        audit.deviations.push_back("gate counts differ from the closed-form estimate");
    }
    if (!audit.depth_within_one) {
        audit.deviations.push_back("measured depth deviates from the formula by more than 1");
    }
    return audit;
}

} // namespace qgen
