#include "qgen/circuits.hpp"

#include <cmath>
#include <stdexcept>

namespace qgen {

std::string circuit_kind_name(CircuitKind kind) {
    switch (kind) {
    case CircuitKind::Continuous:
        return "continuous";
    case CircuitKind::DiscreteStandard:
        return "discrete_standard";
    case CircuitKind::DiscreteCopula:
        return "discrete_copula";
    }
    return "unknown";
}

CircuitKind circuit_kind_from_name(const std::string& name) {
    if (name == "continuous") {
        return CircuitKind::Continuous;
    }
    if (name == "discrete_standard") {
        return CircuitKind::DiscreteStandard;
    }
    if (name == "discrete_copula") {
        return CircuitKind::DiscreteCopula;
    }
    throw std::invalid_argument("unknown circuit kind: " + name);
}

std::pair<std::size_t, std::size_t> CircuitTemplate::block_range(int b) const {
    const std::size_t begin =
        static_cast<std::size_t>(init_gate_count) + static_cast<std::size_t>(b) * gates_per_block;
    return {begin, begin + static_cast<std::size_t>(gates_per_block)};
}

CircuitTemplate build_continuous(int dim, int n_blocks) {
    if (dim < 1) {
        throw std::invalid_argument("build_continuous: dim must be >= 1");
    }
    if (n_blocks < 1) {
        throw std::invalid_argument("build_continuous: n_blocks must be >= 1");
    }
    CircuitTemplate tmpl;
    tmpl.kind = CircuitKind::Continuous;
    tmpl.dim = dim;
    tmpl.precision = 0;
    tmpl.n_blocks = n_blocks;
    tmpl.n_qubits = dim;
    tmpl.n_noise_slots = dim;
    int param_slot = 0;
    for (int b = 0; b < n_blocks; ++b) {
        // noise re-uploading layer: the same z vector enters every block
        for (int q = 0; q < dim; ++q) {
            tmpl.gates.push_back(make_rx(q, AngleSource::noise(q)));
        }
        // entangling ring, sequential; a single qubit has nothing to entangle
        if (dim >= 2) {
            for (int q = 0; q < dim; ++q) {
                tmpl.gates.push_back(make_cnot(q, (q + 1) % dim));
            }
        }
        for (int q = 0; q < dim; ++q) {
            tmpl.gates.push_back(make_rz(q, AngleSource::param(param_slot++)));
        }
        for (int q = 0; q < dim; ++q) {
            tmpl.gates.push_back(make_ry(q, AngleSource::param(param_slot++)));
        }
        for (int q = 0; q < dim; ++q) {
            tmpl.gates.push_back(make_rz(q, AngleSource::param(param_slot++)));
        }
    }
    tmpl.n_params = param_slot;
    tmpl.init_gate_count = 0;
    tmpl.gates_per_block = static_cast<int>(tmpl.gates.size()) / n_blocks;
    return tmpl;
}

CircuitTemplate build_discrete_standard(int dim, int precision, int n_blocks) {
    if (dim < 1) {
        throw std::invalid_argument("build_discrete_standard: dim must be >= 1");
    }
    if (precision < 2) {
        throw std::invalid_argument("build_discrete_standard: precision must be >= 2");
    }
    if (n_blocks < 1) {
        throw std::invalid_argument("build_discrete_standard: n_blocks must be >= 1");
    }
    const int n = precision * dim;
    if (n < 3) {
        throw std::invalid_argument("build_discrete_standard: r*d must be >= 3");
    }
    CircuitTemplate tmpl;
    tmpl.kind = CircuitKind::DiscreteStandard;
    tmpl.dim = dim;
    tmpl.precision = precision;
    tmpl.n_blocks = n_blocks;
    tmpl.n_qubits = n;
    int param_slot = 0;
    for (int b = 0; b < n_blocks; ++b) {
        // 3n - 2 parametric gates per block: RY(n) + RZZ chain(n-1) + RY(n-1)
        for (int q = 0; q < n; ++q) {
            tmpl.gates.push_back(make_ry(q, AngleSource::param(param_slot++)));
        }
        for (int q = 0; q + 1 < n; ++q) {
            tmpl.gates.push_back(make_rzz(q, q + 1, AngleSource::param(param_slot++)));
        }
        for (int q = 0; q + 1 < n; ++q) {
            tmpl.gates.push_back(make_ry(q, AngleSource::param(param_slot++)));
        }
    }
    tmpl.n_params = param_slot;
    tmpl.init_gate_count = 0;
    tmpl.gates_per_block = static_cast<int>(tmpl.gates.size()) / n_blocks;
    return tmpl;
}

CircuitTemplate build_discrete_copula(int dim, int precision, int n_blocks) {
    if (dim < 2) {
        throw std::invalid_argument("build_discrete_copula: dim must be >= 2");
    }
    if (precision < 2) {
        throw std::invalid_argument("build_discrete_copula: precision must be >= 2");
    }
    if (n_blocks < 1) {
        throw std::invalid_argument("build_discrete_copula: n_blocks must be >= 1");
    }
    const int r = precision;
    CircuitTemplate tmpl;
    tmpl.kind = CircuitKind::DiscreteCopula;
    tmpl.dim = dim;
    tmpl.precision = r;
    tmpl.n_blocks = n_blocks;
    tmpl.n_qubits = r * dim;

    // init stage: maximally entangled ladder between register 0 and the rest
    for (int j = 0; j < r; ++j) {
        tmpl.gates.push_back(make_h(j));
    }
    for (int j = 0; j < r; ++j) {
        for (int m = 1; m < dim; ++m) {
            tmpl.gates.push_back(make_cnot(j, m * r + j));
        }
    }
    tmpl.init_gate_count = static_cast<int>(tmpl.gates.size()); // = r*d

    // intra-register qubit pairs, lexicographic
    std::vector<std::pair<int, int>> pairs;
    for (int j = 0; j < r; ++j) {
        for (int k = j + 1; k < r; ++k) {
            pairs.emplace_back(j, k);
        }
    }

    int param_slot = 0;
    for (int b = 0; b < n_blocks; ++b) {
        // per register: RY layer, RZ layer, all RZZ pairs, RY layer —
        // (r/2)(r+5) parametric gates, and no gate crosses a register
        // boundary after the init stage. The full phase family (RZ singles
        // plus every pair) sits between the two mixing layers, so a single
        // register can realize any degree-2 phase polynomial conjugated by
        // RY rotations; ending on a mixing layer keeps every entangler
        // acting on the measured distribution even in a one-block circuit.
        for (int m = 0; m < dim; ++m) {
            const int base = m * r;
            for (int j = 0; j < r; ++j) {
                tmpl.gates.push_back(make_ry(base + j, AngleSource::param(param_slot++)));
            }
            for (int j = 0; j < r; ++j) {
                tmpl.gates.push_back(make_rz(base + j, AngleSource::param(param_slot++)));
            }
            for (const auto& [j, k] : pairs) {
                tmpl.gates.push_back(
                    make_rzz(base + j, base + k, AngleSource::param(param_slot++)));
            }
            for (int j = 0; j < r; ++j) {
                tmpl.gates.push_back(make_ry(base + j, AngleSource::param(param_slot++)));
            }
        }
    }
    tmpl.n_params = param_slot;
    tmpl.gates_per_block =
        (static_cast<int>(tmpl.gates.size()) - tmpl.init_gate_count) / n_blocks;
    return tmpl;
}

namespace {

double resolve_angle(const GateOp& gate, std::span<const double> params,
                     std::span<const double> noise) {
    switch (gate.angle.kind) {
    case AngleKind::Fixed:
        return gate.angle.value;
    case AngleKind::Param:
        if (gate.angle.slot < 0 || static_cast<std::size_t>(gate.angle.slot) >= params.size()) {
            throw std::invalid_argument("evaluate_state: parameter slot out of range");
        }
        return params[static_cast<std::size_t>(gate.angle.slot)];
    case AngleKind::Noise:
        if (gate.angle.slot < 0 || static_cast<std::size_t>(gate.angle.slot) >= noise.size()) {
            throw std::invalid_argument("evaluate_state: noise slot out of range");
        }
        return noise[static_cast<std::size_t>(gate.angle.slot)];
    case AngleKind::None:
        return 0.0;
    }
    return 0.0;
}

void check_params(const CircuitTemplate& tmpl, std::span<const double> params) {
    if (params.size() != static_cast<std::size_t>(tmpl.n_params)) {
        throw std::invalid_argument("parameter vector length does not match template");
    }
}

} // namespace

void evaluate_state_from(const CircuitTemplate& tmpl, StateVector& state, std::size_t first_gate,
                         std::span<const double> params, std::span<const double> noise) {
    for (std::size_t g = first_gate; g < tmpl.gates.size(); ++g) {
        const GateOp& gate = tmpl.gates[g];
        if (gate.is_parametric()) {
            apply_gate(state, gate, resolve_angle(gate, params, noise));
        } else {
            apply_gate(state, gate);
        }
    }
}

StateVector evaluate_state(const CircuitTemplate& tmpl, std::span<const double> params,
                           std::span<const double> noise) {
    check_params(tmpl, params);
    if (tmpl.kind == CircuitKind::Continuous &&
        noise.size() != static_cast<std::size_t>(tmpl.n_noise_slots)) {
        throw std::invalid_argument("noise vector length does not match template");
    }
    StateVector state(tmpl.n_qubits);
    evaluate_state_from(tmpl, state, 0, params, noise);
    return state;
}

CircuitEvaluator::CircuitEvaluator(const CircuitTemplate& tmpl)
    : tmpl_(&tmpl), post_init_(tmpl.n_qubits),
      first_gate_(static_cast<std::size_t>(tmpl.init_gate_count)) {
    for (std::size_t g = 0; g < first_gate_; ++g) {
        apply_gate(post_init_, tmpl.gates[g]);
    }
}

StateVector CircuitEvaluator::state(std::span<const double> params,
                                    std::span<const double> noise) const {
    if (params.size() != static_cast<std::size_t>(tmpl_->n_params)) {
        throw std::invalid_argument("CircuitEvaluator: parameter vector length mismatch");
    }
    StateVector s = post_init_;
    evaluate_state_from(*tmpl_, s, first_gate_, params, noise);
    return s;
}

std::uint64_t register_value(std::uint64_t basis, int dim, int precision, int register_index) {
    const int shift = (dim - 1 - register_index) * precision;
    return (basis >> shift) & ((std::uint64_t{1} << precision) - 1);
}

SampleBatch run_discrete(const CircuitTemplate& tmpl, std::span<const double> params, Rng& rng,
                         int n_samples) {
    if (!tmpl.is_discrete()) {
        throw std::invalid_argument("run_discrete: template is not a discrete architecture");
    }
    check_params(tmpl, params);
    if (n_samples < 1) {
        throw std::invalid_argument("run_discrete: n_samples must be >= 1");
    }
    const StateVector state = evaluate_state(tmpl, params);
    const auto indices = state.sample_basis(rng, n_samples);
    const double cell_width = 1.0 / static_cast<double>(std::uint64_t{1} << tmpl.precision);
    SampleBatch batch(static_cast<std::size_t>(n_samples), static_cast<std::size_t>(tmpl.dim));
    for (int i = 0; i < n_samples; ++i) {
        for (int m = 0; m < tmpl.dim; ++m) {
            const double cell = static_cast<double>(
                register_value(indices[static_cast<std::size_t>(i)], tmpl.dim, tmpl.precision, m));
            batch(static_cast<std::size_t>(i), static_cast<std::size_t>(m)) =
                (cell + rng.uniform()) * cell_width;
        }
    }
    return batch;
}

SampleBatch run_discrete(const CircuitTemplate& tmpl, std::span<const double> params,
                         std::uint64_t seed, int n_samples) {
    Rng rng(seed);
    return run_discrete(tmpl, params, rng, n_samples);
}

std::vector<double> run_continuous(const CircuitTemplate& tmpl, std::span<const double> params,
                                   std::span<const double> noise) {
    if (tmpl.kind != CircuitKind::Continuous) {
        throw std::invalid_argument("run_continuous: template is not the continuous architecture");
    }
    const StateVector state = evaluate_state(tmpl, params, noise);
    std::vector<double> out = state.expect_z_all();
    for (double& v : out) {
        v = (v + 1.0) / 2.0;
    }
    return out;
}

std::pair<CircuitTemplate, std::vector<double>> append_block(const CircuitTemplate& tmpl,
                                                             std::vector<double> params) {
    check_params(tmpl, params);
    CircuitTemplate grown;
    switch (tmpl.kind) {
    case CircuitKind::Continuous:
        grown = build_continuous(tmpl.dim, tmpl.n_blocks + 1);
        break;
    case CircuitKind::DiscreteStandard:
        grown = build_discrete_standard(tmpl.dim, tmpl.precision, tmpl.n_blocks + 1);
        break;
    case CircuitKind::DiscreteCopula:
        grown = build_discrete_copula(tmpl.dim, tmpl.precision, tmpl.n_blocks + 1);
        break;
    }
    params.resize(static_cast<std::size_t>(grown.n_params), 0.0);
    return {std::move(grown), std::move(params)};
}

namespace {

std::string gate_kind_name(GateKind kind) {
    switch (kind) {
    case GateKind::H:
        return "h";
    case GateKind::CNOT:
        return "cnot";
    case GateKind::RX:
        return "rx";
    case GateKind::RY:
        return "ry";
    case GateKind::RZ:
        return "rz";
    case GateKind::RZZ:
        return "rzz";
    }
    return "?";
}

GateKind gate_kind_from_name(const std::string& name) {
    if (name == "h") {
        return GateKind::H;
    }
    if (name == "cnot") {
        return GateKind::CNOT;
    }
    if (name == "rx") {
        return GateKind::RX;
    }
    if (name == "ry") {
        return GateKind::RY;
    }
    if (name == "rz") {
        return GateKind::RZ;
    }
    if (name == "rzz") {
        return GateKind::RZZ;
    }
    throw std::invalid_argument("unknown gate kind: " + name);
}

} // namespace

nlohmann::json template_to_json(const CircuitTemplate& tmpl) {
    nlohmann::json gates = nlohmann::json::array();
    for (const GateOp& g : tmpl.gates) {
        nlohmann::json jg;
        jg["kind"] = gate_kind_name(g.kind);
        if (g.arity() == 2) {
            jg["qubits"] = {g.q0, g.q1};
        } else {
            jg["qubits"] = {g.q0};
        }
        switch (g.angle.kind) {
        case AngleKind::Fixed:
            jg["angle"] = {{"type", "fixed"}, {"radians", g.angle.value}};
            break;
        case AngleKind::Param:
            jg["angle"] = {{"type", "param"}, {"slot", g.angle.slot}};
            break;
        case AngleKind::Noise:
            jg["angle"] = {{"type", "noise"}, {"slot", g.angle.slot}};
            break;
        case AngleKind::None:
            break;
        }
        gates.push_back(std::move(jg));
    }
    return nlohmann::json{{"kind", circuit_kind_name(tmpl.kind)},
                          {"dim", tmpl.dim},
                          {"precision", tmpl.precision},
                          {"n_blocks", tmpl.n_blocks},
                          {"n_qubits", tmpl.n_qubits},
                          {"n_params", tmpl.n_params},
                          {"n_noise_slots", tmpl.n_noise_slots},
                          {"init_gate_count", tmpl.init_gate_count},
                          {"gates_per_block", tmpl.gates_per_block},
                          {"gates", std::move(gates)}};
}

CircuitTemplate template_from_json(const nlohmann::json& j) {
    CircuitTemplate tmpl;
    tmpl.kind = circuit_kind_from_name(j.at("kind").get<std::string>());
    tmpl.dim = j.at("dim").get<int>();
    tmpl.precision = j.at("precision").get<int>();
    tmpl.n_blocks = j.at("n_blocks").get<int>();
    tmpl.n_qubits = j.at("n_qubits").get<int>();
    tmpl.n_params = j.at("n_params").get<int>();
    tmpl.n_noise_slots = j.at("n_noise_slots").get<int>();
    tmpl.init_gate_count = j.at("init_gate_count").get<int>();
    tmpl.gates_per_block = j.at("gates_per_block").get<int>();
    for (const auto& jg : j.at("gates")) {
        GateOp g;
        g.kind = gate_kind_from_name(jg.at("kind").get<std::string>());
        const auto& qubits = jg.at("qubits");
        g.q0 = qubits.at(0).get<int>();
        if (qubits.size() > 1) {
            g.q1 = qubits.at(1).get<int>();
        }
        if (jg.contains("angle")) {
            const auto& ja = jg.at("angle");
            const std::string type = ja.at("type").get<std::string>();
            if (type == "fixed") {
                g.angle = AngleSource::fixed(ja.at("radians").get<double>());
            } else if (type == "param") {
                g.angle = AngleSource::param(ja.at("slot").get<int>());
            } else if (type == "noise") {
                g.angle = AngleSource::noise(ja.at("slot").get<int>());
            }
        }
        tmpl.gates.push_back(g);
    }
    return tmpl;
}

} // namespace qgen
