#include "qgen/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qgen {

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 24) {
        throw std::invalid_argument("StateVector: qubit count must be in [1, 24]");
    }
    amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
    amps_[0] = cplx{1.0, 0.0};
}

void StateVector::reset() {
    std::fill(amps_.begin(), amps_.end(), cplx{0.0, 0.0});
    amps_[0] = cplx{1.0, 0.0};
}

void StateVector::check_qubit(int q, const char* what) const {
    if (q < 0 || q >= n_qubits_) {
        throw std::invalid_argument(std::string(what) + ": qubit index out of range");
    }
}

void StateVector::apply_h(int q) {
    check_qubit(q, "apply_h");
    const std::size_t mask = bit_mask(q);
    const double inv_sqrt2 = 0.70710678118654752440;
    const std::size_t n = amps_.size();
    for (std::size_t base = 0; base < n; base += 2 * mask) {
        for (std::size_t off = 0; off < mask; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + mask;
            const cplx a0 = amps_[i0];
            const cplx a1 = amps_[i1];
            amps_[i0] = inv_sqrt2 * (a0 + a1);
            amps_[i1] = inv_sqrt2 * (a0 - a1);
        }
    }
}

void StateVector::apply_cnot(int control, int target) {
    check_qubit(control, "apply_cnot");
    check_qubit(target, "apply_cnot");
    if (control == target) {
        throw std::invalid_argument("apply_cnot: control equals target");
    }
    const std::size_t cmask = bit_mask(control);
    const std::size_t tmask = bit_mask(target);
    const std::size_t n = amps_.size();
    for (std::size_t i = 0; i < n; ++i) {
        // swap each |c=1, t=0> with |c=1, t=1> exactly once
        if ((i & cmask) != 0 && (i & tmask) == 0) {
            std::swap(amps_[i], amps_[i | tmask]);
        }
    }
}

void StateVector::apply_rx(int q, double theta) {
    check_qubit(q, "apply_rx");
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const cplx m_is{0.0, -s}; // -i sin(theta/2)
    const std::size_t mask = bit_mask(q);
    const std::size_t n = amps_.size();
    for (std::size_t base = 0; base < n; base += 2 * mask) {
        for (std::size_t off = 0; off < mask; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + mask;
            const cplx a0 = amps_[i0];
            const cplx a1 = amps_[i1];
            amps_[i0] = c * a0 + m_is * a1;
            amps_[i1] = m_is * a0 + c * a1;
        }
    }
}

void StateVector::apply_ry(int q, double theta) {
    check_qubit(q, "apply_ry");
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const std::size_t mask = bit_mask(q);
    const std::size_t n = amps_.size();
    for (std::size_t base = 0; base < n; base += 2 * mask) {
        for (std::size_t off = 0; off < mask; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + mask;
            const cplx a0 = amps_[i0];
            const cplx a1 = amps_[i1];
            amps_[i0] = c * a0 - s * a1;
            amps_[i1] = s * a0 + c * a1;
        }
    }
}

void StateVector::apply_rz(int q, double theta) {
    check_qubit(q, "apply_rz");
    const cplx phase_0 = std::polar(1.0, -theta / 2.0);
    const cplx phase_1 = std::polar(1.0, theta / 2.0);
    const std::size_t mask = bit_mask(q);
    const std::size_t n = amps_.size();
    for (std::size_t i = 0; i < n; ++i) {
        amps_[i] *= (i & mask) ? phase_1 : phase_0;
    }
}

void StateVector::apply_rzz(int qa, int qb, double theta) {
    check_qubit(qa, "apply_rzz");
    check_qubit(qb, "apply_rzz");
    if (qa == qb) {
        throw std::invalid_argument("apply_rzz: qubits must be distinct");
    }
    const cplx phase_even = std::polar(1.0, -theta / 2.0); // equal bits
    const cplx phase_odd = std::polar(1.0, theta / 2.0);   // differing bits
    const std::size_t ma = bit_mask(qa);
    const std::size_t mb = bit_mask(qb);
    const std::size_t n = amps_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const bool odd = ((i & ma) != 0) != ((i & mb) != 0);
        amps_[i] *= odd ? phase_odd : phase_even;
    }
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> probs(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        probs[i] = std::norm(amps_[i]);
    }
    return probs;
}

std::vector<std::uint64_t> StateVector::sample_basis(std::uint64_t seed, int shots) const {
    Rng rng(seed);
    return sample_basis(rng, shots);
}

std::vector<std::uint64_t> StateVector::sample_basis(Rng& rng, int shots) const {
    if (shots < 1) {
        throw std::invalid_argument("sample_basis: shots must be >= 1");
    }
    // inverse-CDF sampling against the cumulative measurement distribution
    std::vector<double> cdf(amps_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        acc += std::norm(amps_[i]);
        cdf[i] = acc;
    }
    cdf.back() = std::max(cdf.back(), 1.0);
    std::vector<std::uint64_t> out(static_cast<std::size_t>(shots));
    for (auto& idx : out) {
        const double u = rng.uniform();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        idx = static_cast<std::uint64_t>(it - cdf.begin());
        if (idx >= cdf.size()) {
            idx = cdf.size() - 1;
        }
    }
    return out;
}

double StateVector::expect_z(int qubit) const {
    check_qubit(qubit, "expect_z");
    const std::size_t mask = bit_mask(qubit);
    double acc = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const double p = std::norm(amps_[i]);
        acc += (i & mask) ? -p : p;
    }
    return acc;
}

std::vector<double> StateVector::expect_z_all() const {
    std::vector<double> acc(static_cast<std::size_t>(n_qubits_), 0.0);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const double p = std::norm(amps_[i]);
        for (int q = 0; q < n_qubits_; ++q) {
            acc[static_cast<std::size_t>(q)] += (i & bit_mask(q)) ? -p : p;
        }
    }
    return acc;
}

std::vector<double> StateVector::marginal_register_probs(int first, int count) const {
    if (count < 1 || first < 0 || first + count > n_qubits_) {
        throw std::invalid_argument("marginal_register_probs: invalid qubit range");
    }
    const int shift = n_qubits_ - (first + count); // low-order bits to drop
    const std::size_t reg_mask = (std::size_t{1} << count) - 1;
    std::vector<double> probs(std::size_t{1} << count, 0.0);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        probs[(i >> shift) & reg_mask] += std::norm(amps_[i]);
    }
    return probs;
}

double StateVector::norm_squared() const {
    double acc = 0.0;
    for (const cplx& a : amps_) {
        acc += std::norm(a);
    }
    return acc;
}

void apply_gate(StateVector& state, const GateOp& gate, std::optional<double> resolved_angle) {
    double angle = 0.0;
    if (gate.is_parametric()) {
        if (resolved_angle.has_value()) {
            angle = *resolved_angle;
        } else if (gate.angle.kind == AngleKind::Fixed) {
            angle = gate.angle.value;
        } else {
            throw std::invalid_argument("apply_gate: parametric gate without a resolved angle");
        }
    }
    switch (gate.kind) {
    case GateKind::H:
        state.apply_h(gate.q0);
        break;
    case GateKind::CNOT:
        state.apply_cnot(gate.q0, gate.q1);
        break;
    case GateKind::RX:
        state.apply_rx(gate.q0, angle);
        break;
    case GateKind::RY:
        state.apply_ry(gate.q0, angle);
        break;
    case GateKind::RZ:
        state.apply_rz(gate.q0, angle);
        break;
    case GateKind::RZZ:
        state.apply_rzz(gate.q0, gate.q1, angle);
        break;
    }
}

} // namespace qgen
