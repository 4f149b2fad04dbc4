#pragma once

// Test-only oracles, kept independent of the implementation paths they check:
// gates become explicit 2^n x 2^n matrices applied by dense multiplication.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "qgen/rng.hpp"
#include "qgen/statevector.hpp"

namespace qgen::test {

using DenseMatrix = std::vector<std::vector<cplx>>;

inline DenseMatrix dense_identity(std::size_t dim) {
    DenseMatrix m(dim, std::vector<cplx>(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
        m[i][i] = 1.0;
    }
    return m;
}

inline DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
    const std::size_t ar = a.size();
    const std::size_t br = b.size();
    DenseMatrix out(ar * br, std::vector<cplx>(ar * br, 0.0));
    for (std::size_t i = 0; i < ar; ++i) {
        for (std::size_t j = 0; j < ar; ++j) {
            for (std::size_t k = 0; k < br; ++k) {
                for (std::size_t l = 0; l < br; ++l) {
                    out[i * br + k][j * br + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    return out;
}

inline DenseMatrix single_qubit_matrix(GateKind kind, double theta) {
    const cplx I{0.0, 1.0};
    switch (kind) {
    case GateKind::H: {
        const double s = 1.0 / std::sqrt(2.0);
        return {{s, s}, {s, -s}};
    }
    case GateKind::RX:
        return {{std::cos(theta / 2), -I * std::sin(theta / 2)},
                {-I * std::sin(theta / 2), std::cos(theta / 2)}};
    case GateKind::RY:
        return {{std::cos(theta / 2), -std::sin(theta / 2)},
                {std::sin(theta / 2), std::cos(theta / 2)}};
    case GateKind::RZ:
        return {{std::exp(-I * theta / 2.0), 0.0}, {0.0, std::exp(I * theta / 2.0)}};
    default:
        throw std::invalid_argument("not a single-qubit gate");
    }
}

inline DenseMatrix two_qubit_matrix(GateKind kind, double theta) {
    const cplx I{0.0, 1.0};
    if (kind == GateKind::CNOT) {
        // basis order |c t> = |00>,|01>,|10>,|11>
        return {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
    }
    if (kind == GateKind::RZZ) {
        const cplx even = std::exp(-I * theta / 2.0);
        const cplx odd = std::exp(I * theta / 2.0);
        return {{even, 0, 0, 0}, {0, odd, 0, 0}, {0, 0, odd, 0}, {0, 0, 0, even}};
    }
    throw std::invalid_argument("not a two-qubit gate");
}

/// Full 2^n x 2^n unitary of one gate, built by explicit embedding with
/// qubit 0 as the most significant bit.
inline DenseMatrix full_gate_unitary(const GateOp& gate, int n_qubits, double theta) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (gate.arity() == 1) {
        DenseMatrix out{{cplx{1.0, 0.0}}};
        const DenseMatrix u = single_qubit_matrix(gate.kind, theta);
        const DenseMatrix eye{{1.0, 0.0}, {0.0, 1.0}};
        for (int q = 0; q < n_qubits; ++q) {
            out = kron(out, q == gate.q0 ? u : eye);
        }
        return out;
    }
    const DenseMatrix g = two_qubit_matrix(gate.kind, theta);
    const auto bit = [&](std::size_t index, int qubit) {
        return (index >> (n_qubits - 1 - qubit)) & 1;
    };
    DenseMatrix out(dim, std::vector<cplx>(dim, 0.0));
    const std::size_t other_mask =
        (dim - 1) & ~((std::size_t{1} << (n_qubits - 1 - gate.q0)) |
                      (std::size_t{1} << (n_qubits - 1 - gate.q1)));
    for (std::size_t row = 0; row < dim; ++row) {
        for (std::size_t col = 0; col < dim; ++col) {
            if ((row & other_mask) != (col & other_mask)) {
                continue;
            }
            const std::size_t a = bit(row, gate.q0) * 2 + bit(row, gate.q1);
            const std::size_t b = bit(col, gate.q0) * 2 + bit(col, gate.q1);
            out[row][col] = g[a][b];
        }
    }
    return out;
}

inline std::vector<cplx> dense_apply(const DenseMatrix& u, const std::vector<cplx>& v) {
    std::vector<cplx> out(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            out[i] += u[i][j] * v[j];
        }
    }
    return out;
}

/// Kolmogorov-Smirnov statistic of samples against a CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        worst = std::max(worst, std::abs(f - static_cast<double>(i) / n));
        worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return worst;
}

/// Random circuit over the full gate alphabet; angles uniform in (-pi, pi).
inline std::vector<std::pair<GateOp, double>> random_circuit(int n_qubits, int n_gates, Rng& rng) {
    std::vector<std::pair<GateOp, double>> circuit;
    constexpr double pi = 3.14159265358979323846;
    for (int g = 0; g < n_gates; ++g) {
        const auto kind = static_cast<GateKind>(rng.below(6));
        const int q0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_qubits)));
        double theta = rng.uniform(-pi, pi);
        GateOp op;
        if (kind == GateKind::CNOT || kind == GateKind::RZZ) {
            if (n_qubits < 2) {
                --g;
                continue;
            }
            int q1 = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_qubits)));
            while (q1 == q0) {
                q1 = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_qubits)));
            }
            op = kind == GateKind::CNOT ? make_cnot(q0, q1)
                                        : make_rzz(q0, q1, AngleSource::fixed(theta));
        } else {
            switch (kind) {
            case GateKind::H:
                op = make_h(q0);
                break;
            case GateKind::RX:
                op = make_rx(q0, AngleSource::fixed(theta));
                break;
            case GateKind::RY:
                op = make_ry(q0, AngleSource::fixed(theta));
                break;
            default:
                op = make_rz(q0, AngleSource::fixed(theta));
                break;
            }
        }
        circuit.emplace_back(op, theta);
    }
    return circuit;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace qgen::test
