#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qgen/rng.hpp"

namespace qgen {

using cplx = std::complex<double>;

/// Gate alphabet. All parametric kinds (RX, RY, RZ, RZZ) have two-eigenvalue
/// Pauli generators, so the two-term parameter-shift rule applies to every
/// trainable angle. RZZ(theta) = exp(-i * theta * Z(x)Z / 2).
enum class GateKind { H, CNOT, RX, RY, RZ, RZZ };

enum class AngleKind { None, Fixed, Param, Noise };

/// Where a parametric gate gets its angle from: a literal value, a slot in
/// the trainable parameter vector, or a slot in the injected noise vector.
struct AngleSource {
    AngleKind kind = AngleKind::None;
    double value = 0.0;
    int slot = -1;

    static AngleSource none() { return {}; }
    static AngleSource fixed(double radians) { return {AngleKind::Fixed, radians, -1}; }
    static AngleSource param(int slot) { return {AngleKind::Param, 0.0, slot}; }
    static AngleSource noise(int slot) { return {AngleKind::Noise, 0.0, slot}; }
};

struct GateOp {
    GateKind kind = GateKind::H;
    int q0 = -1;
    int q1 = -1; // CNOT target / RZZ second qubit, otherwise unused
    AngleSource angle;

    bool is_parametric() const {
        return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ ||
               kind == GateKind::RZZ;
    }
    int arity() const { return (kind == GateKind::CNOT || kind == GateKind::RZZ) ? 2 : 1; }
};

inline GateOp make_h(int q) { return {GateKind::H, q, -1, AngleSource::none()}; }
inline GateOp make_cnot(int control, int target) {
    return {GateKind::CNOT, control, target, AngleSource::none()};
}
inline GateOp make_rx(int q, AngleSource a) { return {GateKind::RX, q, -1, a}; }
inline GateOp make_ry(int q, AngleSource a) { return {GateKind::RY, q, -1, a}; }
inline GateOp make_rz(int q, AngleSource a) { return {GateKind::RZ, q, -1, a}; }
inline GateOp make_rzz(int qa, int qb, AngleSource a) { return {GateKind::RZZ, qa, qb, a}; }

/// Exact dense state vector for an n-qubit register.
///
/// Bit convention, fixed project-wide: qubit 0 is the MOST significant bit of
/// the basis index, i.e. basis index i on n qubits reads its binary expansion
/// left to right as qubits 0..n-1. All register splitting, sampling and
/// expectation code relies on this single convention.
class StateVector {
  public:
    /// Initializes |0...0>.
    explicit StateVector(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes() { return amps_; }

    void reset(); // back to |0...0>

    void apply_h(int q);
    void apply_cnot(int control, int target);
    void apply_rx(int q, double theta);
    void apply_ry(int q, double theta);
    void apply_rz(int q, double theta);
    void apply_rzz(int qa, int qb, double theta);

    /// |amplitude_i|^2 for every basis index; sums to 1 up to rounding.
    std::vector<double> probabilities() const;

    /// Draws `shots` i.i.d. basis indices from the measurement distribution.
    std::vector<std::uint64_t> sample_basis(std::uint64_t seed, int shots) const;
    std::vector<std::uint64_t> sample_basis(Rng& rng, int shots) const;

    /// <sigma_z> on one qubit, in [-1, 1].
    double expect_z(int qubit) const;
    /// <sigma_z> on every qubit in one pass over the amplitudes.
    std::vector<double> expect_z_all() const;

    /// Measurement distribution of the contiguous qubit range
    /// [first, first + count), tracing out everything else.
    std::vector<double> marginal_register_probs(int first, int count) const;

    double norm_squared() const;

  private:
    int n_qubits_;
    std::vector<cplx> amps_;

    // Mask of the index bit carrying `qubit` (qubit 0 = MSB).
    std::size_t bit_mask(int qubit) const {
        return std::size_t{1} << (n_qubits_ - 1 - qubit);
    }
    void check_qubit(int q, const char* what) const;
};

/// Applies one gate, resolving the angle of parametric kinds.
/// `resolved_angle` must be provided for Param/Noise sources and may be
/// omitted for Fixed ones (the stored value is used). H and CNOT reject a
/// provided angle source by construction of GateOp.
void apply_gate(StateVector& state, const GateOp& gate,
                std::optional<double> resolved_angle = std::nullopt);

} // namespace qgen
