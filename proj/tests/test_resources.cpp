#include <doctest.h>

#include "qgen/resources.hpp"

using namespace qgen;

TEST_CASE("table rows for the paper's example sizes") {
    const auto cont = estimate(CircuitKind::Continuous, 2, 0, 1, 100);
    CHECK(cont.qubits == 2);
    CHECK(cont.gates_per_block == 10);
    CHECK(cont.depth_per_block == 6);
    CHECK(cont.runtime_per_sample == 100 * 6);

    const auto std24 = estimate(CircuitKind::DiscreteStandard, 2, 4, 1, 1);
    CHECK(std24.qubits == 8);
    CHECK(std24.gates_per_block == 22);
    CHECK(std24.depth_per_block == 10);
    CHECK(std24.runtime_per_sample == 10);

    const auto cop24 = estimate(CircuitKind::DiscreteCopula, 2, 4, 1, 1);
    CHECK(cop24.qubits == 8);
    CHECK(cop24.init_gates == 8);
    CHECK(cop24.init_depth == 5);
    CHECK(cop24.gates_per_block == 36);
    CHECK(cop24.depth_per_block == 9);
    CHECK(cop24.runtime_per_sample == 5 + 9);
}

TEST_CASE("closed-form grid matches the formulas everywhere") {
    for (int d = 1; d <= 5; ++d) {
        for (int r = 2; r <= 8; ++r) {
            for (int nb = 1; nb <= 8; ++nb) {
                for (const int ns : {1, 100}) {
                    const auto cont = estimate(CircuitKind::Continuous, d, 0, nb, ns);
                    CHECK(cont.gates_per_block == 5 * d);
                    CHECK(cont.depth_per_block == d + 4);
                    CHECK(cont.runtime_per_sample ==
                          static_cast<long long>(ns) * nb * (d + 4));

                    const auto st = estimate(CircuitKind::DiscreteStandard, d, r, nb, ns);
                    CHECK(st.qubits == r * d);
                    CHECK(st.gates_per_block == 3 * r * d - 2);
                    CHECK(st.depth_per_block == r * d + 2);
                    CHECK(st.runtime_per_sample == static_cast<long long>(nb) * (r * d + 2));

                    const auto cop = estimate(CircuitKind::DiscreteCopula, d, r, nb, ns);
                    CHECK(cop.init_gates == r * d);
                    CHECK(cop.init_depth == r * (d - 1) + 1);
                    CHECK(cop.gates_per_block == r * d * (r + 5) / 2);
                    CHECK(cop.depth_per_block == r * (r - 1) / 2 + 3);
                    CHECK(cop.runtime_per_sample ==
                          r * (d - 1) + 1 + static_cast<long long>(nb) * (r * (r - 1) / 2 + 3));
                }
            }
        }
    }
}

TEST_CASE("runtime grows linearly in the dimension") {
    for (const auto kind :
         {CircuitKind::Continuous, CircuitKind::DiscreteStandard, CircuitKind::DiscreteCopula}) {
        long long prev_delta = -1;
        for (int d = 2; d <= 20; ++d) {
            const auto lo = estimate(kind, d - 1, 4, 3, 100);
            const auto hi = estimate(kind, d, 4, 3, 100);
            const long long delta = hi.runtime_per_sample - lo.runtime_per_sample;
            if (prev_delta >= 0) {
                CHECK(delta == prev_delta);
            }
            prev_delta = delta;
        }
    }
}

TEST_CASE("runtime crossover at the paper's operating point is r = 267") {
    CHECK(runtime_crossover_r(100, 8, 3) == 267);
    CHECK(runtime_crossover_r(1, 1, 1) == 1);
    CHECK(runtime_crossover_r(100, 1, 1) == 100);
}

TEST_CASE("audits of built circuits confirm the formulas") {
    for (int d = 1; d <= 4; ++d) {
        for (int nb = 1; nb <= 3; ++nb) {
            const auto cont_audit = audit_circuit(build_continuous(d, nb));
            if (d == 1) {
                CHECK_FALSE(cont_audit.deviations.empty()); // no entangling ring
            } else {
                CHECK(cont_audit.gates_match);
                CHECK(cont_audit.depth_within_one);
                CHECK(cont_audit.measured_depth_per_block == d + 4);
            }
            for (int r = 2; r <= 6; ++r) {
                if (r * d >= 3) {
                    const auto st = audit_circuit(build_discrete_standard(d, r, nb));
                    CHECK(st.gates_match);
                    CHECK(st.actual_params_per_block == 3 * r * d - 2);
                    CHECK(st.depth_within_one);
                }
                if (d >= 2) {
                    const auto cop = audit_circuit(build_discrete_copula(d, r, nb));
                    CHECK(cop.gates_match);
                    CHECK(cop.actual_params_per_block == r * d * (r + 5) / 2);
                    CHECK(cop.depth_within_one);
                    CHECK(cop.measured_init_depth == r * (d - 1) + 1);
                    CHECK(cop.measured_depth_per_block == r * (r - 1) / 2 + 3);
                }
            }
        }
    }
}

TEST_CASE("audit reports the standard-architecture params exactly") {
    const auto audit = audit_circuit(build_discrete_standard(3, 4, 1));
    CHECK(audit.actual_params_per_block == 34);
    CHECK(audit.gates_match);
}

TEST_CASE("estimate rejects invalid arguments") {
    CHECK_THROWS_AS(estimate(CircuitKind::Continuous, 0, 0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(estimate(CircuitKind::DiscreteCopula, 2, 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(estimate(CircuitKind::DiscreteStandard, 2, 4, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(runtime_crossover_r(0, 1, 1), std::invalid_argument);
}
