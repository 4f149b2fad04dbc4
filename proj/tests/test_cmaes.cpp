#include <doctest.h>

#include <cmath>

#include "qgen/cmaes.hpp"
#include "qgen/rng.hpp"

using namespace qgen;

namespace {

double sphere(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) {
        acc += v * v;
    }
    return acc;
}

double rosenbrock(std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        acc += 100.0 * a * a + b * b;
    }
    return acc;
}

} // namespace

TEST_CASE("jacobi eigensolver factorizes a symmetric matrix") {
    const std::vector<double> a{4.26, -1.38, 1.10, -1.38, 5.49, 0.26, 1.10, 0.26, 4.25};
    std::vector<double> evals;
    std::vector<double> evecs;
    jacobi_eigen_symmetric(a, 3, evals, evecs);
    // reconstruct and compare
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) {
                acc += evecs[static_cast<std::size_t>(i * 3 + k)] * evals[static_cast<std::size_t>(k)] *
                       evecs[static_cast<std::size_t>(j * 3 + k)];
            }
            CHECK(acc == doctest::Approx(a[static_cast<std::size_t>(i * 3 + j)]).epsilon(1e-9));
        }
    }
    // orthonormal columns
    for (int c1 = 0; c1 < 3; ++c1) {
        for (int c2 = 0; c2 < 3; ++c2) {
            double dot = 0.0;
            for (int k = 0; k < 3; ++k) {
                dot += evecs[static_cast<std::size_t>(k * 3 + c1)] *
                       evecs[static_cast<std::size_t>(k * 3 + c2)];
            }
            CHECK(dot == doctest::Approx(c1 == c2 ? 1.0 : 0.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("sphere in 10 dimensions reaches 1e-8 within 2000 evaluations") {
    const auto [best, value] =
        cmaes_minimize(sphere, 10, 2000, 1, 0.3, std::vector<double>(10, 0.5));
    CHECK(value <= 1e-8);
}

TEST_CASE("rosenbrock in 5 dimensions reaches 1e-4 within 20000 evaluations") {
    const auto [best, value] =
        cmaes_minimize(rosenbrock, 5, 20000, 2, 0.3, std::vector<double>(5, 0.0));
    CHECK(value <= 1e-4);
}

TEST_CASE("a constant objective does not crash or blow up") {
    const auto constant = [](std::span<const double>) { return 1.0; };
    const auto [best, value] = cmaes_minimize(constant, 4, 400, 3, 0.1);
    CHECK(value == doctest::Approx(1.0));
    for (double v : best) {
        CHECK(std::isfinite(v));
    }
}

TEST_CASE("optimization is deterministic in the seed") {
    const auto [xa, va] = cmaes_minimize(sphere, 6, 600, 77, 0.2, std::vector<double>(6, 0.4));
    const auto [xb, vb] = cmaes_minimize(sphere, 6, 600, 77, 0.2, std::vector<double>(6, 0.4));
    CHECK(xa == xb);
    CHECK(va == vb);
}

TEST_CASE("covariance stays usable on a degenerate objective") {
    // flat in every direction but one; eigenvalue floor must keep sampling alive
    const auto ridge = [](std::span<const double> x) { return x[0] * x[0]; };
    CmaEs es(std::vector<double>(5, 1.0), 0.5, 0, 9);
    std::vector<double> values(static_cast<std::size_t>(es.lambda()));
    for (int gen = 0; gen < 150; ++gen) {
        const auto& cands = es.ask();
        for (std::size_t i = 0; i < cands.size(); ++i) {
            values[i] = ridge(cands[i]);
            CHECK(std::isfinite(values[i]));
        }
        es.tell(values);
        CHECK(std::isfinite(es.sigma()));
    }
    CHECK(es.best_value() <= 1e-6);
}

TEST_CASE("default population follows 4 + floor(3 ln n)") {
    CmaEs es10(std::vector<double>(10, 0.0), 0.1, 0, 1);
    CHECK(es10.lambda() == 4 + static_cast<int>(std::floor(3.0 * std::log(10.0))));
    CmaEs es36(std::vector<double>(36, 0.0), 0.1, 0, 1);
    CHECK(es36.lambda() == 4 + static_cast<int>(std::floor(3.0 * std::log(36.0))));
}
