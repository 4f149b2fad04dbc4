#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "qgen/datasets.hpp"

using namespace qgen;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

} // namespace

TEST_CASE("generators are deterministic in the seed") {
    const auto a = gen_mixed_gaussian(2, 500, 42);
    const auto b = gen_mixed_gaussian(2, 500, 42);
    CHECK(a.points.data == b.points.data);
    const auto c = gen_x(3, 500, 7);
    const auto d = gen_x(3, 500, 7);
    CHECK(c.points.data == d.points.data);
    const auto e = gen_o(2, 500, 9);
    const auto f = gen_o(2, 500, 9);
    CHECK(e.points.data == f.points.data);
}

TEST_CASE("mixed gaussian sample mean matches the recorded mixture moments") {
    const std::int64_t n = 100000;
    const auto ds = gen_mixed_gaussian(2, n, 1234);
    const auto means = ds.metadata.at("means").get<std::vector<std::vector<double>>>();
    const auto factors = ds.metadata.at("cov_factors").get<std::vector<std::vector<double>>>();

    for (int k = 0; k < 2; ++k) {
        const double mix_mean = 0.5 * (means[0][k] + means[1][k]);
        double sample_mean = 0.0;
        for (std::size_t i = 0; i < ds.points.rows; ++i) {
            sample_mean += ds.points(i, static_cast<std::size_t>(k));
        }
        sample_mean /= static_cast<double>(n);

        // per-coordinate mixture variance from the recorded parameters
        double var = 0.0;
        for (int c = 0; c < 2; ++c) {
            double row_var = 0.05;
            for (int j = 0; j < 2; ++j) {
                const double s = factors[static_cast<std::size_t>(c)][static_cast<std::size_t>(
                    k * 2 + j)];
                row_var += s * s;
            }
            const double dm = means[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] -
                              mix_mean;
            var += 0.5 * (row_var + dm * dm);
        }
        const double bound = 5.0 * std::sqrt(var / static_cast<double>(n));
        CHECK(std::abs(sample_mean - mix_mean) <= bound);
    }
}

TEST_CASE("mixed gaussian component proportions are balanced") {
    const std::int64_t n = 100000;
    const auto ds = gen_mixed_gaussian(3, n, 77);
    const auto count_a = ds.metadata.at("component_a_count").get<std::int64_t>();
    const double prop = static_cast<double>(count_a) / static_cast<double>(n);
    CHECK(std::abs(prop - 0.5) <= 0.01);
}

TEST_CASE("x dataset lies on the branches and has uniform marginals") {
    const std::int64_t n = 50000;
    const auto ds2 = gen_x(2, n, 5);
    for (std::size_t i = 0; i < ds2.points.rows; ++i) {
        CHECK(std::abs(std::abs(ds2.points(i, 1)) - std::abs(ds2.points(i, 0))) <= 1e-15);
    }
    const double ks_bound = 1.63 / std::sqrt(static_cast<double>(n));
    const auto uniform_cdf = [](double x) { return (x + 1.0) / 2.0; };
    for (int k = 0; k < 2; ++k) {
        std::vector<double> column(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < column.size(); ++i) {
            column[i] = ds2.points(i, static_cast<std::size_t>(k));
        }
        CHECK(test::ks_statistic(column, uniform_cdf) <= ks_bound);
    }
}

TEST_CASE("x 3d uses the four cube diagonals in equal proportion") {
    const std::int64_t n = 100000;
    const auto ds = gen_x(3, n, 17);
    for (std::size_t i = 0; i < ds.points.rows; ++i) {
        const double t = std::abs(ds.points(i, 2));
        CHECK(std::abs(std::abs(ds.points(i, 0)) - t) <= 1e-15);
        CHECK(std::abs(std::abs(ds.points(i, 1)) - t) <= 1e-15);
    }
    const auto counts = ds.metadata.at("branch_counts").get<std::vector<std::int64_t>>();
    REQUIRE(counts.size() == 4);
    for (auto c : counts) {
        CHECK(std::abs(static_cast<double>(c) / static_cast<double>(n) - 0.25) <= 0.01);
    }
    // every coordinate marginal is Uniform(-1, 1)
    const double ks_bound = 1.63 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < 3; ++k) {
        std::vector<double> column(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < column.size(); ++i) {
            column[i] = ds.points(i, static_cast<std::size_t>(k));
        }
        CHECK(test::ks_statistic(column, [](double x) { return (x + 1.0) / 2.0; }) <= ks_bound);
    }
}

TEST_CASE("o dataset points have unit norm") {
    for (int dim = 2; dim <= 3; ++dim) {
        const auto ds = gen_o(dim, 20000, 3);
        for (std::size_t i = 0; i < ds.points.rows; ++i) {
            double norm2 = 0.0;
            for (int k = 0; k < dim; ++k) {
                norm2 += ds.points(i, static_cast<std::size_t>(k)) *
                         ds.points(i, static_cast<std::size_t>(k));
            }
            CHECK(std::abs(std::sqrt(norm2) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("o 2d marginal follows the arcsine law") {
    const std::int64_t n = 50000;
    const auto ds = gen_o(2, n, 2718);
    std::vector<double> column(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < column.size(); ++i) {
        column[i] = ds.points(i, 0);
    }
    const auto arcsine_cdf = [](double x) { return std::asin(x) / kPi + 0.5; };
    CHECK(test::ks_statistic(column, arcsine_cdf) <= 0.01);
}

TEST_CASE("o 3d marginals are uniform") {
    const std::int64_t n = 100000;
    const auto ds = gen_o(3, n, 31415);
    const double ks_bound = 1.63 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < 3; ++k) {
        std::vector<double> column(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < column.size(); ++i) {
            column[i] = ds.points(i, static_cast<std::size_t>(k));
        }
        CHECK(test::ks_statistic(column, [](double x) { return (x + 1.0) / 2.0; }) <= ks_bound);
    }
}

TEST_CASE("stocks returns are plain percentage changes") {
    const std::string path = temp_path("qgen_stocks_a.csv");
    write_file(path, "date,close\n2020-01-01,100\n2020-01-02,101\n2020-01-03,99.99\n");
    const auto ds = load_stocks({path});
    REQUIRE(ds.points.rows == 2);
    CHECK(ds.points(0, 0) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(ds.points(1, 0) == doctest::Approx(-0.01).epsilon(1e-12)); // (99.99-101)/101
}

TEST_CASE("stocks with disjoint dates fail loudly") {
    const std::string a = temp_path("qgen_stocks_b.csv");
    const std::string b = temp_path("qgen_stocks_c.csv");
    write_file(a, "date,close\n2020-01-01,100\n2020-01-02,101\n");
    write_file(b, "date,close\n2021-01-01,50\n2021-01-02,51\n");
    CHECK_THROWS_AS(load_stocks({a, b}), std::runtime_error);
}

TEST_CASE("constant price series produce all-zero returns") {
    const std::string path = temp_path("qgen_stocks_d.csv");
    write_file(path, "date,close\n2020-01-01,42\n2020-01-02,42\n2020-01-03,42\n");
    const auto ds = load_stocks({path});
    for (double v : ds.points.data) {
        CHECK(v == doctest::Approx(0.0));
    }
}

TEST_CASE("non-positive prices are rejected") {
    const std::string path = temp_path("qgen_stocks_e.csv");
    write_file(path, "date,close\n2020-01-01,10\n2020-01-02,-3\n");
    CHECK_THROWS_AS(load_stocks({path}), std::runtime_error);
}

TEST_CASE("two aligned series form a 2d returns matrix") {
    const std::string a = temp_path("qgen_stocks_f.csv");
    const std::string b = temp_path("qgen_stocks_g.csv");
    write_random_walk_csv(a, 1878, 1);
    write_random_walk_csv(b, 1878, 2);
    const auto ds = load_stocks({a, b});
    CHECK(ds.points.rows == 1877);
    CHECK(ds.points.cols == 2);
}

TEST_CASE("points csv round trip") {
    Matrix m(3, 2);
    m.data = {0.25, -1.5, 3.14159, 0.0, 1e-17, 42.0};
    const std::string path = temp_path("qgen_points.csv");
    write_points_csv(path, m);
    const Matrix back = read_points_csv(path);
    REQUIRE(back.rows == 3);
    REQUIRE(back.cols == 2);
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        CHECK(back.data[i] == doctest::Approx(m.data[i]).epsilon(1e-15));
    }
}
