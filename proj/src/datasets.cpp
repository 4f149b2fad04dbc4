#include "qgen/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qgen/rng.hpp"

namespace qgen {

std::string dataset_name_str(DatasetName name) {
    switch (name) {
    case DatasetName::MixedGaussian:
        return "mixed_gaussian";
    case DatasetName::X:
        return "x";
    case DatasetName::O:
        return "o";
    case DatasetName::Stocks:
        return "stocks";
    }
    return "unknown";
}

DatasetName dataset_name_from_str(const std::string& s) {
    if (s == "mixed_gaussian" || s == "mg") {
        return DatasetName::MixedGaussian;
    }
    if (s == "x") {
        return DatasetName::X;
    }
    if (s == "o") {
        return DatasetName::O;
    }
    if (s == "stocks") {
        return DatasetName::Stocks;
    }
    throw std::invalid_argument("unknown dataset name: " + s);
}

namespace {

void check_dim(int dim) {
    if (dim != 2 && dim != 3) {
        throw std::invalid_argument("dataset dimension must be 2 or 3");
    }
}

} // namespace

RawDataset gen_mixed_gaussian(int dim, std::int64_t n, std::uint64_t seed) {
    check_dim(dim);
    Rng rng(seed);
    const std::size_t d = static_cast<std::size_t>(dim);

    // component parameters first, then the points, so the draw order is fixed
    std::vector<std::vector<double>> means(2, std::vector<double>(d));
    std::vector<std::vector<double>> factors(2, std::vector<double>(d * d)); // S, row-major
    for (int c = 0; c < 2; ++c) {
        for (std::size_t k = 0; k < d; ++k) {
            means[static_cast<std::size_t>(c)][k] = rng.uniform(-1.0, 1.0);
        }
        for (std::size_t k = 0; k < d * d; ++k) {
            factors[static_cast<std::size_t>(c)][k] = rng.uniform(-0.3, 0.3);
        }
    }

    RawDataset ds;
    ds.name = DatasetName::MixedGaussian;
    ds.dim = dim;
    ds.seed = seed;
    ds.points = Matrix(static_cast<std::size_t>(n), d);
    std::int64_t count_a = 0;
    std::vector<double> g1(d);
    std::vector<double> g2(d);
    const double iso = std::sqrt(0.05);
    for (std::int64_t i = 0; i < n; ++i) {
        const int c = rng.uniform() < 0.5 ? 0 : 1;
        count_a += (c == 0);
        for (std::size_t k = 0; k < d; ++k) {
            g1[k] = rng.normal();
        }
        for (std::size_t k = 0; k < d; ++k) {
            g2[k] = rng.normal();
        }
        // x = mean + S*g1 + sqrt(0.05)*g2 has covariance S*S^T + 0.05*I
        const auto& mu = means[static_cast<std::size_t>(c)];
        const auto& s = factors[static_cast<std::size_t>(c)];
        for (std::size_t row = 0; row < d; ++row) {
            double v = mu[row] + iso * g2[row];
            for (std::size_t col = 0; col < d; ++col) {
                v += s[row * d + col] * g1[col];
            }
            ds.points(static_cast<std::size_t>(i), row) = v;
        }
    }
    ds.metadata = {{"means", means},
                   {"cov_factors", factors},
                   {"iso_variance", 0.05},
                   {"component_a_count", count_a},
                   {"n", n},
                   {"seed", seed}};
    return ds;
}

RawDataset gen_x(int dim, std::int64_t n, std::uint64_t seed) {
    check_dim(dim);
    Rng rng(seed);
    RawDataset ds;
    ds.name = DatasetName::X;
    ds.dim = dim;
    ds.seed = seed;
    ds.points = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(dim));
    std::vector<std::int64_t> branch_counts(dim == 2 ? 2 : 4, 0);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t row = static_cast<std::size_t>(i);
        const double t = rng.uniform(-1.0, 1.0);
        if (dim == 2) {
            const auto b = rng.below(2);
            ++branch_counts[b];
            ds.points(row, 0) = t;
            ds.points(row, 1) = (b == 0 ? t : -t);
        } else {
            const auto b = rng.below(4);
            ++branch_counts[b];
            const double s0 = (b & 1) ? -1.0 : 1.0;
            const double s1 = (b & 2) ? -1.0 : 1.0;
            ds.points(row, 0) = s0 * t;
            ds.points(row, 1) = s1 * t;
            ds.points(row, 2) = t;
        }
    }
    ds.metadata = {{"branch_counts", branch_counts}, {"n", n}, {"seed", seed}};
    return ds;
}

RawDataset gen_o(int dim, std::int64_t n, std::uint64_t seed) {
    check_dim(dim);
    Rng rng(seed);
    RawDataset ds;
    ds.name = DatasetName::O;
    ds.dim = dim;
    ds.seed = seed;
    ds.points = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(dim));
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t row = static_cast<std::size_t>(i);
        if (dim == 2) {
            const double phi = rng.uniform(0.0, two_pi);
            ds.points(row, 0) = std::cos(phi);
            ds.points(row, 1) = std::sin(phi);
        } else {
            double x = 0.0;
            double y = 0.0;
            double z = 0.0;
            double norm = 0.0;
            do {
                x = rng.normal();
                y = rng.normal();
                z = rng.normal();
                norm = std::sqrt(x * x + y * y + z * z);
            } while (norm < 1e-12);
            ds.points(row, 0) = x / norm;
            ds.points(row, 1) = y / norm;
            ds.points(row, 2) = z / norm;
        }
    }
    ds.metadata = {{"n", n}, {"seed", seed}};
    return ds;
}

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open CSV file: " + path);
    }
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    if (first) {
        throw std::runtime_error("CSV file has no header row: " + path);
    }
    return table;
}

std::size_t column_index(const CsvTable& table, const std::string& name, const std::string& path) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i] == name) {
            return i;
        }
    }
    throw std::runtime_error("CSV file " + path + " has no column named '" + name + "'");
}

} // namespace

RawDataset load_stocks(const std::vector<std::string>& csv_paths, const StocksColumns& columns) {
    if (csv_paths.empty()) {
        throw std::invalid_argument("load_stocks: at least one CSV path required");
    }
    const std::size_t d = csv_paths.size();
    std::vector<std::map<std::string, double>> series(d); // date -> close
    for (std::size_t s = 0; s < d; ++s) {
        const CsvTable table = read_csv(csv_paths[s]);
        const std::size_t date_col = column_index(table, columns.date, csv_paths[s]);
        const std::size_t close_col = column_index(table, columns.close, csv_paths[s]);
        for (const auto& row : table.rows) {
            if (row.size() <= std::max(date_col, close_col)) {
                continue; // short row: treat as missing value
            }
            double close = 0.0;
            try {
                close = std::stod(row[close_col]);
            } catch (const std::exception&) {
                throw std::runtime_error("unparseable close price '" + row[close_col] + "' in " +
                                         csv_paths[s]);
            }
            if (!(close > 0.0)) {
                throw std::runtime_error("non-positive close price in " + csv_paths[s]);
            }
            series[s][row[date_col]] = close;
        }
    }

    // common dates only; ISO-8601 strings sort chronologically
    std::vector<std::string> dates;
    for (const auto& [date, close] : series[0]) {
        bool everywhere = true;
        for (std::size_t s = 1; s < d && everywhere; ++s) {
            everywhere = series[s].count(date) > 0;
        }
        if (everywhere) {
            dates.push_back(date);
        }
    }
    if (dates.size() < 2) {
        throw std::runtime_error("stocks series share fewer than 2 common dates");
    }

    RawDataset ds;
    ds.name = DatasetName::Stocks;
    ds.dim = static_cast<int>(d);
    ds.points = Matrix(dates.size() - 1, d);
    for (std::size_t t = 1; t < dates.size(); ++t) {
        for (std::size_t s = 0; s < d; ++s) {
            const double prev = series[s][dates[t - 1]];
            const double cur = series[s][dates[t]];
            ds.points(t - 1, s) = (cur - prev) / prev;
        }
    }
    ds.metadata = {{"csv_paths", csv_paths},
                   {"first_date", dates.front()},
                   {"last_date", dates.back()},
                   {"n_returns", dates.size() - 1}};
    return ds;
}

void write_random_walk_csv(const std::string& path, int n_rows, std::uint64_t seed) {
    Rng rng(seed);
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write CSV file: " + path);
    }
    out << "date,close\n";
    double price = 100.0;
    // synthetic calendar: year 2000 onward, 250 trading days per "year"
    for (int i = 0; i < n_rows; ++i) {
        const int year = 2000 + i / 250;
        const int day = i % 250;
        char date[16];
        std::snprintf(date, sizeof(date), "%04d-%02d-%02d", year, 1 + day / 25, 1 + day % 25);
        char value[32];
        std::snprintf(value, sizeof(value), "%.6f", price);
        out << date << ',' << value << '\n';
        price *= std::exp(0.0002 + 0.01 * rng.normal());
    }
}

void write_points_csv(const std::string& path, const Matrix& points) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write CSV file: " + path);
    }
    for (std::size_t j = 0; j < points.cols; ++j) {
        out << (j ? ",x" : "x") << (j + 1);
    }
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < points.rows; ++i) {
        for (std::size_t j = 0; j < points.cols; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", points(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
}

Matrix read_points_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const std::size_t cols = table.header.size();
    if (cols == 0 || table.rows.empty()) {
        throw std::runtime_error("points CSV is empty: " + path);
    }
    Matrix points(table.rows.size(), cols);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].size() != cols) {
            throw std::runtime_error("ragged row in points CSV: " + path);
        }
        for (std::size_t j = 0; j < cols; ++j) {
            try {
                points(i, j) = std::stod(table.rows[i][j]);
            } catch (const std::exception&) {
                throw std::runtime_error("unparseable value '" + table.rows[i][j] + "' in " + path);
            }
        }
    }
    return points;
}

} // namespace qgen
