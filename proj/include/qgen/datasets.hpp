#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgen/matrix.hpp"

namespace qgen {

enum class DatasetName { MixedGaussian, X, O, Stocks };

std::string dataset_name_str(DatasetName name);
DatasetName dataset_name_from_str(const std::string& s);

/// Training corpus in original units, with the generator parameters that
/// produced it recorded in `metadata` so any run is exactly reproducible.
struct RawDataset {
    DatasetName name = DatasetName::MixedGaussian;
    int dim = 0;
    Matrix points;
    std::optional<std::uint64_t> seed;
    nlohmann::json metadata;
};

/// 50/50 mixture of two Gaussians. Component means are drawn uniformly in
/// (-1,1)^dim and covariances as S*S^T + 0.05*I with S entries uniform in
/// (-0.3, 0.3); both are drawn once from the seed and stored in metadata.
RawDataset gen_mixed_gaussian(int dim, std::int64_t n, std::uint64_t seed);

/// X shape: 2D points (t, +-t); 3D points t * (+-1, +-1, 1) on the four main
/// cube diagonals, t uniform in (-1,1). Every marginal is Uniform(-1,1).
RawDataset gen_x(int dim, std::int64_t n, std::uint64_t seed);

/// O shape: uniform on the unit circle (2D) or unit sphere surface (3D).
RawDataset gen_o(int dim, std::int64_t n, std::uint64_t seed);

struct StocksColumns {
    std::string date = "date";
    std::string close = "close";
};

/// Loads one CSV per dimension, aligns the series on their common dates
/// (ascending) and returns the matrix of simultaneous daily returns
/// (close_t - close_{t-1}) / close_{t-1}.
RawDataset load_stocks(const std::vector<std::string>& csv_paths,
                       const StocksColumns& columns = {});

/// Writes a geometric-random-walk price series in the stocks CSV layout
/// (date,close); used to exercise the stocks pipeline without market data.
void write_random_walk_csv(const std::string& path, int n_rows, std::uint64_t seed);

/// Sample CSV I/O: header x1[,x2[,x3]], one point per row.
void write_points_csv(const std::string& path, const Matrix& points);
Matrix read_points_csv(const std::string& path);

} // namespace qgen
