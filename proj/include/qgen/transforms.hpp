#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qgen/matrix.hpp"

namespace qgen {

enum class TransformKind { MinMax, Pit };

std::string transform_kind_name(TransformKind kind);
TransformKind transform_kind_from_name(const std::string& name);

/// Fitted per-dimension data transformation into [0,1]^d.
///
/// MinMax stores the training extremes; out-of-range queries clip.
/// Pit stores a sorted copy of the training column per dimension and maps
/// x to the midrank value u = (rank_< + 0.5*rank_= + 0.25) / N, which keeps
/// u strictly inside (0,1) so grid cell indices never overflow.
class TransformModel {
  public:
    static TransformModel fit(TransformKind kind, const Matrix& data);

    SampleBatch forward(const Matrix& points) const;
    Matrix inverse(const Matrix& unit_points) const;

    TransformKind kind() const { return kind_; }
    int dim() const { return dim_; }

    nlohmann::json to_json() const;
    static TransformModel from_json(const nlohmann::json& j);

  private:
    TransformKind kind_ = TransformKind::MinMax;
    int dim_ = 0;
    std::vector<double> min_, max_;              // MinMax
    std::vector<std::vector<double>> reference_; // Pit, sorted ascending per dim
};

/// Perpendicular distance from a point of the unit square to the nearest of
/// the four branch segments the copula of the 2D O dataset lives on
/// (u2 = u1 +- 1/2 and u2 = -u1 + 1/2, -u1 + 3/2, each on half the u1 range).
/// Test oracle only.
double analytic_o2d_copula_support(double u1, double u2);

} // namespace qgen
