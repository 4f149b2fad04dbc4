#include "qgen/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qgen {

std::string transform_kind_name(TransformKind kind) {
    return kind == TransformKind::MinMax ? "minmax" : "pit";
}

TransformKind transform_kind_from_name(const std::string& name) {
    if (name == "minmax") {
        return TransformKind::MinMax;
    }
    if (name == "pit") {
        return TransformKind::Pit;
    }
    throw std::invalid_argument("unknown transform kind: " + name);
}

TransformModel TransformModel::fit(TransformKind kind, const Matrix& data) {
    if (data.rows < 2) {
        throw std::invalid_argument("TransformModel::fit: need at least 2 points");
    }
    TransformModel model;
    model.kind_ = kind;
    model.dim_ = static_cast<int>(data.cols);
    const std::size_t d = data.cols;
    if (kind == TransformKind::MinMax) {
        model.min_.assign(d, 0.0);
        model.max_.assign(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
            double lo = data(0, j);
            double hi = data(0, j);
            for (std::size_t i = 1; i < data.rows; ++i) {
                lo = std::min(lo, data(i, j));
                hi = std::max(hi, data(i, j));
            }
            if (!(hi > lo)) {
                throw std::invalid_argument(
                    "TransformModel::fit: degenerate dimension (all values equal)");
            }
            model.min_[j] = lo;
            model.max_[j] = hi;
        }
    } else {
        model.reference_.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            auto& ref = model.reference_[j];
            ref.resize(data.rows);
            for (std::size_t i = 0; i < data.rows; ++i) {
                ref[i] = data(i, j);
            }
            std::sort(ref.begin(), ref.end());
        }
    }
    return model;
}

SampleBatch TransformModel::forward(const Matrix& points) const {
    if (static_cast<int>(points.cols) != dim_) {
        throw std::invalid_argument("TransformModel::forward: dimension mismatch");
    }
    SampleBatch out(points.rows, points.cols);
    if (kind_ == TransformKind::MinMax) {
        for (std::size_t j = 0; j < points.cols; ++j) {
            const double lo = min_[j];
            const double scale = 1.0 / (max_[j] - lo);
            for (std::size_t i = 0; i < points.rows; ++i) {
                out(i, j) = std::clamp((points(i, j) - lo) * scale, 0.0, 1.0);
            }
        }
    } else {
        for (std::size_t j = 0; j < points.cols; ++j) {
            const auto& ref = reference_[j];
            const double inv_n = 1.0 / static_cast<double>(ref.size());
            for (std::size_t i = 0; i < points.rows; ++i) {
                const double x = points(i, j);
                const auto lo = std::lower_bound(ref.begin(), ref.end(), x);
                const auto hi = std::upper_bound(lo, ref.end(), x);
                const double rank_below = static_cast<double>(lo - ref.begin());
                const double rank_equal = static_cast<double>(hi - lo);
                out(i, j) = (rank_below + 0.5 * rank_equal + 0.25) * inv_n;
            }
        }
    }
    return out;
}

Matrix TransformModel::inverse(const Matrix& unit_points) const {
    if (static_cast<int>(unit_points.cols) != dim_) {
        throw std::invalid_argument("TransformModel::inverse: dimension mismatch");
    }
    Matrix out(unit_points.rows, unit_points.cols);
    for (std::size_t i = 0; i < unit_points.rows; ++i) {
        for (std::size_t j = 0; j < unit_points.cols; ++j) {
            const double u = unit_points(i, j);
            if (u < 0.0 || u > 1.0 || !std::isfinite(u)) {
                throw std::invalid_argument("TransformModel::inverse: input outside [0, 1]");
            }
            if (kind_ == TransformKind::MinMax) {
                out(i, j) = min_[j] + u * (max_[j] - min_[j]);
            } else {
                // empirical quantile, linear between the midrank positions
                // (i + 0.75)/N that forward assigns to distinct samples
                const auto& ref = reference_[j];
                const double n = static_cast<double>(ref.size());
                const double pos = std::clamp(u * n - 0.75, 0.0, n - 1.0);
                const auto lo_idx = static_cast<std::size_t>(std::floor(pos));
                const std::size_t hi_idx = std::min(lo_idx + 1, ref.size() - 1);
                const double frac = pos - static_cast<double>(lo_idx);
                out(i, j) = ref[lo_idx] + frac * (ref[hi_idx] - ref[lo_idx]);
            }
        }
    }
    return out;
}

nlohmann::json TransformModel::to_json() const {
    nlohmann::json j;
    j["kind"] = transform_kind_name(kind_);
    j["dim"] = dim_;
    if (kind_ == TransformKind::MinMax) {
        j["min"] = min_;
        j["max"] = max_;
    } else {
        j["reference"] = reference_;
    }
    return j;
}

TransformModel TransformModel::from_json(const nlohmann::json& j) {
    TransformModel model;
    model.kind_ = transform_kind_from_name(j.at("kind").get<std::string>());
    model.dim_ = j.at("dim").get<int>();
    if (model.kind_ == TransformKind::MinMax) {
        model.min_ = j.at("min").get<std::vector<double>>();
        model.max_ = j.at("max").get<std::vector<double>>();
        if (model.min_.size() != static_cast<std::size_t>(model.dim_) ||
            model.max_.size() != model.min_.size()) {
            throw std::invalid_argument("TransformModel::from_json: bad minmax parameters");
        }
    } else {
        model.reference_ = j.at("reference").get<std::vector<std::vector<double>>>();
        for (const auto& ref : model.reference_) {
            if (ref.size() < 2 || !std::is_sorted(ref.begin(), ref.end())) {
                throw std::invalid_argument("TransformModel::from_json: bad pit reference");
            }
        }
    }
    return model;
}

namespace {

double point_to_segment(double px, double py, double ax, double ay, double bx, double by) {
    const double abx = bx - ax;
    const double aby = by - ay;
    const double len2 = abx * abx + aby * aby;
    double t = ((px - ax) * abx + (py - ay) * aby) / len2;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (ax + t * abx);
    const double dy = py - (ay + t * aby);
    return std::sqrt(dx * dx + dy * dy);
}

} // namespace

double analytic_o2d_copula_support(double u1, double u2) {
    // branch segments in [0,1]^2: u2 = u1 + 1/2 and u2 = -u1 + 1/2 on
    // u1 in [0, 1/2]; u2 = u1 - 1/2 and u2 = -u1 + 3/2 on u1 in [1/2, 1]
    double best = point_to_segment(u1, u2, 0.0, 0.5, 0.5, 1.0);
    best = std::min(best, point_to_segment(u1, u2, 0.0, 0.5, 0.5, 0.0));
    best = std::min(best, point_to_segment(u1, u2, 0.5, 0.0, 1.0, 0.5));
    best = std::min(best, point_to_segment(u1, u2, 0.5, 1.0, 1.0, 0.5));
    return best;
}

} // namespace qgen
