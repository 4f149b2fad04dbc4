#include "qgen/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qgen {

void jacobi_eigen_symmetric(std::span<const double> matrix, int n,
                            std::vector<double>& eigenvalues,
                            std::vector<double>& eigenvectors) {
    const auto nn = static_cast<std::size_t>(n);
    if (matrix.size() != nn * nn) {
        throw std::invalid_argument("jacobi_eigen_symmetric: size mismatch");
    }
    std::vector<double> a(matrix.begin(), matrix.end());
    eigenvectors.assign(nn * nn, 0.0);
    for (std::size_t i = 0; i < nn; ++i) {
        eigenvectors[i * nn + i] = 1.0;
    }

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < nn; ++p) {
            for (std::size_t q = p + 1; q < nn; ++q) {
                off += a[p * nn + q] * a[p * nn + q];
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (std::size_t p = 0; p < nn; ++p) {
            for (std::size_t q = p + 1; q < nn; ++q) {
                const double apq = a[p * nn + q];
                if (std::abs(apq) < 1e-300) {
                    continue;
                }
                const double app = a[p * nn + p];
                const double aqq = a[q * nn + q];
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < nn; ++k) {
                    const double akp = a[k * nn + p];
                    const double akq = a[k * nn + q];
                    a[k * nn + p] = c * akp - s * akq;
                    a[k * nn + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < nn; ++k) {
                    const double apk = a[p * nn + k];
                    const double aqk = a[q * nn + k];
                    a[p * nn + k] = c * apk - s * aqk;
                    a[q * nn + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < nn; ++k) {
                    const double vkp = eigenvectors[k * nn + p];
                    const double vkq = eigenvectors[k * nn + q];
                    eigenvectors[k * nn + p] = c * vkp - s * vkq;
                    eigenvectors[k * nn + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    eigenvalues.resize(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        eigenvalues[i] = a[i * nn + i];
    }
}

CmaEs::CmaEs(std::vector<double> initial_mean, double sigma0, int lambda, std::uint64_t seed)
    : dim_(static_cast<int>(initial_mean.size())), mean_(std::move(initial_mean)), sigma_(sigma0),
      rng_(seed), best_value_(std::numeric_limits<double>::infinity()) {
    if (dim_ < 1) {
        throw std::invalid_argument("CmaEs: dimension must be >= 1");
    }
    if (!(sigma0 > 0.0)) {
        throw std::invalid_argument("CmaEs: sigma0 must be > 0");
    }
    const double n = dim_;
    lambda_ = lambda > 0 ? lambda : 4 + static_cast<int>(std::floor(3.0 * std::log(n)));
    if (lambda_ < 2) {
        lambda_ = 2;
    }
    mu_ = lambda_ / 2;
    if (mu_ < 1) {
        mu_ = 1;
    }

    weights_.resize(static_cast<std::size_t>(mu_));
    const double base = std::log((static_cast<double>(lambda_) + 1.0) / 2.0);
    double wsum = 0.0;
    for (int i = 0; i < mu_; ++i) {
        weights_[static_cast<std::size_t>(i)] = base - std::log(static_cast<double>(i + 1));
        wsum += weights_[static_cast<std::size_t>(i)];
    }
    double w2sum = 0.0;
    for (double& w : weights_) {
        w /= wsum;
        w2sum += w * w;
    }
    mu_eff_ = 1.0 / w2sum;

    c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
    d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) + c_sigma_;
    c_c_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
    c_1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
    c_mu_ = std::min(1.0 - c_1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) /
                                     ((n + 2.0) * (n + 2.0) + mu_eff_));
    chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    const auto nn = static_cast<std::size_t>(dim_);
    cov_.assign(nn * nn, 0.0);
    for (std::size_t i = 0; i < nn; ++i) {
        cov_[i * nn + i] = 1.0;
    }
    path_sigma_.assign(nn, 0.0);
    path_c_.assign(nn, 0.0);
    update_eigensystem();
}

void CmaEs::update_eigensystem() {
    const auto nn = static_cast<std::size_t>(dim_);
    // keep C numerically symmetric before decomposing
    for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t j = i + 1; j < nn; ++j) {
            const double v = 0.5 * (cov_[i * nn + j] + cov_[j * nn + i]);
            cov_[i * nn + j] = v;
            cov_[j * nn + i] = v;
        }
    }
    jacobi_eigen_symmetric(cov_, dim_, eigvals_, eigvecs_);
    // repair loss of positive definiteness
    for (double& ev : eigvals_) {
        if (!(ev > 1e-14)) {
            ev = 1e-14;
        }
    }
}

const std::vector<std::vector<double>>& CmaEs::ask() {
    const auto nn = static_cast<std::size_t>(dim_);
    candidates_.assign(static_cast<std::size_t>(lambda_), std::vector<double>(nn, 0.0));
    sampled_z_.assign(static_cast<std::size_t>(lambda_), std::vector<double>(nn, 0.0));
    std::vector<double> scaled(nn);
    for (int i = 0; i < lambda_; ++i) {
        auto& z = sampled_z_[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < nn; ++k) {
            z[k] = rng_.normal();
        }
        for (std::size_t k = 0; k < nn; ++k) {
            scaled[k] = std::sqrt(eigvals_[k]) * z[k];
        }
        auto& x = candidates_[static_cast<std::size_t>(i)];
        for (std::size_t row = 0; row < nn; ++row) {
            double y = 0.0;
            for (std::size_t k = 0; k < nn; ++k) {
                y += eigvecs_[row * nn + k] * scaled[k];
            }
            x[row] = mean_[row] + sigma_ * y;
        }
    }
    return candidates_;
}

void CmaEs::tell(std::span<const double> values) {
    if (values.size() != candidates_.size() || candidates_.empty()) {
        throw std::invalid_argument("CmaEs::tell: values do not match the last ask()");
    }
    const auto nn = static_cast<std::size_t>(dim_);

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    evaluations_ += static_cast<std::int64_t>(values.size());
    if (values[order[0]] < best_value_) {
        best_value_ = values[order[0]];
        best_x_ = candidates_[order[0]];
    }

    // recombination in x-space and in the underlying N(0, I) space
    const std::vector<double> old_mean = mean_;
    std::vector<double> z_w(nn, 0.0);
    std::fill(mean_.begin(), mean_.end(), 0.0);
    for (int i = 0; i < mu_; ++i) {
        const double w = weights_[static_cast<std::size_t>(i)];
        const auto& x = candidates_[order[static_cast<std::size_t>(i)]];
        const auto& z = sampled_z_[order[static_cast<std::size_t>(i)]];
        for (std::size_t k = 0; k < nn; ++k) {
            mean_[k] += w * x[k];
            z_w[k] += w * z[k];
        }
    }
    std::vector<double> y_w(nn);
    for (std::size_t k = 0; k < nn; ++k) {
        y_w[k] = (mean_[k] - old_mean[k]) / sigma_;
    }

    // step-size path: C^{-1/2} y_w equals B z_w
    const double cs_scale = std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_);
    double ps_norm2 = 0.0;
    for (std::size_t row = 0; row < nn; ++row) {
        double bz = 0.0;
        for (std::size_t k = 0; k < nn; ++k) {
            bz += eigvecs_[row * nn + k] * z_w[k];
        }
        path_sigma_[row] = (1.0 - c_sigma_) * path_sigma_[row] + cs_scale * bz;
        ps_norm2 += path_sigma_[row] * path_sigma_[row];
    }
    const double ps_norm = std::sqrt(ps_norm2);

    ++generation_;
    const double expected = std::sqrt(
        1.0 - std::pow(1.0 - c_sigma_, 2.0 * static_cast<double>(generation_)));
    const bool h_sigma = ps_norm / expected < (1.4 + 2.0 / (dim_ + 1.0)) * chi_n_;

    const double cc_scale = std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_);
    for (std::size_t k = 0; k < nn; ++k) {
        path_c_[k] = (1.0 - c_c_) * path_c_[k] + (h_sigma ? cc_scale * y_w[k] : 0.0);
    }

    // covariance: decay, rank-one and rank-mu terms
    const double decay =
        1.0 - c_1_ - c_mu_ + (h_sigma ? 0.0 : c_1_ * c_c_ * (2.0 - c_c_));
    for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t j = 0; j < nn; ++j) {
            cov_[i * nn + j] = decay * cov_[i * nn + j] + c_1_ * path_c_[i] * path_c_[j];
        }
    }
    std::vector<double> y(nn);
    for (int i = 0; i < mu_; ++i) {
        const double w = weights_[static_cast<std::size_t>(i)];
        const auto& x = candidates_[order[static_cast<std::size_t>(i)]];
        for (std::size_t k = 0; k < nn; ++k) {
            y[k] = (x[k] - old_mean[k]) / sigma_;
        }
        for (std::size_t r = 0; r < nn; ++r) {
            for (std::size_t c = 0; c < nn; ++c) {
                cov_[r * nn + c] += c_mu_ * w * y[r] * y[c];
            }
        }
    }

    sigma_ *= std::exp((c_sigma_ / d_sigma_) * (ps_norm / chi_n_ - 1.0));
    if (!std::isfinite(sigma_) || sigma_ > 1e12) {
        sigma_ = std::min(sigma_, 1e12);
    }

    update_eigensystem();
    candidates_.clear();
    sampled_z_.clear();
}

std::pair<std::vector<double>, double>
cmaes_minimize(const std::function<double(std::span<const double>)>& objective, int dim,
               std::int64_t max_evaluations, std::uint64_t seed, double sigma0,
               std::vector<double> initial_mean, int lambda) {
    if (initial_mean.empty()) {
        initial_mean.assign(static_cast<std::size_t>(dim), 0.0);
    }
    if (static_cast<int>(initial_mean.size()) != dim) {
        throw std::invalid_argument("cmaes_minimize: initial mean size mismatch");
    }
    CmaEs es(std::move(initial_mean), sigma0, lambda, seed);
    std::vector<double> values(static_cast<std::size_t>(es.lambda()));
    while (es.evaluations() + es.lambda() <= max_evaluations) {
        const auto& candidates = es.ask();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            values[i] = objective(candidates[i]);
        }
        es.tell(values);
    }
    return {es.best_point(), es.best_value()};
}

} // namespace qgen
