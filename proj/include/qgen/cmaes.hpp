#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qgen/rng.hpp"

namespace qgen {

/// (mu/mu_w, lambda) covariance matrix adaptation evolution strategy with
/// log-decreasing recombination weights, cumulative step-size control and
/// rank-one plus rank-mu covariance updates. Ask/tell interface so callers
/// can trace per-generation losses and stop on their own criteria.
class CmaEs {
  public:
    /// lambda = 0 selects the default population 4 + floor(3 ln dim).
    CmaEs(std::vector<double> initial_mean, double sigma0, int lambda, std::uint64_t seed);

    /// Samples the next generation of candidates.
    const std::vector<std::vector<double>>& ask();

    /// Consumes the objective values of the candidates from the last ask()
    /// (minimization) and updates mean, paths, covariance and step size.
    void tell(std::span<const double> values);

    const std::vector<double>& best_point() const { return best_x_; }
    double best_value() const { return best_value_; }
    bool has_best() const { return evaluations_ > 0; }

    const std::vector<double>& mean() const { return mean_; }
    double sigma() const { return sigma_; }
    int lambda() const { return lambda_; }
    int generation() const { return generation_; }
    std::int64_t evaluations() const { return evaluations_; }

  private:
    int dim_;
    int lambda_;
    int mu_;
    double mu_eff_;
    double c_sigma_, d_sigma_, c_c_, c_1_, c_mu_, chi_n_;
    std::vector<double> weights_;

    std::vector<double> mean_;
    double sigma_;
    std::vector<double> cov_;     // row-major dim x dim, symmetric
    std::vector<double> path_sigma_, path_c_;
    std::vector<double> eigvecs_; // columns of B
    std::vector<double> eigvals_; // diagonal of D^2
    int generation_ = 0;
    std::int64_t evaluations_ = 0;

    Rng rng_;
    std::vector<std::vector<double>> candidates_;
    std::vector<std::vector<double>> sampled_z_; // N(0, I) draws behind candidates_

    std::vector<double> best_x_;
    double best_value_;

    void update_eigensystem();
};

/// Convenience wrapper: minimizes `objective` from `initial_mean`
/// (zeros when empty) within an evaluation budget.
std::pair<std::vector<double>, double>
cmaes_minimize(const std::function<double(std::span<const double>)>& objective, int dim,
               std::int64_t max_evaluations, std::uint64_t seed, double sigma0 = 0.1,
               std::vector<double> initial_mean = {}, int lambda = 0);

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// `matrix` is row-major n x n; eigenvectors come back as columns.
void jacobi_eigen_symmetric(std::span<const double> matrix, int n,
                            std::vector<double>& eigenvalues,
                            std::vector<double>& eigenvectors);

} // namespace qgen
