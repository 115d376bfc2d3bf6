#pragma once

#include <Eigen/Dense>

#include "optbench/core.hpp"

namespace optbench {

// Matern 5/2 kernel with unit signal variance and a shared length scale
// theta. Inputs are expected in the unit hypercube so the usual theta
// values (0.1, 0.5) mean the same thing on every problem.
struct KernelParams {
    double theta = 0.1;
};

double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const KernelParams& params);

// Gaussian-process posterior over normalized inputs. Refit from scratch
// each iteration; the covariance factorization costs O(n^3), which is the
// quantity the overhead-time experiments measure.
class GPModel {
public:
    static GPModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& f,
                       const KernelParams& params, double jitter = 1e-6);

    struct Posterior {
        double mean = 0.0;
        double var = 0.0;
    };

    Posterior posterior(const Eigen::VectorXd& s) const;

    // Posterior at each row of S. Batched so the acquisition search runs
    // as matrix ops instead of per-point solves.
    void posterior_batch(const Eigen::MatrixXd& S, Eigen::VectorXd& mean,
                         Eigen::VectorXd& var) const;

    int n() const { return static_cast<int>(X_.rows()); }
    int dims() const { return static_cast<int>(X_.cols()); }
    const Eigen::MatrixXd& inputs() const { return X_; }
    const Eigen::VectorXd& targets() const { return f_; }
    const Eigen::MatrixXd& chol() const { return chol_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }
    const KernelParams& params() const { return params_; }
    double jitter() const { return jitter_; }

private:
    GPModel() = default;

    Eigen::MatrixXd X_;
    Eigen::VectorXd f_;
    KernelParams params_;
    double jitter_ = 1e-6;
    Eigen::MatrixXd chol_;  // lower-triangular L with L L^T = K + jitter I
    Eigen::VectorXd alpha_; // (K + jitter I)^{-1} f
};

// Dense kernel matrix K_ij = kernel(X_i, X_j).
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const KernelParams& params);

// Cross-kernel matrix K_ij = kernel(S_i, X_j) for query rows S.
Eigen::MatrixXd cross_kernel_matrix(const Eigen::MatrixXd& S, const Eigen::MatrixXd& X,
                                    const KernelParams& params);

} // namespace optbench
