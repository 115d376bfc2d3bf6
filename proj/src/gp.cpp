#include "optbench/gp.hpp"

#include <cmath>
#include <stdexcept>

namespace optbench {

namespace {

constexpr double kSqrt5 = 2.23606797749978969;

double matern52(double r, double theta)
{
    const double u = kSqrt5 * r / theta;
    return (1.0 + u + u * u / 3.0) * std::exp(-u);
}

// Left-looking Cholesky. Throws on a non-positive pivot, naming it so
// callers know where the factorization broke down.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& A)
{
    const auto n = A.rows();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double d = A(j, j) - L.row(j).head(j).squaredNorm();
        if (!(d > 0.0))
            throw std::runtime_error("cholesky: non-positive pivot " + std::to_string(d) +
                                     " at index " + std::to_string(j) +
                                     "; consider a larger jitter");
        L(j, j) = std::sqrt(d);
        const auto m = n - j - 1;
        if (m > 0)
            L.col(j).tail(m) =
                (A.col(j).tail(m) - L.bottomLeftCorner(m, j) * L.row(j).head(j).transpose()) /
                L(j, j);
    }
    return L;
}

} // namespace

double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const KernelParams& params)
{
    if (a.size() != b.size())
        throw std::invalid_argument("kernel: dimension mismatch");
    if (!(params.theta > 0.0))
        throw std::invalid_argument("kernel: theta must be positive");
    return matern52((a - b).norm(), params.theta);
}

// ||a - b||^2 = ||a||^2 + ||b||^2 - 2 a.b, so the distance matrix is one
// GEMM plus rank-one terms; the Matern transform then vectorizes.
Eigen::MatrixXd matern52_from_sqdist(Eigen::MatrixXd d2, double theta)
{
    const double c = kSqrt5 / theta;
    Eigen::ArrayXXd u = d2.array().max(0.0).sqrt() * c;
    return ((1.0 + u + u.square() / 3.0) * (-u).exp()).matrix();
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const KernelParams& params)
{
    const Eigen::VectorXd sq = X.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = sq.replicate(1, X.rows()) + sq.transpose().replicate(X.rows(), 1) -
                         2.0 * (X * X.transpose());
    Eigen::MatrixXd K = matern52_from_sqdist(std::move(d2), params.theta);
    K.diagonal().setOnes();
    return K;
}

Eigen::MatrixXd cross_kernel_matrix(const Eigen::MatrixXd& S, const Eigen::MatrixXd& X,
                                    const KernelParams& params)
{
    const Eigen::VectorXd sq_s = S.rowwise().squaredNorm();
    const Eigen::VectorXd sq_x = X.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = sq_s.replicate(1, X.rows()) + sq_x.transpose().replicate(S.rows(), 1) -
                         2.0 * (S * X.transpose());
    return matern52_from_sqdist(std::move(d2), params.theta);
}

GPModel GPModel::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& f,
                     const KernelParams& params, double jitter)
{
    if (X.rows() < 1)
        throw std::invalid_argument("GPModel::fit: need at least one observation");
    if (X.rows() != f.size())
        throw std::invalid_argument("GPModel::fit: row/target count mismatch");
    if (!(params.theta > 0.0))
        throw std::invalid_argument("GPModel::fit: theta must be positive");
    if ((X.array() < -1e-9).any() || (X.array() > 1.0 + 1e-9).any())
        throw std::invalid_argument("GPModel::fit: inputs must be normalized to [0,1]");

    GPModel model;
    model.X_ = X;
    model.f_ = f;
    model.params_ = params;
    model.jitter_ = jitter;

    Eigen::MatrixXd K = kernel_matrix(X, params);
    K.diagonal().array() += jitter;
    model.chol_ = cholesky_lower(K);

    // alpha = (K + jitter I)^{-1} f via two triangular solves
    Eigen::VectorXd tmp = model.chol_.triangularView<Eigen::Lower>().solve(f);
    model.alpha_ = model.chol_.transpose().triangularView<Eigen::Upper>().solve(tmp);
    return model;
}

GPModel::Posterior GPModel::posterior(const Eigen::VectorXd& s) const
{
    if (s.size() != X_.cols())
        throw std::invalid_argument("posterior: query dimension mismatch");
    Eigen::VectorXd k(X_.rows());
    for (Eigen::Index i = 0; i < X_.rows(); ++i)
        k(i) = matern52((X_.row(i).transpose() - s).norm(), params_.theta);
    Posterior p;
    p.mean = k.dot(alpha_);
    const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
    p.var = std::max(0.0, 1.0 - v.squaredNorm());
    return p;
}

void GPModel::posterior_batch(const Eigen::MatrixXd& S, Eigen::VectorXd& mean,
                              Eigen::VectorXd& var) const
{
    if (S.cols() != X_.cols())
        throw std::invalid_argument("posterior_batch: query dimension mismatch");
    const Eigen::MatrixXd Ks = cross_kernel_matrix(S, X_, params_); // m x n
    mean = Ks * alpha_;
    // V = L^{-1} Ks^T, var_i = 1 - ||V col i||^2
    const Eigen::MatrixXd V = chol_.triangularView<Eigen::Lower>().solve(Ks.transpose());
    var = (1.0 - V.colwise().squaredNorm().array()).max(0.0).matrix().transpose();
}

} // namespace optbench
