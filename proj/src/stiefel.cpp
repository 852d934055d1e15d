#include "rcpd/stiefel.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace rcpd::stiefel {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& M) {
    if (M.rows() < M.cols())
        throw std::invalid_argument("orthonormalize: more columns than rows");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(M.rows(), M.cols());
    const Eigen::MatrixXd& QR = qr.matrixQR();
    for (Eigen::Index k = 0; k < M.cols(); ++k)
        if (QR(k, k) < 0.0) Q.col(k) = -Q.col(k);
    return Q;
}

namespace {

Eigen::JacobiSVD<Eigen::MatrixXd> thin_svd_sign_fixed(const Eigen::MatrixXd& V,
                                                      Eigen::MatrixXd& P, Eigen::MatrixXd& Q) {
    if (V.rows() < V.cols())
        throw std::invalid_argument("polar_factor: more columns than rows");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
    P = svd.matrixU();
    Q = svd.matrixV();
    for (Eigen::Index k = 0; k < P.cols(); ++k) {
        Eigen::Index arg = 0;
        P.col(k).cwiseAbs().maxCoeff(&arg);
        if (P(arg, k) < 0.0) {
            P.col(k) = -P.col(k);
            Q.col(k) = -Q.col(k);
        }
    }
    return svd;
}

} // namespace

Eigen::MatrixXd polar_factor(const Eigen::MatrixXd& V) {
    Eigen::MatrixXd P, Q;
    thin_svd_sign_fixed(V, P, Q);
    return P * Q.transpose();
}

PolarDecomposition polar_decompose(const Eigen::MatrixXd& V) {
    Eigen::MatrixXd P, Q;
    const auto svd = thin_svd_sign_fixed(V, P, Q);
    PolarDecomposition out;
    out.orthonormal = P * Q.transpose();
    out.symmetric = Q * svd.singularValues().asDiagonal() * Q.transpose();
    return out;
}

Eigen::MatrixXd random_orthonormal(int rows, int cols, Rng& rng) {
    Eigen::MatrixXd M(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) M(r, c) = rng.normal();
    return orthonormalize(M);
}

} // namespace rcpd::stiefel
