#pragma once

#include <Eigen/Core>

#include "rcpd/rng.hpp"

namespace rcpd::stiefel {

/// Thin-QR orthonormalization of the columns of M (rows >= cols required).
/// Signs are fixed so the R factor has nonnegative diagonal, which makes the
/// result a deterministic function of M.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& M);

/// Orthonormal polar factor of V: with thin SVD V = P Xi Q^T, returns P Q^T,
/// the maximizer of <V, Q> over matrices with orthonormal columns. Signs of
/// each singular-vector pair are fixed so the largest-magnitude entry of the
/// left vector is positive. Rank-deficient V is accepted; the factor is then
/// one of the (equally optimal) maximizers, deterministic given the SVD.
Eigen::MatrixXd polar_factor(const Eigen::MatrixXd& V);

/// Polar decomposition V = U H with U = polar_factor(V) and H = Q Xi Q^T
/// symmetric positive semidefinite.
struct PolarDecomposition {
    Eigen::MatrixXd orthonormal; // U
    Eigen::MatrixXd symmetric;   // H
};
PolarDecomposition polar_decompose(const Eigen::MatrixXd& V);

/// Random matrix with orthonormal columns (QR of a standard Gaussian draw).
Eigen::MatrixXd random_orthonormal(int rows, int cols, Rng& rng);

} // namespace rcpd::stiefel
