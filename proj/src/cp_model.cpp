#include "rcpd/cp_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rcpd {

void CpModel::validate(double tol) const {
    const int d = order();
    const int R = rank();
    if (d < 2) throw std::invalid_argument("CpModel: order must be >= 2");
    if (R < 1) throw std::invalid_argument("CpModel: rank must be >= 1");
    if (mode_kind.size() != factors.size())
        throw std::invalid_argument("CpModel: mode_kind/factors size mismatch");

    bool seen_orth = false;
    for (int j = 0; j < d; ++j) {
        const auto& U = factors[static_cast<std::size_t>(j)];
        if (U.cols() != R)
            throw std::invalid_argument("CpModel: factor " + std::to_string(j) +
                                        " has wrong column count");
        const ModeKind kind = mode_kind[static_cast<std::size_t>(j)];
        if (kind == ModeKind::Orthonormal) {
            seen_orth = true;
        } else if (seen_orth) {
            throw std::invalid_argument("CpModel: unit-column mode after an orthonormal mode");
        }
        if (kind == ModeKind::Orthonormal && U.rows() < R)
            throw std::invalid_argument("CpModel: orthonormal factor " + std::to_string(j) +
                                        " has fewer rows than columns");
    }
    const double viol = constraint_violation(*this);
    if (viol > tol)
        throw std::invalid_argument("CpModel: constraint violation " + std::to_string(viol) +
                                    " exceeds tolerance");
}

double constraint_violation(const CpModel& model) {
    double worst = 0.0;
    for (std::size_t j = 0; j < model.factors.size(); ++j) {
        const auto& U = model.factors[j];
        if (model.mode_kind[j] == ModeKind::UnitColumns) {
            for (int i = 0; i < U.cols(); ++i)
                worst = std::max(worst, std::abs(U.col(i).norm() - 1.0));
        } else {
            const Eigen::MatrixXd G = U.transpose() * U;
            const Eigen::MatrixXd E =
                G - Eigen::MatrixXd::Identity(U.cols(), U.cols());
            worst = std::max(worst, E.cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

} // namespace rcpd
