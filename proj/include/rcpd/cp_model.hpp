#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace rcpd {

enum class ModeKind { UnitColumns, Orthonormal };

/// Rank-R CP model: weight vector sigma plus one factor matrix per mode.
/// Mode j's factor is n_j x R. By convention the trailing modes carry the
/// Orthonormal tag (U^T U = I) and the leading modes the UnitColumns tag
/// (every column has unit Euclidean norm).
struct CpModel {
    Eigen::VectorXd sigma;
    std::vector<Eigen::MatrixXd> factors;
    std::vector<ModeKind> mode_kind;

    int order() const { return static_cast<int>(factors.size()); }
    int rank() const { return static_cast<int>(sigma.size()); }

    /// Number of trailing orthonormal modes (the "t" of the model).
    int num_orthonormal() const {
        int t = 0;
        for (auto it = mode_kind.rbegin(); it != mode_kind.rend() && *it == ModeKind::Orthonormal; ++it)
            ++t;
        return t;
    }

    std::vector<std::size_t> dims() const {
        std::vector<std::size_t> d(factors.size());
        for (std::size_t j = 0; j < factors.size(); ++j)
            d[j] = static_cast<std::size_t>(factors[j].rows());
        return d;
    }

    /// Throws std::invalid_argument on structural problems or constraint
    /// violations beyond `tol` (unit-column norms, per-mode Gram error).
    void validate(double tol = 1e-10) const;
};

/// Worst constraint violation over all modes: max of |norm(u) - 1| for
/// unit-column modes and entrywise |U^T U - I| for orthonormal modes.
double constraint_violation(const CpModel& model);

} // namespace rcpd
