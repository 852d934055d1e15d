#pragma once

#include <cstdint>

#include "rcpd/cp_model.hpp"
#include "rcpd/solver_types.hpp"
#include "rcpd/tensor.hpp"

namespace rcpd::als {

/// Least-squares baseline for the same constrained CP model, by alternating
/// exact block minimization: each unit-column mode takes the normalized
/// least-squares direction, each orthonormal mode the polar factor of the
/// matricized-times-Khatri-Rao system, then sigma is refreshed by projection.
/// Same stopping rule as the robust solver (|fit change| <= tol or max_iter).
SolveResult solve(const DenseTensor& A, int R, int t, int max_iter, double tol,
                  std::uint64_t seed);

/// As solve() but starting from the given factors.
SolveResult solve_from(const DenseTensor& A, const CpModel& initial, int max_iter, double tol);

} // namespace rcpd::als
