#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstddef>
#include <vector>

#include "rcpd/cp_model.hpp"
#include "rcpd/tensor.hpp"

namespace rcpd::kernels {

/// Scratch buffers reused across contraction calls to avoid reallocation in
/// solver loops. Not thread-safe; one workspace per solver instance.
struct Workspace {
    std::vector<double> a, b;
    std::vector<const double*> vec_ptrs;
};

namespace detail {

/// Deterministic sum of term(i) over [0, n): fixed-size block partials are
/// accumulated in block order, so the result is independent of the thread
/// count. term must not throw.
template <bool Par, class Term>
double blocked_sum(std::size_t n, Term term) {
    constexpr std::size_t kBlock = 4096;
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static) if (Par)
    for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(nblocks); ++blk) {
        const std::size_t i0 = static_cast<std::size_t>(blk) * kBlock;
        const std::size_t i1 = std::min(i0 + kBlock, n);
        double s = 0.0;
        for (std::size_t i = i0; i < i1; ++i) s += term(i);
        partial[static_cast<std::size_t>(blk)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

} // namespace detail

template <class Term>
double blocked_sum(std::size_t n, Term term) {
    return detail::blocked_sum<true>(n, term);
}

/// Materializes sum_i sigma_i * (outer product of factor columns i) into
/// `out`, which must already have the matching dimensions.
void cp_reconstruct_into(const Eigen::VectorXd& sigma,
                         const std::vector<Eigen::MatrixXd>& factors, DenseTensor& out);

DenseTensor cp_reconstruct(const CpModel& model);

/// Contracts the tensor with one vector per mode except `skip_mode`:
/// result[s] = sum over all other indices of the tensor entry times the
/// product of the vectors' entries. vecs must have one entry per mode;
/// vecs[skip_mode] is ignored (may be empty).
Eigen::VectorXd contract_all_but(const DenseTensor& t,
                                 const std::vector<Eigen::VectorXd>& vecs, int skip_mode);

/// Same contraction against column `component` of every factor matrix.
Eigen::VectorXd contract_all_but(const DenseTensor& t,
                                 const std::vector<Eigen::MatrixXd>& factors, int skip_mode,
                                 int component, Workspace& ws);

double inner(const DenseTensor& a, const DenseTensor& b);
double frob_norm(const DenseTensor& a);
double frob_norm_diff(const DenseTensor& a, const DenseTensor& b);
DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b);

/// Mode-j unfolding: n_j x (product of the other dims). Column c enumerates
/// the remaining indices in the tensor's own row-major order (last index
/// fastest), so unfolding a CP tensor gives
///   matricize(X, j) = U_j * diag(sigma) * khatri_rao(U_1..U_d except j)^T
/// with the factor list in ascending mode order.
Eigen::MatrixXd matricize(const DenseTensor& t, int mode);

/// Columnwise Kronecker product. Column c of the result is the Kronecker
/// product of column c of each input, with the last listed matrix's index
/// varying fastest.
Eigen::MatrixXd khatri_rao(const std::vector<Eigen::MatrixXd>& mats);

/// Serial reference implementations. Bit-identical results to the parallel
/// versions above (same traversal and summation order, no thread team); kept
/// for tests and the kernel benchmark.
namespace ref {
void cp_reconstruct_into(const Eigen::VectorXd& sigma,
                         const std::vector<Eigen::MatrixXd>& factors, DenseTensor& out);
Eigen::VectorXd contract_all_but(const DenseTensor& t,
                                 const std::vector<Eigen::VectorXd>& vecs, int skip_mode);
double inner(const DenseTensor& a, const DenseTensor& b);
double frob_norm(const DenseTensor& a);
DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b);
} // namespace ref

} // namespace rcpd::kernels
