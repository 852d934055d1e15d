#include "rcpd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "rcpd/cauchy.hpp"

namespace rcpd::kernels {

namespace {

using std::ptrdiff_t;
using std::size_t;

// All loops below assign each output element to exactly one thread and keep
// the per-element summation order fixed, so results do not depend on the
// thread count. Scalar reductions go through detail::blocked_sum for the
// same reason.

// out[r] = sum_c in[r*nc + c] * w[c]
template <bool Par>
void contract_last(const double* in, size_t nr, size_t nc, const double* w, double* out) {
#pragma omp parallel for schedule(static) if (Par)
    for (ptrdiff_t r = 0; r < static_cast<ptrdiff_t>(nr); ++r) {
        const double* row = in + static_cast<size_t>(r) * nc;
        double s = 0.0;
        for (size_t c = 0; c < nc; ++c) s += row[c] * w[c];
        out[static_cast<size_t>(r)] = s;
    }
}

// out[c] = sum_r w[r] * in[r*nc + c], accumulated row by row over column blocks
template <bool Par>
void contract_first(const double* in, size_t nr, size_t nc, const double* w, double* out) {
    constexpr size_t kBlock = 2048;
    const size_t nblocks = (nc + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static) if (Par)
    for (ptrdiff_t blk = 0; blk < static_cast<ptrdiff_t>(nblocks); ++blk) {
        const size_t c0 = static_cast<size_t>(blk) * kBlock;
        const size_t c1 = std::min(c0 + kBlock, nc);
        for (size_t c = c0; c < c1; ++c) out[c] = 0.0;
        for (size_t r = 0; r < nr; ++r) {
            const double wr = w[r];
            const double* row = in + r * nc;
            for (size_t c = c0; c < c1; ++c) out[c] += wr * row[c];
        }
    }
}

// Peels modes off one at a time: trailing modes (cache-contiguous) first,
// then leading modes, leaving the skipped mode as the result axis.
template <bool Par>
Eigen::VectorXd contract_core(const DenseTensor& t, const double* const* vec, int skip,
                              Workspace& ws) {
    const int d = t.order();
    const size_t total = t.size();
    const int first_contracted = (skip < d - 1) ? d - 1 : 0;
    const size_t cap = total / t.dim(first_contracted);
    if (ws.a.size() < cap) ws.a.resize(cap);
    if (ws.b.size() < cap) ws.b.resize(cap);

    const double* cur = t.data();
    size_t cur_elems = total;
    double* bufs[2] = {ws.a.data(), ws.b.data()};
    int which = 0;

    for (int l = d - 1; l > skip; --l) {
        const size_t nc = t.dim(l);
        const size_t nr = cur_elems / nc;
        contract_last<Par>(cur, nr, nc, vec[l], bufs[which]);
        cur = bufs[which];
        cur_elems = nr;
        which ^= 1;
    }
    for (int l = 0; l < skip; ++l) {
        const size_t nr = t.dim(l);
        const size_t nc = cur_elems / nr;
        contract_first<Par>(cur, nr, nc, vec[l], bufs[which]);
        cur = bufs[which];
        cur_elems = nc;
        which ^= 1;
    }
    return Eigen::Map<const Eigen::VectorXd>(cur, static_cast<Eigen::Index>(cur_elems));
}

template <bool Par>
void reconstruct_core(const Eigen::VectorXd& sigma, const std::vector<Eigen::MatrixXd>& factors,
                      DenseTensor& out) {
    const int d = static_cast<int>(factors.size());
    const int R = static_cast<int>(sigma.size());
    const size_t n_last = out.dim(d - 1);
    const size_t rows = out.size() / n_last;
    const Eigen::MatrixXd& last = factors[static_cast<size_t>(d - 1)];

#pragma omp parallel for schedule(static) if (Par)
    for (ptrdiff_t row = 0; row < static_cast<ptrdiff_t>(rows); ++row) {
        thread_local std::vector<double> coef;
        coef.assign(sigma.data(), sigma.data() + R);
        size_t rem = static_cast<size_t>(row);
        for (int l = d - 2; l >= 0; --l) {
            const size_t nl = out.dim(l);
            const auto il = static_cast<Eigen::Index>(rem % nl);
            rem /= nl;
            const auto& U = factors[static_cast<size_t>(l)];
            for (int i = 0; i < R; ++i) coef[static_cast<size_t>(i)] *= U(il, i);
        }
        Eigen::Map<Eigen::VectorXd> o(out.data() + static_cast<size_t>(row) * n_last,
                                      static_cast<Eigen::Index>(n_last));
        o.setZero();
        for (int i = 0; i < R; ++i) o += coef[static_cast<size_t>(i)] * last.col(i);
    }
}

void check_reconstruct_args(const Eigen::VectorXd& sigma,
                            const std::vector<Eigen::MatrixXd>& factors, const DenseTensor& out) {
    if (static_cast<int>(factors.size()) != out.order())
        throw std::invalid_argument("cp_reconstruct: factor count does not match tensor order");
    for (int j = 0; j < out.order(); ++j) {
        const auto& U = factors[static_cast<size_t>(j)];
        if (static_cast<size_t>(U.rows()) != out.dim(j))
            throw std::invalid_argument("cp_reconstruct: factor " + std::to_string(j) +
                                        " row count does not match dimension");
        if (U.cols() != sigma.size())
            throw std::invalid_argument("cp_reconstruct: factor " + std::to_string(j) +
                                        " column count does not match rank");
    }
}

std::vector<const double*> gather_vec_ptrs(const DenseTensor& t,
                                           const std::vector<Eigen::VectorXd>& vecs,
                                           int skip_mode) {
    const int d = t.order();
    if (skip_mode < 0 || skip_mode >= d)
        throw std::invalid_argument("contract_all_but: mode out of range");
    if (static_cast<int>(vecs.size()) != d)
        throw std::invalid_argument("contract_all_but: need one vector slot per mode");
    std::vector<const double*> ptrs(static_cast<size_t>(d), nullptr);
    for (int l = 0; l < d; ++l) {
        if (l == skip_mode) continue;
        const auto& v = vecs[static_cast<size_t>(l)];
        if (static_cast<size_t>(v.size()) != t.dim(l))
            throw std::invalid_argument("contract_all_but: vector length mismatch in mode " +
                                        std::to_string(l));
        ptrs[static_cast<size_t>(l)] = v.data();
    }
    return ptrs;
}

} // namespace

void cp_reconstruct_into(const Eigen::VectorXd& sigma,
                         const std::vector<Eigen::MatrixXd>& factors, DenseTensor& out) {
    check_reconstruct_args(sigma, factors, out);
    reconstruct_core<true>(sigma, factors, out);
}

DenseTensor cp_reconstruct(const CpModel& model) {
    DenseTensor out(model.dims());
    cp_reconstruct_into(model.sigma, model.factors, out);
    return out;
}

Eigen::VectorXd contract_all_but(const DenseTensor& t,
                                 const std::vector<Eigen::VectorXd>& vecs, int skip_mode) {
    const auto ptrs = gather_vec_ptrs(t, vecs, skip_mode);
    Workspace ws;
    return contract_core<true>(t, ptrs.data(), skip_mode, ws);
}

Eigen::VectorXd contract_all_but(const DenseTensor& t,
                                 const std::vector<Eigen::MatrixXd>& factors, int skip_mode,
                                 int component, Workspace& ws) {
    const int d = t.order();
    if (skip_mode < 0 || skip_mode >= d)
        throw std::invalid_argument("contract_all_but: mode out of range");
    ws.vec_ptrs.assign(static_cast<size_t>(d), nullptr);
    for (int l = 0; l < d; ++l) {
        if (l == skip_mode) continue;
        const auto& U = factors[static_cast<size_t>(l)];
        if (static_cast<size_t>(U.rows()) != t.dim(l))
            throw std::invalid_argument("contract_all_but: factor row count mismatch in mode " +
                                        std::to_string(l));
        ws.vec_ptrs[static_cast<size_t>(l)] = U.col(component).data();
    }
    return contract_core<true>(t, ws.vec_ptrs.data(), skip_mode, ws);
}

double inner(const DenseTensor& a, const DenseTensor& b) {
    check_same_dims(a, b, "inner");
    const double* pa = a.data();
    const double* pb = b.data();
    return detail::blocked_sum<true>(a.size(), [&](size_t i) { return pa[i] * pb[i]; });
}

double frob_norm(const DenseTensor& a) {
    const double* pa = a.data();
    return std::sqrt(detail::blocked_sum<true>(a.size(), [&](size_t i) { return pa[i] * pa[i]; }));
}

double frob_norm_diff(const DenseTensor& a, const DenseTensor& b) {
    check_same_dims(a, b, "frob_norm_diff");
    const double* pa = a.data();
    const double* pb = b.data();
    return std::sqrt(detail::blocked_sum<true>(a.size(), [&](size_t i) {
        const double d = pa[i] - pb[i];
        return d * d;
    }));
}

DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b) {
    check_same_dims(a, b, "hadamard");
    DenseTensor out(a.dims());
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    const auto n = static_cast<ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
    for (ptrdiff_t i = 0; i < n; ++i) po[i] = pa[i] * pb[i];
    return out;
}

Eigen::MatrixXd matricize(const DenseTensor& t, int mode) {
    const int d = t.order();
    if (mode < 0 || mode >= d) throw std::invalid_argument("matricize: mode out of range");
    const size_t nj = t.dim(mode);
    const size_t cols = t.size() / nj;
    const size_t inner_sz = t.stride(mode);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(nj), static_cast<Eigen::Index>(cols));
    const double* src = t.data();
#pragma omp parallel for schedule(static)
    for (ptrdiff_t c = 0; c < static_cast<ptrdiff_t>(cols); ++c) {
        const size_t outer = static_cast<size_t>(c) / inner_sz;
        const size_t innr = static_cast<size_t>(c) % inner_sz;
        const size_t base = outer * nj * inner_sz + innr;
        for (size_t r = 0; r < nj; ++r)
            out(static_cast<Eigen::Index>(r), c) = src[base + r * inner_sz];
    }
    return out;
}

Eigen::MatrixXd khatri_rao(const std::vector<Eigen::MatrixXd>& mats) {
    if (mats.empty()) throw std::invalid_argument("khatri_rao: no input matrices");
    const Eigen::Index R = mats.front().cols();
    Eigen::Index rows = 1;
    for (const auto& m : mats) {
        if (m.cols() != R) throw std::invalid_argument("khatri_rao: ragged column counts");
        rows *= m.rows();
    }
    Eigen::MatrixXd out(rows, R);
#pragma omp parallel for schedule(static)
    for (ptrdiff_t c = 0; c < static_cast<ptrdiff_t>(R); ++c) {
        thread_local std::vector<double> cur, next;
        const auto& m0 = mats.front();
        cur.assign(m0.col(c).data(), m0.col(c).data() + m0.rows());
        for (size_t k = 1; k < mats.size(); ++k) {
            const auto& m = mats[k];
            const size_t nr = static_cast<size_t>(m.rows());
            next.resize(cur.size() * nr);
            for (size_t p = 0; p < cur.size(); ++p)
                for (size_t q = 0; q < nr; ++q)
                    next[p * nr + q] = cur[p] * m(static_cast<Eigen::Index>(q), c);
            std::swap(cur, next);
        }
        std::copy(cur.begin(), cur.end(), out.col(c).data());
    }
    return out;
}

namespace ref {

void cp_reconstruct_into(const Eigen::VectorXd& sigma,
                         const std::vector<Eigen::MatrixXd>& factors, DenseTensor& out) {
    check_reconstruct_args(sigma, factors, out);
    reconstruct_core<false>(sigma, factors, out);
}

Eigen::VectorXd contract_all_but(const DenseTensor& t,
                                 const std::vector<Eigen::VectorXd>& vecs, int skip_mode) {
    const auto ptrs = gather_vec_ptrs(t, vecs, skip_mode);
    Workspace ws;
    return contract_core<false>(t, ptrs.data(), skip_mode, ws);
}

double inner(const DenseTensor& a, const DenseTensor& b) {
    check_same_dims(a, b, "inner");
    const double* pa = a.data();
    const double* pb = b.data();
    return detail::blocked_sum<false>(a.size(), [&](size_t i) { return pa[i] * pb[i]; });
}

double frob_norm(const DenseTensor& a) {
    const double* pa = a.data();
    return std::sqrt(detail::blocked_sum<false>(a.size(), [&](size_t i) { return pa[i] * pa[i]; }));
}

DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b) {
    check_same_dims(a, b, "hadamard");
    DenseTensor out(a.dims());
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    for (size_t i = 0; i < a.size(); ++i) po[i] = pa[i] * pb[i];
    return out;
}

} // namespace ref

} // namespace rcpd::kernels

namespace rcpd::cauchy {

double total_loss(const DenseTensor& residual, double delta) {
    const double* p = residual.data();
    return rcpd::kernels::detail::blocked_sum<true>(residual.size(),
                                               [&](std::size_t i) { return loss(p[i], delta); });
}

} // namespace rcpd::cauchy
