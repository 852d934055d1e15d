#include "rcpd/als.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "rcpd/errors.hpp"
#include "rcpd/hq_admm.hpp"
#include "rcpd/kernels.hpp"
#include "rcpd/rng.hpp"
#include "rcpd/stiefel.hpp"

namespace rcpd::als {

namespace {

SolveResult run(const DenseTensor& A, CpModel model, int max_iter, double tol) {
    if (max_iter < 1) throw std::invalid_argument("als: max_iter must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("als: tol must be > 0");

    const int d = model.order();
    const int t = model.num_orthonormal();
    const int R = model.rank();
    kernels::Workspace ws;
    DenseTensor recon(A.dims());

    auto project = [&](CpModel& m) {
        for (int i = 0; i < R; ++i) {
            const Eigen::VectorXd v = kernels::contract_all_but(A, m.factors, 0, i, ws);
            m.sigma(i) = v.dot(m.factors[0].col(i));
        }
    };
    auto current_fit = [&](const CpModel& m) {
        kernels::cp_reconstruct_into(m.sigma, m.factors, recon);
        return kernels::frob_norm_diff(recon, A);
    };
    project(model);

    double fit = current_fit(model);
    std::vector<TraceRecord> trace;
    bool converged = false;
    int iter = 0;

    while (iter < max_iter) {
        for (int j = 0; j < d - t; ++j) {
            auto& U = model.factors[static_cast<std::size_t>(j)];
            for (int i = 0; i < R; ++i) {
                if (model.sigma(i) == 0.0) continue;
                const Eigen::VectorXd w = kernels::contract_all_but(A, model.factors, j, i, ws);
                const double nrm = w.norm();
                if (nrm == 0.0) continue;
                U.col(i) = (model.sigma(i) > 0.0 ? 1.0 : -1.0) * w / nrm;
            }
        }
        for (int j = d - t; j < d; ++j) {
            auto& U = model.factors[static_cast<std::size_t>(j)];
            Eigen::MatrixXd M(U.rows(), R);
            for (int i = 0; i < R; ++i)
                M.col(i) =
                    model.sigma(i) * kernels::contract_all_but(A, model.factors, j, i, ws);
            U = stiefel::polar_factor(M);
        }
        project(model);

        const double new_fit = current_fit(model);
        ++iter;
        TraceRecord rec;
        rec.iter = iter;
        rec.fit = new_fit;
        trace.push_back(rec);
        if (!std::isfinite(new_fit) || !model.sigma.allFinite())
            throw numerical_error("als: state became non-finite", iter);
        if (std::abs(new_fit - fit) <= tol) {
            fit = new_fit;
            converged = true;
            break;
        }
        fit = new_fit;
    }

    SolveResult res;
    res.model = std::move(model);
    res.iterations = iter;
    res.final_fit = fit;
    res.converged = converged;
    res.trace = std::move(trace);
    return res;
}

} // namespace

SolveResult solve(const DenseTensor& A, int R, int t, int max_iter, double tol,
                  std::uint64_t seed) {
    if (!A.all_finite())
        throw std::invalid_argument("als: input tensor has non-finite entries");
    Rng rng(seed);
    return run(A, hq_admm::random_model(A, R, t, rng), max_iter, tol);
}

SolveResult solve_from(const DenseTensor& A, const CpModel& initial, int max_iter, double tol) {
    if (!A.all_finite())
        throw std::invalid_argument("als: input tensor has non-finite entries");
    if (initial.num_orthonormal() < 1)
        throw std::invalid_argument("als: need at least one orthonormal mode");
    return run(A, initial, max_iter, tol);
}

} // namespace rcpd::als
