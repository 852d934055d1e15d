#include "rcpd/hq_admm.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "rcpd/cauchy.hpp"
#include "rcpd/errors.hpp"
#include "rcpd/stiefel.hpp"

namespace rcpd::hq_admm {

namespace {

using kernels::detail::blocked_sum;
using std::ptrdiff_t;
using std::size_t;

// out = y + tau * t
void linear_combine_into(DenseTensor& out, const DenseTensor& y, const DenseTensor& t,
                         double tau) {
    const double* py = y.data();
    const double* pt = t.data();
    double* po = out.data();
    const auto n = static_cast<ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (ptrdiff_t i = 0; i < n; ++i) po[i] = py[i] + tau * pt[i];
}

double lagrangian_core(const DenseTensor& W, const DenseTensor& T, const DenseTensor& Y,
                       const DenseTensor& recon, const DenseTensor& A, double tau,
                       double delta) {
    const double* pw = W.data();
    for (size_t i = 0; i < W.size(); ++i)
        if (!(pw[i] > 0.0)) throw std::domain_error("aug_lagrangian: nonpositive weight");
    const double* pt = T.data();
    const double* py = Y.data();
    const double* pg = recon.data();
    const double* pa = A.data();
    const double d2 = delta * delta;
    return blocked_sum<true>(W.size(), [&](size_t i) {
        const double res = pa[i] - pt[i];
        const double gap = pg[i] - pt[i];
        const double penalty = pw[i] - std::log(pw[i]) - 1.0;
        return 0.5 * pw[i] * res * res + 0.5 * d2 * penalty - py[i] * gap + 0.5 * tau * gap * gap;
    });
}

double kkt_core(const CpModel& model, const DenseTensor& T, const DenseTensor& Y,
                const DenseTensor& W, const DenseTensor& A, const DenseTensor& S,
                const DenseTensor& recon, double tau, double delta, kernels::Workspace& ws) {
    const int d = model.order();
    const int t = model.num_orthonormal();
    const int R = model.rank();
    double worst = 0.0;

    for (int j = 0; j < d - t; ++j) {
        const auto& U = model.factors[static_cast<size_t>(j)];
        for (int i = 0; i < R; ++i) {
            const Eigen::VectorXd v = kernels::contract_all_but(S, model.factors, j, i, ws);
            worst = std::max(worst, (v - model.sigma(i) * tau * U.col(i)).norm());
        }
    }
    for (int j = d - t; j < d; ++j) {
        const auto& U = model.factors[static_cast<size_t>(j)];
        Eigen::MatrixXd G(U.rows(), R);
        for (int i = 0; i < R; ++i)
            G.col(i) = model.sigma(i) * kernels::contract_all_but(S, model.factors, j, i, ws);
        const Eigen::MatrixXd M = U.transpose() * G;
        const double complement = (G - U * M).norm();
        const double skew = (0.5 * (M - M.transpose())).norm();
        worst = std::max(worst, complement + skew);
    }

    const double* pt = T.data();
    const double* py = Y.data();
    const double* pw = W.data();
    const double* pa = A.data();
    const double* pg = recon.data();
    const double d2 = delta * delta;
    const double slack_eq = std::sqrt(blocked_sum<true>(T.size(), [&](size_t i) {
        const double r = (pw[i] + tau) * pt[i] - pw[i] * pa[i] + py[i] - tau * pg[i];
        return r * r;
    }));
    const double weight_eq = std::sqrt(blocked_sum<true>(T.size(), [&](size_t i) {
        const double res = pt[i] - pa[i];
        const double r = pw[i] - d2 / (d2 + res * res);
        return r * r;
    }));
    const double coupling = kernels::frob_norm_diff(recon, T);
    return std::max({worst, slack_eq, weight_eq, coupling});
}

void project_sigma(CpModel& model, const DenseTensor& target, double scale,
                   kernels::Workspace& ws) {
    const int R = model.rank();
    for (int i = 0; i < R; ++i) {
        const Eigen::VectorXd v = kernels::contract_all_but(target, model.factors, 0, i, ws);
        model.sigma(i) = v.dot(model.factors[0].col(i)) / scale;
    }
}

SolverState make_state(const DenseTensor& A, CpModel model, double delta) {
    SolverState st;
    st.model = std::move(model);
    st.ws = kernels::Workspace{};
    project_sigma(st.model, A, 1.0, st.ws);
    st.T = DenseTensor(A.dims());
    kernels::cp_reconstruct_into(st.model.sigma, st.model.factors, st.T);
    st.Y = DenseTensor(A.dims());
    // Start the weights at the closed-form optimum for the initial residual
    // (all ones exactly when T already matches A). A neutral all-ones start
    // lets gross outliers leak undamped through the first T and Y updates and
    // can throw the factor sweep into a poor basin before the weights adapt.
    st.W = DenseTensor(A.dims());
    update_weights(st.W, st.T, A, delta);
    st.prev_T = st.T;
    st.scratch_recon = DenseTensor(A.dims());
    st.scratch_s = DenseTensor(A.dims());
    st.fit = kernels::frob_norm_diff(st.T, A);
    return st;
}

SolveResult run(SolverState st, const DenseTensor& A, const SolverConfig& config) {
    const bool converged = run_to_convergence(st, A, config);
    SolveResult res;
    res.model = std::move(st.model);
    res.iterations = st.iter;
    res.final_fit = st.fit;
    res.converged = converged;
    res.trace = std::move(st.trace);
    return res;
}

} // namespace

CpModel random_model(const DenseTensor& A, int R, int t, Rng& rng) {
    const int d = A.order();
    if (R < 1) throw std::invalid_argument("init_state: rank must be >= 1");
    if (t < 1 || t > d) throw std::invalid_argument("init_state: t must be in [1, order]");

    CpModel model;
    model.sigma = Eigen::VectorXd::Zero(R);
    model.factors.reserve(static_cast<size_t>(d));
    model.mode_kind.resize(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) {
        const auto nj = static_cast<Eigen::Index>(A.dim(j));
        const bool orth = j >= d - t;
        model.mode_kind[static_cast<size_t>(j)] =
            orth ? ModeKind::Orthonormal : ModeKind::UnitColumns;
        if (orth && nj < R)
            throw std::invalid_argument("init_state: mode " + std::to_string(j) +
                                        " cannot hold " + std::to_string(R) +
                                        " orthonormal columns");
        Eigen::MatrixXd M(nj, R);
        for (int c = 0; c < R; ++c)
            for (Eigen::Index r = 0; r < nj; ++r) M(r, c) = rng.normal();
        if (orth) {
            M = stiefel::orthonormalize(M);
        } else {
            for (int c = 0; c < R; ++c) {
                const double nrm = M.col(c).norm();
                if (nrm == 0.0) throw std::runtime_error("init_state: zero column draw");
                M.col(c) /= nrm;
            }
        }
        model.factors.push_back(std::move(M));
    }
    return model;
}

SolverState init_state(const DenseTensor& A, int R, int t, const SolverConfig& config,
                       Rng& rng) {
    config.validate();
    return make_state(A, random_model(A, R, t, rng), config.delta);
}

SolverState init_state_from_factors(const DenseTensor& A, const CpModel& initial,
                                    const SolverConfig& config) {
    config.validate();
    if (initial.order() != A.order())
        throw std::invalid_argument("init_state_from_factors: order mismatch");
    for (int j = 0; j < A.order(); ++j)
        if (static_cast<size_t>(initial.factors[static_cast<size_t>(j)].rows()) != A.dim(j))
            throw std::invalid_argument("init_state_from_factors: dimension mismatch in mode " +
                                        std::to_string(j));
    if (initial.num_orthonormal() < 1)
        throw std::invalid_argument("init_state_from_factors: need at least one orthonormal mode");
    return make_state(A, initial, config.delta);
}

void update_unit_columns(CpModel& model, const DenseTensor& S, int mode, double alpha,
                         kernels::Workspace& ws) {
    auto& U = model.factors[static_cast<size_t>(mode)];
    for (int i = 0; i < model.rank(); ++i) {
        const Eigen::VectorXd v = kernels::contract_all_but(S, model.factors, mode, i, ws);
        const Eigen::VectorXd vt = model.sigma(i) * v + alpha * U.col(i);
        const double nrm = vt.norm();
        if (nrm == 0.0)
            throw std::invalid_argument(
                "update_unit_columns: zero direction; unreachable for alpha > 0 and a unit "
                "previous column");
        U.col(i) = vt / nrm;
    }
}

void update_orthonormal(CpModel& model, const DenseTensor& S, int mode, double alpha,
                        kernels::Workspace& ws) {
    auto& U = model.factors[static_cast<size_t>(mode)];
    Eigen::MatrixXd Vt(U.rows(), U.cols());
    for (int i = 0; i < model.rank(); ++i) {
        const Eigen::VectorXd v = kernels::contract_all_but(S, model.factors, mode, i, ws);
        Vt.col(i) = model.sigma(i) * v + alpha * U.col(i);
    }
    U = stiefel::polar_factor(Vt);
}

void update_slack(DenseTensor& T, const DenseTensor& A, const DenseTensor& W,
                  const DenseTensor& Y, const DenseTensor& G, double tau) {
    const double* pa = A.data();
    const double* pw = W.data();
    const double* py = Y.data();
    const double* pg = G.data();
    double* pt = T.data();
    const auto n = static_cast<ptrdiff_t>(T.size());
#pragma omp parallel for schedule(static)
    for (ptrdiff_t i = 0; i < n; ++i)
        pt[i] = (pw[i] * pa[i] - py[i] + tau * pg[i]) / (pw[i] + tau);
}

void update_multiplier(DenseTensor& Y, const DenseTensor& G, const DenseTensor& T, double tau) {
    const double* pg = G.data();
    const double* pt = T.data();
    double* py = Y.data();
    const auto n = static_cast<ptrdiff_t>(Y.size());
#pragma omp parallel for schedule(static)
    for (ptrdiff_t i = 0; i < n; ++i) py[i] -= tau * (pg[i] - pt[i]);
}

void update_sigma(CpModel& model, const DenseTensor& S2, double tau, kernels::Workspace& ws) {
    project_sigma(model, S2, tau, ws);
}

void update_weights(DenseTensor& W, const DenseTensor& T, const DenseTensor& A, double delta) {
    const double* pt = T.data();
    const double* pa = A.data();
    double* pw = W.data();
    const double d2 = delta * delta;
    const auto n = static_cast<ptrdiff_t>(W.size());
#pragma omp parallel for schedule(static)
    for (ptrdiff_t i = 0; i < n; ++i) {
        const double res = pt[i] - pa[i];
        pw[i] = d2 / (d2 + res * res);
    }
}

double aug_lagrangian(const SolverState& state, const DenseTensor& A, double tau, double delta) {
    const DenseTensor recon = kernels::cp_reconstruct(state.model);
    return lagrangian_core(state.W, state.T, state.Y, recon, A, tau, delta);
}

double prox_aug_lagrangian(const SolverState& state, const DenseTensor& A,
                           const DenseTensor& prev_T, double tau, double delta) {
    const double dT = kernels::frob_norm_diff(state.T, prev_T);
    return aug_lagrangian(state, A, tau, delta) + (2.0 / tau) * dT * dT;
}

double kkt_residual(const SolverState& state, const DenseTensor& A, double tau, double delta) {
    DenseTensor S(A.dims());
    linear_combine_into(S, state.Y, state.T, tau);
    const DenseTensor recon = kernels::cp_reconstruct(state.model);
    kernels::Workspace ws;
    return kkt_core(state.model, state.T, state.Y, state.W, A, S, recon, tau, delta, ws);
}

void step(SolverState& st, const DenseTensor& A, const SolverConfig& config) {
    const int d = st.model.order();
    const int t = st.model.num_orthonormal();
    const double tau = config.tau;

    // factor sweep against S = Y + tau * T, Gauss-Seidel over modes
    linear_combine_into(st.scratch_s, st.Y, st.T, tau);
    for (int j = 0; j < d - t; ++j)
        update_unit_columns(st.model, st.scratch_s, j, config.alpha, st.ws);
    for (int j = d - t; j < d; ++j)
        update_orthonormal(st.model, st.scratch_s, j, config.alpha, st.ws);

    // G = reconstruction at the new factors, previous sigma
    kernels::cp_reconstruct_into(st.model.sigma, st.model.factors, st.scratch_recon);
    const DenseTensor& G = st.scratch_recon;

    std::swap(st.prev_T, st.T); // prev_T now holds the old slack
    update_slack(st.T, A, st.W, st.Y, G, tau);
    const double dT = kernels::frob_norm_diff(st.T, st.prev_T);
    const double dY = tau * kernels::frob_norm_diff(G, st.T);
    update_multiplier(st.Y, G, st.T, tau);

    TraceRecord rec;
    rec.dT = dT;
    rec.dY = dY;
    if (config.diagnostics) {
        // multiplier identity against the pre-update weights: Y = -W o (T - A)
        const double* py = st.Y.data();
        const double* pw = st.W.data();
        const double* pt = st.T.data();
        const double* pa = A.data();
        rec.multiplier_gap = std::sqrt(blocked_sum<true>(st.Y.size(), [&](size_t i) {
            const double g = py[i] + pw[i] * (pt[i] - pa[i]);
            return g * g;
        }));
    }

    linear_combine_into(st.scratch_s, st.Y, st.T, tau); // S2 = Y + tau * T, both new
    update_sigma(st.model, st.scratch_s, tau, st.ws);
    update_weights(st.W, st.T, A, config.delta);

    kernels::cp_reconstruct_into(st.model.sigma, st.model.factors, st.scratch_recon);
    st.fit = kernels::frob_norm_diff(st.scratch_recon, A);
    st.iter += 1;

    rec.iter = st.iter;
    rec.fit = st.fit;
    rec.primal_residual = kernels::frob_norm_diff(st.scratch_recon, st.T);
    if (config.diagnostics) {
        rec.aug_lagrangian =
            lagrangian_core(st.W, st.T, st.Y, st.scratch_recon, A, tau, config.delta);
        rec.prox_aug_lagrangian = rec.aug_lagrangian + (2.0 / tau) * dT * dT;
        rec.kkt_residual = kkt_core(st.model, st.T, st.Y, st.W, A, st.scratch_s,
                                    st.scratch_recon, tau, config.delta, st.ws);
        const Eigen::Map<const Eigen::ArrayXd> w(st.W.data(),
                                                 static_cast<Eigen::Index>(st.W.size()));
        rec.w_min = w.minCoeff();
        rec.w_max = w.maxCoeff();
        rec.constraint_err = constraint_violation(st.model);
    }
    st.trace.push_back(rec);
}

bool run_to_convergence(SolverState& st, const DenseTensor& A, const SolverConfig& config) {
    if (config.warn_tau_below_theory && config.tau < std::sqrt(10.0))
        std::fprintf(stderr,
                     "hq-admm: tau=%g is below sqrt(10); monotone decrease of the proximal "
                     "Lagrangian is no longer guaranteed\n",
                     config.tau);
    // The fit can settle while the splitting variables are still closing the
    // consensus gap (it contracts geometrically once the factors stop
    // moving), so convergence additionally requires the coupling residual
    // ||reconstruction - T|| to fall below sqrt(tol) relative to the data
    // norm.
    const double coupling_tol = std::sqrt(config.tol) * kernels::frob_norm(A);
    double prev_fit = st.fit;
    while (st.iter < config.max_iter) {
        step(st, A, config);
        if (!std::isfinite(st.fit) || !st.model.sigma.allFinite())
            throw numerical_error("hq-admm: state became non-finite", st.iter);
        if (st.iter >= 2 && std::abs(st.fit - prev_fit) <= config.tol &&
            st.trace.back().primal_residual <= coupling_tol)
            return true;
        prev_fit = st.fit;
    }
    return false;
}

SolveResult solve(const DenseTensor& A, int R, int t, const SolverConfig& config) {
    config.validate();
    if (!A.all_finite())
        throw std::invalid_argument("solve: input tensor has non-finite entries");
    Rng rng(config.seed);
    return run(init_state(A, R, t, config, rng), A, config);
}

SolveResult solve_from(const DenseTensor& A, const CpModel& initial,
                       const SolverConfig& config) {
    config.validate();
    if (!A.all_finite())
        throw std::invalid_argument("solve: input tensor has non-finite entries");
    return run(init_state_from_factors(A, initial, config), A, config);
}

} // namespace rcpd::hq_admm
