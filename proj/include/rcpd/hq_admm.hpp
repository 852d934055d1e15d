#pragma once

#include <vector>

#include "rcpd/cp_model.hpp"
#include "rcpd/kernels.hpp"
#include "rcpd/rng.hpp"
#include "rcpd/solver_types.hpp"
#include "rcpd/tensor.hpp"

namespace rcpd::hq_admm {

/// Full solver state: the model (sigma, factors), the slack tensor T, the
/// multiplier Y and the half-quadratic weights W, plus the previous slack
/// (the only history the proximal-Lagrangian diagnostics need).
struct SolverState {
    CpModel model;
    DenseTensor T, Y, W;
    DenseTensor prev_T; // T of the previous iteration
    int iter = 0;
    double fit = 0.0; // ||reconstruction - A||_F at the current model
    std::vector<TraceRecord> trace;

    // reusable buffers, not part of the mathematical state
    DenseTensor scratch_recon, scratch_s;
    kernels::Workspace ws;
    double prev_dT = 0.0;
};

/// Random factors: i.i.d. standard normal draws, orthonormal modes
/// orthonormalized by sign-fixed thin QR, unit-column modes normalized
/// columnwise. sigma is left at zero; callers set it by projection.
CpModel random_model(const DenseTensor& A, int R, int t, Rng& rng);

/// Random initial state built from random_model, with
/// sigma_i = <A, outer product of columns i>, T = reconstruction, Y = 0, and
/// W at the closed-form weights for the initial residual T - A (identically
/// one exactly when T matches A).
SolverState init_state(const DenseTensor& A, int R, int t, const SolverConfig& config, Rng& rng);

/// Same initialization but starting from given factor matrices (sigma is
/// recomputed by projection). Used for warm starts and truth-initialized runs.
SolverState init_state_from_factors(const DenseTensor& A, const CpModel& initial,
                                    const SolverConfig& config);

// --- individual sub-updates (exposed for testing; solve() composes them) ---

/// Unit-column mode update: for every component i,
///   vtilde = sigma_i * contract_all_but(S, columns of the other modes) + alpha * u_old,
///   u_new = vtilde / ||vtilde||,
/// where S = Y + tau * T. Columns are independent of each other.
void update_unit_columns(CpModel& model, const DenseTensor& S, int mode, double alpha,
                         kernels::Workspace& ws);

/// Orthonormal mode update: Vtilde = [sigma_i * v_i] + alpha * U_old, then
/// U_new = polar factor of Vtilde (the maximizer of <Vtilde, Q> over
/// orthonormal Q).
void update_orthonormal(CpModel& model, const DenseTensor& S, int mode, double alpha,
                        kernels::Workspace& ws);

/// Elementwise slack update T = (W o A - Y + tau * G) / (W + tau), where G is
/// the reconstruction at the current factors and the previous sigma.
void update_slack(DenseTensor& T, const DenseTensor& A, const DenseTensor& W,
                  const DenseTensor& Y, const DenseTensor& G, double tau);

/// Multiplier step Y <- Y - tau * (G - T).
void update_multiplier(DenseTensor& Y, const DenseTensor& G, const DenseTensor& T, double tau);

/// sigma_i = <Y + tau T, outer product of columns i> / tau; S2 = Y + tau T.
void update_sigma(CpModel& model, const DenseTensor& S2, double tau, kernels::Workspace& ws);

/// Elementwise half-quadratic weights W = delta^2 / (delta^2 + (T - A)^2).
void update_weights(DenseTensor& W, const DenseTensor& T, const DenseTensor& A, double delta);

// --- monitored quantities ---

/// Augmented Lagrangian
///   0.5 ||sqrt(W) o (A - T)||^2 + (delta^2/2) sum hq_penalty(W)
///   - <Y, G - T> + (tau/2) ||G - T||^2
/// at the current state (G is the reconstruction). Throws std::domain_error
/// if any weight is nonpositive.
double aug_lagrangian(const SolverState& state, const DenseTensor& A, double tau, double delta);

/// aug_lagrangian plus the proximal term (2/tau) ||T - prev_T||^2.
double prox_aug_lagrangian(const SolverState& state, const DenseTensor& A,
                           const DenseTensor& prev_T, double tau, double delta);

/// Max-norm residual of the stationarity system: per-component gradient
/// equations on unit-column modes, projected gradient (orthogonal complement
/// plus skew part) on orthonormal modes, the slack equation, the coupling
/// constraint ||G - T||, and the weight equation. Zero exactly at a
/// stationary point.
double kkt_residual(const SolverState& state, const DenseTensor& A, double tau, double delta);

/// One full iteration in fixed order: unit-column modes, orthonormal modes,
/// T, Y, sigma, W; updates fit and appends a trace row.
void step(SolverState& state, const DenseTensor& A, const SolverConfig& config);

/// Iterates until |fit_{k+1} - fit_k| <= tol or max_iter, leaving the final
/// state in place. The comparison starts at the second iteration: from the
/// neutral start (Y = 0, W = 1, T = reconstruction) the first iteration moves
/// only the auxiliary variables, so the first fit change is identically zero.
/// Returns whether the tolerance criterion fired.
bool run_to_convergence(SolverState& state, const DenseTensor& A, const SolverConfig& config);

/// Runs the iteration until |fit_{k+1} - fit_k| <= tol or max_iter. The
/// converged flag reports which criterion fired. Throws numerical_error if
/// the state stops being finite.
SolveResult solve(const DenseTensor& A, int R, int t, const SolverConfig& config);

/// As solve() but starting from the given factors instead of a random draw.
SolveResult solve_from(const DenseTensor& A, const CpModel& initial, const SolverConfig& config);

} // namespace rcpd::hq_admm
