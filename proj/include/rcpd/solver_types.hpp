#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "rcpd/cp_model.hpp"

namespace rcpd {

struct SolverConfig {
    double tau = 1.0;     // penalty weight on the slack constraint
    double alpha = 1e-8;  // proximal weight in the factor updates
    double delta = 0.05;  // Cauchy loss scale
    int max_iter = 2000;
    double tol = 1e-6; // stop when |fit_{k+1} - fit_k| <= tol
    std::uint64_t seed = 0;
    bool diagnostics = false;          // record Lagrangian/KKT trace columns
    bool warn_tau_below_theory = false; // warn once when tau < sqrt(10)

    void validate() const; // throws std::invalid_argument
};

/// One row per iteration. fit and the primal residual are always recorded;
/// the Lagrangian and KKT columns are NaN unless diagnostics are enabled. The
/// trailing fields are extra convergence diagnostics that do not appear in
/// the CSV export.
struct TraceRecord {
    static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

    int iter = 0;
    double fit = kNaN; // ||reconstruction - A||_F
    double aug_lagrangian = kNaN;
    double prox_aug_lagrangian = kNaN;
    double primal_residual = kNaN; // ||reconstruction - T||_F
    double kkt_residual = kNaN;

    double dT = kNaN;             // ||T_k - T_{k-1}||_F
    double dY = kNaN;             // ||Y_k - Y_{k-1}||_F
    double multiplier_gap = kNaN; // ||Y_k + W_{k-1} o (T_k - A)||_F
    double w_min = kNaN, w_max = kNaN;
    double constraint_err = kNaN;
};

struct SolveResult {
    CpModel model;
    int iterations = 0;
    double final_fit = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::vector<TraceRecord> trace;
};

/// CSV columns: iter,fit,aug_lagrangian,prox_aug_lagrangian,primal_residual,kkt_residual
void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace);

} // namespace rcpd
