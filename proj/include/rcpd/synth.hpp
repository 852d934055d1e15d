#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rcpd/cp_model.hpp"
#include "rcpd/rng.hpp"
#include "rcpd/solver_types.hpp"
#include "rcpd/tensor.hpp"

namespace rcpd::synth {

// Contamination models applied to a normalized ground truth A0/||A0||:
//   Cauchy / Gaussian:  A = A0/||A0|| + beta * N/||N||
//   Outliers:           A = A0/||A0|| + O, entries hit independently with
//                        probability `density`, magnitudes uniform [low, high]
struct CauchyNoise {
    double scale = 0.05;
    double mix_beta = 0.5;
};
// The default magnitude range starts at 1: additions near zero are
// indistinguishable from inlier noise at the usual loss scale and put a floor
// of a few 1e-2 under the recovery error of any redescending estimator,
// an order of magnitude above what gross outliers alone cost.
struct OutlierNoise {
    double density = 0.1;
    double low = 1.0;
    double high = 10.0;
};
struct GaussianNoise {
    double mix_beta = 0.1;
};
using NoiseSpec = std::variant<CauchyNoise, OutlierNoise, GaussianNoise>;

std::string noise_label(const NoiseSpec& spec);

/// Ground truth: factor entries uniform on [-1, 1]; the trailing t factors
/// are then orthonormalized (sign-fixed thin QR), the leading ones normalized
/// columnwise; sigma is i.i.d. standard normal. Returns the model and its
/// reconstruction A0 (cube of side n, order d).
std::pair<CpModel, DenseTensor> gen_ground_truth(int n, int d, int t, int R, Rng& rng);

DenseTensor add_noise(const DenseTensor& A0, const NoiseSpec& spec, Rng& rng);

/// err = || A0/||A0|| - A*/||A*|| || with A* the model reconstruction.
/// Values lie in [0, 2]. Throws std::domain_error if either norm is zero.
double err_metric(const DenseTensor& A0, const CpModel& model);

enum class SolverTag { HqAdmm, Als };
std::string solver_label(SolverTag tag);

struct BenchCase {
    int n = 20, d = 3, t = 1, R = 5;
    NoiseSpec noise = CauchyNoise{};
    int instances = 20;
    std::uint64_t seed = 0;
};

struct BenchResult {
    BenchCase bench_case;
    SolverTag solver = SolverTag::HqAdmm;
    double err_median = 0.0;
    double err_mean = 0.0;
    double iter_mean = 0.0;
    double time_mean_s = 0.0;
    int failures = 0;
    std::vector<double> errs;  // per instance, in instance order
    std::vector<int> iters;    // per instance
    std::vector<double> kkt;   // final KKT residual per instance (HQ-ADMM only)
};

/// Runs every (case, solver) pair over `instances` independent instances with
/// counter-derived sub-seeds; both solvers see identical data per instance.
/// Instance failures are recorded and excluded from the aggregates.
/// Deterministic up to the time column for a fixed case seed. jobs > 1 runs
/// instances of a case in parallel.
std::vector<BenchResult> run_bench(const std::vector<BenchCase>& cases,
                                   const std::vector<SolverTag>& solvers,
                                   const SolverConfig& base_config, int jobs = 1);

/// CSV columns: n,d,t,R,noise,solver,err_median,err_mean,iter_mean,time_mean_s
void write_bench_csv(std::ostream& os, const std::vector<BenchResult>& results);

double median(std::vector<double> values); // by copy; sorts internally

} // namespace rcpd::synth
