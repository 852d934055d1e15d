// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Each criterion carries its own runtime budget.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "rcpd/als.hpp"
#include "rcpd/cauchy.hpp"
#include "rcpd/hq_admm.hpp"
#include "rcpd/kernels.hpp"
#include "rcpd/rng.hpp"
#include "rcpd/stiefel.hpp"
#include "rcpd/synth.hpp"
#include "rcpd/video.hpp"

using namespace rcpd;
namespace k = rcpd::kernels;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ---- criterion 1: half-quadratic identity and grid minimality ----
Outcome criterion_hq_identity() {
    Outcome out;
    constexpr int kPairs = 10000;
    constexpr int kGrid = 10000;

    std::vector<double> grid_w(kGrid), grid_logw(kGrid);
    for (int g = 0; g < kGrid; ++g) {
        grid_w[g] = 1.25 * (g + 1) / kGrid;
        grid_logw[g] = std::log(grid_w[g]);
    }

    std::vector<double> ts(kPairs), deltas(kPairs);
    Rng rng(1001);
    for (int i = 0; i < kPairs; ++i) {
        ts[i] = rng.uniform(-50.0, 50.0);
        deltas[i] = std::exp(rng.uniform(std::log(0.01), std::log(5.0)));
    }

    int identity_bad = 0, grid_bad = 0;
#pragma omp parallel for schedule(static) reduction(+ : identity_bad, grid_bad)
    for (int i = 0; i < kPairs; ++i) {
        const double t = ts[i], delta = deltas[i];
        const double phi = cauchy::loss(t, delta);
        const double wstar = cauchy::hq_weight(t, delta);
        const double quad =
            0.5 * wstar * t * t + 0.5 * delta * delta * cauchy::hq_penalty(wstar);
        if (std::abs(quad - phi) > 1e-12) ++identity_bad;

        const double a = 0.5 * (t * t + delta * delta);
        const double b = 0.5 * delta * delta;
        double best = std::numeric_limits<double>::infinity();
        for (int g = 0; g < kGrid; ++g) {
            const double v = a * grid_w[g] - b * grid_logw[g];
            if (v < best) best = v;
        }
        if (best - b < phi - 1e-12) ++grid_bad; // grid objective = a*w - b*log w - b
    }
    out.require(identity_bad == 0, std::to_string(identity_bad) + " identity violations");
    out.require(grid_bad == 0, std::to_string(grid_bad) + " grid points beat the closed form");
    return out;
}

// ---- criterion 2: Lipschitz inequalities and finite differences ----
Outcome criterion_analytic() {
    Outcome out;
    Rng rng(1002);
    int lipschitz_bad = 0, cross_bad = 0, fd_bad = 0;
    for (int i = 0; i < 100000; ++i) {
        const double t1 = rng.uniform(-10.0, 10.0);
        const double t2 = rng.uniform(-10.0, 10.0);
        const double delta = std::exp(rng.uniform(std::log(0.01), std::log(2.0)));
        if (std::abs(cauchy::loss_derivative(t1, delta) - cauchy::loss_derivative(t2, delta)) >
            std::abs(t1 - t2) + 1e-12)
            ++lipschitz_bad;
        const double d2 = delta * delta;
        if (std::abs(d2 * t1 * (1.0 / (d2 + t1 * t1) - 1.0 / (d2 + t2 * t2))) >
            std::abs(t1 - t2) + 1e-12)
            ++cross_bad;
        const double h = 1e-4;
        const double fd = (cauchy::loss(t1 + h, delta) - cauchy::loss(t1 - h, delta)) / (2 * h);
        if (std::abs(fd - cauchy::loss_derivative(t1, delta)) > 1e-6) ++fd_bad;
    }
    out.require(lipschitz_bad == 0, std::to_string(lipschitz_bad) + " Lipschitz violations");
    out.require(cross_bad == 0, std::to_string(cross_bad) + " cross-term violations");
    out.require(fd_bad == 0, std::to_string(fd_bad) + " finite-difference mismatches");
    return out;
}

// ---- criterion 3: polar optimality over random orthonormal competitors ----
Outcome criterion_polar() {
    Outcome out;
    Rng rng(1003);
    for (int rep = 0; rep < 100 && out.pass; ++rep) {
        const int rows = 2 + static_cast<int>(rng.uniform01() * 49); // 2..50
        const int cols = 1 + static_cast<int>(rng.uniform01() * std::min(8, rows));
        Eigen::MatrixXd V(rows, std::min(cols, rows));
        for (int c = 0; c < V.cols(); ++c)
            for (int r = 0; r < rows; ++r) V(r, c) = rng.normal();

        const auto pd = stiefel::polar_decompose(V);
        out.require((V - pd.orthonormal * pd.symmetric).cwiseAbs().maxCoeff() < 1e-8,
                    "V != U*H");
        out.require((pd.symmetric - pd.symmetric.transpose()).cwiseAbs().maxCoeff() < 1e-10,
                    "H not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pd.symmetric);
        out.require(eig.eigenvalues().minCoeff() > -1e-10, "H not PSD");

        const double best = (V.transpose() * pd.orthonormal).trace();
        for (int q = 0; q < 1000; ++q) {
            const Eigen::MatrixXd Q =
                stiefel::random_orthonormal(rows, static_cast<int>(V.cols()), rng);
            if ((V.transpose() * Q).trace() > best + 1e-9) {
                out.require(false, "random competitor beat the polar factor");
                break;
            }
        }
    }
    return out;
}

// ---- criterion 4: proximal-Lagrangian monotonicity in the theory regime ----
Outcome criterion_monotone() {
    Outcome out;
    for (int inst = 0; inst < 20 && out.pass; ++inst) {
        const int t = (inst % 2) + 1;
        Rng data_rng(derive_seed(2024, static_cast<std::uint64_t>(inst), 10));
        auto [truth, A0] = synth::gen_ground_truth(15, 3, t, 3, data_rng);
        const DenseTensor A = synth::add_noise(A0, synth::CauchyNoise{}, data_rng);

        SolverConfig cfg;
        cfg.tau = 4.0; // above sqrt(10)
        cfg.diagnostics = true;
        cfg.seed = derive_seed(2024, static_cast<std::uint64_t>(inst), 11);
        const auto res = hq_admm::solve(A, 3, t, cfg);

        for (std::size_t i = 0; i < res.trace.size(); ++i) {
            const auto& r = res.trace[i];
            if (r.multiplier_gap > 1e-10)
                out.require(false, "multiplier identity gap " + num(r.multiplier_gap) +
                                       " at iteration " + std::to_string(r.iter));
            if (i >= 1) {
                if (r.prox_aug_lagrangian >
                    res.trace[i - 1].prox_aug_lagrangian + 1e-9)
                    out.require(false, "proximal Lagrangian increased at iteration " +
                                           std::to_string(r.iter));
                if (r.dY > r.dT + res.trace[i - 1].dT + 1e-9)
                    out.require(false, "dual step exceeded the primal bound at iteration " +
                                           std::to_string(r.iter));
            }
            if (!out.pass) break;
        }
    }
    return out;
}

struct TableRun {
    synth::BenchResult hq;
    synth::BenchResult als;
};

TableRun run_table_case(int n, int t, const synth::NoiseSpec& noise, std::uint64_t seed) {
    synth::BenchCase cs;
    cs.n = n;
    cs.d = 3;
    cs.t = t;
    cs.R = 5;
    cs.noise = noise;
    cs.instances = 20;
    cs.seed = seed;
    SolverConfig cfg; // stock configuration: tau 1, alpha 1e-8, delta 0.05, tol 1e-6
    const auto results =
        synth::run_bench({cs}, {synth::SolverTag::HqAdmm, synth::SolverTag::Als}, cfg, 2);
    return {results[0], results[1]};
}

Outcome criterion_table(const TableRun& run, double hq_below, double als_above,
                        double both_below) {
    Outcome out;
    out.require(run.hq.failures == 0 && run.als.failures == 0, "solver failures");
    if (both_below > 0) {
        out.require(run.hq.err_median < both_below,
                    "hq median err " + num(run.hq.err_median));
        out.require(run.als.err_median < both_below,
                    "als median err " + num(run.als.err_median));
    } else {
        out.require(run.hq.err_median < hq_below, "hq median err " + num(run.hq.err_median));
        out.require(run.als.err_median > als_above, "als median err " + num(run.als.err_median));
    }
    out.detail = "hq=" + num(run.hq.err_median) + " als=" + num(run.als.err_median) +
                 (out.detail.empty() ? "" : "; " + out.detail);
    return out;
}

Outcome criterion_iterations(const TableRun& t1, const TableRun& t2, const TableRun& t3) {
    Outcome out;
    for (const auto* run : {&t1, &t2, &t3}) {
        std::vector<double> iters(run->hq.iters.begin(), run->hq.iters.end());
        const double med = synth::median(iters);
        out.require(med < 500.0, "hq median iterations " + num(med));
    }
    return out;
}

// ---- criterion 9: synthetic video foreground recovery ----
Outcome criterion_video() {
    Outcome out;
    Rng rng(1009);
    const video::MotionPath path; // diagonal, wrapping
    const auto sv = video::gen_synthetic_video(100, 48, 64, 3, 8, 8, 0.8, path, rng);

    video::ExtractOptions opts;
    opts.config.seed = 11;
    const auto fb = video::extract(sv.video, 10, opts);

    const double threshold = 0.4; // half the block contrast
    std::size_t tp = 0, fp = 0, fn = 0;
    double bg_err_sq = 0.0, bg_norm_sq = 0.0;
    const double* data = sv.video.data.data();
    for (int r = 0; r < 100; ++r) {
        const Eigen::MatrixXd B = fb.background_frame(r);
        for (int i = 0; i < 48; ++i)
            for (int j = 0; j < 64; ++j) {
                const std::size_t flat =
                    (static_cast<std::size_t>(r) * 48 + static_cast<std::size_t>(i)) * 64 +
                    static_cast<std::size_t>(j);
                const double fg = std::abs(data[flat] - B(i, j));
                const bool detected = fg > threshold;
                const bool actual = sv.fg_mask[flat] != 0;
                tp += detected && actual;
                fp += detected && !actual;
                fn += !detected && actual;
                const double be = B(i, j) - sv.background(i, j);
                bg_err_sq += be * be;
                bg_norm_sq += sv.background(i, j) * sv.background(i, j);
            }
    }
    const double f1 = 2.0 * tp / (2.0 * tp + fp + fn);
    const double bg_rel = std::sqrt(bg_err_sq / bg_norm_sq);
    out.require(f1 > 0.8, "F1 " + num(f1));
    out.require(bg_rel < 0.05, "background error " + num(bg_rel));

    const std::string ratio = video::format_compression_ratio(1000, 144, 176, 30);
    out.require(ratio == "0.16%", "ratio printed " + ratio);
    out.detail = "F1=" + num(f1) + " bg_err=" + num(bg_rel) + " ratio=" + ratio +
                 (out.detail.empty() ? "" : "; " + out.detail);
    return out;
}

// ---- criterion 10: KKT residuals ----
Outcome criterion_kkt(const TableRun& gaussian_run) {
    Outcome out;
    std::vector<double> kkts = gaussian_run.hq.kkt;
    out.require(!kkts.empty(), "no KKT residuals recorded");
    if (!kkts.empty()) {
        const double med = synth::median(kkts);
        out.require(med < 1e-3, "median KKT residual " + num(med));
        out.detail = "median_kkt=" + num(med);
    }

    // constructed stationary point: exact decomposition, T = A, Y = 0, W = 1
    Rng rng(1010);
    CpModel truth;
    {
        auto [model, A0] = synth::gen_ground_truth(12, 3, 2, 4, rng);
        truth = std::move(model);
        SolverConfig cfg;
        const auto st = hq_admm::init_state_from_factors(A0, truth, cfg);
        const double res = hq_admm::kkt_residual(st, A0, cfg.tau, cfg.delta);
        out.require(res < 1e-10, "stationary-point residual " + num(res));
        out.detail += (out.detail.empty() ? "" : " ") + ("stationary=" + num(res));
    }
    return out;
}

// ---- criterion 11: bench determinism ----
Outcome criterion_determinism() {
    Outcome out;
    synth::BenchCase cs;
    cs.n = 10;
    cs.d = 3;
    cs.t = 1;
    cs.R = 3;
    cs.noise = synth::CauchyNoise{};
    cs.instances = 4;
    cs.seed = 99;
    SolverConfig cfg;

    auto strip_time = [](const std::string& csv) {
        std::istringstream is(csv);
        std::string line, outp;
        while (std::getline(is, line)) outp += line.substr(0, line.rfind(',')) + "\n";
        return outp;
    };
    std::ostringstream a, b;
    synth::write_bench_csv(
        a, synth::run_bench({cs}, {synth::SolverTag::HqAdmm, synth::SolverTag::Als}, cfg, 1));
    synth::write_bench_csv(
        b, synth::run_bench({cs}, {synth::SolverTag::HqAdmm, synth::SolverTag::Als}, cfg, 2));
    out.require(strip_time(a.str()) == strip_time(b.str()),
                "err/iter columns differ between reruns");
    return out;
}

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    Outcome outcome;
    double seconds = 0.0;
};

} // namespace

int main() {
    std::vector<Criterion> criteria;
    TableRun cauchy_run, outlier_run, gaussian_run;

    auto timed = [](auto&& fn, double& seconds) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out = fn();
        seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    };

    auto add = [&](int id, const std::string& name, double budget, auto&& fn) {
        Criterion c{id, name, budget, {}, 0.0};
        c.outcome = timed(fn, c.seconds);
        if (c.seconds > budget) {
            c.outcome.pass = false;
            c.outcome.detail += (c.outcome.detail.empty() ? "" : "; ") + std::string("over budget");
        }
        std::printf("[%s] %2d. %-58s %7.2fs%s%s\n", c.outcome.pass ? "PASS" : "FAIL", id,
                    name.c_str(), c.seconds, c.outcome.detail.empty() ? "" : "  -- ",
                    c.outcome.detail.c_str());
        std::fflush(stdout);
        criteria.push_back(std::move(c));
    };

    add(1, "half-quadratic identity and grid minimality (1e4 pairs)", 1.0,
        [] { return criterion_hq_identity(); });
    add(2, "Lipschitz inequalities and finite differences (1e5 pairs)", 30.0,
        [] { return criterion_analytic(); });
    add(3, "polar factor optimality (100 matrices x 1000 competitors)", 60.0,
        [] { return criterion_polar(); });
    add(4, "proximal Lagrangian monotone for tau=4 (20 instances)", 30.0,
        [] { return criterion_monotone(); });
    add(5, "Cauchy-noise benchmark n=20 (d,t)=(3,1) R=5 x20", 120.0, [&] {
        cauchy_run = run_table_case(20, 1, synth::CauchyNoise{}, 501);
        return criterion_table(cauchy_run, 0.15, 0.30, -1.0);
    });
    add(6, "outlier benchmark n=50 (d,t)=(3,2) R=5 x20", 180.0, [&] {
        outlier_run = run_table_case(50, 2, synth::OutlierNoise{}, 502);
        return criterion_table(outlier_run, 0.05, 1.0, -1.0);
    });
    add(7, "Gaussian benchmark n=50 (d,t)=(3,2) R=5 x20", 180.0, [&] {
        gaussian_run = run_table_case(50, 2, synth::GaussianNoise{}, 503);
        return criterion_table(gaussian_run, -1.0, -1.0, 0.10);
    });
    add(8, "iteration budget: median HQ-ADMM iterations < 500", 1.0,
        [&] { return criterion_iterations(cauchy_run, outlier_run, gaussian_run); });
    add(9, "synthetic video recovery and compression ratio", 60.0,
        [] { return criterion_video(); });
    add(10, "KKT residuals at termination and at a stationary point", 30.0,
        [&] { return criterion_kkt(gaussian_run); });
    add(11, "bench determinism under a fixed master seed", 60.0,
        [] { return criterion_determinism(); });

    int failures = 0;
    for (const auto& c : criteria) failures += c.outcome.pass ? 0 : 1;
    std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
