#include "rcpd/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "rcpd/als.hpp"
#include "rcpd/errors.hpp"
#include "rcpd/hq_admm.hpp"
#include "rcpd/kernels.hpp"
#include "rcpd/stiefel.hpp"

namespace rcpd::synth {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void scale_to_unit_norm(DenseTensor& t) {
    const double nrm = kernels::frob_norm(t);
    if (nrm == 0.0) throw std::domain_error("add_noise: zero tensor cannot be normalized");
    double* p = t.data();
    for (std::size_t i = 0; i < t.size(); ++i) p[i] /= nrm;
}

} // namespace

std::string noise_label(const NoiseSpec& spec) {
    if (const auto* c = std::get_if<CauchyNoise>(&spec))
        return "cauchy(scale=" + fmt(c->scale) + ";beta=" + fmt(c->mix_beta) + ")";
    if (const auto* o = std::get_if<OutlierNoise>(&spec))
        return "outliers(density=" + fmt(o->density) + ";low=" + fmt(o->low) +
               ";high=" + fmt(o->high) + ")";
    const auto& g = std::get<GaussianNoise>(spec);
    return "gaussian(beta=" + fmt(g.mix_beta) + ")";
}

std::string solver_label(SolverTag tag) {
    return tag == SolverTag::HqAdmm ? "hq-admm" : "als";
}

std::pair<CpModel, DenseTensor> gen_ground_truth(int n, int d, int t, int R, Rng& rng) {
    if (d < 2) throw std::invalid_argument("gen_ground_truth: order must be >= 2");
    if (t < 1 || t > d) throw std::invalid_argument("gen_ground_truth: t must be in [1, d]");
    if (R < 1) throw std::invalid_argument("gen_ground_truth: rank must be >= 1");
    if (R > n)
        throw std::invalid_argument(
            "gen_ground_truth: rank exceeds the mode size of an orthonormal mode");

    CpModel model;
    model.sigma.resize(R);
    model.mode_kind.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        Eigen::MatrixXd M(n, R);
        for (int c = 0; c < R; ++c)
            for (int r = 0; r < n; ++r) M(r, c) = rng.uniform(-1.0, 1.0);
        const bool orth = j >= d - t;
        model.mode_kind[static_cast<std::size_t>(j)] =
            orth ? ModeKind::Orthonormal : ModeKind::UnitColumns;
        if (orth) {
            M = stiefel::orthonormalize(M);
        } else {
            for (int c = 0; c < R; ++c) M.col(c) /= M.col(c).norm();
        }
        model.factors.push_back(std::move(M));
    }
    for (int i = 0; i < R; ++i) model.sigma(i) = rng.normal();

    DenseTensor A0(model.dims());
    kernels::cp_reconstruct_into(model.sigma, model.factors, A0);
    return {std::move(model), std::move(A0)};
}

DenseTensor add_noise(const DenseTensor& A0, const NoiseSpec& spec, Rng& rng) {
    DenseTensor out = A0;
    scale_to_unit_norm(out);
    double* po = out.data();
    const std::size_t n = out.size();

    if (const auto* o = std::get_if<OutlierNoise>(&spec)) {
        if (o->density < 0.0 || o->density > 1.0)
            throw std::invalid_argument("add_noise: outlier density must be in [0, 1]");
        for (std::size_t i = 0; i < n; ++i)
            if (rng.uniform01() < o->density) po[i] += rng.uniform(o->low, o->high);
        return out;
    }

    double beta = 0.0;
    DenseTensor noise(A0.dims());
    double* pn = noise.data();
    if (const auto* c = std::get_if<CauchyNoise>(&spec)) {
        if (!(c->scale > 0.0)) throw std::invalid_argument("add_noise: scale must be > 0");
        if (c->mix_beta < 0.0) throw std::invalid_argument("add_noise: beta must be >= 0");
        beta = c->mix_beta;
        for (std::size_t i = 0; i < n; ++i) pn[i] = rng.cauchy(c->scale);
    } else {
        const auto& g = std::get<GaussianNoise>(spec);
        if (g.mix_beta < 0.0) throw std::invalid_argument("add_noise: beta must be >= 0");
        beta = g.mix_beta;
        for (std::size_t i = 0; i < n; ++i) pn[i] = rng.normal();
    }
    if (beta == 0.0) return out;
    scale_to_unit_norm(noise);
    for (std::size_t i = 0; i < n; ++i) po[i] += beta * pn[i];
    return out;
}

double err_metric(const DenseTensor& A0, const CpModel& model) {
    const DenseTensor recon = kernels::cp_reconstruct(model);
    check_same_dims(A0, recon, "err_metric");
    const double n0 = kernels::frob_norm(A0);
    const double nr = kernels::frob_norm(recon);
    if (n0 == 0.0 || nr == 0.0)
        throw std::domain_error("err_metric: zero tensor cannot be normalized");
    const double* pa = A0.data();
    const double* pr = recon.data();
    return std::sqrt(kernels::blocked_sum(A0.size(), [&](std::size_t i) {
        const double d = pa[i] / n0 - pr[i] / nr;
        return d * d;
    }));
}

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return (values.size() % 2 == 1) ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

std::vector<BenchResult> run_bench(const std::vector<BenchCase>& cases,
                                   const std::vector<SolverTag>& solvers,
                                   const SolverConfig& base_config, int jobs) {
    std::vector<BenchResult> results;
    for (const auto& cs : cases) {
        if (cs.instances < 1) throw std::invalid_argument("run_bench: instances must be >= 1");

        struct InstanceRecord {
            double err = TraceRecord::kNaN;
            int iters = 0;
            double seconds = 0.0;
            double kkt = TraceRecord::kNaN;
            bool failed = false;
        };
        std::vector<std::vector<InstanceRecord>> records(
            solvers.size(), std::vector<InstanceRecord>(static_cast<std::size_t>(cs.instances)));

#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
        for (int inst = 0; inst < cs.instances; ++inst) {
            Rng data_rng(derive_seed(cs.seed, static_cast<std::uint64_t>(inst), 0));
            CpModel truth;
            DenseTensor A0, A;
            try {
                auto gt = gen_ground_truth(cs.n, cs.d, cs.t, cs.R, data_rng);
                truth = std::move(gt.first);
                A0 = std::move(gt.second);
                A = add_noise(A0, cs.noise, data_rng);
            } catch (const std::exception&) {
                for (std::size_t s = 0; s < solvers.size(); ++s)
                    records[s][static_cast<std::size_t>(inst)].failed = true;
                continue;
            }

            for (std::size_t s = 0; s < solvers.size(); ++s) {
                auto& rec = records[s][static_cast<std::size_t>(inst)];
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    if (solvers[s] == SolverTag::HqAdmm) {
                        SolverConfig cfg = base_config;
                        cfg.seed = derive_seed(cs.seed, static_cast<std::uint64_t>(inst), 1);
                        Rng rng(cfg.seed);
                        // run through the state API so the final state stays
                        // available for the KKT residual
                        auto state = hq_admm::init_state(A, cs.R, cs.t, cfg, rng);
                        hq_admm::run_to_convergence(state, A, cfg);
                        rec.err = err_metric(A0, state.model);
                        rec.iters = state.iter;
                        rec.kkt = hq_admm::kkt_residual(state, A, cfg.tau, cfg.delta);
                    } else {
                        const auto res = als::solve(
                            A, cs.R, cs.t, base_config.max_iter, base_config.tol,
                            derive_seed(cs.seed, static_cast<std::uint64_t>(inst), 2));
                        rec.err = err_metric(A0, res.model);
                        rec.iters = res.iterations;
                    }
                } catch (const std::exception&) {
                    rec.failed = true;
                }
                rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                  .count();
            }
        }

        for (std::size_t s = 0; s < solvers.size(); ++s) {
            BenchResult r;
            r.bench_case = cs;
            r.solver = solvers[s];
            double err_sum = 0.0, iter_sum = 0.0, time_sum = 0.0;
            for (const auto& rec : records[s]) {
                if (rec.failed) {
                    ++r.failures;
                    continue;
                }
                r.errs.push_back(rec.err);
                r.iters.push_back(rec.iters);
                if (std::isfinite(rec.kkt)) r.kkt.push_back(rec.kkt);
                err_sum += rec.err;
                iter_sum += rec.iters;
                time_sum += rec.seconds;
            }
            const auto ok = static_cast<double>(r.errs.size());
            if (ok > 0) {
                r.err_median = median(r.errs);
                r.err_mean = err_sum / ok;
                r.iter_mean = iter_sum / ok;
                r.time_mean_s = time_sum / ok;
            }
            results.push_back(std::move(r));
        }
    }
    return results;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchResult>& results) {
    os << "n,d,t,R,noise,solver,err_median,err_mean,iter_mean,time_mean_s\n";
    char buf[256];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%s,%s,%.10g,%.10g,%.10g,%.4g\n",
                      r.bench_case.n, r.bench_case.d, r.bench_case.t, r.bench_case.R,
                      noise_label(r.bench_case.noise).c_str(), solver_label(r.solver).c_str(),
                      r.err_median, r.err_mean, r.iter_mean, r.time_mean_s);
        os << buf;
    }
}

} // namespace rcpd::synth
