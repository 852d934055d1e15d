// Timing comparison between the OpenMP kernels and the serial reference.
// Usage: rcpd_bench_kernels [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rcpd/kernels.hpp"
#include "rcpd/rng.hpp"
#include "rcpd/stiefel.hpp"
#include "rcpd/tensor.hpp"

using namespace rcpd;
namespace k = rcpd::kernels;

namespace {

template <class Fn>
double best_of(int repeats, Fn&& fn) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        best = std::min(best, s);
    }
    return best;
}

void report(const char* name, const std::string& shape, double serial_s, double parallel_s,
            double check) {
    std::printf("%-18s %-16s serial %8.2f ms   omp %8.2f ms   speedup %5.2fx   |diff| %.1e\n",
                name, shape.c_str(), serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
                check);
}

} // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns are serial\n");
#endif

    Rng rng(7);
    const std::vector<std::size_t> dims = {96, 96, 96};
    const int R = 16;

    Eigen::VectorXd sigma(R);
    for (int i = 0; i < R; ++i) sigma(i) = rng.normal();
    std::vector<Eigen::MatrixXd> factors;
    for (std::size_t j = 0; j < dims.size(); ++j)
        factors.push_back(
            stiefel::random_orthonormal(static_cast<int>(dims[j]), R, rng));

    DenseTensor out_par(dims), out_ser(dims);
    const double t_recon_ser =
        best_of(repeats, [&] { k::ref::cp_reconstruct_into(sigma, factors, out_ser); });
    const double t_recon_par =
        best_of(repeats, [&] { k::cp_reconstruct_into(sigma, factors, out_par); });
    double diff = 0.0;
    for (std::size_t i = 0; i < out_par.size(); ++i)
        diff = std::max(diff, std::abs(out_par[i] - out_ser[i]));
    report("cp_reconstruct", "96^3 R=16", t_recon_ser, t_recon_par, diff);

    std::vector<Eigen::VectorXd> vecs;
    for (std::size_t j = 0; j < dims.size(); ++j) vecs.push_back(factors[j].col(0));
    Eigen::VectorXd c_par, c_ser;
    const double t_con_ser =
        best_of(repeats, [&] { c_ser = k::ref::contract_all_but(out_ser, vecs, 0); });
    const double t_con_par =
        best_of(repeats, [&] { c_par = k::contract_all_but(out_ser, vecs, 0); });
    report("contract_all_but", "96^3 mode 0", t_con_ser, t_con_par,
           (c_par - c_ser).cwiseAbs().maxCoeff());

    const double t_inner_ser = best_of(repeats, [&] { (void)k::ref::inner(out_ser, out_ser); });
    const double t_inner_par = best_of(repeats, [&] { (void)k::inner(out_ser, out_ser); });
    report("inner", "96^3", t_inner_ser, t_inner_par,
           std::abs(k::inner(out_ser, out_ser) - k::ref::inner(out_ser, out_ser)));

    const double t_norm_ser = best_of(repeats, [&] { (void)k::ref::frob_norm(out_ser); });
    const double t_norm_par = best_of(repeats, [&] { (void)k::frob_norm(out_ser); });
    report("frob_norm", "96^3", t_norm_ser, t_norm_par,
           std::abs(k::frob_norm(out_ser) - k::ref::frob_norm(out_ser)));

    DenseTensor h_par(dims);
    const double t_had_ser =
        best_of(repeats, [&] { (void)k::ref::hadamard(out_ser, out_ser); });
    const double t_had_par = best_of(repeats, [&] { h_par = k::hadamard(out_ser, out_ser); });
    report("hadamard", "96^3", t_had_ser, t_had_par, 0.0);

    return 0;
}
