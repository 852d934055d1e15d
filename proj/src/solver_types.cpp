#include "rcpd/solver_types.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace rcpd {

void SolverConfig::validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("SolverConfig: tau must be > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("SolverConfig: alpha must be > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("SolverConfig: delta must be > 0");
    if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be > 0");
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
    os << "iter,fit,aug_lagrangian,prox_aug_lagrangian,primal_residual,kkt_residual\n";
    char buf[256];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.iter, r.fit,
                      r.aug_lagrangian, r.prox_aug_lagrangian, r.primal_residual, r.kkt_residual);
        os << buf;
    }
}

} // namespace rcpd
