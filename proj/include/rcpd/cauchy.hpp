#pragma once

#include <cmath>
#include <stdexcept>

#include "rcpd/tensor.hpp"

namespace rcpd::cauchy {

/// Cauchy loss (delta^2 / 2) * log(1 + t^2 / delta^2).
///
/// Evaluated via log1p: with small scales (delta = 0.05 is the usual setting)
/// t^2/delta^2 spans many orders of magnitude and log(1 + x) would lose the
/// small-x regime to cancellation.
inline double loss(double t, double delta) {
    const double r = t / delta;
    if (std::abs(r) > 1e150) // r*r would overflow; log(1 + r^2) ~= 2 log|r|
        return delta * delta * (std::log(std::abs(t)) - std::log(delta));
    return 0.5 * delta * delta * std::log1p(r * r);
}

/// Derivative delta^2 t / (delta^2 + t^2). Bounded: the maximum of |.| is
/// delta/2 at |t| = delta, and it redescends to 0 as |t| grows.
inline double loss_derivative(double t, double delta) {
    return delta * delta * t / (delta * delta + t * t);
}

/// Half-quadratic weight delta^2 / (delta^2 + t^2), the minimizer of
/// (w/2) t^2 + (delta^2/2) hq_penalty(w) over w >= 0. Lies in (0, 1].
inline double hq_weight(double t, double delta) {
    return delta * delta / (delta * delta + t * t);
}

/// Penalty w - log(w) - 1 attached to the half-quadratic weight. Convex,
/// nonnegative, zero only at w = 1. Defined for w > 0 only.
inline double hq_penalty(double w) {
    if (w <= 0.0) throw std::domain_error("hq_penalty: weight must be positive");
    return w - std::log(w) - 1.0;
}

/// Sum of the Cauchy loss over all entries of a residual tensor.
double total_loss(const DenseTensor& residual, double delta);

} // namespace rcpd::cauchy
