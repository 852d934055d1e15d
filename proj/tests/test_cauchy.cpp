#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "rcpd/cauchy.hpp"
#include "rcpd/rng.hpp"
#include "rcpd/tensor.hpp"

using namespace rcpd;
namespace c = rcpd::cauchy;

TEST_CASE("loss: closed-form values") {
    CHECK(c::loss(0.0, 0.05) == 0.0);
    CHECK(c::loss(0.0, 3.0) == 0.0);
    // (1/2) log 2 at t = delta = 1
    CHECK(c::loss(1.0, 1.0) == doctest::Approx(0.34657359027997264).epsilon(1e-14));
    // even in t
    CHECK(c::loss(-1.7, 0.3) == c::loss(1.7, 0.3));
}

TEST_CASE("loss is bounded by t^2/2 and approaches it for large delta") {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const double t = rng.uniform(-8.0, 8.0);
        const double delta = std::exp(rng.uniform(std::log(0.01), std::log(100.0)));
        CHECK(c::loss(t, delta) <= 0.5 * t * t + 1e-15);
    }
    for (int i = 0; i < 50; ++i) {
        const double t = rng.uniform(-1.0, 1.0);
        CHECK(c::loss(t, 1e6) == doctest::Approx(0.5 * t * t).epsilon(1e-9));
    }
}

TEST_CASE("loss_derivative: peak at |t| = delta, finite differences, redescending") {
    CHECK(c::loss_derivative(0.0, 0.7) == 0.0);
    CHECK(c::loss_derivative(0.7, 0.7) == doctest::Approx(0.35).epsilon(1e-14)); // delta/2
    CHECK(c::loss_derivative(-0.7, 0.7) == doctest::Approx(-0.35).epsilon(1e-14));

    Rng rng(2);
    for (int i = 0; i < 500; ++i) {
        const double t = rng.uniform(-10.0, 10.0);
        const double delta = std::exp(rng.uniform(std::log(0.01), std::log(2.0)));
        const double h = 1e-4;
        const double fd = (c::loss(t + h, delta) - c::loss(t - h, delta)) / (2 * h);
        CHECK(std::abs(c::loss_derivative(t, delta) - fd) < 1e-6);
    }

    // monotone decay past the peak
    const double delta = 0.4;
    double prev = c::loss_derivative(delta, delta);
    for (double t = delta * 1.1; t < 50.0; t *= 1.3) {
        const double cur = c::loss_derivative(t, delta);
        CHECK(cur > 0.0);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("hq_weight: endpoints and grid-search argmin oracle") {
    CHECK(c::hq_weight(0.0, 0.3) == 1.0);
    CHECK(c::hq_weight(0.3, 0.3) == 0.5);

    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const double t = rng.uniform(-3.0, 3.0);
        const double delta = rng.uniform(0.05, 1.5);
        const double wstar = c::hq_weight(t, delta);
        auto objective = [&](double w) {
            return 0.5 * w * t * t + 0.5 * delta * delta * c::hq_penalty(w);
        };
        // fine grid over (0, 1.5]
        double best_w = 1e-9, best = objective(1e-9);
        const int grid = 30000;
        for (int g = 1; g <= grid; ++g) {
            const double w = 1.5 * g / grid;
            const double v = objective(w);
            if (v < best) {
                best = v;
                best_w = w;
            }
        }
        CHECK(std::abs(best_w - wstar) < 1.5 / grid + 1e-9);
        CHECK(wstar > 0.0);
        CHECK(wstar <= 1.0);
    }
}

TEST_CASE("hq_penalty: values and domain") {
    CHECK(c::hq_penalty(1.0) == 0.0);
    CHECK(c::hq_penalty(std::exp(1.0)) == doctest::Approx(0.7182818284590451).epsilon(1e-14));
    CHECK_THROWS_AS(c::hq_penalty(-0.2), std::domain_error);
    CHECK_THROWS_AS(c::hq_penalty(0.0), std::domain_error);

    Rng rng(4);
    for (int i = 0; i < 300; ++i) {
        const double w = std::exp(rng.uniform(std::log(1e-6), std::log(50.0)));
        CHECK(c::hq_penalty(w) >= 0.0);
    }
}

TEST_CASE("half-quadratic identity and minimality") {
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        const double t = rng.uniform(-20.0, 20.0);
        const double delta = std::exp(rng.uniform(std::log(0.01), std::log(5.0)));
        const double wstar = c::hq_weight(t, delta);
        const double quad = 0.5 * wstar * t * t + 0.5 * delta * delta * c::hq_penalty(wstar);
        CHECK(std::abs(quad - c::loss(t, delta)) < 1e-12);

        const double w_other = std::exp(rng.uniform(std::log(1e-5), std::log(3.0)));
        const double other = 0.5 * w_other * t * t + 0.5 * delta * delta * c::hq_penalty(w_other);
        CHECK(other >= c::loss(t, delta) - 1e-12);
    }
}

TEST_CASE("derivative is 1-Lipschitz and satisfies the cross-term bound") {
    Rng rng(6);
    for (int i = 0; i < 5000; ++i) {
        const double t1 = rng.uniform(-15.0, 15.0);
        const double t2 = rng.uniform(-15.0, 15.0);
        const double delta = std::exp(rng.uniform(std::log(0.01), std::log(5.0)));
        const double lhs = std::abs(c::loss_derivative(t1, delta) - c::loss_derivative(t2, delta));
        CHECK(lhs <= std::abs(t1 - t2) + 1e-12);

        const double d2 = delta * delta;
        const double cross =
            std::abs(d2 * t1 * (1.0 / (d2 + t1 * t1) - 1.0 / (d2 + t2 * t2)));
        CHECK(cross <= std::abs(t1 - t2) + 1e-12);
    }
}

TEST_CASE("total_loss: zero tensor, constant tensor, weighted reformulation") {
    const DenseTensor zero({3, 4});
    CHECK(c::total_loss(zero, 0.7) == 0.0);

    const double delta = 0.25;
    const DenseTensor at_delta = DenseTensor::constant({3, 4}, delta);
    const double expect = 12.0 * 0.5 * delta * delta * std::log(2.0);
    CHECK(c::total_loss(at_delta, delta) == doctest::Approx(expect).epsilon(1e-13));

    // equals the weighted least-squares value at the optimal weights
    Rng rng(7);
    const DenseTensor r = oracle::random_tensor({4, 5, 2}, rng);
    double reformulated = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double w = c::hq_weight(r[i], delta);
        reformulated += 0.5 * w * r[i] * r[i] + 0.5 * delta * delta * c::hq_penalty(w);
    }
    CHECK(std::abs(c::total_loss(r, delta) - reformulated) < 1e-10);
}
