#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "structpop/characteristics.hpp"
#include "structpop/errors.hpp"
#include "structpop/model.hpp"

using namespace structpop;

namespace {

VitalRates constant_model(double beta0 = 2.0, double mu0 = 0.0, double gamma0 = 1.0) {
    ModelSpec spec;
    spec.name = "constant";
    spec.params = {{"beta0", beta0}, {"mu0", mu0}, {"gamma0", gamma0}};
    return load_model(spec);
}

VitalRates linear_gamma_model() {
    VitalRates rates;
    rates.name = "linear-gamma";
    rates.beta = [](double, double) { return 1.0; };
    rates.mu = [](double s) { return 0.5 + s; };
    rates.gamma = [](double s) { return 1.0 + s; };
    rates.gamma_min = 1.0;
    return rates;
}

}  // namespace

TEST_CASE("tau: unit growth") {
    FlowCache cache(constant_model());
    CHECK(std::abs(cache.tau(0.2, 0.7) - 0.5) < 1e-12);
    CHECK(cache.tau(0.4, 0.4) == 0.0);
    CHECK_THROWS_AS(cache.tau(0.7, 0.2), Error);
    CHECK_THROWS_AS(cache.tau(-0.1, 0.5), Error);
}

TEST_CASE("tau: gamma = 1 + s has closed form ln 2") {
    FlowCache cache(linear_gamma_model());
    CHECK(std::abs(cache.tau(0.0, 1.0) - std::log(2.0)) < 1e-8);
    // cross-check against adaptive quadrature on a random subinterval
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        double x = unif(rng), y = unif(rng);
        if (x > y) std::swap(x, y);
        double expected = oracles::integrate([](double r) { return 1.0 / (1.0 + r); }, x, y);
        CHECK(std::abs(cache.tau(x, y) - expected) < 1e-9);
    }
}

TEST_CASE("survival closed forms and quadrature oracle") {
    SUBCASE("mu = 0 gives 1") {
        FlowCache cache(constant_model());
        CHECK(cache.survival(0.1, 0.9) == 1.0);
        CHECK(cache.survival(0.4, 0.4) == 1.0);
    }
    SUBCASE("mu = 1, gamma = 1") {
        FlowCache cache(constant_model(2.0, 1.0, 1.0));
        CHECK(std::abs(cache.survival(0.0, 1.0) - std::exp(-1.0)) < 1e-8);
    }
    SUBCASE("general rates vs quadrature") {
        FlowCache cache(linear_gamma_model());
        double expected = std::exp(
            -oracles::integrate([](double r) { return (0.5 + r) / (1.0 + r); }, 0.2, 0.9));
        CHECK(std::abs(cache.survival(0.2, 0.9) - expected) < 1e-9);
    }
}

TEST_CASE("flow_forward") {
    SUBCASE("unit growth is translation") {
        FlowCache cache(constant_model());
        CHECK(std::abs(*cache.flow_forward(0.3, 0.5) - 0.8) < 1e-10);
        CHECK(*cache.flow_forward(0.0, 0.37) == doctest::Approx(0.37).epsilon(1e-12));
        CHECK(!cache.flow_forward(0.9, 0.5));  // exits at s = 1
    }
    SUBCASE("gamma = 1 + s: S(t;0) = e^t - 1") {
        FlowCache cache(linear_gamma_model());
        CHECK(std::abs(*cache.flow_forward(std::log(2.0), 0.0) - 1.0) < 1e-8);
        CHECK(std::abs(*cache.flow_forward(std::log(1.5), 0.0) - 0.5) < 1e-8);
    }
    SUBCASE("domain errors") {
        FlowCache cache(constant_model());
        CHECK_THROWS_AS(cache.flow_forward(0.1, 1.5), Error);
        CHECK_THROWS_AS(cache.flow_forward(-0.5, 0.2), Error);
    }
}

TEST_CASE("flow_backward and round trips") {
    FlowCache cache(constant_model());
    CHECK(std::abs(*cache.flow_backward(0.3, 0.8) - 0.5) < 1e-10);
    CHECK(*cache.flow_backward(0.0, 0.6) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(!cache.flow_backward(0.7, 0.5));  // born after time 0

    FlowCache curved(linear_gamma_model());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        double s0 = unif(rng), t = unif(rng);
        auto fwd = curved.flow_forward(t, s0);
        if (!fwd) continue;
        CHECK(std::abs(*curved.flow_backward(t, *fwd) - s0) < 1e-10);
    }
}

TEST_CASE("semiflow property") {
    FlowCache cache(linear_gamma_model());
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unif(0.0, 0.4);
    for (int trial = 0; trial < 100; ++trial) {
        double s = unif(rng), t1 = unif(rng) * 0.5, t2 = unif(rng) * 0.5;
        auto direct = cache.flow_forward(t1 + t2, s);
        auto first = cache.flow_forward(t1, s);
        if (!direct || !first) continue;
        auto second = cache.flow_forward(t2, *first);
        REQUIRE(second);
        CHECK(std::abs(*direct - *second) < 1e-9);
    }
}

TEST_CASE("survival multiplicativity") {
    FlowCache cache(linear_gamma_model());
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        double a = unif(rng), b = unif(rng), c = unif(rng);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        CHECK(std::abs(cache.survival(a, c) - cache.survival(a, b) * cache.survival(b, c)) <
              1e-10);
    }
}

TEST_CASE("tau monotonicity and the horizon bound") {
    FlowCache cache(linear_gamma_model());
    for (int i = 0; i < 20; ++i) {
        double x = i / 20.0;
        for (int j = i + 1; j <= 20; ++j) {
            double y = j / 20.0;
            CHECK(cache.tau(x, y) > cache.tau(x + 0.5 / 20, y));  // decreasing in x
            if (j < 20) CHECK(cache.tau(x, y + 1.0 / 20) > cache.tau(x, y));  // increasing in y
        }
    }
    CHECK(std::abs(cache.tau(0.0, 1.0) - cache.Gamma()) < 1e-14);
    CHECK(cache.Gamma() <= 1.0 / 1.0 + 1e-12);  // Gamma <= 1/gamma_min
}
