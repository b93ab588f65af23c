#include <cmath>
#include <vector>

#include "doctest.h"
#include "seqtest/errors.hpp"
#include "seqtest/special.hpp"

using namespace seqtest;

TEST_CASE("normal pdf/cdf basic values") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // Phi(1.96), standard table value at full precision.
    CHECK(std::fabs(norm_cdf(1.96) - 0.9750021048517795) < 1e-14);
    CHECK(std::fabs(norm_cdf(-1.96) - 0.0249978951482205) < 1e-14);
    CHECK(std::fabs(norm_pdf(0.0) - 1.0 / kSqrtTwoPi) < 1e-16);
    // Symmetry and monotonicity.
    for (double x : {0.1, 0.7, 1.3, 2.9}) {
        CHECK(std::fabs(norm_cdf(x) + norm_cdf(-x) - 1.0) < 1e-15);
        CHECK(norm_cdf(x) > norm_cdf(x - 0.05));
    }
}

TEST_CASE("regularized incomplete gamma") {
    // P(3, 2.5) has the closed form 1 - e^{-2.5} (1 + 2.5 + 2.5^2/2).
    double expect = 1.0 - std::exp(-2.5) * (1.0 + 2.5 + 3.125);
    CHECK(std::fabs(gamma_p(3.0, 2.5) - expect) < 1e-13);
    CHECK(std::fabs(gamma_q(3.0, 2.5) - (1.0 - expect)) < 1e-13);
    // P(1, x) = 1 - e^{-x}.
    CHECK(std::fabs(gamma_p(1.0, 0.7) - (1.0 - std::exp(-0.7))) < 1e-14);
    // Complementarity on a grid.
    for (double a : {0.5, 2.0, 7.5})
        for (double x : {0.1, 1.0, 4.0, 20.0})
            CHECK(std::fabs(gamma_p(a, x) + gamma_q(a, x) - 1.0) < 1e-13);
}

TEST_CASE("log_sum_exp stability and values") {
    std::vector<double> two{0.0, 0.0};
    CHECK(std::fabs(log_sum_exp(two) - std::log(2.0)) < 1e-15);
    std::vector<double> shifted{-1000.0, -1001.0};
    double expect = -1000.0 + std::log1p(std::exp(-1.0));
    CHECK(std::fabs(log_sum_exp(shifted) - expect) < 1e-12);
    std::vector<double> one{3.25};
    CHECK(log_sum_exp(one) == doctest::Approx(3.25).epsilon(1e-15));
    std::vector<double> big{1000.0, 1000.0, 1000.0};
    CHECK(std::fabs(log_sum_exp(big) - (1000.0 + std::log(3.0))) < 1e-12);
}

TEST_CASE("bivariate normal cdf") {
    // At the origin: P = 1/4 + asin(rho)/(2 pi); rho = 1/2 gives exactly 1/3.
    CHECK(std::fabs(bvn_cdf(0.0, 0.0, 0.5) - 1.0 / 3.0) < 1e-10);
    CHECK(std::fabs(bvn_cdf(0.0, 0.0, 0.3) -
                    (0.25 + std::asin(0.3) / kTwoPi)) < 1e-10);
    CHECK(std::fabs(bvn_cdf(0.0, 0.0, 0.0) - 0.25) < 1e-12);
    // Independence factorizes.
    for (double h : {-1.0, 0.3, 1.7})
        for (double k : {-0.6, 0.9})
            CHECK(std::fabs(bvn_cdf(h, k, 0.0) - norm_cdf(h) * norm_cdf(k)) < 1e-10);
    // Symmetry in the arguments.
    CHECK(std::fabs(bvn_cdf(0.4, -0.8, 0.6) - bvn_cdf(-0.8, 0.4, 0.6)) < 1e-12);
    // Monotone in rho (Slepian).
    CHECK(bvn_cdf(0.5, 0.5, 0.8) > bvn_cdf(0.5, 0.5, 0.2));
}

TEST_CASE("adaptive quadrature") {
    double total = integrate([](double x) { return norm_pdf(x); },
                             -std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity(), 1e-10);
    CHECK(std::fabs(total - 1.0) < 1e-9);
    double second = integrate([](double x) { return x * x * norm_pdf(x); },
                              -std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity(), 1e-10);
    CHECK(std::fabs(second - 1.0) < 1e-8);
    double finite = integrate([](double x) { return std::exp(-x); }, 0.0, 5.0, 1e-12);
    CHECK(std::fabs(finite - (1.0 - std::exp(-5.0))) < 1e-10);
}
