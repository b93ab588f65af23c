#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/procedures.hpp"

using namespace seqtest;

namespace {

TestConfig basic_config(TestKind kind, double logA, double logB,
                        std::vector<double> q = {1.0, 1.0, 1.0}) {
    TestConfig cfg;
    cfg.kind = kind;
    cfg.logA = logA;
    cfg.logB = logB;
    cfg.q0 = Weights(q);
    cfg.q1 = Weights(std::move(q));
    return cfg;
}

}  // namespace

TEST_CASE("weights validate and cache logs") {
    Weights w(std::vector<double>{0.5, 1.5, 2.0});
    CHECK(w.K() == 3);
    CHECK(w.total == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(std::fabs(w.log_q[1] - std::log(1.5)) < 1e-15);
    CHECK_THROWS_AS(Weights(std::vector<double>{1.0, 0.0}), seqtest::config_error);
    CHECK_THROWS_AS(Weights(std::vector<double>{1.0, -2.0}), seqtest::config_error);
    CHECK_THROWS_AS(Weights(std::vector<double>{}), seqtest::config_error);
}

TEST_CASE("config validation") {
    ModelSuite suite = fixtures::exp_suite();
    TestConfig cfg = basic_config(TestKind::Mixture, 3.0, 3.0);
    CHECK_NOTHROW(validate_config(cfg, suite));
    cfg.logA = 0.0;
    CHECK_THROWS_AS(validate_config(cfg, suite), seqtest::config_error);
    cfg.logA = 3.0;
    cfg.q1 = Weights(std::vector<double>{1.0, 1.0});  // wrong K
    CHECK_THROWS_AS(validate_config(cfg, suite), seqtest::config_error);
    cfg = basic_config(TestKind::Sprt, 3.0, 3.0);
    cfg.sprt_index = 5;
    CHECK_THROWS_AS(validate_config(cfg, suite), seqtest::config_error);
}

TEST_CASE("statistic sandwich: max <= mixture <= max + log K") {
    // With normalized weights the mixture dominates the weighted maximum by
    // at most log K, pathwise and at every time point.
    ModelSuite suite = fixtures::exp_suite();
    Weights q(std::vector<double>{0.2, 0.3, 0.5});
    Rng rng(77, 0);
    std::vector<double> x(3), z(3, 0.0);
    for (int t = 0; t < 400; ++t) {
        suite.sample(t % 4, rng, x);
        for (int i = 1; i <= 3; ++i) z[i - 1] += suite.loglr_increment(i, x);
        TestConfig mix = basic_config(TestKind::Mixture, 1e6, 1e6);
        mix.q0 = q;
        mix.q1 = q;
        TestConfig wmx = basic_config(TestKind::WeightedMax, 1e6, 1e6);
        wmx.q0 = q;
        wmx.q1 = q;
        double zmix = compute_stats(mix, z).first;
        double zmax = compute_stats(wmx, z).first;
        CHECK(zmix >= zmax - 1e-12);
        CHECK(zmix <= zmax + std::log(3.0) + 1e-12);
    }
}

TEST_CASE("decomposition identity with nonnegative residual") {
    ModelSuite suite = fixtures::gauss_suite();
    Weights q(std::vector<double>{0.25, 0.35, 0.40});
    TestConfig cfg = basic_config(TestKind::Mixture, 1e6, 1e6);
    cfg.q0 = q;
    cfg.q1 = q;
    TestState st = init_state(cfg, suite);
    Rng rng(5150, 0);
    std::vector<double> x(3);
    for (int t = 0; t < 200; ++t) {
        suite.sample(1, rng, x);
        step(cfg, st, x, suite);
        for (int i = 1; i <= 3; ++i) {
            for (bool mixture : {true, false}) {
                DecompTerms d = decomposition_terms(st, i, q, mixture);
                double stat = mixture
                                  ? compute_stats(cfg, st.z).first
                                  : [&] {
                                        TestConfig w = cfg;
                                        w.kind = TestKind::WeightedMax;
                                        return compute_stats(w, st.z).first;
                                    }();
                CHECK(std::fabs(d.log_q_i + d.z_i + d.y - stat) < 1e-12);
                CHECK(d.y >= -1e-12);
                CHECK(std::fabs(d.z_i - st.z[i - 1]) < 1e-15);
            }
        }
    }
}

TEST_CASE("weight scaling invariance") {
    // Multiplying q1 by c and raising logB by log c leaves the upper
    // statistic's crossing behaviour unchanged path for path.
    ModelSuite suite = fixtures::exp_suite();
    const double c = 7.5;
    for (TestKind kind : {TestKind::Mixture, TestKind::WeightedMax}) {
        TestConfig base = basic_config(kind, 50.0, 4.0,
                                       std::vector<double>{0.3, 1.0, 2.2});
        TestConfig scaled = base;
        scaled.q1 = Weights(std::vector<double>{0.3 * c, 1.0 * c, 2.2 * c});
        scaled.logB = base.logB + std::log(c);
        for (uint64_t seed = 0; seed < 20; ++seed) {
            Rng r1(seed, 3), r2(seed, 3);
            Verdict v1 = run_to_verdict(base, suite, 3, r1, 100000);
            Verdict v2 = run_to_verdict(scaled, suite, 3, r2, 100000);
            REQUIRE_FALSE(v1.truncated);
            CHECK(v1.T == v2.T);
            CHECK(v1.d == v2.d);
            if (v1.d == 1) CHECK(std::fabs(v1.eta - v2.eta) < 1e-10);
        }
    }
}

TEST_CASE("single-alternative case collapses all three tests") {
    ModelSuite suite =
        ModelSuite::multichannel({{Family::ExponentialScale, 1.0}});
    std::vector<double> one{1.0};
    TestConfig mix, wmx, sprt;
    for (TestConfig* cfg : {&mix, &wmx, &sprt}) {
        cfg->logA = 2.5;
        cfg->logB = 3.0;
        cfg->q0 = Weights(one);
        cfg->q1 = Weights(one);
    }
    mix.kind = TestKind::Mixture;
    wmx.kind = TestKind::WeightedMax;
    sprt.kind = TestKind::Sprt;
    sprt.sprt_index = 1;
    for (uint64_t seed = 100; seed < 140; ++seed) {
        Rng r1(seed, 0), r2(seed, 0), r3(seed, 0);
        Verdict a = run_to_verdict(mix, suite, 1, r1, 100000);
        Verdict b = run_to_verdict(wmx, suite, 1, r2, 100000);
        Verdict c = run_to_verdict(sprt, suite, 1, r3, 100000);
        CHECK(a.T == b.T);
        CHECK(b.T == c.T);
        CHECK(a.d == b.d);
        CHECK(b.d == c.d);
        CHECK(std::fabs(a.eta - c.eta) < 1e-12);
    }
}

TEST_CASE("stopping semantics") {
    ModelSuite suite = fixtures::exp_suite();
    TestConfig cfg = basic_config(TestKind::Mixture, 2.0, 2.0);
    TestState st = init_state(cfg, suite);
    // A huge observation on channel 3 crosses the upper boundary at once.
    std::vector<double> x{1.0, 1.0, 40.0};
    auto v = step(cfg, st, x, suite);
    REQUIRE(v.has_value());
    CHECK(v->d == 1);
    CHECK(v->T == 1);
    CHECK(v->eta > 0.0);
    CHECK(st.stopped);
    CHECK_THROWS_AS(step(cfg, st, x, suite), seqtest::usage_error);

    // Terminal overshoot is measured beyond the crossed boundary.
    double upper = compute_stats(cfg, v->final_z).first;
    CHECK(std::fabs(v->eta - (upper - cfg.logB)) < 1e-12);
}

TEST_CASE("simultaneous crossings resolve to rejection") {
    // One observation that throws the q0-weighted statistic below -logA and
    // the q1-weighted statistic above logB in the same step must report
    // d = 1: the upper boundary is checked first.
    ModelSuite suite = ModelSuite::multichannel(
        {{Family::GaussianMeanShift, 1.0}, {Family::GaussianMeanShift, 1.0}});
    TestConfig cfg;
    cfg.kind = TestKind::Mixture;
    cfg.logA = 3.0;
    cfg.logB = 3.0;
    cfg.q0 = Weights(std::vector<double>{1.0, 1e-9});
    cfg.q1 = Weights(std::vector<double>{1e-9, 1.0});
    TestState st = init_state(cfg, suite);
    std::vector<double> x{-10.0, 10.0};  // z = (-10.5, +9.5)
    auto v = step(cfg, st, x, suite);
    REQUIRE(v.has_value());
    CHECK(v->d == 1);
    CHECK(st.lower <= -cfg.logA);
    CHECK(st.upper >= cfg.logB);
}

TEST_CASE("truncation reports instead of throwing") {
    ModelSuite suite = fixtures::exp_suite();
    TestConfig cfg = basic_config(TestKind::Mixture, 500.0, 500.0);
    Rng rng(3, 0);
    Verdict v = run_to_verdict(cfg, suite, 0, rng, 25);
    CHECK(v.truncated);
    CHECK(v.T == 25);
}

TEST_CASE("trace recording") {
    ModelSuite suite = fixtures::exp_suite();
    TestConfig cfg = basic_config(TestKind::WeightedMax, 4.0, 4.0);
    Rng rng(11, 2);
    Verdict v = run_to_verdict(cfg, suite, 2, rng, 100000, /*record_trace=*/true);
    REQUIRE_FALSE(v.truncated);
    REQUIRE(static_cast<long>(v.trace.size()) == v.T);
    CHECK(v.trace.front().t == 1);
    CHECK(v.trace.back().t == v.T);
    for (const TraceRow& row : v.trace) {
        CHECK(static_cast<int>(row.z.size()) == 3);
        auto [u, l] = compute_stats(cfg, row.z);
        CHECK(std::fabs(u - row.upper) < 1e-12);
        CHECK(std::fabs(l - row.lower) < 1e-12);
    }
    // Every pre-terminal row stays strictly inside the continuation region.
    for (size_t k = 0; k + 1 < v.trace.size(); ++k) {
        CHECK(v.trace[k].upper < cfg.logB);
        CHECK(v.trace[k].lower > -cfg.logA);
    }
    CHECK(std::fabs(v.trace.back().z[1] - v.final_z[1]) < 1e-15);
}

TEST_CASE("one-sided crossing order holds pathwise") {
    ModelSuite suite = fixtures::exp_suite();
    Weights q0(std::vector<double>{0.05, 0.25, 0.7});
    Weights q1(std::vector<double>{1.2, 1.5, 2.3});
    int upper_pairs = 0, lower_pairs = 0;
    for (uint64_t seed = 0; seed < 300; ++seed) {
        int truth = static_cast<int>(seed % 4);
        Rng rng(seed, 9);
        OneSidedTimes ts =
            one_sided_crossing_times(suite, q0, q1, 6.0, 6.0, truth, rng, 50000);
        if (ts.upper_mixture > 0 && ts.upper_max > 0) {
            ++upper_pairs;
            CHECK(ts.upper_mixture <= ts.upper_max);
        }
        if (ts.lower_mixture > 0 && ts.lower_max > 0) {
            ++lower_pairs;
            CHECK(ts.lower_mixture >= ts.lower_max);
        }
    }
    CHECK(upper_pairs > 50);
    CHECK(lower_pairs > 50);
}
