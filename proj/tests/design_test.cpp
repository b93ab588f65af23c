#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "seqtest/design.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/reproduce.hpp"

using namespace seqtest;

namespace {
RenewalConstants exp_rc() { return compute_constants(fixtures::exp_suite()); }
}  // namespace

TEST_CASE("prior construction") {
    RenewalConstants rc = exp_rc();
    Prior uniform = make_prior(PriorKind::Uniform, rc);
    for (double p : uniform.p) CHECK(std::fabs(p - 1.0 / 3.0) < 1e-15);

    Prior kl = make_prior(PriorKind::KLProportional, rc);
    double sumI = fixtures::kExp[0].I + fixtures::kExp[1].I + fixtures::kExp[2].I;
    for (int i = 0; i < 3; ++i)
        CHECK(std::fabs(kl.p[i] - fixtures::kExp[i].I / sumI) < 1e-12);

    Prior lp = make_prior(PriorKind::LProportional, rc);
    double sumL = fixtures::kExp[0].L + fixtures::kExp[1].L + fixtures::kExp[2].L;
    for (int i = 0; i < 3; ++i)
        CHECK(std::fabs(lp.p[i] - fixtures::kExp[i].L / sumL) < 1e-9);

    Prior hat = make_prior(PriorKind::LeastFavorable, rc);
    double s = 0;
    for (const auto& row : fixtures::kExp) s += row.L * std::exp(row.kappa);
    for (int i = 0; i < 3; ++i)
        CHECK(std::fabs(hat.p[i] -
                        fixtures::kExp[i].L * std::exp(fixtures::kExp[i].kappa) / s) <
              1e-9);

    double total = 0;
    for (double p : hat.p) total += p;
    CHECK(std::fabs(total - 1.0) < 1e-12);

    CHECK_THROWS_AS(Prior(std::vector<double>{0.5, 0.6}), seqtest::config_error);
    CHECK_THROWS_AS(Prior(std::vector<double>{1.2, -0.2}), seqtest::config_error);
}

TEST_CASE("weight rule ties q0 and q1 through the prior") {
    RenewalConstants rc = exp_rc();
    Prior p = make_prior(PriorKind::KLProportional, rc);
    auto [q0, q1] = weights_from_prior(p, rc);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::fabs(q1.q[i] - p.p[i] / fixtures::kExp[i].L) < 1e-9);
        CHECK(std::fabs(q0.q[i] - p.p[i] * fixtures::kExp[i].L) < 1e-9);
        // q0_i * q1_i = p_i^2 independently of the constants.
        CHECK(std::fabs(q0.q[i] * q1.q[i] - p.p[i] * p.p[i]) < 1e-12);
    }
}

TEST_CASE("threshold rules, frozen reference design") {
    // Exponential study suite, KL-proportional prior, alpha = 1e-4,
    // beta = 1e-2. The corrected thresholds evaluate to frozen values,
    // re-derivable from the frozen constants:
    //   logB = log(sum q1_j gamma_j) - log alpha,
    //   logA = log gamma0^(1) - log beta - log min q0.
    RenewalConstants rc = exp_rc();
    Ordering ord = order_alternatives(rc);
    Prior p = make_prior(PriorKind::KLProportional, rc);
    auto [q0, q1] = weights_from_prior(p, rc);

    ThresholdRule corrected{ThresholdRuleKind::OvershootCorrected, 1e-4, 1e-2};
    auto [logA, logB] = thresholds(corrected, q0, q1, rc, ord);
    CHECK(std::fabs(logA - 9.857714029019602) < 1e-9);
    CHECK(std::fabs(logB - 10.044455731407597) < 1e-9);

    double sum_q1g = 0;
    for (int i = 0; i < 3; ++i) sum_q1g += q1.q[i] * fixtures::kExp[i].gamma;
    CHECK(std::fabs(logB - (std::log(sum_q1g) - std::log(1e-4))) < 1e-12);
    double min_q0 = std::min({q0.q[0], q0.q[1], q0.q[2]});
    CHECK(std::fabs(logA - (std::log(fixtures::kExp[0].gamma0) -
                            std::log(1e-2) - std::log(min_q0))) < 1e-9);

    ThresholdRule conservative{ThresholdRuleKind::Conservative, 1e-4, 1e-2};
    auto [cA, cB] = thresholds(conservative, q0, q1, rc, ord);
    CHECK(std::fabs(cB - (std::log(q1.total) - std::log(1e-4))) < 1e-12);
    CHECK(std::fabs(cA - (-std::log(1e-2) - std::log(min_q0))) < 1e-12);
    // The overshoot correction always tightens both boundaries.
    CHECK(cA > logA);
    CHECK(cB > logB);

    ThresholdRule bad{ThresholdRuleKind::Conservative, 0.0, 1e-2};
    CHECK_THROWS_AS(thresholds(bad, q0, q1, rc, ord), seqtest::config_error);
    ThresholdRule bad2{ThresholdRuleKind::Conservative, 1e-2, 1.5};
    CHECK_THROWS_AS(thresholds(bad2, q0, q1, rc, ord), seqtest::config_error);
}

TEST_CASE("make_design bundles everything consistently") {
    ModelSuite suite = fixtures::exp_suite();
    RenewalConstants rc = exp_rc();
    ThresholdRule rule{ThresholdRuleKind::OvershootCorrected, 1e-4, 1e-2};
    Design d = make_design(suite, rc, PriorKind::KLProportional, rule);
    CHECK(std::fabs(d.logA - 9.857714029019602) < 1e-9);
    CHECK(std::fabs(d.logB - 10.044455731407597) < 1e-9);
    REQUIRE(static_cast<int>(d.p.size()) == 3);
    CHECK(std::fabs(d.q1.q[0] - 1.151388008935955) < 1e-9);
    CHECK(std::fabs(d.q1.q[1] - 1.53518401191485) < 1e-9);
    CHECK(std::fabs(d.q1.q[2] - 2.302776017871692) < 1e-9);
    CHECK(std::fabs(d.q0.q[0] - 0.004573234255411556) < 1e-9);
    CHECK(std::fabs(d.q0.q[1] - 0.03613771459024785) < 1e-9);
    CHECK(std::fabs(d.q0.q[2] - 0.2078894520140402) < 1e-9);
}

TEST_CASE("published weight override") {
    ModelSuite suite = study_suite();
    auto [q0, q1] = published_weight_override(suite);
    CHECK(q1.q == std::vector<double>{0.308, 0.837, 1.380});
    CHECK(q0.q == std::vector<double>{0.013, 0.078, 0.138});

    RenewalConstants rc = exp_rc();
    ThresholdRule rule{ThresholdRuleKind::OvershootCorrected, 1e-2, 1e-2};
    Design d = make_design(suite, rc, PriorKind::KLProportional, rule,
                           WeightSource::Published);
    CHECK(std::fabs(d.logA - 8.812985340684412) < 1e-9);
    CHECK(std::fabs(d.logB - 4.68567432564705) < 1e-9);
    double sum_q1g = 0.308 * (2.0 / 3.0) + 0.837 * 0.5 + 1.380 / 3.0;
    CHECK(std::fabs(d.logB - (std::log(sum_q1g) - std::log(1e-2))) < 1e-10);

    // The override is tied to the study suite; other suites refuse it.
    ModelSuite gauss = fixtures::gauss_suite();
    CHECK_THROWS_AS(published_weight_override(gauss), seqtest::config_error);
    ModelSuite perm = ModelSuite::multichannel({{Family::ExponentialScale, 1.0},
                                                {Family::ExponentialScale, 0.5},
                                                {Family::ExponentialScale, 2.0}});
    CHECK_THROWS_AS(published_weight_override(perm), seqtest::config_error);
}
