#include "seqtest/reproduce.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "seqtest/asymptotics.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/published.hpp"
#include "seqtest/simulate.hpp"

namespace seqtest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TestConfig make_test(TestKind kind, const Design& d) {
    TestConfig c;
    c.kind = kind;
    c.logA = d.logA;
    c.logB = d.logB;
    c.q0 = d.q0;
    c.q1 = d.q1;
    return c;
}

const char* prior_name(PriorKind kind) {
    switch (kind) {
        case PriorKind::Uniform: return "uniform";
        case PriorKind::KLProportional: return "kl";
        case PriorKind::LProportional: return "l";
        case PriorKind::LeastFavorable: return "hat";
    }
    return "?";
}

}  // namespace

ModelSuite study_suite() {
    return ModelSuite::multichannel({{Family::ExponentialScale, 0.5},
                                     {Family::ExponentialScale, 1.0},
                                     {Family::ExponentialScale, 2.0}});
}

std::vector<CellComparison> reproduce_table_constants() {
    ModelSuite suite = study_suite();
    RenewalConstants rc = compute_constants(suite);
    Prior prior = make_prior(PriorKind::KLProportional, rc);
    auto [q0, q1] = weights_from_prior(prior, rc);
    std::vector<CellComparison> cells;
    cells.reserve(15);
    for (int i = 0; i < 3; ++i) {
        const published::ConstantsRow& row = published::kParameterTable[i];
        const ChannelConstants& cc = rc.per_alt[i];
        auto add = [&](const char* name, double computed, double printed,
                       bool expected) {
            CellComparison c;
            c.theta = row.theta;
            c.quantity = name;
            c.computed = computed;
            c.printed = printed;
            c.matches = std::fabs(computed - printed) <= published::kDisplayTolerance;
            c.expected_mismatch = expected;
            cells.push_back(c);
        };
        add("I", cc.I, row.I, row.formula_mismatch);
        add("kappa", cc.kappa, row.kappa, false);
        add("gamma", cc.gamma, row.gamma, row.formula_mismatch);
        // The printed weight columns are inconsistent with the weight rule
        // (see published.hpp), so these two cells are expected mismatches.
        add("q1", q1.q[i], row.q1, true);
        add("q0", q0.q[i], row.q0, true);
    }
    return cells;
}

std::vector<EssRow> reproduce_table_ess(const EssTableOptions& opt) {
    if (opt.alphas.empty()) throw config_error("alpha grid must be nonempty");
    if (opt.skip_ratios && opt.skip_ess)
        throw config_error("nothing to do: both ratios and ESS are skipped");
    ModelSuite suite = study_suite();
    RenewalConstants rc = compute_constants(suite);
    std::vector<EssRow> rows;
    uint64_t cell = 0;
    for (double alpha : opt.alphas) {
        if (!(alpha > 0 && alpha < 1)) throw config_error("alpha must lie in (0,1)");
        ThresholdRule rule{ThresholdRuleKind::OvershootCorrected, alpha,
                           published::kStudyBeta};
        Design d = make_design(suite, rc, PriorKind::KLProportional, rule, opt.source);
        EssRow row;
        row.alpha = alpha;
        row.ratio_m = row.ratio_m_se = row.ratio_n = row.ratio_n_se = kNaN;
        row.printed_ratio_m = row.printed_ratio_n = kNaN;
        row.printed_ess_m.fill(kNaN);
        row.printed_ess_n.fill(kNaN);
        row.ess_m.fill(kNaN);
        row.ess_m_se.fill(kNaN);
        row.ess_n.fill(kNaN);
        row.ess_n_se.fill(kNaN);
        for (const published::OperatingRow& p : published::kOperatingTable) {
            if (std::fabs(std::log(p.alpha) - std::log(alpha)) < 1e-9) {
                row.printed_ratio_m = p.ratio_mixture;
                row.printed_ratio_n = p.ratio_weighted_max;
                for (int i = 0; i < 3; ++i) {
                    row.printed_ess_m[i] = p.ess_m[i];
                    row.printed_ess_n[i] = p.ess_n[i];
                }
            }
        }
        for (int i = 1; i <= 3; ++i)
            row.pred_m[i - 1] = corrected_ess_under_hi(alpha, rc, d.q1, i);

        if (!opt.skip_ratios) {
            for (TestKind kind : {TestKind::Mixture, TestKind::WeightedMax}) {
                SimPlan plan;
                plan.suite = &suite;
                plan.config = make_test(kind, d);
                plan.truth = Truth::H0;
                plan.replications = opt.is_reps;
                plan.seed = opt.seed + 1000003 * cell++;
                plan.estimator = Estimator::ImportanceSampling;
                plan.threads = opt.threads;
                SimReport rep = run_mc(plan);
                double ratio = rep.type1_estimate / alpha;
                double se = rep.type1_stderr / alpha;
                if (kind == TestKind::Mixture) {
                    row.ratio_m = ratio;
                    row.ratio_m_se = se;
                } else {
                    row.ratio_n = ratio;
                    row.ratio_n_se = se;
                }
            }
        }
        if (!opt.skip_ess) {
            for (TestKind kind : {TestKind::Mixture, TestKind::WeightedMax}) {
                for (int i = 1; i <= 3; ++i) {
                    SimPlan plan;
                    plan.suite = &suite;
                    plan.config = make_test(kind, d);
                    plan.truth = Truth::Hi;
                    plan.truth_index = i;
                    plan.replications = opt.ess_reps;
                    plan.seed = opt.seed + 1000003 * cell++;
                    plan.estimator = Estimator::Direct;
                    plan.threads = opt.threads;
                    SimReport rep = run_mc(plan);
                    if (!rep.ess_valid)
                        throw numeric_error("ESS cell invalidated by truncation");
                    if (kind == TestKind::Mixture) {
                        row.ess_m[i - 1] = rep.ess_mean;
                        row.ess_m_se[i - 1] = rep.ess_stderr;
                    } else {
                        row.ess_n[i - 1] = rep.ess_mean;
                        row.ess_n_se[i - 1] = rep.ess_stderr;
                    }
                }
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<FigurePoint> reproduce_figure_loss(Family family) {
    constexpr int kChannels = 10;
    constexpr int kGridPoints = 40;
    constexpr double kAlpha = 1e-4;
    constexpr double kThetaLo = 0.5, kThetaHi = 8.0;
    std::vector<FigurePoint> points;
    points.reserve(kGridPoints * 8);
    for (int g = 0; g < kGridPoints; ++g) {
        double theta =
            kThetaLo + (kThetaHi - kThetaLo) * g / static_cast<double>(kGridPoints - 1);
        std::vector<ChannelFamily> channels(kChannels);
        for (int c = 0; c < kChannels; ++c)
            channels[c] = {family, c < kChannels / 2 ? 4.0 : theta};
        ModelSuite suite = ModelSuite::multichannel(std::move(channels));
        RenewalConstants rc = compute_constants(suite);
        for (PriorKind kind : {PriorKind::Uniform, PriorKind::KLProportional,
                               PriorKind::LProportional, PriorKind::LeastFavorable}) {
            Prior p = make_prior(kind, rc);
            std::vector<double> j = performance_loss(p, rc, kAlpha);
            points.push_back({theta, std::string("J1_") + prior_name(kind), j.front()});
            points.push_back(
                {theta, std::string("JK_") + prior_name(kind), j.back()});
        }
    }
    return points;
}

std::vector<FigurePoint> reproduce_figure_ess(const FigureEssOptions& opt) {
    if (opt.alphas.empty()) throw config_error("alpha grid must be nonempty");
    ModelSuite suite = study_suite();
    RenewalConstants rc = compute_constants(suite);
    std::vector<FigurePoint> points;
    uint64_t cell = 0;
    for (double alpha : opt.alphas) {
        ThresholdRule rule{ThresholdRuleKind::OvershootCorrected, alpha,
                           published::kStudyBeta};
        Design d =
            make_design(suite, rc, PriorKind::KLProportional, rule, WeightSource::Formula);
        for (int i = 1; i <= suite.K(); ++i) {
            std::string suffix = "_" + std::to_string(i);
            points.push_back(
                {alpha, "approx_milrt" + suffix, corrected_ess_under_hi(alpha, rc, d.q1, i)});
            points.push_back(
                {alpha, "sprt" + suffix,
                 sprt_ess(rc, i, alpha, published::kStudyBeta).first});
            for (TestKind kind : {TestKind::Mixture, TestKind::WeightedMax}) {
                SimPlan plan;
                plan.suite = &suite;
                plan.config = make_test(kind, d);
                plan.truth = Truth::Hi;
                plan.truth_index = i;
                plan.replications = opt.reps;
                plan.seed = opt.seed + 1000003 * cell++;
                plan.estimator = Estimator::Direct;
                plan.threads = opt.threads;
                SimReport rep = run_mc(plan);
                const char* name = kind == TestKind::Mixture ? "sim_milrt" : "sim_wglrt";
                points.push_back({alpha, name + suffix, rep.ess_mean});
            }
        }
    }
    return points;
}

}  // namespace seqtest
