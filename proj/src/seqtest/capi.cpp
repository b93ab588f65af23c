#include "seqtest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "seqtest/asymptotics.hpp"
#include "seqtest/design.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/jsonio.hpp"
#include "seqtest/models.hpp"
#include "seqtest/procedures.hpp"
#include "seqtest/published.hpp"
#include "seqtest/renewal.hpp"
#include "seqtest/reproduce.hpp"
#include "seqtest/simulate.hpp"

struct seqtest_model {
    seqtest::ModelSuite suite;
    std::string json;  // canonical serialized form, used in metadata hashes
    seqtest::RenewalConstants constants;
    seqtest::Ordering ordering;

    explicit seqtest_model(seqtest::ModelSuite s) : suite(std::move(s)) {}
};

struct seqtest_runner {
    seqtest::ModelSuite suite;
    seqtest::TestConfig config;
    seqtest::TestState state;
    seqtest::Verdict verdict;
    bool done = false;

    explicit seqtest_runner(seqtest::ModelSuite s) : suite(std::move(s)) {}
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename F>
seqtest_status guarded(F&& body) {
    g_last_error.clear();
    try {
        return body();
    } catch (const seqtest::config_error& e) {
        g_last_error = e.what();
        return SEQTEST_ERR_CONFIG;
    } catch (const seqtest::numeric_error& e) {
        g_last_error = e.what();
        return SEQTEST_ERR_NUMERIC;
    } catch (const seqtest::usage_error& e) {
        g_last_error = e.what();
        return SEQTEST_ERR_USAGE;
    } catch (const seqtest::domain_error& e) {
        g_last_error = e.what();
        return SEQTEST_ERR_INVALID_ARGUMENT;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return SEQTEST_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SEQTEST_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return SEQTEST_ERR_INTERNAL;
    }
}

seqtest_status fail_invalid(const char* message) {
    g_last_error = message;
    return SEQTEST_ERR_INVALID_ARGUMENT;
}

seqtest::PriorKind parse_prior(const std::string& s) {
    if (s == "uniform") return seqtest::PriorKind::Uniform;
    if (s == "kl") return seqtest::PriorKind::KLProportional;
    if (s == "l") return seqtest::PriorKind::LProportional;
    if (s == "hat") return seqtest::PriorKind::LeastFavorable;
    throw seqtest::config_error("unknown prior \"" + s +
                                "\" (expected uniform|kl|l|hat)");
}

seqtest::ThresholdRuleKind parse_rule(const std::string& s) {
    if (s == "conservative") return seqtest::ThresholdRuleKind::Conservative;
    if (s == "corrected") return seqtest::ThresholdRuleKind::OvershootCorrected;
    throw seqtest::config_error("unknown threshold rule \"" + s +
                                "\" (expected conservative|corrected)");
}

seqtest::WeightSource parse_weight_source(const std::string& s) {
    if (s == "formula") return seqtest::WeightSource::Formula;
    if (s == "published") return seqtest::WeightSource::Published;
    throw seqtest::config_error("unknown weight source \"" + s +
                                "\" (expected formula|published)");
}

seqtest::TestConfig make_config(const seqtest::Design& d, const std::string& test,
                                int k) {
    seqtest::TestConfig c;
    c.logA = d.logA;
    c.logB = d.logB;
    c.q0 = d.q0;
    c.q1 = d.q1;
    if (test == "milrt") {
        c.kind = seqtest::TestKind::Mixture;
    } else if (test == "wglrt") {
        c.kind = seqtest::TestKind::WeightedMax;
    } else if (test.rfind("sprt:", 0) == 0) {
        c.kind = seqtest::TestKind::Sprt;
        try {
            c.sprt_index = std::stoi(test.substr(5));
        } catch (...) {
            throw seqtest::config_error("bad SPRT channel in \"" + test + "\"");
        }
        if (c.sprt_index < 1 || c.sprt_index > k)
            throw seqtest::config_error("SPRT channel outside 1..K");
    } else {
        throw seqtest::config_error("unknown test \"" + test +
                                    "\" (expected milrt|wglrt|sprt:<i>)");
    }
    return c;
}

// truth: "0", "<i>", or "weighted".
void apply_truth(const std::string& truth, const seqtest::Design& d, int k,
                 seqtest::SimPlan& plan) {
    if (truth == "0") {
        plan.truth = seqtest::Truth::H0;
    } else if (truth == "weighted") {
        if (static_cast<int>(d.p.size()) != k)
            throw seqtest::config_error(
                "weighted truth needs a design with a prior vector \"p\"");
        plan.truth = seqtest::Truth::Weighted;
        plan.weighted_prior = d.p;
    } else {
        int idx = 0;
        try {
            idx = std::stoi(truth);
        } catch (...) {
            throw seqtest::config_error("unknown truth \"" + truth +
                                        "\" (expected 0|<i>|weighted)");
        }
        plan.truth = seqtest::Truth::Hi;
        plan.truth_index = idx;
    }
}

std::string reproduce_constants_csv(bool strict, bool* strict_failed) {
    std::vector<seqtest::CellComparison> cells = seqtest::reproduce_table_constants();
    seqtest::Csv csv({"theta", "quantity", "computed", "printed", "match",
                      "expected_mismatch"});
    bool failed = false;
    for (const seqtest::CellComparison& c : cells) {
        csv.add_row({seqtest::fmt_double(c.theta), c.quantity,
                     seqtest::fmt_double(c.computed), seqtest::fmt_double(c.printed),
                     c.matches ? "1" : "0", c.expected_mismatch ? "1" : "0"});
        if (!c.matches && !c.expected_mismatch) failed = true;
    }
    *strict_failed = strict && failed;
    return csv.str("reproduce=constants");
}

std::string reproduce_ess_csv(long long reps, uint64_t seed, int threads,
                              bool strict, bool* strict_failed) {
    seqtest::EssTableOptions opt;
    opt.is_reps = std::max<long long>(reps, 1000);
    opt.ess_reps = std::max<long long>(1000, reps / 10);
    opt.seed = seed;
    opt.threads = threads;
    opt.source = seqtest::WeightSource::Published;
    std::vector<seqtest::EssRow> rows = seqtest::reproduce_table_ess(opt);
    seqtest::Csv csv({"alpha", "series", "value", "stderr", "printed"});
    bool failed = false;
    auto add = [&](double alpha, const std::string& series, double value, double se,
                   double printed, bool check) {
        csv.add_row({seqtest::fmt_double(alpha), series, seqtest::fmt_double(value),
                     seqtest::fmt_double(se), seqtest::fmt_double(printed)});
        if (check && std::isfinite(printed)) {
            double tol = std::max(3 * se, 0.03 * std::fabs(printed));
            if (!(std::fabs(value - printed) <= tol)) failed = true;
        }
    };
    for (const seqtest::EssRow& r : rows) {
        add(r.alpha, "ratio_milrt", r.ratio_m, r.ratio_m_se, r.printed_ratio_m, true);
        add(r.alpha, "ratio_wglrt", r.ratio_n, r.ratio_n_se, r.printed_ratio_n, true);
        for (int i = 0; i < 3; ++i) {
            std::string sfx = "_" + std::to_string(i + 1);
            add(r.alpha, "ess_milrt" + sfx, r.ess_m[i], r.ess_m_se[i],
                r.printed_ess_m[i], true);
            add(r.alpha, "ess_wglrt" + sfx, r.ess_n[i], r.ess_n_se[i],
                r.printed_ess_n[i], true);
            add(r.alpha, "pred_milrt" + sfx, r.pred_m[i], 0.0,
                std::numeric_limits<double>::quiet_NaN(), false);
        }
    }
    std::ostringstream cfg;
    cfg << "reproduce=ess reps=" << reps << " seed=" << seed;
    *strict_failed = strict && failed;
    return csv.str(cfg.str());
}

std::string figure_csv(const std::vector<seqtest::FigurePoint>& points,
                       const std::string& config_string) {
    seqtest::Csv csv({"x", "series", "value"});
    for (const seqtest::FigurePoint& p : points)
        csv.add_row({seqtest::fmt_double(p.x), p.series, seqtest::fmt_double(p.value)});
    return csv.str(config_string);
}

}  // namespace

extern "C" {

const char* seqtest_version(void) { return seqtest::kArtifactVersion; }

const char* seqtest_last_error(void) { return g_last_error.c_str(); }

void seqtest_string_free(char* s) { std::free(s); }

seqtest_status seqtest_model_create_json(const char* json, seqtest_model** out) {
    if (json == nullptr || out == nullptr) return fail_invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        auto m = std::make_unique<seqtest_model>(seqtest::model_from_json(json));
        m->json = seqtest::model_to_json(m->suite);
        m->constants = seqtest::compute_constants(m->suite);
        m->ordering = seqtest::order_alternatives(m->constants);
        *out = m.release();
        return SEQTEST_OK;
    });
}

void seqtest_model_free(seqtest_model* model) { delete model; }

int seqtest_model_channels(const seqtest_model* model) {
    return model == nullptr ? -1 : model->suite.K();
}

seqtest_status seqtest_model_loglr(const seqtest_model* model, int i, const double* x,
                                   size_t dim, double* out) {
    if (model == nullptr || x == nullptr || out == nullptr)
        return fail_invalid("null argument");
    return guarded([&] {
        if (static_cast<int>(dim) != model->suite.dim())
            throw seqtest::usage_error("observation dimension mismatch");
        *out = model->suite.loglr_increment(i, {x, dim});
        return SEQTEST_OK;
    });
}

seqtest_status seqtest_model_constants(const seqtest_model* model,
                                       seqtest_channel_constants* out) {
    if (model == nullptr || out == nullptr) return fail_invalid("null argument");
    return guarded([&] {
        for (int i = 0; i < model->suite.K(); ++i) {
            const seqtest::ChannelConstants& c = model->constants.per_alt[i];
            out[i] = {c.I, c.I0, c.gamma, c.gamma0, c.kappa, c.kappa0, c.L};
        }
        return SEQTEST_OK;
    });
}

seqtest_status seqtest_model_ordering(const seqtest_model* model, int* order,
                                      int* r) {
    if (model == nullptr || order == nullptr || r == nullptr)
        return fail_invalid("null argument");
    return guarded([&] {
        for (int i = 0; i < model->suite.K(); ++i) order[i] = model->ordering.order[i];
        *r = model->ordering.r;
        return SEQTEST_OK;
    });
}

seqtest_status seqtest_overshoot_mc(const seqtest_model* model, int i, double c,
                                    long long reps, int side, uint64_t seed,
                                    double* gamma_hat, double* gamma_se,
                                    double* kappa_hat, double* kappa_se) {
    if (model == nullptr) return fail_invalid("null model");
    if (side != 0 && side != 1) return fail_invalid("side must be 0 or 1");
    return guarded([&] {
        seqtest::Rng rng(seed, 0);
        seqtest::OvershootEstimate est = seqtest::overshoot_mc(
            model->suite, i, c, static_cast<long>(reps),
            side == 0 ? seqtest::Side::Upper : seqtest::Side::Lower, rng);
        if (gamma_hat != nullptr) *gamma_hat = est.gamma_hat;
        if (gamma_se != nullptr) *gamma_se = est.gamma_se;
        if (kappa_hat != nullptr) *kappa_hat = est.kappa_hat;
        if (kappa_se != nullptr) *kappa_se = est.kappa_se;
        return SEQTEST_OK;
    });
}

seqtest_status seqtest_emit_design_json(const seqtest_model* model, const char* prior,
                                        const char* rule, double alpha, double beta,
                                        const char* weight_source, char** out_json) {
    if (model == nullptr || prior == nullptr || rule == nullptr ||
        weight_source == nullptr || out_json == nullptr)
        return fail_invalid("null argument");
    *out_json = nullptr;
    return guarded([&] {
        seqtest::ThresholdRule tr{parse_rule(rule), alpha, beta};
        seqtest::Design d =
            seqtest::make_design(model->suite, model->constants, parse_prior(prior),
                                 tr, parse_weight_source(weight_source));
        *out_json = dup_string(seqtest::design_to_json(d));
        return *out_json != nullptr ? SEQTEST_OK : SEQTEST_ERR_INTERNAL;
    });
}

seqtest_status seqtest_sprt_ess(const seqtest_model* model, int i, double alpha,
                                double beta, double* under_hi, double* under_h0) {
    if (model == nullptr) return fail_invalid("null model");
    return guarded([&] {
        auto [hi, h0] = seqtest::sprt_ess(model->constants, i, alpha, beta);
        if (under_hi != nullptr) *under_hi = hi;
        if (under_h0 != nullptr) *under_h0 = h0;
        return SEQTEST_OK;
    });
}

seqtest_status seqtest_corrected_ess(const seqtest_model* model, const double* q1,
                                     size_t k, double alpha, int i, double* out) {
    if (model == nullptr || q1 == nullptr || out == nullptr)
        return fail_invalid("null argument");
    return guarded([&] {
        if (static_cast<int>(k) != model->suite.K())
            throw seqtest::usage_error("weight length must equal K");
        seqtest::Weights w(std::vector<double>(q1, q1 + k));
        *out = seqtest::corrected_ess_under_hi(alpha, model->constants, w, i);
        return SEQTEST_OK;
    });
}

seqtest_status seqtest_minimax_value(const seqtest_model* model, double alpha,
                                     double* out) {
    if (model == nullptr || out == nullptr) return fail_invalid("null argument");
    return guarded([&] {
        *out = seqtest::minimax_value(alpha, model->constants);
        return SEQTEST_OK;
    });
}

seqtest_status seqtest_performance_loss(const seqtest_model* model, const double* p,
                                        size_t k, double alpha, double* c_out,
                                        double* j_out) {
    if (model == nullptr || p == nullptr) return fail_invalid("null argument");
    return guarded([&] {
        if (static_cast<int>(k) != model->suite.K())
            throw seqtest::usage_error("prior length must equal K");
        seqtest::Prior prior(std::vector<double>(p, p + k));
        if (c_out != nullptr) {
            std::vector<double> c = seqtest::c_penalty(prior, model->constants);
            std::copy(c.begin(), c.end(), c_out);
        }
        if (j_out != nullptr) {
            std::vector<double> j =
                seqtest::performance_loss(prior, model->constants, alpha);
            std::copy(j.begin(), j.end(), j_out);
        }
        return SEQTEST_OK;
    });
}

seqtest_status seqtest_runner_create(const seqtest_model* model,
                                     const char* design_json, const char* test,
                                     seqtest_runner** out) {
    if (model == nullptr || design_json == nullptr || test == nullptr ||
        out == nullptr)
        return fail_invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        auto r = std::make_unique<seqtest_runner>(model->suite);
        seqtest::Design d = seqtest::design_from_json(design_json);
        r->config = make_config(d, test, model->suite.K());
        r->state = seqtest::init_state(r->config, r->suite);
        *out = r.release();
        return SEQTEST_OK;
    });
}

void seqtest_runner_free(seqtest_runner* runner) { delete runner; }

seqtest_status seqtest_runner_step(seqtest_runner* runner, const double* x,
                                   size_t dim, int* stopped, long long* T, int* d,
                                   double* eta) {
    if (runner == nullptr || x == nullptr || stopped == nullptr)
        return fail_invalid("null argument");
    return guarded([&] {
        if (static_cast<int>(dim) != runner->suite.dim())
            throw seqtest::usage_error("observation dimension mismatch");
        std::optional<seqtest::Verdict> v =
            seqtest::step(runner->config, runner->state, {x, dim}, runner->suite);
        if (v.has_value()) {
            runner->verdict = *v;
            runner->done = true;
        }
        *stopped = runner->done ? 1 : 0;
        if (runner->done) {
            if (T != nullptr) *T = runner->verdict.T;
            if (d != nullptr) *d = runner->verdict.d;
            if (eta != nullptr) *eta = runner->verdict.eta;
        }
        return SEQTEST_OK;
    });
}

seqtest_status seqtest_runner_state(const seqtest_runner* runner, long long* t,
                                    double* z, double* upper, double* lower) {
    if (runner == nullptr) return fail_invalid("null runner");
    return guarded([&] {
        if (t != nullptr) *t = runner->state.t;
        if (z != nullptr)
            std::copy(runner->state.z.begin(), runner->state.z.end(), z);
        if (upper != nullptr) *upper = runner->state.upper;
        if (lower != nullptr) *lower = runner->state.lower;
        return SEQTEST_OK;
    });
}

seqtest_status seqtest_run_path(const seqtest_model* model, const char* design_json,
                                const char* test, int truth, uint64_t seed,
                                long long max_steps, long long* T, int* d,
                                double* eta, int* truncated) {
    if (model == nullptr || design_json == nullptr || test == nullptr)
        return fail_invalid("null argument");
    return guarded([&] {
        seqtest::Design dd = seqtest::design_from_json(design_json);
        seqtest::TestConfig config = make_config(dd, test, model->suite.K());
        if (truth < 0 || truth > model->suite.K())
            throw seqtest::config_error("truth must lie in [0, K]");
        seqtest::Rng rng(seed, 0);
        seqtest::Verdict v = seqtest::run_to_verdict(config, model->suite, truth, rng,
                                                     static_cast<long>(max_steps));
        if (T != nullptr) *T = v.T;
        if (d != nullptr) *d = v.d;
        if (eta != nullptr) *eta = v.eta;
        if (truncated != nullptr) *truncated = v.truncated ? 1 : 0;
        return SEQTEST_OK;
    });
}

seqtest_status seqtest_emit_constants_csv(const seqtest_model* model,
                                          char** out_csv) {
    if (model == nullptr || out_csv == nullptr) return fail_invalid("null argument");
    *out_csv = nullptr;
    return guarded([&] {
        seqtest::Csv csv(
            {"i", "theta", "I", "I0", "gamma", "gamma0", "kappa", "kappa0", "L"});
        for (int i = 0; i < model->suite.K(); ++i) {
            const seqtest::ChannelConstants& c = model->constants.per_alt[i];
            double theta = model->suite.is_multichannel()
                               ? model->suite.channels()[i].theta
                               : std::numeric_limits<double>::quiet_NaN();
            csv.add_row({std::to_string(i + 1), seqtest::fmt_double(theta),
                         seqtest::fmt_double(c.I), seqtest::fmt_double(c.I0),
                         seqtest::fmt_double(c.gamma), seqtest::fmt_double(c.gamma0),
                         seqtest::fmt_double(c.kappa), seqtest::fmt_double(c.kappa0),
                         seqtest::fmt_double(c.L)});
        }
        *out_csv = dup_string(csv.str("constants " + model->json));
        return *out_csv != nullptr ? SEQTEST_OK : SEQTEST_ERR_INTERNAL;
    });
}

seqtest_status seqtest_emit_approximate_csv(const seqtest_model* model,
                                            const char* design_json, double alpha,
                                            double beta, char** out_csv) {
    if (model == nullptr || design_json == nullptr || out_csv == nullptr)
        return fail_invalid("null argument");
    *out_csv = nullptr;
    return guarded([&] {
        using seqtest::RemainderClass;
        const seqtest::RenewalConstants& rc = model->constants;
        seqtest::Design d = seqtest::design_from_json(design_json);
        if (d.q1.K() != model->suite.K())
            throw seqtest::config_error("design dimension does not match the model");
        seqtest::Csv csv({"quantity", "hypothesis", "value", "remainder_class"});
        auto add = [&](const std::string& quantity, const std::string& hyp,
                       double value, RemainderClass klass) {
            csv.add_row({quantity, hyp, seqtest::fmt_double(value),
                         seqtest::remainder_class_name(klass)});
        };
        for (int i = 1; i <= model->suite.K(); ++i) {
            std::string hyp = std::to_string(i);
            auto [sprt_hi, sprt_h0] = seqtest::sprt_ess(rc, i, alpha, beta);
            add("ess_sprt", hyp, sprt_hi, RemainderClass::LittleO1);
            add("ess_sprt_null", hyp, sprt_h0, RemainderClass::LittleO1);
            add("ess_test", hyp, seqtest::test_ess_under_hi(d.logB, rc, d.q1, i),
                RemainderClass::LittleO1);
            add("ess_test_corrected", hyp,
                seqtest::corrected_ess_under_hi(alpha, rc, d.q1, i),
                RemainderClass::LittleO1);
        }
        seqtest::ClusterStats cluster =
            seqtest::cluster_stats(model->suite, rc, model->ordering);
        seqtest::Approx h0 =
            seqtest::test_ess_under_h0(d.logA, rc, d.q0, cluster, model->ordering);
        add("ess_test_null", "0", h0.value, h0.remainder);
        seqtest::ErrorApprox ea =
            seqtest::error_approximations(d.logB, d.logA, d.q0, d.q1, rc,
                                          model->ordering);
        add("error_type1", "0", ea.type1_exact.value, ea.type1_exact.remainder);
        add("error_type1_corrected", "0", ea.type1_corrected.value,
            ea.type1_corrected.remainder);
        for (int i = 1; i <= model->suite.K(); ++i) {
            std::string hyp = std::to_string(i);
            add("error_type2", hyp, ea.type2_exact[i - 1].value,
                ea.type2_exact[i - 1].remainder);
            add("error_type2_corrected", hyp, ea.type2_corrected[i - 1].value,
                ea.type2_corrected[i - 1].remainder);
        }
        add("minimax_value", "max", seqtest::minimax_value(alpha, rc),
            RemainderClass::LittleO1);
        if (!d.p.empty()) {
            seqtest::Prior prior(d.p);
            std::vector<double> c = seqtest::c_penalty(prior, rc);
            std::vector<double> j = seqtest::performance_loss(prior, rc, alpha);
            for (int i = 1; i <= model->suite.K(); ++i) {
                add("penalty_c", std::to_string(i), c[i - 1],
                    RemainderClass::LittleO1);
                add("performance_loss", std::to_string(i), j[i - 1],
                    RemainderClass::LittleO1);
            }
        }
        std::ostringstream cfg;
        cfg << "approximate " << model->json << ' ' << design_json << " alpha=" << alpha
            << " beta=" << beta;
        *out_csv = dup_string(csv.str(cfg.str()));
        return *out_csv != nullptr ? SEQTEST_OK : SEQTEST_ERR_INTERNAL;
    });
}

seqtest_status seqtest_emit_simulate_json(const seqtest_model* model,
                                          const char* design_json, const char* test,
                                          const char* truth, long long reps,
                                          uint64_t seed, long long max_steps,
                                          const char* estimator, int threads,
                                          char** out_json, char** out_per_rep_csv,
                                          char** out_trace_csv) {
    if (model == nullptr || design_json == nullptr || test == nullptr ||
        truth == nullptr || estimator == nullptr || out_json == nullptr)
        return fail_invalid("null argument");
    *out_json = nullptr;
    if (out_per_rep_csv != nullptr) *out_per_rep_csv = nullptr;
    if (out_trace_csv != nullptr) *out_trace_csv = nullptr;
    return guarded([&] {
        seqtest::Design d = seqtest::design_from_json(design_json);
        seqtest::SimPlan plan;
        plan.suite = &model->suite;
        plan.config = make_config(d, test, model->suite.K());
        apply_truth(truth, d, model->suite.K(), plan);
        plan.replications = static_cast<long>(reps);
        plan.seed = seed;
        plan.max_steps = static_cast<long>(max_steps);
        plan.threads = threads;
        std::string est(estimator);
        if (est == "direct") {
            plan.estimator = seqtest::Estimator::Direct;
        } else if (est == "is") {
            plan.estimator = seqtest::Estimator::ImportanceSampling;
        } else {
            throw seqtest::config_error("unknown estimator \"" + est +
                                        "\" (expected direct|is)");
        }
        std::vector<seqtest::RepRecord> records;
        seqtest::SimReport report =
            seqtest::run_mc(plan, out_per_rep_csv != nullptr ? &records : nullptr);
        if (report.ess_mean > 0)
            report.kl_accumulated =
                seqtest::kl_until_stopping(report, model->constants).per_alt;
        std::ostringstream cfg;
        cfg << "simulate " << model->json << ' ' << design_json << " test=" << test
            << " truth=" << truth << " reps=" << reps << " seed=" << seed
            << " estimator=" << est;
        if (out_per_rep_csv != nullptr) {
            seqtest::Csv csv({"rep", "T", "d"});
            for (size_t i = 0; i < records.size(); ++i)
                csv.add_row({std::to_string(i), std::to_string(records[i].t),
                             std::to_string(records[i].d)});
            *out_per_rep_csv = dup_string(csv.str(cfg.str()));
            if (*out_per_rep_csv == nullptr) return SEQTEST_ERR_INTERNAL;
        }
        if (out_trace_csv != nullptr) {
            seqtest::Verdict v = seqtest::trace_first_replication(plan);
            std::vector<std::string> header{"t"};
            for (int i = 1; i <= model->suite.K(); ++i)
                header.push_back("z_" + std::to_string(i));
            header.push_back("upper");
            header.push_back("lower");
            seqtest::Csv csv(std::move(header));
            for (const seqtest::TraceRow& row : v.trace) {
                std::vector<std::string> cells{std::to_string(row.t)};
                for (double zz : row.z) cells.push_back(seqtest::fmt_double(zz));
                cells.push_back(seqtest::fmt_double(row.upper));
                cells.push_back(seqtest::fmt_double(row.lower));
                csv.add_row(std::move(cells));
            }
            *out_trace_csv = dup_string(csv.str(cfg.str()));
            if (*out_trace_csv == nullptr) return SEQTEST_ERR_INTERNAL;
        }
        *out_json = dup_string(seqtest::sim_report_to_json(report));
        return *out_json != nullptr ? SEQTEST_OK : SEQTEST_ERR_INTERNAL;
    });
}

seqtest_status seqtest_emit_reproduce_csv(const char* what, long long reps,
                                          uint64_t seed, int threads, int strict,
                                          char** out_csv) {
    if (what == nullptr || out_csv == nullptr) return fail_invalid("null argument");
    *out_csv = nullptr;
    return guarded([&] {
        std::string which(what);
        bool strict_failed = false;
        std::string csv;
        if (which == "constants") {
            csv = reproduce_constants_csv(strict != 0, &strict_failed);
        } else if (which == "ess") {
            csv = reproduce_ess_csv(reps, seed, threads, strict != 0, &strict_failed);
        } else if (which == "figure1" || which == "figure2") {
            seqtest::Family family = which == "figure1"
                                         ? seqtest::Family::ExponentialScale
                                         : seqtest::Family::GaussianMeanShift;
            csv = figure_csv(seqtest::reproduce_figure_loss(family),
                             "reproduce=" + which);
        } else if (which == "figure3") {
            seqtest::FigureEssOptions opt;
            opt.reps = std::max<long long>(reps, 1000);
            opt.seed = seed;
            opt.threads = threads;
            std::ostringstream cfg;
            cfg << "reproduce=figure3 reps=" << opt.reps << " seed=" << seed;
            csv = figure_csv(seqtest::reproduce_figure_ess(opt), cfg.str());
        } else {
            throw seqtest::config_error(
                "unknown reproduction \"" + which +
                "\" (expected constants|ess|figure1|figure2|figure3)");
        }
        *out_csv = dup_string(csv);
        if (*out_csv == nullptr) return SEQTEST_ERR_INTERNAL;
        if (strict_failed) {
            g_last_error = "reproduction mismatch beyond tolerance";
            return SEQTEST_ERR_REPRODUCTION;
        }
        return SEQTEST_OK;
    });
}

}  // extern "C"
