#include "seqtest/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "seqtest/errors.hpp"
#include "seqtest/special.hpp"

namespace seqtest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RepResult {
    long t = 0;
    int8_t d = -1;   // 0, 1, or -1 for truncated
    int16_t chan = 0;  // sampled channel (0 = null)
    double is_weight = 0;
};

void validate_plan(const SimPlan& plan) {
    if (plan.suite == nullptr) throw usage_error("plan has no model suite");
    if (plan.replications < 100) throw config_error("replications must be >= 100");
    if (plan.max_steps < 1) throw config_error("max_steps must be >= 1");
    validate_config(plan.config, *plan.suite);
    switch (plan.truth) {
        case Truth::H0:
            break;
        case Truth::Hi:
            if (plan.truth_index < 1 || plan.truth_index > plan.suite->K())
                throw config_error("truth index out of range");
            break;
        case Truth::Weighted: {
            if (static_cast<int>(plan.weighted_prior.size()) != plan.suite->K())
                throw config_error("weighted truth needs a prior of size K");
            double s = 0;
            for (double p : plan.weighted_prior) {
                if (!(p >= 0) || !std::isfinite(p))
                    throw config_error("weighted prior entries must be >= 0");
                s += p;
            }
            if (std::fabs(s - 1.0) > 1e-9)
                throw config_error("weighted prior must sum to 1");
            break;
        }
    }
    if (plan.estimator == Estimator::ImportanceSampling && plan.truth != Truth::H0)
        throw config_error(
            "the importance-sampling estimator targets the null rejection "
            "probability; use truth 0");
}

int draw_categorical(const std::vector<double>& probs, Rng& rng) {
    double u = rng.uniform01();
    double acc = 0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u <= acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

int draw_truth(const SimPlan& plan, const std::vector<double>& is_probs, Rng& rng) {
    if (plan.estimator == Estimator::ImportanceSampling)
        return 1 + draw_categorical(is_probs, rng);
    if (plan.truth == Truth::Hi) return plan.truth_index;
    if (plan.truth == Truth::Weighted)
        return 1 + draw_categorical(plan.weighted_prior, rng);
    return 0;
}

void run_block(const SimPlan& plan, long first, long last,
               const std::vector<double>& is_probs, std::vector<RepResult>& out) {
    const ModelSuite& suite = *plan.suite;
    const bool is_mode = plan.estimator == Estimator::ImportanceSampling;
    const int k = suite.K();
    for (long r = first; r < last; ++r) {
        Rng rng(plan.seed, static_cast<uint64_t>(r));
        int truth = draw_truth(plan, is_probs, rng);
        Verdict v = run_to_verdict(plan.config, suite, truth, rng, plan.max_steps);
        RepResult& rr = out[r];
        rr.t = v.T;
        rr.chan = static_cast<int16_t>(truth);
        rr.d = v.truncated ? int8_t{-1} : static_cast<int8_t>(v.d);
        if (is_mode) {
            if (v.truncated || v.d != 1) {
                rr.is_weight = 0;
            } else {
                std::vector<double> terms(k);
                for (int j = 0; j < k; ++j)
                    terms[j] = plan.config.q1.log_q[j] + v.final_z[j];
                double z_mix = log_sum_exp(terms);
                rr.is_weight = plan.config.q1.total * std::exp(-z_mix);
            }
        }
    }
}

std::vector<RepResult> run_all(const SimPlan& plan) {
    std::vector<RepResult> results(plan.replications);
    std::vector<double> is_probs;
    if (plan.estimator == Estimator::ImportanceSampling) {
        is_probs.resize(plan.suite->K());
        for (int j = 0; j < plan.suite->K(); ++j)
            is_probs[j] = plan.config.q1.q[j] / plan.config.q1.total;
    }
    int workers = std::max(1, plan.threads);
    workers = static_cast<int>(
        std::min<long>(workers, plan.replications));
    if (workers == 1) {
        run_block(plan, 0, plan.replications, is_probs, results);
        return results;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    long chunk = (plan.replications + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        long first = w * chunk;
        long last = std::min(plan.replications, first + chunk);
        if (first >= last) break;
        pool.emplace_back([&plan, first, last, &is_probs, &results] {
            run_block(plan, first, last, is_probs, results);
        });
    }
    for (std::thread& th : pool) th.join();
    return results;
}

std::pair<double, double> mean_se(double sum, double sum_sq, long n) {
    if (n < 2) return {n == 1 ? sum : kNaN, kNaN};
    double mean = sum / static_cast<double>(n);
    double var = (sum_sq - static_cast<double>(n) * mean * mean) /
                 static_cast<double>(n - 1);
    return {mean, std::sqrt(std::max(0.0, var) / static_cast<double>(n))};
}

std::pair<double, double> binomial_rate(long hits, long n) {
    if (n == 0) return {kNaN, kNaN};
    double p = static_cast<double>(hits) / static_cast<double>(n);
    double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return {p, se};
}

}  // namespace

SimReport run_mc(const SimPlan& plan, std::vector<RepRecord>* per_rep) {
    validate_plan(plan);
    const int k = plan.suite->K();
    std::vector<RepResult> results = run_all(plan);
    if (per_rep != nullptr) {
        per_rep->resize(results.size());
        for (size_t i = 0; i < results.size(); ++i)
            (*per_rep)[i] = {results[i].t, results[i].d};
    }

    SimReport rep;
    rep.replications = plan.replications;
    rep.type1_estimate = kNaN;
    rep.type1_stderr = kNaN;
    rep.type2_estimate.assign(k, kNaN);
    rep.type2_stderr.assign(k, kNaN);

    // Fixed-order reduction over replication index.
    long n_d0 = 0, n_d1 = 0;
    double t_sum = 0, t_sq = 0;
    long t_n = 0;
    double w_sum = 0, w_sq = 0;
    long is_hits = 0;
    std::vector<long> per_chan_n(k + 1, 0), per_chan_d0(k + 1, 0);
    for (const RepResult& r : results) {
        if (r.d < 0) {
            ++rep.truncation_count;
        } else {
            double t = static_cast<double>(r.t);
            t_sum += t;
            t_sq += t * t;
            ++t_n;
            if (r.d == 0) ++n_d0; else ++n_d1;
            ++per_chan_n[r.chan];
            if (r.d == 0) ++per_chan_d0[r.chan];
        }
        if (plan.estimator == Estimator::ImportanceSampling) {
            w_sum += r.is_weight;
            w_sq += r.is_weight * r.is_weight;
            if (r.is_weight > 0) ++is_hits;
        }
    }
    double n = static_cast<double>(plan.replications);
    rep.freq_d0 = static_cast<double>(n_d0) / n;
    rep.freq_d1 = static_cast<double>(n_d1) / n;
    std::tie(rep.ess_mean, rep.ess_stderr) = mean_se(t_sum, t_sq, t_n);
    double trunc_frac = static_cast<double>(rep.truncation_count) / n;
    rep.ess_valid = (t_n > 0) && (trunc_frac <= 1e-3);

    if (plan.estimator == Estimator::ImportanceSampling) {
        std::tie(rep.type1_estimate, rep.type1_stderr) =
            mean_se(w_sum, w_sq, plan.replications);
        rep.type1_zero_hits = (is_hits == 0);
        if (rep.type1_zero_hits) {
            rep.type1_estimate = 0;
            rep.type1_stderr = 0;
        }
    } else {
        switch (plan.truth) {
            case Truth::H0:
                std::tie(rep.type1_estimate, rep.type1_stderr) =
                    binomial_rate(n_d1, plan.replications);
                break;
            case Truth::Hi:
                std::tie(rep.type2_estimate[plan.truth_index - 1],
                         rep.type2_stderr[plan.truth_index - 1]) =
                    binomial_rate(n_d0, plan.replications);
                break;
            case Truth::Weighted:
                for (int i = 1; i <= k; ++i) {
                    if (per_chan_n[i] > 0)
                        std::tie(rep.type2_estimate[i - 1], rep.type2_stderr[i - 1]) =
                            binomial_rate(per_chan_d0[i], per_chan_n[i]);
                }
                break;
        }
    }
    return rep;
}

Verdict trace_first_replication(const SimPlan& plan) {
    validate_plan(plan);
    std::vector<double> is_probs;
    if (plan.estimator == Estimator::ImportanceSampling) {
        is_probs.resize(plan.suite->K());
        for (int j = 0; j < plan.suite->K(); ++j)
            is_probs[j] = plan.config.q1.q[j] / plan.config.q1.total;
    }
    Rng rng(plan.seed, 0);
    int truth = draw_truth(plan, is_probs, rng);
    return run_to_verdict(plan.config, *plan.suite, truth, rng, plan.max_steps,
                          /*record_trace=*/true);
}

std::pair<double, double> type1_importance_sampling(const SimPlan& plan) {
    SimPlan p = plan;
    p.estimator = Estimator::ImportanceSampling;
    p.truth = Truth::H0;
    SimReport r = run_mc(p);
    return {r.type1_estimate, r.type1_stderr};
}

KlSummary kl_until_stopping(const SimReport& report, const RenewalConstants& rc) {
    if (!(report.ess_mean > 0))
        throw usage_error("report has no usable expected sample size");
    KlSummary ks;
    ks.per_alt.resize(rc.K());
    for (int i = 0; i < rc.K(); ++i)
        ks.per_alt[i] = rc.per_alt[i].I * report.ess_mean;
    auto it = std::max_element(ks.per_alt.begin(), ks.per_alt.end());
    ks.max_value = *it;
    ks.argmax = static_cast<int>(it - ks.per_alt.begin()) + 1;
    return ks;
}

}  // namespace seqtest
