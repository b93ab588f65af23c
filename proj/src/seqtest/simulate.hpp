#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "seqtest/models.hpp"
#include "seqtest/procedures.hpp"
#include "seqtest/renewal.hpp"

namespace seqtest {

enum class Truth { H0, Hi, Weighted };
enum class Estimator { Direct, ImportanceSampling };

struct SimPlan {
    const ModelSuite* suite = nullptr;
    TestConfig config;
    Truth truth = Truth::H0;
    int truth_index = 1;                 // 1-based, used when truth == Hi
    std::vector<double> weighted_prior;  // size K, used when truth == Weighted
    long replications = 10000;           // >= 100
    uint64_t seed = 1;
    long max_steps = 1000000;
    Estimator estimator = Estimator::Direct;
    int threads = 1;
};

// Monte Carlo summary. Decision frequencies are over all replications, so
// freq_d0 + freq_d1 = 1 - truncation fraction. ESS moments are over the
// stopped replications only; ess_valid is cleared when the truncation
// fraction exceeds 1e-3. Estimates that a given plan cannot produce are NaN.
struct SimReport {
    long replications = 0;
    double ess_mean = 0, ess_stderr = 0;
    double freq_d0 = 0, freq_d1 = 0;
    double type1_estimate = 0, type1_stderr = 0;
    bool type1_zero_hits = false;  // IS estimator observed no d=1 path
    std::vector<double> type2_estimate, type2_stderr;  // per alternative
    long truncation_count = 0;
    bool ess_valid = true;
    std::vector<double> kl_accumulated;  // optional: I_i * ess_mean per alternative
};

struct KlSummary {
    std::vector<double> per_alt;  // I_i * ess_mean
    double max_value = 0;
    int argmax = 1;  // 1-based
};

// Stopping time and decision of one replication; d = -1 when truncated.
struct RepRecord {
    long t = 0;
    int d = -1;
};

// Runs the plan. Replication r always uses Rng(seed, r) and results are
// reduced in replication order, so the report is bit-identical for any
// thread count. When per_rep is non-null it receives one record per
// replication, in replication order.
SimReport run_mc(const SimPlan& plan, std::vector<RepRecord>* per_rep = nullptr);

// Re-runs replication 0 of the plan with trace recording; the path is
// identical to the one run_mc consumed.
Verdict trace_first_replication(const SimPlan& plan);

// Change-of-measure estimator of P_0(d = 1): draw channel J with probability
// q1^J/|q1|, simulate under P_J, and weight by |q1| e^{-Z_T(q1)} 1{d=1} where
// Z is the mixture statistic under the q1 weights for either test kind.
// Returns (estimate, stderr) and reports hit count through the report fields
// when called via run_mc with Estimator::ImportanceSampling.
std::pair<double, double> type1_importance_sampling(const SimPlan& plan);

// Accumulated KL information at stopping, per alternative: I_i * ess_mean.
KlSummary kl_until_stopping(const SimReport& report, const RenewalConstants& rc);

}  // namespace seqtest
