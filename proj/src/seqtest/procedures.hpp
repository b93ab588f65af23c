#pragma once

#include <optional>
#include <span>
#include <vector>

#include "seqtest/models.hpp"
#include "seqtest/rng.hpp"

namespace seqtest {

// Positive weight vector with cached logs and total mass |q|.
struct Weights {
    std::vector<double> q;
    std::vector<double> log_q;
    double total = 0;

    Weights() = default;
    explicit Weights(std::vector<double> values);
    int K() const { return static_cast<int>(q.size()); }
};

enum class TestKind {
    Sprt,         // single-alternative SPRT on channel sprt_index
    Mixture,      // thresholds the weighted sum of likelihood ratios
    WeightedMax,  // thresholds the weighted maximum
};

struct TestConfig {
    TestKind kind = TestKind::Mixture;
    int sprt_index = 1;  // used by TestKind::Sprt only
    double logA = 0;     // lower boundary: stop with d=0 once lower <= -logA
    double logB = 0;     // upper boundary: stop with d=1 once upper >= logB
    Weights q0;          // lower-side weights
    Weights q1;          // upper-side weights
};

void validate_config(const TestConfig& config, const ModelSuite& suite);

struct TestState {
    long t = 0;
    std::vector<double> z;   // running Z_t^i per alternative
    double ell0 = 0;         // running log f_0 likelihood (diagnostic)
    double upper = 0;        // Z_t(q1) or Zhat_t(q1), or Z^i for the SPRT
    double lower = 0;        // Z_t(q0) or Zhat_t(q0), or Z^i for the SPRT
    bool stopped = false;
};

struct TraceRow {
    long t;
    std::vector<double> z;
    double upper, lower;
};

struct Verdict {
    long T = 0;
    int d = 0;
    double eta = 0;          // terminal overshoot beyond the crossed boundary
    bool truncated = false;  // max_steps reached without a decision
    std::vector<double> final_z;
    std::vector<TraceRow> trace;
};

TestState init_state(const TestConfig& config, const ModelSuite& suite);

// Advance one observation. Returns a Verdict exactly when the statistic
// leaves (-logA, logB); simultaneous crossings resolve to d = 1. Stepping a
// stopped state is a usage error.
std::optional<Verdict> step(const TestConfig& config, TestState& state,
                            std::span<const double> x, const ModelSuite& suite);

// (upper, lower) statistics for a given z vector under this config.
std::pair<double, double> compute_stats(const TestConfig& config,
                                        std::span<const double> z);

struct DecompTerms {
    double z_i;
    double log_q_i;
    double y;  // Y_t^i(q) or Yhat_t^i(q); nonnegative by construction
};

// The three addends of the statistic decomposition around alternative i.
DecompTerms decomposition_terms(const TestState& state, int i, const Weights& q,
                                bool mixture);

Verdict run_to_verdict(const TestConfig& config, const ModelSuite& suite, int truth,
                       Rng& rng, long max_steps, bool record_trace = false);

// First one-sided crossing times for both statistics with shared weights on
// one shared observation path; 0 means not reached within max_steps.
struct OneSidedTimes {
    long upper_mixture = 0;  // mixture statistic (q1 weights) first >= logB
    long upper_max = 0;      // max statistic (q1 weights) first >= logB
    long lower_mixture = 0;  // mixture statistic (q0 weights) first <= -logA
    long lower_max = 0;      // max statistic (q0 weights) first <= -logA
};
OneSidedTimes one_sided_crossing_times(const ModelSuite& suite, const Weights& q0,
                                       const Weights& q1, double logA, double logB,
                                       int truth, Rng& rng, long max_steps);

}  // namespace seqtest
