#include "seqtest/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seqtest/errors.hpp"
#include "seqtest/special.hpp"

namespace seqtest {

Weights::Weights(std::vector<double> values) : q(std::move(values)) {
    if (q.empty()) throw config_error("weight vector must be nonempty");
    log_q.reserve(q.size());
    for (size_t i = 0; i < q.size(); ++i) {
        if (!(q[i] > 0) || !std::isfinite(q[i])) {
            std::ostringstream os;
            os << "weight " << i + 1 << " must be positive and finite (got " << q[i]
               << ")";
            throw config_error(os.str());
        }
        log_q.push_back(std::log(q[i]));
        total += q[i];
    }
}

void validate_config(const TestConfig& config, const ModelSuite& suite) {
    if (!(config.logA > 0) || !(config.logB > 0))
        throw config_error("thresholds require logA > 0 and logB > 0 (A, B > 1)");
    if (config.kind == TestKind::Sprt) {
        if (config.sprt_index < 1 || config.sprt_index > suite.K())
            throw config_error("SPRT channel index outside 1..K");
        return;
    }
    if (config.q0.K() != suite.K() || config.q1.K() != suite.K())
        throw config_error("weight vectors must have one entry per alternative");
}

namespace {

double mixture_stat(const Weights& w, std::span<const double> z) {
    // log sum_i exp(log q_i + z_i), max-stabilized.
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < w.K(); ++i) m = std::max(m, w.log_q[i] + z[i]);
    double s = 0.0;
    for (int i = 0; i < w.K(); ++i) s += std::exp(w.log_q[i] + z[i] - m);
    return m + std::log(s);
}

double max_stat(const Weights& w, std::span<const double> z) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < w.K(); ++i) m = std::max(m, w.log_q[i] + z[i]);
    return m;
}

}  // namespace

std::pair<double, double> compute_stats(const TestConfig& config,
                                        std::span<const double> z) {
    switch (config.kind) {
        case TestKind::Sprt: {
            double v = z[config.sprt_index - 1];
            return {v, v};
        }
        case TestKind::Mixture:
            return {mixture_stat(config.q1, z), mixture_stat(config.q0, z)};
        case TestKind::WeightedMax:
            return {max_stat(config.q1, z), max_stat(config.q0, z)};
    }
    throw usage_error("unknown test kind");
}

TestState init_state(const TestConfig& config, const ModelSuite& suite) {
    validate_config(config, suite);
    TestState s;
    s.z.assign(suite.K(), 0.0);
    auto [u, l] = compute_stats(config, s.z);
    s.upper = u;
    s.lower = l;
    return s;
}

std::optional<Verdict> step(const TestConfig& config, TestState& state,
                            std::span<const double> x, const ModelSuite& suite) {
    if (state.stopped) throw usage_error("step() called on a stopped test state");
    state.t += 1;
    state.ell0 += suite.log_density(0, x);
    for (int i = 1; i <= suite.K(); ++i)
        state.z[i - 1] += suite.loglr_increment(i, x);
    auto [u, l] = compute_stats(config, state.z);
    state.upper = u;
    state.lower = l;
    bool hit_upper = u >= config.logB;
    bool hit_lower = l <= -config.logA;
    if (!hit_upper && !hit_lower) return std::nullopt;
    state.stopped = true;
    Verdict v;
    v.T = state.t;
    // A simultaneous crossing resolves to d = 1: the decision indicator
    // compares the one-sided times with "<=".
    v.d = hit_upper ? 1 : 0;
    v.eta = hit_upper ? (u - config.logB) : (-config.logA - l);
    v.final_z = state.z;
    return v;
}

DecompTerms decomposition_terms(const TestState& state, int i, const Weights& q,
                                bool mixture) {
    if (i < 1 || i > q.K()) throw usage_error("alternative index out of range");
    DecompTerms d;
    d.z_i = state.z[i - 1];
    d.log_q_i = q.log_q[i - 1];
    // Y_t^i = log(1 + sum_{j != i} (q_j/q_i) Lambda_j/Lambda_i) and the
    // weighted-max analogue; both are computed max-stabilized from the
    // pairwise log ratios so they stay finite at desk-scale statistics.
    double best = 0.0;  // the j = i term contributes exp(0)
    std::vector<double> logs;
    logs.reserve(q.K());
    logs.push_back(0.0);
    for (int j = 1; j <= q.K(); ++j) {
        if (j == i) continue;
        double lr = q.log_q[j - 1] - q.log_q[i - 1] + state.z[j - 1] - state.z[i - 1];
        logs.push_back(lr);
        best = std::max(best, lr);
    }
    d.y = mixture ? log_sum_exp(logs) : best;
    return d;
}

Verdict run_to_verdict(const TestConfig& config, const ModelSuite& suite, int truth,
                       Rng& rng, long max_steps, bool record_trace) {
    if (max_steps < 1) throw config_error("max_steps must be >= 1");
    TestState state = init_state(config, suite);
    std::vector<double> x(suite.dim());
    std::vector<TraceRow> trace;
    while (state.t < max_steps) {
        suite.sample(truth, rng, x);
        auto verdict = step(config, state, x, suite);
        if (record_trace)
            trace.push_back({state.t, state.z, state.upper, state.lower});
        if (verdict) {
            verdict->trace = std::move(trace);
            return *verdict;
        }
    }
    // Truncation is a distinguishable outcome, never coerced to a decision.
    Verdict v;
    v.T = state.t;
    v.d = 0;
    v.eta = 0;
    v.truncated = true;
    v.final_z = state.z;
    v.trace = std::move(trace);
    return v;
}

OneSidedTimes one_sided_crossing_times(const ModelSuite& suite, const Weights& q0,
                                       const Weights& q1, double logA, double logB,
                                       int truth, Rng& rng, long max_steps) {
    if (q0.K() != suite.K() || q1.K() != suite.K())
        throw config_error("weight vectors must have one entry per alternative");
    OneSidedTimes times;
    std::vector<double> z(suite.K(), 0.0);
    std::vector<double> x(suite.dim());
    long t = 0;
    while (t < max_steps) {
        ++t;
        suite.sample(truth, rng, x);
        for (int i = 1; i <= suite.K(); ++i) z[i - 1] += suite.loglr_increment(i, x);
        if (times.upper_mixture == 0 && mixture_stat(q1, z) >= logB)
            times.upper_mixture = t;
        if (times.upper_max == 0 && max_stat(q1, z) >= logB) times.upper_max = t;
        if (times.lower_mixture == 0 && mixture_stat(q0, z) <= -logA)
            times.lower_mixture = t;
        if (times.lower_max == 0 && max_stat(q0, z) <= -logA) times.lower_max = t;
        bool upper_done = times.upper_mixture != 0 && times.upper_max != 0;
        bool lower_done = times.lower_mixture != 0 && times.lower_max != 0;
        // Under a signal the lower statistics drift away and vice versa, so
        // wait only for the side that is reachable from this truth.
        if (truth == 0 ? lower_done : upper_done) break;
    }
    return times;
}

}  // namespace seqtest
