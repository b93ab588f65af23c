#include "seqtest/design.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seqtest/errors.hpp"
#include "seqtest/published.hpp"

namespace seqtest {

Prior::Prior(std::vector<double> values) : p(std::move(values)) {
    if (p.empty()) throw config_error("prior must be nonempty");
    double s = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0)) {
            std::ostringstream os;
            os << "prior component " << i + 1 << " must be > 0 (got " << p[i] << ")";
            throw config_error(os.str());
        }
        s += p[i];
    }
    if (std::fabs(s - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "prior must sum to 1 within 1e-12 (got " << s << ")";
        throw config_error(os.str());
    }
}

Prior make_prior(PriorKind kind, const RenewalConstants& rc) {
    std::vector<double> w(rc.K());
    for (int i = 0; i < rc.K(); ++i) {
        const ChannelConstants& c = rc.per_alt[i];
        switch (kind) {
            case PriorKind::Uniform: w[i] = 1.0; break;
            case PriorKind::KLProportional: w[i] = c.I; break;
            case PriorKind::LProportional: w[i] = c.L; break;
            case PriorKind::LeastFavorable: w[i] = c.L * std::exp(c.kappa); break;
        }
    }
    double s = 0;
    for (double v : w) s += v;
    for (double& v : w) v /= s;
    // Renormalize exactly so the Prior invariant holds bit-for-bit.
    double s2 = 0;
    for (double v : w) s2 += v;
    if (s2 != 1.0)
        for (double& v : w) v /= s2;
    return Prior(std::move(w));
}

std::pair<Weights, Weights> weights_from_prior(const Prior& p,
                                               const RenewalConstants& rc) {
    if (p.K() != rc.K())
        throw config_error("prior and constants table disagree on K");
    std::vector<double> q0(p.K()), q1(p.K());
    for (int i = 0; i < p.K(); ++i) {
        double L = rc.per_alt[i].L;
        if (!(L > 0) || !std::isfinite(L)) {
            std::ostringstream os;
            os << "L-number for alternative " << i + 1 << " is not usable (got " << L
               << ")";
            throw config_error(os.str());
        }
        q1[i] = p.p[i] / L;
        q0[i] = p.p[i] * L;
    }
    return {Weights(std::move(q0)), Weights(std::move(q1))};
}

std::pair<double, double> thresholds(const ThresholdRule& rule, const Weights& q0,
                                     const Weights& q1, const RenewalConstants& rc,
                                     const Ordering& ord) {
    if (!(rule.alpha > 0 && rule.alpha < 1) || !(rule.beta > 0 && rule.beta < 1))
        throw config_error("alpha and beta must lie in (0,1)");
    double log_min_q0 = *std::min_element(q0.log_q.begin(), q0.log_q.end());
    double logA, logB;
    if (rule.rule == ThresholdRuleKind::Conservative) {
        logA = -std::log(rule.beta) - log_min_q0;
        logB = std::log(q1.total) - std::log(rule.alpha);
    } else {
        if (q1.K() != rc.K() || q0.K() != rc.K())
            throw config_error("weights and constants table disagree on K");
        // gamma0 of the smallest alternative attaining the minimal I0.
        double gamma0_first = rc.per_alt[ord.order[0] - 1].gamma0;
        double s = 0;
        for (int i = 0; i < q1.K(); ++i) s += q1.q[i] * rc.per_alt[i].gamma;
        logA = std::log(gamma0_first) - std::log(rule.beta) - log_min_q0;
        logB = std::log(s) - std::log(rule.alpha);
    }
    if (!(logA > 0) || !(logB > 0)) {
        std::ostringstream os;
        os << "requested error levels are too loose for these weights: logA = "
           << logA << ", logB = " << logB << " (both must be > 0)";
        throw config_error(os.str());
    }
    return {logA, logB};
}

std::pair<Weights, Weights> published_weight_override(const ModelSuite& suite) {
    const auto& table = published::kParameterTable;
    bool matches = suite.is_multichannel() &&
                   suite.K() == static_cast<int>(table.size());
    if (matches) {
        for (int i = 0; i < suite.K(); ++i) {
            const ChannelFamily& ch = suite.channels()[i];
            if (ch.kind != Family::ExponentialScale ||
                std::fabs(ch.theta - table[i].theta) > 1e-12)
                matches = false;
        }
    }
    if (!matches)
        throw config_error(
            "published weight override is only defined for the exponential suite "
            "theta = (0.5, 1, 2)");
    std::vector<double> q0(table.size()), q1(table.size());
    for (size_t i = 0; i < table.size(); ++i) {
        q0[i] = table[i].q0;
        q1[i] = table[i].q1;
    }
    return {Weights(std::move(q0)), Weights(std::move(q1))};
}

Design make_design(const ModelSuite& suite, const RenewalConstants& rc,
                   PriorKind prior_kind, const ThresholdRule& rule,
                   WeightSource source) {
    Prior p = make_prior(prior_kind, rc);
    auto [q0, q1] = source == WeightSource::Published
                        ? published_weight_override(suite)
                        : weights_from_prior(p, rc);
    Ordering ord = order_alternatives(rc);
    auto [logA, logB] = thresholds(rule, q0, q1, rc, ord);
    Design d;
    d.logA = logA;
    d.logB = logB;
    d.q0 = std::move(q0);
    d.q1 = std::move(q1);
    d.p = p.p;
    return d;
}

}  // namespace seqtest
