#pragma once

#include <utility>
#include <vector>

#include "seqtest/procedures.hpp"
#include "seqtest/renewal.hpp"

namespace seqtest {

struct Prior {
    std::vector<double> p;  // strictly positive, sums to 1
    explicit Prior(std::vector<double> values);
    int K() const { return static_cast<int>(p.size()); }
};

enum class PriorKind {
    Uniform,         // p_i ∝ 1
    KLProportional,  // p_i ∝ I_i
    LProportional,   // p_i ∝ L_i
    LeastFavorable,  // p_i ∝ L_i e^{kappa_i}; (almost) equalizes accumulated KL
};

Prior make_prior(PriorKind kind, const RenewalConstants& rc);

// The weight rule: q1_i = p_i / L_i, q0_i = p_i * L_i.
std::pair<Weights, Weights> weights_from_prior(const Prior& p,
                                               const RenewalConstants& rc);

enum class ThresholdRuleKind {
    Conservative,        // A = 1/(beta min q0), B = |q1|/alpha — exact bounds
    OvershootCorrected,  // A = gamma0^(1)/(beta min q0), B = (sum q1_j gamma_j)/alpha
};

struct ThresholdRule {
    ThresholdRuleKind rule = ThresholdRuleKind::Conservative;
    double alpha = 0;
    double beta = 0;
};

// (logA, logB), evaluated in log space. Design error if either threshold
// fails to exceed 1.
std::pair<double, double> thresholds(const ThresholdRule& rule, const Weights& q0,
                                     const Weights& q1, const RenewalConstants& rc,
                                     const Ordering& ord);

struct Design {
    double logA = 0;
    double logB = 0;
    Weights q0, q1;
    std::vector<double> p;
};

enum class WeightSource {
    Formula,    // q from the weight rule applied to computed constants
    Published,  // the reference table's printed q vectors (study suite only)
};

Design make_design(const ModelSuite& suite, const RenewalConstants& rc,
                   PriorKind prior_kind, const ThresholdRule& rule,
                   WeightSource source = WeightSource::Formula);

// Printed weight vectors from the reference parameter table; only valid for
// the exponential study suite theta = (0.5, 1, 2).
std::pair<Weights, Weights> published_weight_override(const ModelSuite& suite);

}  // namespace seqtest
