#pragma once

#include <string>
#include <utility>
#include <vector>

#include "seqtest/design.hpp"
#include "seqtest/renewal.hpp"

namespace seqtest {

// Every approximation carries the class of its neglected remainder so
// downstream comparisons know what tolerance is principled.
enum class RemainderClass {
    ExactBound,          // a true inequality, no remainder
    LittleO1,            // value + o(1) as thresholds grow
    BigO1,               // value + O(1)
    UnresolvedConstant,  // an O(1) constant exists but is not computed
};

std::string remainder_class_name(RemainderClass rc);

struct Approx {
    double value = 0;
    RemainderClass remainder = RemainderClass::LittleO1;
};

// SPRT expected sample sizes (under H_i, under H_0) with overshoot terms.
std::pair<double, double> sprt_ess(const RenewalConstants& rc, int i, double alpha,
                                   double beta);

// First-order-corrected ESS of the mixture / weighted-max test under P_i for
// a given upper threshold; the two tests share this expression.
double test_ess_under_hi(double logB, const RenewalConstants& rc, const Weights& q1,
                         int i);

// Same quantity with the corrected threshold substituted:
// (|log alpha| + log sum_j q1_j gamma_j + kappa_i - log q1_i) / I_i.
double corrected_ess_under_hi(double alpha, const RenewalConstants& rc,
                              const Weights& q1, int i);

// Statistics of the Gaussian cluster that drives the r > 1 null-side
// asymptotics: mu_i = E_0[log f_i(X_1)] for the r minimizing alternatives,
// Sigma their covariance under P_0, and the max-expectation constants.
struct ClusterStats {
    int r = 1;
    std::vector<double> mu;        // length r
    std::vector<double> sigma;     // r x r, row-major
    double h_r = 0;
    double d_r = 0;                // h_r / (2 sqrt(I0_min))
    std::vector<double> mu_se;     // nonempty only for Monte Carlo estimation
    std::vector<double> sigma_se;
};

ClusterStats cluster_stats(const ModelSuite& suite, const RenewalConstants& rc,
                           const Ordering& ord, long generic_reps = 1000000,
                           uint64_t generic_seed = 99991);

// E[max of r jointly Gaussian zero-mean components]; deterministic
// quadrature supports r <= 3.
double gaussian_max_expectation_quadrature(const std::vector<double>& sigma, int r);
std::pair<double, double> gaussian_max_expectation_mc(const std::vector<double>& sigma,
                                                      int r, long reps, Rng& rng);

// ESS under P_0: the r = 1 perturbed-random-walk form, or the r > 1 form
// logA + 2 d_r sqrt(logA) whose O(1) constant is reported as unresolved.
Approx test_ess_under_h0(double logA, const RenewalConstants& rc, const Weights& q0,
                         const ClusterStats& cluster, const Ordering& ord);

struct ErrorApprox {
    Approx type1_exact;                  // |q1|/B, a true bound
    Approx type1_corrected;              // (sum q1_j gamma_j)/B + o(...)
    std::vector<Approx> type2_exact;     // per i: 1/(A q0_i)
    std::vector<Approx> type2_corrected; // per i: gamma0^(1)/(q0_i A)
};

ErrorApprox error_approximations(double logB, double logA, const Weights& q0,
                                 const Weights& q1, const RenewalConstants& rc,
                                 const Ordering& ord);

// C_i(p) = log sum_j (p_j / I_j) - log(p_i / I_i), the prior-dependent ESS
// penalty; nonnegative is checked empirically, not assumed.
std::vector<double> c_penalty(const Prior& p, const RenewalConstants& rc);

// J_i(p) ~ C_i(p) / (|log alpha| + kappa_i + log gamma_i): relative extra
// expected sample size against the best-informed SPRT.
std::vector<double> performance_loss(const Prior& p, const RenewalConstants& rc,
                                     double alpha);

// inf over designs of max_i I_i E_i[T] to within o(1):
// |log alpha| + log sum_j gamma_j e^{kappa_j}.
double minimax_value(double alpha, const RenewalConstants& rc);

}  // namespace seqtest
