#pragma once

#include <utility>
#include <vector>

#include "seqtest/models.hpp"
#include "seqtest/rng.hpp"

namespace seqtest {

// Per-alternative renewal constants: KL numbers toward each hypothesis,
// limiting overshoot Laplace transforms (gamma) and means (kappa) on the
// upper (under P_i) and lower (under P_0) boundaries, and the L-number tying
// them together through L = gamma*I = gamma0*I0.
struct ChannelConstants {
    double I = 0;       // E_i[Z_1] > 0
    double I0 = 0;      // E_0[-Z_1] > 0
    double gamma = 0;   // E[e^-overshoot], upper boundary, in (0,1]
    double gamma0 = 0;  // same for the lower boundary
    double kappa = 0;   // mean limiting overshoot, upper
    double kappa0 = 0;  // mean limiting overshoot, lower
    double L = 0;
};

struct RenewalConstants {
    std::vector<ChannelConstants> per_alt;  // index i-1 holds alternative i
    int K() const { return static_cast<int>(per_alt.size()); }
};

// Alternatives sorted ascending by I0 (ties broken by index), and the
// multiplicity r of the minimal I0 at relative tolerance rel_tol.
struct Ordering {
    std::vector<int> order;  // 1-based alternative indices
    int r = 1;
};

struct OvershootEstimate {
    std::vector<double> overshoots;  // empirical sample, equal weights 1/reps
    double gamma_hat = 0, gamma_se = 0;
    double kappa_hat = 0, kappa_se = 0;
    double boundary = 0;
    long reps = 0;
};

enum class Side { Upper, Lower };

// (I_i, I0_i). Closed form for built-in families; 1-D adaptive quadrature
// over the declared interval for generic suites (rel_tol applies there).
std::pair<double, double> kl_numbers(const ModelSuite& suite, int i,
                                     double rel_tol = 1e-8);

// (gamma_i, kappa_i) for a built-in channel family. Exponential is fully
// closed-form; Gaussian evaluates the normal-CDF series truncated when the
// term falls below 1e-12 with a geometric tail bound.
std::pair<double, double> overshoot_constants_closed(const ChannelFamily& ch);

// Lower-boundary constants (gamma0_i, kappa0_i) for a built-in family.
std::pair<double, double> overshoot_constants_closed_lower(const ChannelFamily& ch);

// L_i for a built-in channel via the defining series with per-term closed
// CDFs; stops when the term and a large-deviation tail bound both fall below
// tol (numeric_error if 1e5 terms do not suffice).
double l_number_series(const ChannelFamily& ch, double tol);
double l_number_series(const ModelSuite& suite, int i, double tol);

// Series L-number for generic suites: per-n crossing probabilities estimated
// by Monte Carlo with one shared set of sample paths per measure. No
// certified tail bound is possible here; the sum is truncated once both
// empirical probabilities stay at zero for a stretch of terms.
double l_number_series_mc(const ModelSuite& suite, int i, long reps, long n_max,
                          Rng& rng);

// Random-walk overshoot at a single boundary: under P_i upward past +c, or
// under P_0 downward past -c.
OvershootEstimate overshoot_mc(const ModelSuite& suite, int i, double c, long reps,
                               Side side, Rng& rng);

// Full constants table. Built-in families use closed forms/series; generic
// suites combine KL quadrature, Monte Carlo L-numbers, the identity
// gamma = L/I, and overshoot_mc for the kappas.
RenewalConstants compute_constants(const ModelSuite& suite, double series_tol = 1e-10,
                                   uint64_t generic_seed = 20130301);

Ordering order_alternatives(const RenewalConstants& rc, double rel_tol = 1e-9);

}  // namespace seqtest
