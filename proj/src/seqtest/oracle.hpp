#pragma once

#include <vector>

#include "seqtest/models.hpp"
#include "seqtest/procedures.hpp"

namespace seqtest {

// Bernoulli observation channel: P(X=1) is p0 under the null and p1 under
// the alternative. l1/l0 are the log likelihood-ratio increments for X=1 and
// X=0; the factory fills them from (p0, p1), while symmetric_lattice_channel
// pins them to exactly +z/-z so boundary hits are lattice-exact.
struct TwoPointChannel {
    double p0, p1;
    double l1, l0;
};

TwoPointChannel two_point_channel(double p0, double p1);

// P_0(X=1) = 1/(1+e^z), P_1(X=1) = e^z/(1+e^z): the per-step increment is
// exactly +-z, so thresholds at integer multiples of z are hit with zero
// overshoot.
TwoPointChannel symmetric_lattice_channel(double z);

struct TwoPointSuite {
    std::vector<TwoPointChannel> channels;
    int K() const { return static_cast<int>(channels.size()); }
};

// Bernoulli KL divergence of the alternative from the null for channel i
// (1-based): E_i[Z_1].
double two_point_kl(const TwoPointSuite& suite, int i);

// Wraps the discrete suite as a generic ModelSuite so the Monte Carlo engine
// can run it. The declared quadrature interval is a placeholder; KL numbers
// for discrete models come from two_point_kl, not quadrature.
ModelSuite as_model_suite(const TwoPointSuite& suite);

struct OracleResult {
    double p_d1 = 0;            // boundary-crossing probability, upper side
    double p_d0 = 0;            // lower side
    double ess = 0;             // sum of t * stopping mass, plus nothing else
    double ess_tail_bound = 0;  // certified bound on the truncated ESS mass
    double alive_mass = 0;      // un-stopped probability mass at the horizon
    long horizon = 0;           // last time index processed
    long states_visited = 0;
};

// Exact stopping distribution by forward probability propagation over the
// lattice of per-channel success counts. truth = 0 runs every channel at its
// null rate; truth = i flips channel i to p1. boundary_tol widens the
// stopping comparisons (upper >= logB - tol, lower <= -logA + tol) so that
// lattice designs whose paths land exactly on a boundary are classified
// consistently despite rounding. Propagation stops once both the alive mass
// and its ESS contribution are certifiably below horizon_eps; exceeding
// max_states raises a numeric error (oracle unavailable for that instance).
OracleResult bernoulli_oracle(const TwoPointSuite& suite, const TestConfig& config,
                              int truth, double horizon_eps = 1e-12,
                              double boundary_tol = 0.0, long max_states = 10000000,
                              long max_horizon = 1000000);

struct WaldTwoPoint {
    double alpha, beta;  // exact error probabilities (no overshoot)
    double ess0, ess1;   // expected sample sizes under the null / alternative
};

// Closed-form operating characteristics of the single-channel SPRT on the
// symmetric lattice: per-step increment +-z, stop at z-multiples a (lower)
// and b (upper). Exact because the walk hits the boundaries with zero
// overshoot, so Wald's identities hold with equality.
WaldTwoPoint wald_two_point(double z, long a, long b);

}  // namespace seqtest
