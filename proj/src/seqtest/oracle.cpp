#include "seqtest/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "seqtest/errors.hpp"

namespace seqtest {

namespace {

void check_channel_probs(double p0, double p1) {
    if (!(p0 > 0 && p0 < 1) || !(p1 > 0 && p1 < 1))
        throw config_error("two-point channel probabilities must lie in (0,1)");
    if (p0 == p1)
        throw config_error("two-point channel needs p0 != p1");
}

constexpr int kBitsPerChannel = 16;
constexpr long kCountLimit = (1L << kBitsPerChannel) - 1;

uint64_t bump(uint64_t key, int channel) {
    return key + (uint64_t{1} << (kBitsPerChannel * channel));
}

long count_of(uint64_t key, int channel) {
    return static_cast<long>((key >> (kBitsPerChannel * channel)) & kCountLimit);
}

}  // namespace

TwoPointChannel two_point_channel(double p0, double p1) {
    check_channel_probs(p0, p1);
    TwoPointChannel ch{p0, p1, 0, 0};
    ch.l1 = std::log(p1 / p0);
    ch.l0 = std::log((1 - p1) / (1 - p0));
    return ch;
}

TwoPointChannel symmetric_lattice_channel(double z) {
    if (!(z > 0)) throw config_error("lattice step z must be > 0");
    double ez = std::exp(z);
    TwoPointChannel ch{1.0 / (1.0 + ez), ez / (1.0 + ez), z, -z};
    return ch;
}

double two_point_kl(const TwoPointSuite& suite, int i) {
    if (i < 1 || i > suite.K()) throw usage_error("channel index out of range");
    const TwoPointChannel& ch = suite.channels[i - 1];
    return ch.p1 * ch.l1 + (1 - ch.p1) * ch.l0;
}

ModelSuite as_model_suite(const TwoPointSuite& suite) {
    if (suite.K() < 1) throw config_error("two-point suite needs at least one channel");
    for (const TwoPointChannel& ch : suite.channels) check_channel_probs(ch.p0, ch.p1);
    const std::vector<TwoPointChannel> chans = suite.channels;
    const int k = suite.K();
    GenericModel gm;
    gm.K = k;
    gm.dim = k;
    gm.log_density = [chans, k](int hypothesis, std::span<const double> x) {
        double s = 0;
        for (int c = 0; c < k; ++c) {
            double p = (hypothesis == c + 1) ? chans[c].p1 : chans[c].p0;
            s += (x[c] > 0.5) ? std::log(p) : std::log(1 - p);
        }
        return s;
    };
    gm.sample = [chans, k](int hypothesis, Rng& rng, std::span<double> out) {
        for (int c = 0; c < k; ++c) {
            double p = (hypothesis == c + 1) ? chans[c].p1 : chans[c].p0;
            out[c] = (rng.uniform01() < p) ? 1.0 : 0.0;
        }
    };
    gm.in_support = [k](std::span<const double> x) {
        for (int c = 0; c < k; ++c)
            if (std::fabs(x[c]) > 1e-9 && std::fabs(x[c] - 1.0) > 1e-9) return false;
        return true;
    };
    gm.quad_lo = 0.0;  // placeholder: quadrature KL is undefined for discrete models
    gm.quad_hi = 1.0;
    return ModelSuite::generic(std::move(gm));
}

OracleResult bernoulli_oracle(const TwoPointSuite& suite, const TestConfig& config,
                              int truth, double horizon_eps, double boundary_tol,
                              long max_states, long max_horizon) {
    const int k = suite.K();
    if (k < 1 || k > 3)
        throw config_error("the enumeration oracle supports 1 to 3 channels");
    if (truth < 0 || truth > k) throw config_error("truth out of range");
    if (!(horizon_eps > 0) || !(boundary_tol >= 0))
        throw config_error("horizon_eps must be > 0 and boundary_tol >= 0");
    if (config.q0.K() != k || config.q1.K() != k)
        throw config_error("config weight dimension does not match the suite");

    std::vector<double> pr(k);  // P(X_c = 1) under the running truth
    for (int c = 0; c < k; ++c)
        pr[c] = (truth == c + 1) ? suite.channels[c].p1 : suite.channels[c].p0;

    OracleResult res;
    std::map<uint64_t, double> alive;
    alive[0] = 1.0;
    double alive_mass = 1.0;
    double prev_alive = 1.0;
    double rho_max = 0.0;  // largest recent per-step survival ratio
    std::vector<double> z(k);
    const int outcomes = 1 << k;

    for (long t = 1; t <= max_horizon; ++t) {
        if (t > kCountLimit) throw numeric_error("oracle horizon exceeds count packing");
        std::map<uint64_t, double> next;
        double stopped_ess = 0;
        for (const auto& [key, mass] : alive) {
            for (int o = 0; o < outcomes; ++o) {
                double prob = mass;
                uint64_t nk = key;
                for (int c = 0; c < k; ++c) {
                    if (o & (1 << c)) {
                        prob *= pr[c];
                        nk = bump(nk, c);
                    } else {
                        prob *= 1 - pr[c];
                    }
                }
                if (prob == 0) continue;
                for (int c = 0; c < k; ++c) {
                    long s = count_of(nk, c);
                    z[c] = s * suite.channels[c].l1 + (t - s) * suite.channels[c].l0;
                }
                auto [upper, lower] = compute_stats(config, z);
                if (upper >= config.logB - boundary_tol) {
                    res.p_d1 += prob;
                    stopped_ess += t * prob;
                } else if (lower <= -config.logA + boundary_tol) {
                    res.p_d0 += prob;
                    stopped_ess += t * prob;
                } else {
                    next[nk] += prob;
                }
            }
        }
        res.ess += stopped_ess;
        alive.swap(next);
        res.states_visited += static_cast<long>(alive.size());
        if (res.states_visited > max_states)
            throw numeric_error("oracle unavailable: state budget exceeded");
        prev_alive = alive_mass;
        alive_mass = 0;
        for (const auto& [key, mass] : alive) alive_mass += mass;
        res.horizon = t;
        if (t > 5 && prev_alive > 0)
            rho_max = std::max(rho_max, alive_mass / prev_alive);
        if (alive_mass < horizon_eps) break;
    }
    res.alive_mass = alive_mass;
    if (alive_mass >= horizon_eps)
        throw numeric_error("oracle horizon exceeded before the alive mass was certified");
    if (alive_mass > 0 && rho_max > 0 && rho_max < 1) {
        double t = static_cast<double>(res.horizon);
        double r = rho_max;
        res.ess_tail_bound = alive_mass * (t * r / (1 - r) + r / ((1 - r) * (1 - r)));
    } else {
        res.ess_tail_bound = alive_mass * static_cast<double>(2 * res.horizon);
    }
    return res;
}

WaldTwoPoint wald_two_point(double z, long a, long b) {
    if (!(z > 0)) throw config_error("lattice step z must be > 0");
    if (a < 1 || b < 1) throw config_error("boundary multiples must be >= 1");
    double la = a * z, lb = b * z;
    double big_a = std::exp(la), big_b = std::exp(lb);
    WaldTwoPoint w{};
    w.alpha = (big_a - 1) / (big_a * big_b - 1);
    w.beta = (big_b - 1) / (big_a * big_b - 1);
    double ez = std::exp(z);
    double drift0 = z * (1 - ez) / (1 + ez);  // E_0[Z_1] < 0
    double drift1 = z * (ez - 1) / (1 + ez);  // E_1[Z_1] > 0
    w.ess0 = (w.alpha * lb - (1 - w.alpha) * la) / drift0;
    w.ess1 = ((1 - w.beta) * lb - w.beta * la) / drift1;
    return w;
}

}  // namespace seqtest
