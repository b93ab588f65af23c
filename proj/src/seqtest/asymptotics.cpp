#include "seqtest/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seqtest/errors.hpp"
#include "seqtest/special.hpp"

namespace seqtest {

std::string remainder_class_name(RemainderClass rc) {
    switch (rc) {
        case RemainderClass::ExactBound: return "exact-bound";
        case RemainderClass::LittleO1: return "o1";
        case RemainderClass::BigO1: return "O1";
        case RemainderClass::UnresolvedConstant: return "unresolved-constant";
    }
    return "?";
}

std::pair<double, double> sprt_ess(const RenewalConstants& rc, int i, double alpha,
                                   double beta) {
    if (i < 1 || i > rc.K()) throw usage_error("alternative index out of range");
    if (!(alpha > 0 && alpha < 1) || !(beta > 0 && beta < 1))
        throw config_error("alpha and beta must lie in (0,1)");
    const ChannelConstants& c = rc.per_alt[i - 1];
    double under_i = (-std::log(alpha) + c.kappa + std::log(c.gamma)) / c.I;
    double under_0 = (-std::log(beta) + c.kappa0 + std::log(c.gamma0)) / c.I0;
    return {under_i, under_0};
}

double test_ess_under_hi(double logB, const RenewalConstants& rc, const Weights& q1,
                         int i) {
    if (i < 1 || i > rc.K() || q1.K() != rc.K())
        throw usage_error("index/weight size mismatch");
    if (!(logB > 0)) throw config_error("logB must be > 0");
    const ChannelConstants& c = rc.per_alt[i - 1];
    return (logB + c.kappa - q1.log_q[i - 1]) / c.I;
}

double corrected_ess_under_hi(double alpha, const RenewalConstants& rc,
                              const Weights& q1, int i) {
    if (i < 1 || i > rc.K() || q1.K() != rc.K())
        throw usage_error("index/weight size mismatch");
    if (!(alpha > 0 && alpha < 1)) throw config_error("alpha must lie in (0,1)");
    double s = 0;
    for (int j = 0; j < rc.K(); ++j) s += q1.q[j] * rc.per_alt[j].gamma;
    const ChannelConstants& c = rc.per_alt[i - 1];
    return (-std::log(alpha) + std::log(s) + c.kappa - q1.log_q[i - 1]) / c.I;
}

namespace {

struct ChannelNullMoments {
    double mean_log_g0;  // E_0[log g_0(X)]
    double var_log_g0;   // Var_0(log g_0(X))
    double var_z;        // Var_0(Z_1)
    double cov;          // Cov_0(log g_0(X), Z_1)
};

ChannelNullMoments channel_null_moments(const ChannelFamily& ch) {
    ChannelNullMoments m{};
    if (ch.kind == Family::ExponentialScale) {
        double b = ch.theta / (1.0 + ch.theta);
        m.mean_log_g0 = -1.0;  // E[-X], X ~ Exp(1)
        m.var_log_g0 = 1.0;
        m.var_z = b * b;
        m.cov = -b;  // Cov(-X, bX)
    } else {
        m.mean_log_g0 = -0.5 - 0.5 * std::log(kTwoPi);
        m.var_log_g0 = 0.5;  // Var(X^2/2), X ~ N(0,1)
        m.var_z = ch.theta * ch.theta;
        m.cov = 0.0;  // odd moment of a standard normal
    }
    return m;
}

void check_covariance(const std::vector<double>& sigma, int r) {
    if (static_cast<int>(sigma.size()) != r * r)
        throw usage_error("covariance matrix size must be r*r");
    for (int a = 0; a < r; ++a) {
        for (int b = a + 1; b < r; ++b) {
            double d = std::fabs(sigma[a * r + b] - sigma[b * r + a]);
            double scale = std::max({std::fabs(sigma[a * r + b]),
                                     std::fabs(sigma[b * r + a]), 1.0});
            if (d > 1e-9 * scale)
                throw domain_error("covariance matrix must be symmetric");
        }
    }
}

// Lower-triangular Cholesky factor; throws domain_error when the matrix is
// not positive semidefinite (tiny negative pivots are clamped to zero).
std::vector<double> cholesky(const std::vector<double>& sigma, int r) {
    std::vector<double> l(r * r, 0.0);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = sigma[i * r + j];
            for (int k = 0; k < j; ++k) s -= l[i * r + k] * l[j * r + k];
            if (i == j) {
                if (s < -1e-9 * std::max(1.0, std::fabs(sigma[i * r + i])))
                    throw domain_error("covariance matrix is not positive semidefinite");
                l[i * r + i] = std::sqrt(std::max(s, 0.0));
            } else {
                l[i * r + j] = (l[j * r + j] > 0) ? s / l[j * r + j] : 0.0;
            }
        }
    }
    return l;
}

}  // namespace

ClusterStats cluster_stats(const ModelSuite& suite, const RenewalConstants& rc,
                           const Ordering& ord, long generic_reps,
                           uint64_t generic_seed) {
    ClusterStats cs;
    cs.r = ord.r;
    const int r = ord.r;
    cs.mu.resize(r);
    cs.sigma.assign(r * r, 0.0);
    if (suite.is_multichannel()) {
        // log f_i(x) = V + Z_1^i with V = sum_k log g_0^k(x^k); channels are
        // independent under P_0 so all moments assemble from per-channel ones.
        double mean_v = 0, var_v = 0;
        std::vector<ChannelNullMoments> mom;
        mom.reserve(suite.K());
        for (const ChannelFamily& ch : suite.channels()) {
            mom.push_back(channel_null_moments(ch));
            mean_v += mom.back().mean_log_g0;
            var_v += mom.back().var_log_g0;
        }
        for (int a = 0; a < r; ++a) {
            int ia = ord.order[a] - 1;
            cs.mu[a] = mean_v - rc.per_alt[ia].I0;
            for (int b = 0; b < r; ++b) {
                int ib = ord.order[b] - 1;
                double v = var_v + mom[ia].cov + mom[ib].cov;
                if (a == b) v += mom[ia].var_z;
                cs.sigma[a * r + b] = v;
            }
        }
    } else {
        if (generic_reps < 1000) throw config_error("generic cluster stats need reps >= 1000");
        Rng rng(generic_seed, 0);
        std::vector<double> x(suite.dim());
        std::vector<double> sum(r, 0.0);
        // Two-pass moments: draws are kept so the centered second moments and
        // their standard errors come out numerically clean at 1e6 reps.
        std::vector<double> raw(static_cast<size_t>(generic_reps) * r);
        for (long n = 0; n < generic_reps; ++n) {
            suite.sample(0, rng, x);
            for (int a = 0; a < r; ++a) {
                double v = suite.log_density(ord.order[a], x);
                raw[static_cast<size_t>(n) * r + a] = v;
                sum[a] += v;
            }
        }
        for (int a = 0; a < r; ++a) cs.mu[a] = sum[a] / generic_reps;
        cs.mu_se.resize(r);
        cs.sigma_se.assign(r * r, 0.0);
        for (int a = 0; a < r; ++a) {
            for (int b = a; b < r; ++b) {
                double s = 0, s2 = 0;
                for (long n = 0; n < generic_reps; ++n) {
                    double da = raw[static_cast<size_t>(n) * r + a] - cs.mu[a];
                    double db = raw[static_cast<size_t>(n) * r + b] - cs.mu[b];
                    s += da * db;
                    s2 += da * db * da * db;
                }
                double cov = s / (generic_reps - 1);
                cs.sigma[a * r + b] = cs.sigma[b * r + a] = cov;
                double var_of_prod = s2 / generic_reps - cov * cov;
                double se = std::sqrt(std::max(0.0, var_of_prod) / generic_reps);
                cs.sigma_se[a * r + b] = cs.sigma_se[b * r + a] = se;
            }
            cs.mu_se[a] =
                std::sqrt(cs.sigma[a * r + a] / static_cast<double>(generic_reps));
        }
    }
    cs.h_r = (r <= 3) ? gaussian_max_expectation_quadrature(cs.sigma, r)
                      : [&] {
                            Rng rng(generic_seed, 1);
                            return gaussian_max_expectation_mc(cs.sigma, r, 2000000, rng)
                                .first;
                        }();
    double i0min = rc.per_alt[ord.order[0] - 1].I0;
    cs.d_r = cs.h_r / (2.0 * std::sqrt(i0min));
    return cs;
}

double gaussian_max_expectation_quadrature(const std::vector<double>& sigma, int r) {
    if (r < 1) throw usage_error("r must be >= 1");
    check_covariance(sigma, r);
    if (r == 1) return 0.0;
    if (r > 3)
        throw config_error("quadrature form of the Gaussian max is limited to r <= 3");
    cholesky(sigma, r);  // positive-semidefiniteness gate
    for (int i = 0; i < r; ++i)
        if (!(sigma[i * r + i] > 0))
            throw domain_error("quadrature needs strictly positive variances");

    // E[max_i X_i] = sum_i E[X_i; X_i = max] with the inner probability
    // evaluated through the conditional (r-1)-variate normal CDF.
    auto integrand_term = [&](int i, double x) -> double {
        double si = std::sqrt(sigma[i * r + i]);
        double fi = norm_pdf(x / si) / si;
        if (fi == 0.0) return 0.0;
        double p;
        if (r == 2) {
            int j = 1 - i;
            double m = sigma[j * r + i] / sigma[i * r + i] * x;
            double v = sigma[j * r + j] - sigma[j * r + i] * sigma[i * r + j] / sigma[i * r + i];
            if (v <= 1e-14 * sigma[j * r + j])
                p = (x >= m) ? 1.0 : 0.0;
            else
                p = norm_cdf((x - m) / std::sqrt(v));
        } else {
            int j = (i + 1) % 3, k = (i + 2) % 3;
            double c = x / sigma[i * r + i];
            double mj = sigma[j * r + i] * c;
            double mk = sigma[k * r + i] * c;
            double vj = sigma[j * r + j] - sigma[j * r + i] * sigma[i * r + j] / sigma[i * r + i];
            double vk = sigma[k * r + k] - sigma[k * r + i] * sigma[i * r + k] / sigma[i * r + i];
            double cjk = sigma[j * r + k] - sigma[j * r + i] * sigma[i * r + k] / sigma[i * r + i];
            double floor_j = 1e-14 * std::max(sigma[j * r + j], 1e-300);
            double floor_k = 1e-14 * std::max(sigma[k * r + k], 1e-300);
            if (vj <= floor_j && vk <= floor_k) {
                p = (x >= mj && x >= mk) ? 1.0 : 0.0;
            } else if (vj <= floor_j) {
                p = (x >= mj) ? norm_cdf((x - mk) / std::sqrt(vk)) : 0.0;
            } else if (vk <= floor_k) {
                p = (x >= mk) ? norm_cdf((x - mj) / std::sqrt(vj)) : 0.0;
            } else {
                double rho = std::clamp(cjk / std::sqrt(vj * vk), -1.0, 1.0);
                p = bvn_cdf((x - mj) / std::sqrt(vj), (x - mk) / std::sqrt(vk), rho);
            }
        }
        return x * fi * p;
    };
    double total = 0;
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < r; ++i) {
        total += integrate([&](double x) { return integrand_term(i, x); }, -inf, inf,
                           1e-9);
    }
    return total;
}

std::pair<double, double> gaussian_max_expectation_mc(const std::vector<double>& sigma,
                                                      int r, long reps, Rng& rng) {
    if (r < 1) throw usage_error("r must be >= 1");
    check_covariance(sigma, r);
    if (reps < 100) throw config_error("gaussian max MC needs reps >= 100");
    if (r == 1) return {0.0, 0.0};
    std::vector<double> l = cholesky(sigma, r);
    std::vector<double> z(r), x(r);
    double s = 0, s2 = 0;
    for (long n = 0; n < reps; ++n) {
        for (int i = 0; i < r; ++i) z[i] = rng.normal();
        double m = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < r; ++i) {
            double v = 0;
            for (int k = 0; k <= i; ++k) v += l[i * r + k] * z[k];
            m = std::max(m, v);
        }
        s += m;
        s2 += m * m;
    }
    double n = static_cast<double>(reps);
    double mean = s / n;
    double se = std::sqrt(std::max(0.0, (s2 / n - mean * mean) / (n - 1)));
    return {mean, se};
}

Approx test_ess_under_h0(double logA, const RenewalConstants& rc, const Weights& q0,
                         const ClusterStats& cluster, const Ordering& ord) {
    if (!(logA > 0)) throw config_error("logA must be > 0");
    if (q0.K() != rc.K()) throw usage_error("weight size mismatch");
    int first = ord.order[0] - 1;
    double i0 = rc.per_alt[first].I0;
    Approx a;
    if (cluster.r <= 1) {
        a.value = (logA + rc.per_alt[first].kappa0 + q0.log_q[first]) / i0;
        a.remainder = RemainderClass::LittleO1;
    } else {
        a.value = (logA + 2.0 * cluster.d_r * std::sqrt(logA)) / i0;
        a.remainder = RemainderClass::UnresolvedConstant;
    }
    return a;
}

ErrorApprox error_approximations(double logB, double logA, const Weights& q0,
                                 const Weights& q1, const RenewalConstants& rc,
                                 const Ordering& ord) {
    if (q0.K() != rc.K() || q1.K() != rc.K()) throw usage_error("weight size mismatch");
    ErrorApprox ea;
    ea.type1_exact = {std::exp(std::log(q1.total) - logB), RemainderClass::ExactBound};
    double s = 0;
    for (int j = 0; j < rc.K(); ++j) s += q1.q[j] * rc.per_alt[j].gamma;
    ea.type1_corrected = {std::exp(std::log(s) - logB), RemainderClass::LittleO1};
    double lg0 = std::log(rc.per_alt[ord.order[0] - 1].gamma0);
    ea.type2_exact.resize(rc.K());
    ea.type2_corrected.resize(rc.K());
    for (int i = 0; i < rc.K(); ++i) {
        ea.type2_exact[i] = {std::exp(-logA - q0.log_q[i]), RemainderClass::ExactBound};
        ea.type2_corrected[i] = {std::exp(lg0 - logA - q0.log_q[i]),
                                 RemainderClass::LittleO1};
    }
    return ea;
}

std::vector<double> c_penalty(const Prior& p, const RenewalConstants& rc) {
    if (p.K() != rc.K()) throw usage_error("prior size mismatch");
    std::vector<double> logs(p.K());
    for (int j = 0; j < p.K(); ++j)
        logs[j] = std::log(p.p[j]) - std::log(rc.per_alt[j].I);
    double lse = log_sum_exp(logs);
    std::vector<double> c(p.K());
    for (int i = 0; i < p.K(); ++i) c[i] = lse - logs[i];
    return c;
}

std::vector<double> performance_loss(const Prior& p, const RenewalConstants& rc,
                                     double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw config_error("alpha must lie in (0,1)");
    std::vector<double> c = c_penalty(p, rc);
    std::vector<double> j(p.K());
    for (int i = 0; i < p.K(); ++i) {
        const ChannelConstants& cc = rc.per_alt[i];
        double denom = -std::log(alpha) + cc.kappa + std::log(cc.gamma);
        if (!(denom > 0)) {
            std::ostringstream os;
            os << "performance loss undefined: |log alpha| + kappa + log gamma = "
               << denom << " for alternative " << i + 1;
            throw domain_error(os.str());
        }
        j[i] = c[i] / denom;
    }
    return j;
}

double minimax_value(double alpha, const RenewalConstants& rc) {
    if (!(alpha > 0 && alpha < 1)) throw config_error("alpha must lie in (0,1)");
    std::vector<double> logs(rc.K());
    for (int j = 0; j < rc.K(); ++j)
        logs[j] = rc.per_alt[j].kappa + std::log(rc.per_alt[j].gamma);
    return -std::log(alpha) + log_sum_exp(logs);
}

}  // namespace seqtest
