#include "seqtest/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "seqtest/errors.hpp"
#include "seqtest/special.hpp"

namespace seqtest {

namespace {

constexpr long kSeriesMaxTerms = 100000;

[[noreturn]] void series_failure(const char* what, double achieved, double tol) {
    std::ostringstream os;
    os << what << ": series tail bound " << achieved << " did not reach tolerance "
       << tol << " within " << kSeriesMaxTerms << " terms";
    throw numeric_error(os.str());
}

// ---- exponential channel: Z_n = -n log(1+t) + (t/(1+t)) G with G ~ Gamma(n,1)
// under P_0 and Z_n = t G' - n log(1+t), G' ~ Gamma(n,1), under P_i. ----

struct ExpSeriesParams {
    double a0;     // c_n / n: threshold-per-step for P_0(Z_n > 0), > 1
    double ai;     // threshold-per-step for P_i(Z_n <= 0), < 1
    double rho0;   // Chernoff rate exp(-(a0 - 1 - log a0))
    double rhoi;   // exp(-(ai - 1 - log ai))
};

ExpSeriesParams exp_series_params(double theta) {
    ExpSeriesParams p;
    double lg = std::log1p(theta);
    p.a0 = (1.0 + theta) * lg / theta;
    p.ai = lg / theta;
    p.rho0 = std::exp(-(p.a0 - 1.0 - std::log(p.a0)));
    p.rhoi = std::exp(-(p.ai - 1.0 - std::log(p.ai)));
    return p;
}

double exp_l_series(double theta, double tol) {
    const auto p = exp_series_params(theta);
    double s = 0.0;
    for (long n = 1; n <= kSeriesMaxTerms; ++n) {
        double dn = static_cast<double>(n);
        double term = (gamma_q(dn, dn * p.a0) + gamma_p(dn, dn * p.ai)) / dn;
        s += term;
        double tail = (std::pow(p.rho0, dn + 1) / (1.0 - p.rho0) +
                       std::pow(p.rhoi, dn + 1) / (1.0 - p.rhoi)) /
                      (dn + 1);
        if (term < tol && tail < tol) return std::exp(-s);
    }
    series_failure("exponential L-number", std::numeric_limits<double>::quiet_NaN(), tol);
}

// Mean limiting overshoot on the lower boundary via the ladder-height
// identity kappa0 = (Var_0 Z + I0^2)/(2 I0) - sum_n E_0[Z_n^+]/n, with
// E_0[Z_n^+] = (t/(1+t)) [n Q(n+1, c_n) - c_n Q(n, c_n)], c_n = n a0.
double exp_kappa0_series(double theta, double tol) {
    const auto p = exp_series_params(theta);
    double lg = std::log1p(theta);
    double i0 = lg - theta / (1.0 + theta);
    double coef = theta / (1.0 + theta);
    double var0 = coef * coef;  // Var_0(Z_1) = coef^2 Var(X), Var(X) = 1
    double head = (var0 + i0 * i0) / (2.0 * i0);
    double sstar = 1.0 - 1.0 / p.a0;  // optimal Chernoff tilt for the tail bound
    double s = 0.0;
    for (long n = 1; n <= kSeriesMaxTerms; ++n) {
        double dn = static_cast<double>(n);
        double cn = dn * p.a0;
        double term = coef * (dn * gamma_q(dn + 1, cn) - cn * gamma_q(dn, cn)) / dn;
        s += term;
        double tail =
            (coef / sstar) * std::pow(p.rho0, dn + 1) / ((dn + 1) * (1.0 - p.rho0));
        if (std::fabs(term) < tol && tail < tol) return head - s;
    }
    series_failure("exponential kappa0", std::numeric_limits<double>::quiet_NaN(), tol);
}

// ---- Gaussian channel: Z_n ~ N(n theta^2/2, n theta^2) under P_i and
// N(-n theta^2/2, n theta^2) under P_0; both crossing probabilities reduce to
// Phi(-(theta/2) sqrt(n)). Terms are bounded by exp(-n theta^2/8). ----

double gauss_l_series(double theta, double tol) {
    double rho = std::exp(-theta * theta / 8.0);
    double s = 0.0;
    for (long n = 1; n <= kSeriesMaxTerms; ++n) {
        double dn = static_cast<double>(n);
        double term = 2.0 * norm_cdf(-0.5 * theta * std::sqrt(dn)) / dn;
        s += term;
        double tail = std::pow(rho, dn + 1) / ((dn + 1) * (1.0 - rho));
        if (term < tol && tail < tol) return std::exp(-s);
    }
    series_failure("gaussian L-number", std::numeric_limits<double>::quiet_NaN(), tol);
}

double gauss_kappa_series(double theta, double tol) {
    double rho = std::exp(-theta * theta / 8.0);
    double s = 0.0;
    for (long n = 1; n <= kSeriesMaxTerms; ++n) {
        double dn = static_cast<double>(n);
        double arg = 0.5 * theta * std::sqrt(dn);
        double term = norm_pdf(arg) / std::sqrt(dn) - 0.5 * theta * norm_cdf(-arg);
        s += term;
        double tail = std::pow(rho, dn + 1) / ((1.0 - rho) * std::sqrt(dn + 1) * kSqrtTwoPi);
        if (term < tol && tail < tol)
            return 1.0 + theta * theta / 4.0 - theta * s;
    }
    series_failure("gaussian kappa", std::numeric_limits<double>::quiet_NaN(), tol);
}

constexpr double kGaussSeriesTol = 1e-12;

std::pair<double, double> generic_kl_quadrature(const ModelSuite& suite, int i,
                                                double rel_tol) {
    const GenericModel& g = suite.generic_model();
    if (g.dim != 1)
        throw config_error("generic KL quadrature supports 1-D observations only");
    if (!(g.quad_hi > g.quad_lo))
        throw config_error("generic suite must declare a quadrature interval");
    auto ld = [&](int j, double x) {
        return g.log_density(j, std::span<const double>(&x, 1));
    };
    double I = integrate(
        [&](double x) {
            double li = ld(i, x), l0 = ld(0, x);
            return std::exp(li) * (li - l0);
        },
        g.quad_lo, g.quad_hi, rel_tol);
    double I0 = integrate(
        [&](double x) {
            double li = ld(i, x), l0 = ld(0, x);
            return std::exp(l0) * (l0 - li);
        },
        g.quad_lo, g.quad_hi, rel_tol);
    if (!(I > 0) || !(I0 > 0) || !std::isfinite(I) || !std::isfinite(I0)) {
        std::ostringstream os;
        os << "KL numbers must be positive and finite (got I=" << I << ", I0=" << I0
           << ")";
        throw numeric_error(os.str());
    }
    return {I, I0};
}

}  // namespace

std::pair<double, double> kl_numbers(const ModelSuite& suite, int i, double rel_tol) {
    if (i < 1 || i > suite.K()) throw usage_error("alternative index out of range");
    if (!suite.is_multichannel()) return generic_kl_quadrature(suite, i, rel_tol);
    const ChannelFamily& ch = suite.channels()[i - 1];
    switch (ch.kind) {
        case Family::ExponentialScale: {
            double lg = std::log1p(ch.theta);
            return {ch.theta - lg, lg - ch.theta / (1.0 + ch.theta)};
        }
        case Family::GaussianMeanShift: {
            double v = 0.5 * ch.theta * ch.theta;
            return {v, v};
        }
    }
    throw usage_error("unknown channel family");
}

std::pair<double, double> overshoot_constants_closed(const ChannelFamily& ch) {
    if (!(ch.theta > 0)) throw config_error("theta must be > 0");
    switch (ch.kind) {
        case Family::ExponentialScale:
            // Ascending ladder overshoot is exactly Exp(mean theta) by the
            // memoryless property, hence gamma = 1/(1+theta), kappa = theta.
            return {1.0 / (1.0 + ch.theta), ch.theta};
        case Family::GaussianMeanShift: {
            double L = gauss_l_series(ch.theta, kGaussSeriesTol);
            double I = 0.5 * ch.theta * ch.theta;
            return {L / I, gauss_kappa_series(ch.theta, kGaussSeriesTol)};
        }
    }
    throw usage_error("unknown channel family");
}

std::pair<double, double> overshoot_constants_closed_lower(const ChannelFamily& ch) {
    if (!(ch.theta > 0)) throw config_error("theta must be > 0");
    switch (ch.kind) {
        case Family::ExponentialScale: {
            double L = exp_l_series(ch.theta, kGaussSeriesTol);
            double I0 = std::log1p(ch.theta) - ch.theta / (1.0 + ch.theta);
            return {L / I0, exp_kappa0_series(ch.theta, kGaussSeriesTol)};
        }
        case Family::GaussianMeanShift:
            // Z is symmetric between the two measures, so the lower-boundary
            // overshoot law equals the upper one.
            return overshoot_constants_closed(ch);
    }
    throw usage_error("unknown channel family");
}

double l_number_series(const ChannelFamily& ch, double tol) {
    if (!(tol > 0)) throw config_error("series tolerance must be > 0");
    switch (ch.kind) {
        case Family::ExponentialScale:
            return exp_l_series(ch.theta, tol);
        case Family::GaussianMeanShift:
            return gauss_l_series(ch.theta, tol);
    }
    throw usage_error("unknown channel family");
}

double l_number_series(const ModelSuite& suite, int i, double tol) {
    if (i < 1 || i > suite.K()) throw usage_error("alternative index out of range");
    if (!suite.is_multichannel())
        throw usage_error("series L-number needs a built-in family; use l_number_series_mc");
    return l_number_series(suite.channels()[i - 1], tol);
}

double l_number_series_mc(const ModelSuite& suite, int i, long reps, long n_max,
                          Rng& rng) {
    if (i < 1 || i > suite.K()) throw usage_error("alternative index out of range");
    if (reps < 100) throw config_error("l_number_series_mc needs reps >= 100");
    // Shared sample reuse: one walk per replication per measure, extended to
    // n_max, contributes to every term of the series.
    std::vector<double> x(suite.dim());
    std::vector<long> count0(n_max, 0), counti(n_max, 0);
    for (long r = 0; r < reps; ++r) {
        double z = 0.0;
        for (long n = 0; n < n_max; ++n) {
            suite.sample(0, rng, x);
            z += suite.loglr_increment(i, x);
            if (z > 0) ++count0[n];
        }
        z = 0.0;
        for (long n = 0; n < n_max; ++n) {
            suite.sample(i, rng, x);
            z += suite.loglr_increment(i, x);
            if (z <= 0) ++counti[n];
        }
    }
    double s = 0.0;
    long zero_run = 0;
    for (long n = 0; n < n_max; ++n) {
        long hits = count0[n] + counti[n];
        s += static_cast<double>(hits) / static_cast<double>(reps) /
             static_cast<double>(n + 1);
        zero_run = (hits == 0) ? zero_run + 1 : 0;
        if (zero_run >= 30 && n >= 50) break;
    }
    return std::exp(-s);
}

OvershootEstimate overshoot_mc(const ModelSuite& suite, int i, double c, long reps,
                               Side side, Rng& rng) {
    if (i < 1 || i > suite.K()) throw usage_error("alternative index out of range");
    if (!(c > 0)) throw config_error("boundary level must be > 0");
    if (reps < 1000) throw config_error("overshoot_mc needs reps >= 1000");
    OvershootEstimate est;
    est.boundary = c;
    est.reps = reps;
    est.overshoots.resize(reps);
    std::vector<double> x(suite.dim());
    const int truth = (side == Side::Upper) ? i : 0;
    for (long r = 0; r < reps; ++r) {
        double z = 0.0;
        if (side == Side::Upper) {
            while (z < c) {
                suite.sample(truth, rng, x);
                z += suite.loglr_increment(i, x);
            }
            est.overshoots[r] = z - c;
        } else {
            while (z > -c) {
                suite.sample(truth, rng, x);
                z += suite.loglr_increment(i, x);
            }
            est.overshoots[r] = -(z + c);
        }
    }
    double sk = 0, sk2 = 0, sg = 0, sg2 = 0;
    for (double v : est.overshoots) {
        double g = std::exp(-v);
        sk += v;
        sk2 += v * v;
        sg += g;
        sg2 += g * g;
    }
    double n = static_cast<double>(reps);
    est.kappa_hat = sk / n;
    est.gamma_hat = sg / n;
    est.kappa_se = std::sqrt(std::max(0.0, (sk2 / n - est.kappa_hat * est.kappa_hat) / (n - 1)));
    est.gamma_se = std::sqrt(std::max(0.0, (sg2 / n - est.gamma_hat * est.gamma_hat) / (n - 1)));
    return est;
}

RenewalConstants compute_constants(const ModelSuite& suite, double series_tol,
                                   uint64_t generic_seed) {
    RenewalConstants rc;
    rc.per_alt.resize(suite.K());
    for (int i = 1; i <= suite.K(); ++i) {
        ChannelConstants& cc = rc.per_alt[i - 1];
        auto [I, I0] = kl_numbers(suite, i);
        cc.I = I;
        cc.I0 = I0;
        if (suite.is_multichannel()) {
            const ChannelFamily& ch = suite.channels()[i - 1];
            auto [g, k] = overshoot_constants_closed(ch);
            auto [g0, k0] = overshoot_constants_closed_lower(ch);
            cc.gamma = g;
            cc.kappa = k;
            cc.gamma0 = g0;
            cc.kappa0 = k0;
            cc.L = l_number_series(ch, series_tol);
        } else {
            Rng rng(generic_seed, static_cast<uint64_t>(i));
            cc.L = l_number_series_mc(suite, i, 20000, 3000, rng);
            cc.gamma = cc.L / cc.I;
            cc.gamma0 = cc.L / cc.I0;
            double c = 50.0 * std::max(1.0, cc.I);
            cc.kappa = overshoot_mc(suite, i, c, 20000, Side::Upper, rng).kappa_hat;
            cc.kappa0 = overshoot_mc(suite, i, c, 20000, Side::Lower, rng).kappa_hat;
        }
    }
    return rc;
}

Ordering order_alternatives(const RenewalConstants& rc, double rel_tol) {
    if (rc.per_alt.empty()) throw usage_error("empty constants table");
    Ordering o;
    o.order.resize(rc.per_alt.size());
    std::iota(o.order.begin(), o.order.end(), 1);
    std::stable_sort(o.order.begin(), o.order.end(), [&](int a, int b) {
        return rc.per_alt[a - 1].I0 < rc.per_alt[b - 1].I0;
    });
    double i0min = rc.per_alt[o.order[0] - 1].I0;
    o.r = 0;
    for (int idx : o.order) {
        if (rc.per_alt[idx - 1].I0 <= i0min * (1.0 + rel_tol)) ++o.r;
    }
    // Within the minimal block, report indices in natural order so "the
    // smallest minimizing index" is order[0].
    std::sort(o.order.begin(), o.order.begin() + o.r);
    return o;
}

}  // namespace seqtest
