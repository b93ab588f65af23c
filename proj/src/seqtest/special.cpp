#include "seqtest/special.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <sstream>

#include "seqtest/errors.hpp"

namespace seqtest {

double gamma_p(double a, double x) { return boost::math::gamma_p(a, x); }

double gamma_q(double a, double x) { return boost::math::gamma_q(a, x); }

double log_sum_exp(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

namespace {

// Gauss-Legendre nodes/weights used by the Drezner-Wesolowsky/Genz scheme.
constexpr double kW6[] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr double kX6[] = {0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
constexpr double kW12[] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                           0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
constexpr double kX12[] = {0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                           0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
constexpr double kW20[] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                           0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                           0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                           0.1527533871307259};
constexpr double kX20[] = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                           0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                           0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                           0.07652652113349733};

// Upper-orthant probability P(X > h, Y > k) for standard bivariate normal
// with correlation r; Genz's refinement of the Drezner-Wesolowsky method
// (double precision, ~1e-15).
double bvn_upper(double h, double k, double r) {
    const double* w;
    const double* x;
    int n;
    double ar = std::fabs(r);
    if (ar < 0.3) {
        n = 3, w = kW6, x = kX6;
    } else if (ar < 0.75) {
        n = 6, w = kW12, x = kX12;
    } else {
        n = 10, w = kW20, x = kX20;
    }
    double hk = h * k;
    double bvn = 0.0;
    if (ar < 0.925) {
        double hs = (h * h + k * k) / 2;
        double asr = std::asin(r) / 2;
        for (int i = 0; i < n; ++i) {
            for (int sgn = -1; sgn <= 1; sgn += 2) {
                double sn = std::sin(asr * (1.0 + sgn * x[i]));
                bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        bvn = bvn * asr / kTwoPi + norm_cdf(-h) * norm_cdf(-k);
    } else {
        if (r < 0) {
            k = -k;
            hk = -hk;
        }
        if (ar < 1) {
            double as = (1 - r) * (1 + r);
            double a = std::sqrt(as);
            double bs = (h - k) * (h - k);
            double c = (4 - hk) / 8;
            double d = (12 - hk) / 16;
            double asr = -(bs / as + hk) / 2;
            if (asr > -100)
                bvn = a * std::exp(asr) *
                      (1 - c * (bs - as) * (1 - d * bs / 5) / 3 + c * d * as * as / 5);
            if (-hk < 100) {
                double b = std::sqrt(bs);
                double sp = kSqrtTwoPi * norm_cdf(-b / a);
                bvn -= std::exp(-hk / 2) * sp * b * (1 - c * bs * (1 - d * bs / 5) / 3);
            }
            a /= 2;
            for (int i = 0; i < n; ++i) {
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    double t = a * (1.0 + sgn * x[i]);
                    double xs = t * t;
                    double rs = std::sqrt(1 - xs);
                    double asr1 = -(bs / xs + hk) / 2;
                    if (asr1 > -100) {
                        double sp1 = 1 + c * xs * (1 + d * xs);
                        double ep = std::exp(-hk * (1 - rs) / (2 * (1 + rs))) / rs;
                        bvn += a * w[i] * std::exp(asr1) * (ep - sp1);
                    }
                }
            }
            bvn = -bvn / kTwoPi;
        }
        if (r > 0) {
            bvn += norm_cdf(-std::max(h, k));
        } else {
            bvn = -bvn;
            if (k > h) bvn += norm_cdf(k) - norm_cdf(h);
        }
    }
    return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace

double bvn_cdf(double h, double k, double rho) {
    if (!(rho >= -1.0 && rho <= 1.0))
        throw domain_error("bvn_cdf: correlation outside [-1,1]");
    if (rho >= 1.0) return norm_cdf(std::min(h, k));
    if (rho <= -1.0) {
        double p = norm_cdf(h) + norm_cdf(k) - 1.0;
        return p > 0.0 ? p : 0.0;
    }
    return bvn_upper(-h, -k, rho);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 15, rel_tol, &err);
    double scale = std::max(std::fabs(v), 1e-300);
    if (err / scale > rel_tol * 10) {
        std::ostringstream os;
        os << "quadrature did not converge: requested rel tol " << rel_tol
           << ", achieved " << err / scale;
        throw numeric_error(os.str());
    }
    return v;
}

}  // namespace seqtest
