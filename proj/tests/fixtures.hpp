#pragma once

// Frozen numerical references used across the test suite. Every value here
// was computed independently of this codebase (closed forms evaluated in a
// separate environment with its own incomplete-gamma / normal-CDF
// implementations) and is asserted against the library at tight tolerance.

#include <cmath>
#include <vector>

#include "seqtest/models.hpp"

namespace fixtures {

struct Constants {
    double theta, I, I0, gamma, gamma0, kappa, kappa0, L;
};

// Exponential scale family, null mean 1 versus mean 1+theta.
inline constexpr Constants kExp[3] = {
    {0.5, 0.09453489189183562, 0.07213177477483107, 2.0 / 3.0,
     0.8737239788978197, 0.5, 0.1395945435030188, 0.06302326126157888},
    {1.0, 0.3068528194400547, 0.1931471805599453, 0.5, 0.794349724781086, 1.0,
     0.24374845267053868, 0.15342640972086755},
    {2.0, 0.9013877113318904, 0.43194562200144293, 1.0 / 3.0,
     0.6956027683572058, 2.0, 0.39710752851267944, 0.30046257044568503},
};

// Gaussian mean-shift family, N(0,1) versus N(theta,1); symmetric, so the
// lower-boundary constants equal the upper ones and I0 = I.
inline constexpr Constants kGauss[3] = {
    {0.5, 0.125, 0.125, 0.7476150103327414, 0.7476150103327414,
     0.32384360304140947, 0.32384360304140947, 0.09345187629263721},
    {1.0, 0.5, 0.5, 0.5603702284201123, 0.5603702284201123,
     0.7179372880346997, 0.7179372880346997, 0.28018511421313186},
    {2.0, 2.0, 2.0, 0.3204346419331434, 0.3204346419331434,
     1.7472547306261992, 1.7472547306261992, 0.6408692838719857},
};

inline constexpr double kSqrtPiInv = 0.5641895835477563;      // 1/sqrt(pi)
inline constexpr double kMax3Expect = 0.8462843753216345;     // 1.5/sqrt(pi)

inline seqtest::ModelSuite exp_suite() {
    using seqtest::ChannelFamily;
    using seqtest::Family;
    return seqtest::ModelSuite::multichannel({{Family::ExponentialScale, 0.5},
                                              {Family::ExponentialScale, 1.0},
                                              {Family::ExponentialScale, 2.0}});
}

inline seqtest::ModelSuite gauss_suite() {
    using seqtest::ChannelFamily;
    using seqtest::Family;
    return seqtest::ModelSuite::multichannel({{Family::GaussianMeanShift, 0.5},
                                              {Family::GaussianMeanShift, 1.0},
                                              {Family::GaussianMeanShift, 2.0}});
}

inline seqtest::ModelSuite symmetric_gauss_suite() {
    using seqtest::ChannelFamily;
    using seqtest::Family;
    return seqtest::ModelSuite::multichannel({{Family::GaussianMeanShift, 1.0},
                                              {Family::GaussianMeanShift, 1.0},
                                              {Family::GaussianMeanShift, 1.0}});
}

inline bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline bool rel_close(double a, double b, double rel) {
    return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace fixtures
