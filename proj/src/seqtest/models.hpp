#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "seqtest/rng.hpp"

namespace seqtest {

// Built-in one-parameter channel families for the multichannel (slippage)
// construction: under the alternative for channel i, coordinate i is
// distributed with parameter theta_i and all other coordinates keep their
// null distribution.
enum class Family {
    ExponentialScale,   // null Exp(mean 1), signal Exp(mean 1+theta)
    GaussianMeanShift,  // null N(0,1), signal N(theta,1)
};

struct ChannelFamily {
    Family kind;
    double theta;  // must be > 0: theta = 0 makes the alternative coincide with the null
};

// User-supplied model: K+1 log densities on a common support of dimension
// `dim`, with a sampler per hypothesis. `quad_lo/hi` declare a 1-D
// integration interval for KL quadrature (only meaningful when dim == 1).
struct GenericModel {
    int K = 0;
    int dim = 1;
    std::function<double(int hypothesis, std::span<const double> x)> log_density;
    std::function<void(int hypothesis, Rng& rng, std::span<double> out)> sample;
    std::function<bool(std::span<const double> x)> in_support;
    double quad_lo = 0.0;
    double quad_hi = 0.0;
};

// A simple null f_0 versus K alternatives f_1..f_K. Immutable once built and
// safe to share across threads; all sampling takes an explicit generator.
class ModelSuite {
  public:
    static ModelSuite multichannel(std::vector<ChannelFamily> channels);
    static ModelSuite generic(GenericModel model);

    int K() const { return K_; }
    int dim() const { return dim_; }
    bool is_multichannel() const { return !channels_.empty(); }
    const std::vector<ChannelFamily>& channels() const;

    // log(f_i(x)/f_0(x)) for alternative i in 1..K. For multichannel models
    // only coordinate i-1 contributes.
    double loglr_increment(int i, std::span<const double> x) const;

    // log f_j(x) for hypothesis j in 0..K.
    double log_density(int hypothesis, std::span<const double> x) const;

    // One i.i.d. draw from f_truth into `out` (length dim()).
    void sample(int truth, Rng& rng, std::span<double> out) const;

    const GenericModel& generic_model() const;

  private:
    ModelSuite() = default;
    int K_ = 0;
    int dim_ = 0;
    std::vector<ChannelFamily> channels_;       // empty for generic suites
    std::shared_ptr<const GenericModel> gen_;   // null for multichannel suites
    // Cached affine coefficients: channel log-likelihood ratio is a + b*x.
    std::vector<double> lr_a_, lr_b_;
};

// Channel-level closed forms shared by models/renewal.
double channel_loglr(const ChannelFamily& ch, double x);
double channel_null_logpdf(const ChannelFamily& ch, double x);
double channel_signal_logpdf(const ChannelFamily& ch, double x);
double channel_sample_null(const ChannelFamily& ch, Rng& rng);
double channel_sample_signal(const ChannelFamily& ch, Rng& rng);

Family family_from_string(const std::string& name);
std::string family_to_string(Family f);

}  // namespace seqtest
