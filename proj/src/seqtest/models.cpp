#include "seqtest/models.hpp"

#include <cmath>
#include <sstream>

#include "seqtest/errors.hpp"
#include "seqtest/special.hpp"

namespace seqtest {

namespace {
constexpr double kHalfLogTwoPi = 0.91893853320467274178032973640562;

void check_exponential_support(double x) {
    if (x < 0.0) {
        std::ostringstream os;
        os << "exponential channel observation outside support: x = " << x;
        throw domain_error(os.str());
    }
}
}  // namespace

double channel_loglr(const ChannelFamily& ch, double x) {
    switch (ch.kind) {
        case Family::ExponentialScale:
            check_exponential_support(x);
            return -std::log1p(ch.theta) + x * ch.theta / (1.0 + ch.theta);
        case Family::GaussianMeanShift:
            return ch.theta * x - 0.5 * ch.theta * ch.theta;
    }
    throw usage_error("unknown channel family");
}

double channel_null_logpdf(const ChannelFamily& ch, double x) {
    switch (ch.kind) {
        case Family::ExponentialScale:
            check_exponential_support(x);
            return -x;
        case Family::GaussianMeanShift:
            return -0.5 * x * x - kHalfLogTwoPi;
    }
    throw usage_error("unknown channel family");
}

double channel_signal_logpdf(const ChannelFamily& ch, double x) {
    return channel_null_logpdf(ch, x) + channel_loglr(ch, x);
}

double channel_sample_null(const ChannelFamily& ch, Rng& rng) {
    switch (ch.kind) {
        case Family::ExponentialScale:
            return rng.exponential();
        case Family::GaussianMeanShift:
            return rng.normal();
    }
    throw usage_error("unknown channel family");
}

double channel_sample_signal(const ChannelFamily& ch, Rng& rng) {
    switch (ch.kind) {
        case Family::ExponentialScale:
            return (1.0 + ch.theta) * rng.exponential();
        case Family::GaussianMeanShift:
            return ch.theta + rng.normal();
    }
    throw usage_error("unknown channel family");
}

ModelSuite ModelSuite::multichannel(std::vector<ChannelFamily> channels) {
    if (channels.empty()) throw config_error("multichannel suite needs at least one channel");
    for (size_t i = 0; i < channels.size(); ++i) {
        if (!(channels[i].theta > 0.0)) {
            std::ostringstream os;
            os << "channel " << i + 1 << ": theta must be > 0 (got " << channels[i].theta
               << "); theta = 0 would make the alternative coincide with the null";
            throw config_error(os.str());
        }
    }
    ModelSuite m;
    m.K_ = static_cast<int>(channels.size());
    m.dim_ = m.K_;
    m.channels_ = std::move(channels);
    m.lr_a_.reserve(m.K_);
    m.lr_b_.reserve(m.K_);
    for (const ChannelFamily& ch : m.channels_) {
        if (ch.kind == Family::ExponentialScale) {
            m.lr_a_.push_back(-std::log1p(ch.theta));
            m.lr_b_.push_back(ch.theta / (1.0 + ch.theta));
        } else {
            m.lr_a_.push_back(-0.5 * ch.theta * ch.theta);
            m.lr_b_.push_back(ch.theta);
        }
    }
    return m;
}

ModelSuite ModelSuite::generic(GenericModel model) {
    if (model.K < 1) throw config_error("generic suite needs K >= 1 alternatives");
    if (model.dim < 1) throw config_error("generic suite needs dim >= 1");
    if (!model.log_density || !model.sample)
        throw config_error("generic suite needs log_density and sample callables");
    ModelSuite m;
    m.K_ = model.K;
    m.dim_ = model.dim;
    m.gen_ = std::make_shared<const GenericModel>(std::move(model));
    return m;
}

const std::vector<ChannelFamily>& ModelSuite::channels() const {
    if (!is_multichannel()) throw usage_error("channels() requires a multichannel suite");
    return channels_;
}

const GenericModel& ModelSuite::generic_model() const {
    if (!gen_) throw usage_error("generic_model() requires a generic suite");
    return *gen_;
}

double ModelSuite::loglr_increment(int i, std::span<const double> x) const {
    if (i < 1 || i > K_) {
        std::ostringstream os;
        os << "alternative index " << i << " outside 1.." << K_;
        throw usage_error(os.str());
    }
    if (static_cast<int>(x.size()) != dim_)
        throw usage_error("observation dimension mismatch");
    if (is_multichannel()) {
        double xi = x[i - 1];
        if (channels_[i - 1].kind == Family::ExponentialScale)
            check_exponential_support(xi);
        return lr_a_[i - 1] + lr_b_[i - 1] * xi;
    }
    if (gen_->in_support && !gen_->in_support(x))
        throw domain_error("observation outside declared support");
    return gen_->log_density(i, x) - gen_->log_density(0, x);
}

double ModelSuite::log_density(int hypothesis, std::span<const double> x) const {
    if (hypothesis < 0 || hypothesis > K_)
        throw usage_error("hypothesis index outside 0..K");
    if (static_cast<int>(x.size()) != dim_)
        throw usage_error("observation dimension mismatch");
    if (!is_multichannel()) {
        if (gen_->in_support && !gen_->in_support(x))
            throw domain_error("observation outside declared support");
        return gen_->log_density(hypothesis, x);
    }
    double s = 0.0;
    for (int k = 0; k < K_; ++k) s += channel_null_logpdf(channels_[k], x[k]);
    if (hypothesis > 0) s += channel_loglr(channels_[hypothesis - 1], x[hypothesis - 1]);
    return s;
}

void ModelSuite::sample(int truth, Rng& rng, std::span<double> out) const {
    if (truth < 0 || truth > K_) throw usage_error("truth index outside 0..K");
    if (static_cast<int>(out.size()) != dim_)
        throw usage_error("observation buffer dimension mismatch");
    if (!is_multichannel()) {
        gen_->sample(truth, rng, out);
        return;
    }
    for (int k = 0; k < K_; ++k) {
        out[k] = (truth == k + 1) ? channel_sample_signal(channels_[k], rng)
                                  : channel_sample_null(channels_[k], rng);
    }
}

Family family_from_string(const std::string& name) {
    if (name == "exponential") return Family::ExponentialScale;
    if (name == "gaussian") return Family::GaussianMeanShift;
    throw config_error("unknown channel family \"" + name +
                       "\" (expected \"exponential\" or \"gaussian\")");
}

std::string family_to_string(Family f) {
    return f == Family::ExponentialScale ? "exponential" : "gaussian";
}

}  // namespace seqtest
