#include "seqtest/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "seqtest/errors.hpp"

namespace seqtest {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw config_error("malformed JSON");
    return j;
}

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw config_error(std::string("missing numeric field \"") + key + "\"");
    return j.at(key).get<double>();
}

std::vector<double> require_array(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw config_error(std::string("missing array field \"") + key + "\"");
    std::vector<double> out;
    for (const json& v : j.at(key)) {
        if (!v.is_number())
            throw config_error(std::string("non-numeric entry in \"") + key + "\"");
        out.push_back(v.get<double>());
    }
    return out;
}

json weights_to_json(const Weights& w) { return json(w.q); }

}  // namespace

ModelSuite model_from_json(const std::string& text) {
    json j = parse(text);
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw config_error("model JSON needs a string field \"kind\"");
    std::string kind = j.at("kind").get<std::string>();
    if (kind != "multichannel")
        throw config_error("unknown model kind \"" + kind + "\"");
    if (!j.contains("channels") || !j.at("channels").is_array() ||
        j.at("channels").empty())
        throw config_error("model JSON needs a nonempty \"channels\" array");
    std::vector<ChannelFamily> channels;
    for (const json& c : j.at("channels")) {
        if (!c.is_object() || !c.contains("family") || !c.at("family").is_string())
            throw config_error("each channel needs a string field \"family\"");
        ChannelFamily ch;
        ch.kind = family_from_string(c.at("family").get<std::string>());
        ch.theta = require_number(c, "theta");
        channels.push_back(ch);
    }
    return ModelSuite::multichannel(std::move(channels));
}

std::string model_to_json(const ModelSuite& suite) {
    if (!suite.is_multichannel())
        throw usage_error("only multichannel suites serialize to JSON");
    json channels = json::array();
    for (const ChannelFamily& ch : suite.channels()) {
        channels.push_back(
            {{"family", family_to_string(ch.kind)}, {"theta", ch.theta}});
    }
    json j{{"kind", "multichannel"}, {"channels", channels}};
    return j.dump();
}

Design design_from_json(const std::string& text) {
    json j = parse(text);
    if (!j.is_object()) throw config_error("design JSON must be an object");
    Design d;
    d.logA = require_number(j, "logA");
    d.logB = require_number(j, "logB");
    if (!(d.logA > 0) || !(d.logB > 0))
        throw config_error("design thresholds must satisfy logA > 0 and logB > 0");
    d.q0 = Weights(require_array(j, "q0"));
    d.q1 = Weights(require_array(j, "q1"));
    if (d.q0.K() != d.q1.K())
        throw config_error("q0 and q1 must have the same length");
    if (j.contains("p")) d.p = require_array(j, "p");
    return d;
}

std::string design_to_json(const Design& d) {
    json j{{"logA", d.logA},
           {"logB", d.logB},
           {"q0", weights_to_json(d.q0)},
           {"q1", weights_to_json(d.q1)},
           {"p", json(d.p)}};
    return j.dump();
}

std::string sim_report_to_json(const SimReport& r) {
    json j{{"replications", r.replications},
           {"ess_mean", r.ess_mean},
           {"ess_stderr", r.ess_stderr},
           {"ess_valid", r.ess_valid},
           {"freq_d0", r.freq_d0},
           {"freq_d1", r.freq_d1},
           {"type1_estimate", r.type1_estimate},
           {"type1_stderr", r.type1_stderr},
           {"type1_zero_hits", r.type1_zero_hits},
           {"type2_estimate", json(r.type2_estimate)},
           {"type2_stderr", json(r.type2_stderr)},
           {"truncation_count", r.truncation_count},
           {"kl_accumulated", json(r.kl_accumulated)}};
    return j.dump();
}

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string metadata_comment(std::string_view config_string) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "# artifact_version=%s config_hash=%016llx",
                  kArtifactVersion,
                  static_cast<unsigned long long>(fnv1a64(config_string)));
    return buf;
}

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    // %.17g always round-trips but is noisy; try shorter forms first.
    for (int prec = 10; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

Csv::Csv(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw usage_error("CSV needs a header");
}

void Csv::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
        throw usage_error("CSV row width does not match the header");
    rows_.push_back(std::move(cells));
}

std::string Csv::str(std::string_view config_string) const {
    std::ostringstream os;
    os << metadata_comment(config_string) << '\n';
    for (size_t i = 0; i < header_.size(); ++i)
        os << header_[i] << (i + 1 < header_.size() ? ',' : '\n');
    for (const std::vector<std::string>& row : rows_) {
        for (size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? ',' : '\n');
    }
    return os.str();
}

}  // namespace seqtest
