// Exercises the shared library strictly through the public C header — no
// internal headers, so this doubles as a check that the exported surface is
// self-sufficient for a foreign-language binding.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "seqtest.h"

namespace {

const char* kExpModel =
    "{\"kind\":\"multichannel\",\"channels\":["
    "{\"family\":\"exponential\",\"theta\":0.5},"
    "{\"family\":\"exponential\",\"theta\":1.0},"
    "{\"family\":\"exponential\",\"theta\":2.0}]}";

struct ModelHandle {
    seqtest_model* m = nullptr;
    ~ModelHandle() { seqtest_model_free(m); }
};

struct CStr {
    char* s = nullptr;
    ~CStr() { seqtest_string_free(s); }
    std::string str() const { return s ? std::string(s) : std::string(); }
};

seqtest_model* make_model() {
    seqtest_model* m = nullptr;
    REQUIRE(seqtest_model_create_json(kExpModel, &m) == SEQTEST_OK);
    REQUIRE(m != nullptr);
    return m;
}

std::string make_design_json(seqtest_model* m, double alpha = 1e-4,
                             const char* rule = "corrected") {
    CStr js;
    REQUIRE(seqtest_emit_design_json(m, "kl", rule, alpha, 1e-2, "formula",
                                     &js.s) == SEQTEST_OK);
    return js.str();
}

// Tiny field scraper so this file does not need a JSON library: finds
// "name":<number>.
double json_number(const std::string& js, const std::string& name) {
    auto pos = js.find("\"" + name + "\":");
    REQUIRE(pos != std::string::npos);
    return std::strtod(js.c_str() + pos + name.size() + 3, nullptr);
}

}  // namespace

TEST_CASE("version and error-state basics") {
    CHECK(std::string(seqtest_version()) == "0.1.0");
    seqtest_string_free(nullptr);  // must be a no-op

    seqtest_model* m = nullptr;
    CHECK(seqtest_model_create_json("{broken", &m) == SEQTEST_ERR_CONFIG);
    CHECK(m == nullptr);
    CHECK(std::strlen(seqtest_last_error()) > 0);
    CHECK(seqtest_model_create_json(nullptr, &m) == SEQTEST_ERR_INVALID_ARGUMENT);
    CHECK(seqtest_model_channels(nullptr) == -1);
}

TEST_CASE("model handle: channels, loglr, constants, ordering") {
    ModelHandle h{make_model()};
    CHECK(seqtest_model_channels(h.m) == 3);

    double x[3] = {0.0, 2.0, 0.0};
    double out = 0;
    CHECK(seqtest_model_loglr(h.m, 2, x, 3, &out) == SEQTEST_OK);
    CHECK(std::fabs(out - 0.30685281944005469) < 1e-15);
    CHECK(seqtest_model_loglr(h.m, 2, x, 2, &out) != SEQTEST_OK);
    CHECK(seqtest_model_loglr(h.m, 2, nullptr, 3, &out) ==
          SEQTEST_ERR_INVALID_ARGUMENT);

    seqtest_channel_constants cc[3];
    REQUIRE(seqtest_model_constants(h.m, cc) == SEQTEST_OK);
    CHECK(std::fabs(cc[1].I - 0.3068528194400547) < 1e-12);
    CHECK(std::fabs(cc[1].I0 - 0.1931471805599453) < 1e-12);
    CHECK(std::fabs(cc[1].gamma - 0.5) < 1e-12);
    CHECK(std::fabs(cc[1].gamma0 - 0.794349724781086) < 1e-9);
    CHECK(std::fabs(cc[1].kappa0 - 0.24374845267053868) < 1e-9);
    CHECK(std::fabs(cc[1].L - 0.15342640972086755) < 1e-9);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::fabs(cc[i].L - cc[i].gamma * cc[i].I) < 1e-9);
        CHECK(std::fabs(cc[i].L - cc[i].gamma0 * cc[i].I0) < 1e-9);
    }

    int order[3], r = 0;
    REQUIRE(seqtest_model_ordering(h.m, order, &r) == SEQTEST_OK);
    CHECK(r == 1);
    CHECK(order[0] == 1);
    CHECK(order[1] == 2);
    CHECK(order[2] == 3);
}

TEST_CASE("design emission and analytic quantities") {
    ModelHandle h{make_model()};
    std::string js = make_design_json(h.m);
    CHECK(std::fabs(json_number(js, "logA") - 9.857714029019602) < 1e-9);
    CHECK(std::fabs(json_number(js, "logB") - 10.044455731407597) < 1e-9);

    CStr bad;
    CHECK(seqtest_emit_design_json(h.m, "bogus", "corrected", 1e-4, 1e-2,
                                   "formula", &bad.s) == SEQTEST_ERR_CONFIG);
    CHECK(seqtest_emit_design_json(h.m, "kl", "corrected", 2.0, 1e-2, "formula",
                                   &bad.s) == SEQTEST_ERR_CONFIG);

    double hi = 0, h0 = 0;
    REQUIRE(seqtest_sprt_ess(h.m, 3, 1e-4, 1e-2, &hi, &h0) == SEQTEST_OK);
    CHECK(std::fabs(hi - 11.217956) < 1e-5);
    CHECK(h0 > 0);

    double q1[3] = {1.151388008935955, 1.53518401191485, 2.302776017871692};
    double ce = 0;
    REQUIRE(seqtest_corrected_ess(h.m, q1, 3, 1e-4, 1, &ce) == SEQTEST_OK);
    // (|log alpha| + log sum q1 gamma + kappa_1 - log q1_1) / I_1
    double want = (9.210340371976182 + std::log(2.302775) + 0.5 -
                   std::log(q1[0])) / 0.09453489189183562;
    CHECK(std::fabs(ce - want) < 1e-4);

    double mm = 0;
    REQUIRE(seqtest_minimax_value(h.m, 1e-4, &mm) == SEQTEST_OK);
    CHECK(std::fabs(mm - 10.803914543551018) < 1e-9);

    // KL-proportional prior: every penalty equals log 3.
    double p[3] = {0.0725642273006198, 0.235537771208973, 0.6918980014904073};
    double c[3], jloss[3];
    REQUIRE(seqtest_performance_loss(h.m, p, 3, 1e-4, c, jloss) == SEQTEST_OK);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::fabs(c[i] - std::log(3.0)) < 1e-10);
        CHECK(jloss[i] > 0);
    }
    REQUIRE(seqtest_performance_loss(h.m, p, 3, 1e-4, nullptr, jloss) ==
            SEQTEST_OK);
}

TEST_CASE("incremental runner") {
    ModelHandle h{make_model()};
    std::string design = make_design_json(h.m);
    seqtest_runner* run = nullptr;
    REQUIRE(seqtest_runner_create(h.m, design.c_str(), "milrt", &run) ==
            SEQTEST_OK);

    double x[3] = {1.0, 1.0, 10.0};
    int stopped = 0, d = -1;
    long long T = 0;
    double eta = 0;
    int steps = 0;
    while (!stopped) {
        REQUIRE(seqtest_runner_step(run, x, 3, &stopped, &T, &d, &eta) ==
                SEQTEST_OK);
        ++steps;
        REQUIRE(steps < 100);
    }
    CHECK(d == 1);  // a strong channel-3 signal must reject
    CHECK(T == steps);
    CHECK(eta > 0);

    long long t = 0;
    double z[3], upper = 0, lower = 0;
    REQUIRE(seqtest_runner_state(run, &t, z, &upper, &lower) == SEQTEST_OK);
    CHECK(t == T);
    CHECK(upper >= json_number(design, "logB"));

    CHECK(seqtest_runner_step(run, x, 3, &stopped, &T, &d, &eta) ==
          SEQTEST_ERR_USAGE);
    seqtest_runner_free(run);

    seqtest_runner* bad = nullptr;
    CHECK(seqtest_runner_create(h.m, design.c_str(), "sprt:9", &bad) ==
          SEQTEST_ERR_CONFIG);
    CHECK(seqtest_runner_create(h.m, "{]", "milrt", &bad) == SEQTEST_ERR_CONFIG);
}

TEST_CASE("run_path is deterministic in the seed") {
    ModelHandle h{make_model()};
    std::string design = make_design_json(h.m, 1e-2);
    long long T1 = 0, T2 = 0, T3 = 0;
    int d1 = 0, d2 = 0, d3 = 0, trunc = 0;
    double eta = 0;
    REQUIRE(seqtest_run_path(h.m, design.c_str(), "wglrt", 2, 42, 1000000, &T1,
                             &d1, &eta, &trunc) == SEQTEST_OK);
    REQUIRE(seqtest_run_path(h.m, design.c_str(), "wglrt", 2, 42, 1000000, &T2,
                             &d2, &eta, &trunc) == SEQTEST_OK);
    REQUIRE(seqtest_run_path(h.m, design.c_str(), "wglrt", 2, 43, 1000000, &T3,
                             &d3, &eta, &trunc) == SEQTEST_OK);
    CHECK(T1 == T2);
    CHECK(d1 == d2);
    CHECK(trunc == 0);
    CHECK((T1 != T3 || d1 != d3));  // different seed, different path
    CHECK(seqtest_run_path(h.m, design.c_str(), "milrt", 7, 1, 100, &T1, &d1,
                           &eta, &trunc) == SEQTEST_ERR_CONFIG);
}

TEST_CASE("constants and approximation emitters") {
    ModelHandle h{make_model()};
    CStr csv;
    REQUIRE(seqtest_emit_constants_csv(h.m, &csv.s) == SEQTEST_OK);
    std::string text = csv.str();
    CHECK(text.rfind("# artifact_version=0.1.0 config_hash=", 0) == 0);
    CHECK(text.find("i,theta,I,I0,gamma,gamma0,kappa,kappa0,L\n") !=
          std::string::npos);
    // one metadata line + header + three rows
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);

    std::string design = make_design_json(h.m);
    CStr approx;
    REQUIRE(seqtest_emit_approximate_csv(h.m, design.c_str(), 1e-4, 1e-2,
                                         &approx.s) == SEQTEST_OK);
    std::string a = approx.str();
    CHECK(a.find("quantity,hypothesis,value,remainder_class") != std::string::npos);
    CHECK(a.find("minimax_value") != std::string::npos);
    CHECK(a.find("ess_test_corrected") != std::string::npos);
    CHECK(a.find("error_type2") != std::string::npos);
    CHECK(a.find("exact-bound") != std::string::npos);
    CHECK(a.find(",o1") != std::string::npos);
}

TEST_CASE("simulation emitter produces report, per-rep and trace artifacts") {
    ModelHandle h{make_model()};
    std::string design = make_design_json(h.m, 1e-2);
    CStr js, per_rep, trace;
    REQUIRE(seqtest_emit_simulate_json(h.m, design.c_str(), "milrt", "2", 500, 3,
                                       1000000, "direct", 1, &js.s, &per_rep.s,
                                       &trace.s) == SEQTEST_OK);
    std::string report = js.str();
    CHECK(json_number(report, "replications") == 500);
    CHECK(json_number(report, "ess_mean") > 0);
    CHECK(report.find("\"kl_accumulated\"") != std::string::npos);

    std::string pr = per_rep.str();
    CHECK(pr.find("rep,T,d\n") != std::string::npos);
    CHECK(std::count(pr.begin(), pr.end(), '\n') == 502);  // metadata+header+500

    std::string tr = trace.str();
    CHECK(tr.find("t,z_1,z_2,z_3,upper,lower\n") != std::string::npos);

    CStr is_js;
    REQUIRE(seqtest_emit_simulate_json(h.m, design.c_str(), "wglrt", "0", 2000, 4,
                                       1000000, "is", 1, &is_js.s, nullptr,
                                       nullptr) == SEQTEST_OK);
    double t1 = json_number(is_js.str(), "type1_estimate");
    CHECK(t1 > 0);
    CHECK(t1 < 0.05);

    CStr bad;
    CHECK(seqtest_emit_simulate_json(h.m, design.c_str(), "milrt", "weighted",
                                     500, 3, 1000000, "is", 1, &bad.s, nullptr,
                                     nullptr) == SEQTEST_ERR_CONFIG);
}

TEST_CASE("overshoot Monte Carlo through the C surface") {
    ModelHandle h{make_model()};
    double gh = 0, gse = 0, kh = 0, kse = 0;
    REQUIRE(seqtest_overshoot_mc(h.m, 2, 30.0, 5000, 0, 11, &gh, &gse, &kh,
                                 &kse) == SEQTEST_OK);
    CHECK(std::fabs(gh - 0.5) < 4 * gse);
    CHECK(std::fabs(kh - 1.0) < 4 * kse);
    REQUIRE(seqtest_overshoot_mc(h.m, 2, 30.0, 5000, 1, 11, &gh, &gse, &kh,
                                 &kse) == SEQTEST_OK);
    CHECK(std::fabs(kh - 0.24374845267053868) < 4 * kse);
    CHECK(seqtest_overshoot_mc(h.m, 5, 30.0, 5000, 0, 11, &gh, &gse, &kh,
                               &kse) != SEQTEST_OK);
}

TEST_CASE("reproduction emitter honours strict mode semantics") {
    CStr csv;
    // All printed-vs-computed mismatches in the constants table are
    // documented, so strict mode must succeed.
    REQUIRE(seqtest_emit_reproduce_csv("constants", 0, 1, 1, 1, &csv.s) ==
            SEQTEST_OK);
    std::string text = csv.str();
    CHECK(text.find("theta,quantity,computed,printed,match,expected_mismatch") !=
          std::string::npos);
    CHECK(text.find("0.584") != std::string::npos);  // the documented outlier

    CStr bad;
    CHECK(seqtest_emit_reproduce_csv("nonsense", 0, 1, 1, 0, &bad.s) ==
          SEQTEST_ERR_CONFIG);
}
